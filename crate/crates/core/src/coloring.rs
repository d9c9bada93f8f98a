//! Edge colorings as biadjacency-shaped color matrices.

use crate::graph::BipartiteGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("coloring shape {rows}x{cols} does not match expected {want_rows}x{want_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("entry count {len} does not equal {rows}x{cols}")]
    BadLength { len: usize, rows: usize, cols: usize },
}

/// An `n_left x n_right` matrix of colors. Entry `(i, j) >= 1` is the color of
/// edge `(i, j)`; `0` marks the absence of a color (and, for a well-formed
/// coloring of a graph, the absence of the edge).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    n_left: usize,
    n_right: usize,
    entries: Vec<u32>,
}

impl EdgeColoring {
    /// An all-zero matrix shaped like `g`'s biadjacency matrix.
    pub fn empty(g: &BipartiteGraph) -> Self {
        EdgeColoring {
            n_left: g.n_left(),
            n_right: g.n_right(),
            entries: vec![0; g.n_left() * g.n_right()],
        }
    }

    pub fn from_rows(n_left: usize, n_right: usize, entries: Vec<u32>) -> Result<Self, ColoringError> {
        if entries.len() != n_left * n_right {
            return Err(ColoringError::BadLength {
                len: entries.len(),
                rows: n_left,
                cols: n_right,
            });
        }
        Ok(EdgeColoring {
            n_left,
            n_right,
            entries,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.entries[x * self.n_right + y]
    }

    pub fn set(&mut self, x: usize, y: usize, color: u32) {
        self.entries[x * self.n_right + y] = color;
    }

    /// Row-major entries, 0 for non-edges.
    pub fn rows(&self) -> &[u32] {
        &self.entries
    }

    pub fn matches_shape(&self, g: &BipartiteGraph) -> Result<(), ColoringError> {
        if self.n_left != g.n_left() || self.n_right != g.n_right() {
            return Err(ColoringError::ShapeMismatch {
                rows: self.n_left,
                cols: self.n_right,
                want_rows: g.n_left(),
                want_cols: g.n_right(),
            });
        }
        Ok(())
    }

    /// Largest color present, 0 when the matrix has no colored cells.
    pub fn max_color(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    pub fn colored_cells(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let cols = self.n_right;
        self.entries
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(move |(k, &c)| (k / cols, k % cols, c))
    }
}

impl std::fmt::Display for EdgeColoring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n_left {
            for j in 0..self.n_right {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
