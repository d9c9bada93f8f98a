//! Canonical keys for bipartite graphs, exact at small sizes.
//!
//! The key is the lexicographically minimal graph6 encoding of the
//! biadjacency matrix over all row and column permutations, prefixed with the
//! part sizes (two typed graphs with different part sizes never collide, even
//! when edgeless). When the parts have equal size the side swap is also
//! minimized over. Minimization enumerates permutations of the smaller part
//! only: for a fixed arrangement of one side, sorting the other side's
//! bit vectors is optimal, so the search stays exact at `min(a,b)!` cost.

use crate::graph::BipartiteGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on `n_left + n_right` for key computation.
pub const DEFAULT_KEY_VERTEX_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("graph has {vertices} vertices; canonical keys are limited to {limit}")]
    SizeLimitExceeded { vertices: usize, limit: usize },
}

/// Permutation-invariant identifier of a bipartite graph's isomorphism class
/// (fixed bipartition; side swap allowed only for equal part sizes).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(pub String);

impl std::fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A canonical relabeling of a bipartite graph.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// The canonically labeled graph (what `key` encodes).
    pub graph: BipartiteGraph,
    row_pos: Vec<usize>,
    col_pos: Vec<usize>,
    swapped: bool,
}

impl CanonicalForm {
    /// True when the canonical graph's left part is the original right part
    /// (possible only for equal part sizes).
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Maps an original cell `(x, y)` to its canonical matrix position.
    pub fn map_cell(&self, x: usize, y: usize) -> (usize, usize) {
        if self.swapped {
            (self.row_pos[y], self.col_pos[x])
        } else {
            (self.row_pos[x], self.col_pos[y])
        }
    }
}

/// One canonicalization candidate: the matrix content after permuting rows
/// and sorting columns, compared as the sequence of column bit vectors.
struct Candidate {
    col_keys: Vec<u64>,
    row_perm: Vec<usize>,
    col_order: Vec<usize>,
}

/// Minimizes the column-key sequence over all row permutations, sorting
/// columns for each. `rows[i]` has bit `j` set iff cell `(i, j)` is an edge.
fn best_under_row_perms(rows: &[u64], n_cols: usize) -> Candidate {
    let r = rows.len();
    let mut perm: Vec<usize> = (0..r).collect();
    let mut best: Option<Candidate> = None;

    let mut consider = |perm: &[usize]| {
        let mut keyed: Vec<(u64, usize)> = (0..n_cols)
            .map(|j| {
                let mut key = 0u64;
                for (pos, &orig) in perm.iter().enumerate() {
                    if rows[orig] >> j & 1 != 0 {
                        key |= 1 << (r - 1 - pos);
                    }
                }
                (key, j)
            })
            .collect();
        keyed.sort_unstable();
        let col_keys: Vec<u64> = keyed.iter().map(|&(k, _)| k).collect();
        if best.as_ref().is_none_or(|b| col_keys < b.col_keys) {
            best = Some(Candidate {
                col_keys,
                row_perm: perm.to_vec(),
                col_order: keyed.into_iter().map(|(_, j)| j).collect(),
            });
        }
    };

    // Heap's algorithm.
    consider(&perm);
    let mut c = vec![0usize; r];
    let mut i = 0;
    while i < r {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            consider(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best.expect("at least the identity permutation is considered")
}

fn row_masks(g: &BipartiteGraph) -> Vec<u64> {
    let mut rows = vec![0u64; g.n_left()];
    for &(x, y) in g.edges() {
        rows[x] |= 1 << y;
    }
    rows
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (pos, &orig) in perm.iter().enumerate() {
        inv[orig] = pos;
    }
    inv
}

/// Rebuilds the canonical graph from a candidate produced on an `r x c` matrix.
fn candidate_graph(cand: &Candidate, r: usize, c: usize) -> BipartiteGraph {
    let mut edges = Vec::new();
    for (j, &key) in cand.col_keys.iter().enumerate() {
        for i in 0..r {
            if key >> (r - 1 - i) & 1 != 0 {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph::new(r, c, edges)
}

pub fn canonical_form(g: &BipartiteGraph) -> Result<CanonicalForm, KeyError> {
    canonical_form_with_limit(g, DEFAULT_KEY_VERTEX_LIMIT)
}

pub fn canonical_form_with_limit(
    g: &BipartiteGraph,
    limit: usize,
) -> Result<CanonicalForm, KeyError> {
    let vertices = g.vertex_count();
    if vertices > limit {
        return Err(KeyError::SizeLimitExceeded { vertices, limit });
    }
    let (a, b) = (g.n_left(), g.n_right());

    // Permute whichever side is smaller; the other side is sorted per
    // permutation. For equal parts both orientations compete (side swap).
    let straight = if a <= b {
        Some(best_under_row_perms(&row_masks(g), b))
    } else {
        None
    };
    let flipped = if b <= a {
        Some(best_under_row_perms(&row_masks(&g.transposed()), a))
    } else {
        None
    };

    let (cand, use_flipped) = match (straight, flipped) {
        (Some(s), None) => (s, false),
        (None, Some(f)) => (f, true),
        (Some(s), Some(f)) => {
            if f.col_keys < s.col_keys {
                (f, true)
            } else {
                (s, false)
            }
        }
        (None, None) => unreachable!(),
    };

    let form = if !use_flipped {
        // Canonical row i <- original left row_perm[i]; col j <- col_order[j].
        CanonicalForm {
            key: CanonicalKey(String::new()),
            graph: candidate_graph(&cand, a, b),
            row_pos: inverse(&cand.row_perm),
            col_pos: inverse(&cand.col_order),
            swapped: false,
        }
    } else if a == b {
        // Canonical orientation is the transpose: left part = original right.
        CanonicalForm {
            key: CanonicalKey(String::new()),
            graph: candidate_graph(&cand, b, a),
            row_pos: inverse(&cand.row_perm),
            col_pos: inverse(&cand.col_order),
            swapped: true,
        }
    } else {
        // a > b: minimized on the transpose for cost, then transposed back so
        // the canonical graph keeps the original orientation.
        CanonicalForm {
            key: CanonicalKey(String::new()),
            graph: candidate_graph(&cand, b, a).transposed(),
            row_pos: inverse(&cand.col_order),
            col_pos: inverse(&cand.row_perm),
            swapped: false,
        }
    };

    let g6 = form
        .graph
        .to_graph6()
        .expect("key size limit keeps graphs under the graph6 bound");
    Ok(CanonicalForm {
        key: CanonicalKey(format!(
            "{}x{}:{}",
            form.graph.n_left(),
            form.graph.n_right(),
            g6
        )),
        ..form
    })
}

/// The spec'd operation: just the key.
pub fn canonical_key(g: &BipartiteGraph) -> Result<CanonicalKey, KeyError> {
    Ok(canonical_form(g)?.key)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k22() -> BipartiteGraph {
        BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)])
    }

    #[test]
    fn k22_relabelings_share_key() {
        let base = canonical_key(&k22()).unwrap();
        // all relabelings of K_{2,2} are K_{2,2} itself
        assert_eq!(canonical_key(&k22()).unwrap(), base);
    }

    #[test]
    fn path_and_reversal_share_key() {
        // P_4 as (2,2): x0-y0, y0-x1, x1-y1
        let p = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 0), (1, 1)]);
        let reversed = BipartiteGraph::new(2, 2, vec![(1, 1), (0, 1), (0, 0)]);
        assert_eq!(
            canonical_key(&p).unwrap(),
            canonical_key(&reversed).unwrap()
        );
        // and under a side swap (equal parts)
        assert_eq!(
            canonical_key(&p).unwrap(),
            canonical_key(&p.transposed()).unwrap()
        );
    }

    #[test]
    fn two_connected_22_classes_have_distinct_keys() {
        let p4 = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 0), (1, 1)]);
        let c4 = k22();
        assert_ne!(canonical_key(&p4).unwrap(), canonical_key(&c4).unwrap());
    }

    #[test]
    fn edgeless_different_splits_have_distinct_keys() {
        let a = BipartiteGraph::new(1, 3, vec![]);
        let b = BipartiteGraph::new(2, 2, vec![]);
        assert_ne!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
    }

    #[test]
    fn unequal_parts_are_not_swapped() {
        let star12 = BipartiteGraph::new(1, 2, vec![(0, 0), (0, 1)]);
        let star21 = BipartiteGraph::new(2, 1, vec![(0, 0), (1, 0)]);
        assert_ne!(
            canonical_key(&star12).unwrap(),
            canonical_key(&star21).unwrap()
        );
    }

    #[test]
    fn map_cell_is_consistent_with_canonical_graph() {
        let g = BipartiteGraph::new(3, 2, vec![(0, 0), (1, 0), (1, 1), (2, 1)]);
        let form = canonical_form(&g).unwrap();
        for &(x, y) in g.edges() {
            let (i, j) = form.map_cell(x, y);
            assert!(form.graph.has_edge(i, j), "({x},{y}) -> ({i},{j})");
        }
        assert_eq!(form.graph.edge_count(), g.edge_count());
    }

    #[test]
    fn size_limit_enforced() {
        let g = BipartiteGraph::new(9, 9, vec![]);
        assert_eq!(
            canonical_key(&g),
            Err(KeyError::SizeLimitExceeded {
                vertices: 18,
                limit: 16
            })
        );
    }
}
