//! Reference implementation by exhaustive enumeration.
//!
//! Enumerates every proper edge coloring up to a color bound and tests the
//! interval definition directly at each leaf. No window arithmetic, no cell
//! ordering heuristics, no shared code with the solver: this is the
//! cross-check that the fast path is measured against, usable only on graphs
//! with very few edges.

use crate::coloring::EdgeColoring;
use crate::graph::{connected_components, BipartiteGraph};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSummary {
    /// Some proper coloring with interval palettes exists within the bound.
    pub colorable: bool,
    /// Values of t achieved by valid colorings, under the convention that
    /// every component's colors start at 1 (t is the largest component span).
    pub feasible_t: BTreeSet<u32>,
    /// Number of valid colorings found (counting every labeled coloring).
    pub valid_colorings: u64,
}

/// Is `coloring` an interval t-coloring of `g` by the definition: colors
/// exactly on the edges, proper, consecutive palettes, and all of 1..=t used.
pub fn is_valid_interval_coloring(g: &BipartiteGraph, coloring: &EdgeColoring) -> bool {
    if coloring.matches_shape(g).is_err() {
        return false;
    }
    for &(x, y) in g.edges() {
        if coloring.get(x, y) == 0 {
            return false;
        }
    }
    let mut used: BTreeSet<u32> = BTreeSet::new();
    for (x, y, c) in coloring.colored_cells() {
        if !g.has_edge(x, y) {
            return false;
        }
        used.insert(c);
    }
    if !palettes_proper_and_interval(g, coloring) {
        return false;
    }
    match used.last() {
        None => true, // edgeless: t = 0, vacuously surjective
        Some(&t) => used.len() as u32 == t && used.contains(&1),
    }
}

fn palettes_proper_and_interval(g: &BipartiteGraph, coloring: &EdgeColoring) -> bool {
    for i in 0..g.n_left() {
        let mut colors: Vec<u32> = (0..g.n_right())
            .filter(|&j| g.has_edge(i, j))
            .map(|j| coloring.get(i, j))
            .collect();
        if !sorted_distinct_consecutive(&mut colors) {
            return false;
        }
    }
    for j in 0..g.n_right() {
        let mut colors: Vec<u32> = (0..g.n_left())
            .filter(|&i| g.has_edge(i, j))
            .map(|i| coloring.get(i, j))
            .collect();
        if !sorted_distinct_consecutive(&mut colors) {
            return false;
        }
    }
    true
}

fn sorted_distinct_consecutive(colors: &mut [u32]) -> bool {
    colors.sort_unstable();
    colors.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Enumerates all proper edge colorings of `g` with colors `1..=max_color`,
/// recording which ones satisfy the interval definition and which t values
/// they realize. Exponential; intended for graphs with at most ~8 edges.
pub fn enumerate_colorings(g: &BipartiteGraph, max_color: u32) -> OracleSummary {
    let edges: Vec<(usize, usize)> = g.edges().to_vec();
    let comps = connected_components(g);
    let mut edge_comp = vec![0usize; edges.len()];
    for (id, comp) in comps.iter().enumerate() {
        for &(x, y) in comp.graph.edges() {
            let parent = (comp.left_map[x], comp.right_map[y]);
            let k = edges.binary_search(&parent).expect("component edge");
            edge_comp[k] = id;
        }
    }

    let mut summary = OracleSummary {
        colorable: false,
        feasible_t: BTreeSet::new(),
        valid_colorings: 0,
    };
    if edges.is_empty() {
        summary.colorable = true;
        summary.valid_colorings = 1;
        return summary;
    }

    let mut assignment = vec![0u32; edges.len()];
    let mut row_used = vec![0u64; g.n_left()];
    let mut col_used = vec![0u64; g.n_right()];

    fn rec(
        g: &BipartiteGraph,
        edges: &[(usize, usize)],
        edge_comp: &[usize],
        n_comps: usize,
        max_color: u32,
        k: usize,
        assignment: &mut Vec<u32>,
        row_used: &mut Vec<u64>,
        col_used: &mut Vec<u64>,
        summary: &mut OracleSummary,
    ) {
        if k == edges.len() {
            let mut coloring = EdgeColoring::empty(g);
            for (idx, &(x, y)) in edges.iter().enumerate() {
                coloring.set(x, y, assignment[idx]);
            }
            if !palettes_proper_and_interval(g, &coloring) {
                return;
            }
            // per-component normalization: every component must use exactly
            // min..=max contiguously for the shifted coloring to be valid
            let mut comp_used: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n_comps];
            for (idx, &c) in assignment.iter().enumerate() {
                comp_used[edge_comp[idx]].insert(c);
            }
            let mut max_span = 0u32;
            for used in comp_used.iter().filter(|u| !u.is_empty()) {
                let (lo, hi) = (*used.first().unwrap(), *used.last().unwrap());
                let span = hi - lo + 1;
                if used.len() as u32 != span {
                    return; // gap in a component's colors
                }
                max_span = max_span.max(span);
            }
            summary.colorable = true;
            summary.valid_colorings += 1;
            summary.feasible_t.insert(max_span);
            return;
        }
        let (x, y) = edges[k];
        for c in 1..=max_color {
            let bit = 1u64 << c;
            if row_used[x] & bit != 0 || col_used[y] & bit != 0 {
                continue;
            }
            row_used[x] |= bit;
            col_used[y] |= bit;
            assignment[k] = c;
            rec(
                g, edges, edge_comp, n_comps, max_color, k + 1, assignment, row_used, col_used,
                summary,
            );
            row_used[x] &= !bit;
            col_used[y] &= !bit;
        }
    }

    rec(
        g,
        &edges,
        &edge_comp,
        comps.len(),
        max_color,
        0,
        &mut assignment,
        &mut row_used,
        &mut col_used,
        &mut summary,
    );
    summary
}
