//! Classification and reduction of bipartite graphs ahead of the solver.
//!
//! A graph is only hard if it is connected, has minimum degree at least 2 and
//! at least 4 vertices on each part (the core class). Everything else reduces:
//! disconnected graphs split into components, pendant vertices strip off (the
//! removed edge is recolorable as `max(palette(support)) + 1`), and graphs
//! with a part of at most 3 vertices stay solvable directly. [`reduce`]
//! records the steps; [`reconstruct`] replays them backwards to lift terminal
//! colorings to the original graph.

use crate::coloring::{ColoringError, EdgeColoring};
use crate::graph::{connected_components, BipartiteGraph, BVertex, Side};
use crate::solver::{normalize, SolveError};
use crate::verifier;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("no coloring supplied for terminal problem {id}")]
    MissingTerminal { id: usize },
    #[error("invalid coloring for problem {id}: {detail}")]
    InvalidColoring { id: usize, detail: String },
    #[error("invalid input coloring: {detail}")]
    InvalidInput { detail: String },
    #[error(transparent)]
    Shape(#[from] ColoringError),
    #[error(transparent)]
    Normalize(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Connected, minimum degree >= 2, both parts with >= 4 vertices.
    CoreC,
    /// Has a degree-1 vertex; the lowest-index one (left part first) with its
    /// unique neighbor.
    Pendant { leaf: BVertex, support: BVertex },
    Disconnected { components: usize },
    /// Connected, no pendants, but one part has at most 3 vertices.
    SmallPart { min_part: usize },
}

pub fn classify(g: &BipartiteGraph) -> Classification {
    let comps = connected_components(g);
    if comps.len() >= 2 {
        return Classification::Disconnected {
            components: comps.len(),
        };
    }
    let (left_deg, right_deg) = g.degrees();
    let leaf = left_deg
        .iter()
        .enumerate()
        .find(|&(_, &d)| d == 1)
        .map(|(i, _)| BVertex::left(i))
        .or_else(|| {
            right_deg
                .iter()
                .enumerate()
                .find(|&(_, &d)| d == 1)
                .map(|(j, _)| BVertex::right(j))
        });
    if let Some(leaf) = leaf {
        let support = match leaf.side {
            Side::Left => BVertex::right(g.neighbors(leaf)[0]),
            Side::Right => BVertex::left(g.neighbors(leaf)[0]),
        };
        return Classification::Pendant { leaf, support };
    }
    let min_part = g.n_left().min(g.n_right());
    if min_part <= 3 {
        return Classification::SmallPart { min_part };
    }
    Classification::CoreC
}

pub type ProblemId = usize;

#[derive(Debug, Clone)]
pub struct SplitPart {
    pub id: ProblemId,
    /// Part left index -> parent left index.
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum ReductionStep {
    RemovedPendant {
        from: ProblemId,
        /// Position of the removed leaf, in `from` coordinates.
        leaf: BVertex,
        /// The leaf's neighbor, in `from` coordinates.
        support: BVertex,
        to: ProblemId,
    },
    SplitComponents {
        from: ProblemId,
        parts: Vec<SplitPart>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct TerminalProblem {
    pub id: ProblemId,
    pub classification: Classification,
}

/// The full record of a reduction: an arena of subproblems (problem 0 is the
/// input), the steps that produced them, the terminal subproblems that need a
/// solver, and the edgeless residues that do not.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    problems: Vec<BipartiteGraph>,
    steps: Vec<ReductionStep>,
    terminals: Vec<TerminalProblem>,
    residues: Vec<ProblemId>,
}

impl ReductionTrace {
    pub fn input(&self) -> &BipartiteGraph {
        &self.problems[0]
    }

    pub fn problem(&self, id: ProblemId) -> &BipartiteGraph {
        &self.problems[id]
    }

    pub fn steps(&self) -> &[ReductionStep] {
        &self.steps
    }

    pub fn terminals(&self) -> &[TerminalProblem] {
        &self.terminals
    }

    pub fn residues(&self) -> &[ProblemId] {
        &self.residues
    }

    /// True when the input graph is itself the single terminal (no steps).
    pub fn is_trivial(&self) -> bool {
        self.steps.is_empty() && self.terminals.len() == 1 && self.terminals[0].id == 0
    }
}

fn remove_vertex(g: &BipartiteGraph, v: BVertex) -> BipartiteGraph {
    let shift = |idx: usize, removed: usize| if idx > removed { idx - 1 } else { idx };
    let edges = g
        .edges()
        .iter()
        .filter(|&&(x, y)| match v.side {
            Side::Left => x != v.index,
            Side::Right => y != v.index,
        })
        .map(|&(x, y)| match v.side {
            Side::Left => (shift(x, v.index), y),
            Side::Right => (x, shift(y, v.index)),
        })
        .collect();
    match v.side {
        Side::Left => BipartiteGraph::new(g.n_left() - 1, g.n_right(), edges),
        Side::Right => BipartiteGraph::new(g.n_left(), g.n_right() - 1, edges),
    }
}

/// Splits components and strips pendants until every open subproblem is a
/// core or small-part terminal, or an edgeless residue.
pub fn reduce(g: &BipartiteGraph) -> ReductionTrace {
    let mut trace = ReductionTrace {
        problems: vec![g.clone()],
        steps: Vec::new(),
        terminals: Vec::new(),
        residues: Vec::new(),
    };
    let mut queue = vec![0];
    let mut head = 0;
    while head < queue.len() {
        let p = queue[head];
        head += 1;
        let graph = trace.problems[p].clone();
        if graph.edge_count() == 0 {
            trace.residues.push(p);
            continue;
        }
        match classify(&graph) {
            Classification::Disconnected { .. } => {
                let parts = connected_components(&graph)
                    .into_iter()
                    .map(|comp| {
                        let id = trace.problems.len();
                        trace.problems.push(comp.graph);
                        queue.push(id);
                        SplitPart {
                            id,
                            left_map: comp.left_map,
                            right_map: comp.right_map,
                        }
                    })
                    .collect();
                trace.steps.push(ReductionStep::SplitComponents { from: p, parts });
            }
            Classification::Pendant { leaf, support } => {
                let id = trace.problems.len();
                trace.problems.push(remove_vertex(&graph, leaf));
                queue.push(id);
                trace.steps.push(ReductionStep::RemovedPendant {
                    from: p,
                    leaf,
                    support,
                    to: id,
                });
            }
            classification => {
                trace.terminals.push(TerminalProblem {
                    id: p,
                    classification,
                });
            }
        }
    }
    trace
}

fn check_proper_interval(
    g: &BipartiteGraph,
    coloring: &EdgeColoring,
) -> Result<(), String> {
    let report = verifier::verify(g, coloring).map_err(|e| e.to_string())?;
    if !report.support_ok {
        return Err("support does not match the graph".to_string());
    }
    if !report.proper {
        return Err("coloring is not proper".to_string());
    }
    if !report.intervals_ok {
        return Err("a palette is not an interval".to_string());
    }
    Ok(())
}

/// Re-attaches a pendant vertex to a colored graph.
///
/// `reduced` is the graph without the leaf; `support` addresses the leaf's
/// neighbor in `reduced`; `leaf` gives the side and index the leaf occupies in
/// the extended graph (indices at or above it shift up). The new edge takes
/// `max(palette(support)) + 1`, or color 1 when the support is isolated.
pub fn extend_pendant(
    reduced: &BipartiteGraph,
    coloring: &EdgeColoring,
    support: BVertex,
    leaf: BVertex,
) -> Result<(BipartiteGraph, EdgeColoring), ReductionError> {
    check_proper_interval(reduced, coloring)
        .map_err(|detail| ReductionError::InvalidInput { detail })?;
    let support_palette = verifier::palette(reduced, coloring, support)?;
    let new_color = support_palette.last().copied().unwrap_or(0) + 1;

    let unshift = |idx: usize| if idx >= leaf.index { idx + 1 } else { idx };
    let mut edges: Vec<(usize, usize)> = reduced
        .edges()
        .iter()
        .map(|&(x, y)| match leaf.side {
            Side::Left => (unshift(x), y),
            Side::Right => (x, unshift(y)),
        })
        .collect();
    let support_ext = match (leaf.side, support.side) {
        (Side::Left, Side::Left) | (Side::Right, Side::Right) => unshift(support.index),
        _ => support.index,
    };
    let new_edge = match leaf.side {
        Side::Left => (leaf.index, support_ext),
        Side::Right => (support_ext, leaf.index),
    };
    edges.push(new_edge);
    let extended = match leaf.side {
        Side::Left => BipartiteGraph::new(reduced.n_left() + 1, reduced.n_right(), edges),
        Side::Right => BipartiteGraph::new(reduced.n_left(), reduced.n_right() + 1, edges),
    };

    let mut out = EdgeColoring::empty(&extended);
    for (x, y, c) in coloring.colored_cells() {
        let (ex, ey) = match leaf.side {
            Side::Left => (unshift(x), y),
            Side::Right => (x, unshift(y)),
        };
        out.set(ex, ey, c);
    }
    out.set(new_edge.0, new_edge.1, new_color);
    Ok((extended, out))
}

/// Replays a trace backwards, lifting terminal colorings to a normalized
/// coloring of the original graph. Residues contribute empty colorings.
pub fn reconstruct(
    trace: &ReductionTrace,
    terminal_colorings: &HashMap<ProblemId, EdgeColoring>,
) -> Result<EdgeColoring, ReductionError> {
    let mut colorings: HashMap<ProblemId, EdgeColoring> = HashMap::new();
    for &id in trace.residues() {
        colorings.insert(id, EdgeColoring::empty(trace.problem(id)));
    }
    for terminal in trace.terminals() {
        let coloring = terminal_colorings
            .get(&terminal.id)
            .ok_or(ReductionError::MissingTerminal { id: terminal.id })?;
        coloring.matches_shape(trace.problem(terminal.id))?;
        check_proper_interval(trace.problem(terminal.id), coloring).map_err(|detail| {
            ReductionError::InvalidColoring {
                id: terminal.id,
                detail,
            }
        })?;
        colorings.insert(terminal.id, coloring.clone());
    }

    for step in trace.steps().iter().rev() {
        match step {
            ReductionStep::RemovedPendant {
                from,
                leaf,
                support,
                to,
            } => {
                let inner = colorings
                    .remove(to)
                    .ok_or(ReductionError::MissingTerminal { id: *to })?;
                // support in `to` coordinates: same side indices above the
                // leaf shift down (never in a bipartite graph, but kept exact)
                let support_reduced = if support.side == leaf.side && support.index > leaf.index {
                    BVertex {
                        side: support.side,
                        index: support.index - 1,
                    }
                } else {
                    *support
                };
                let (extended, coloring) =
                    extend_pendant(trace.problem(*to), &inner, support_reduced, *leaf)?;
                debug_assert_eq!(&extended, trace.problem(*from));
                colorings.insert(*from, coloring);
            }
            ReductionStep::SplitComponents { from, parts } => {
                let mut merged = EdgeColoring::empty(trace.problem(*from));
                for part in parts {
                    let coloring = colorings
                        .remove(&part.id)
                        .ok_or(ReductionError::MissingTerminal { id: part.id })?;
                    for (x, y, c) in coloring.colored_cells() {
                        merged.set(part.left_map[x], part.right_map[y], c);
                    }
                }
                colorings.insert(*from, merged);
            }
        }
    }

    let full = colorings
        .remove(&0)
        .ok_or(ReductionError::MissingTerminal { id: 0 })?;
    Ok(normalize(&full, trace.input())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(m: usize, n: usize) -> BipartiteGraph {
        let edges = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        BipartiteGraph::new(m, n, edges)
    }

    fn c8() -> BipartiteGraph {
        // even cycle on 8 vertices as (4,4): x_i - y_i - x_{i+1}
        let mut edges = Vec::new();
        for i in 0..4 {
            edges.push((i, i));
            edges.push(((i + 1) % 4, i));
        }
        BipartiteGraph::new(4, 4, edges)
    }

    #[test]
    fn k44_is_core() {
        assert_eq!(classify(&k(4, 4)), Classification::CoreC);
    }

    #[test]
    fn c8_is_core() {
        assert_eq!(classify(&c8()), Classification::CoreC);
    }

    #[test]
    fn star_is_pendant() {
        let g = k(1, 5);
        assert_eq!(
            classify(&g),
            Classification::Pendant {
                leaf: BVertex::right(0),
                support: BVertex::left(0),
            }
        );
    }

    #[test]
    fn small_part_with_min_degree_two() {
        // (3,7), every right vertex tied to two left vertices: connected,
        // min degree 2
        let edges = (0..7)
            .flat_map(|j| [(j % 3, j), ((j + 1) % 3, j)])
            .collect::<Vec<_>>();
        let g = BipartiteGraph::new(3, 7, edges);
        assert_eq!(classify(&g), Classification::SmallPart { min_part: 3 });
    }

    #[test]
    fn disconnected_before_pendant() {
        let mut edges = vec![(0, 0)];
        edges.extend((0..4).flat_map(|i| (1..6).map(move |j| (i + 1, j))));
        let g = BipartiteGraph::new(5, 6, edges); // K_2 + K_{4,5}
        assert_eq!(classify(&g), Classification::Disconnected { components: 2 });
        let trace = reduce(&g);
        assert_eq!(trace.terminals().len(), 1);
        assert_eq!(
            trace.terminals()[0].classification,
            Classification::CoreC
        );
        assert_eq!(trace.problem(trace.terminals()[0].id), &k(4, 5));
        // the K_2 part strips its pendant and leaves residues
        assert!(!trace.residues().is_empty());
    }

    #[test]
    fn tree_reduces_to_nothing() {
        // a 7-vertex tree as (3,4)
        let g = BipartiteGraph::new(3, 4, vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3)]);
        let trace = reduce(&g);
        assert!(trace.terminals().is_empty());
        let coloring = reconstruct(&trace, &HashMap::new()).unwrap();
        assert!(verifier::verify(&g, &coloring)
            .unwrap()
            .is_valid_per_component());
    }

    #[test]
    fn c8_reduces_to_itself() {
        let trace = reduce(&c8());
        assert!(trace.is_trivial());
        assert_eq!(trace.terminals()[0].classification, Classification::CoreC);
    }

    #[test]
    fn extend_pendant_appends_next_color() {
        // K_{1,3} colored 1,2,3; attach a new right leaf to the center
        let g = k(1, 3);
        let mut c = EdgeColoring::empty(&g);
        c.set(0, 0, 1);
        c.set(0, 1, 2);
        c.set(0, 2, 3);
        let (ext, ec) =
            extend_pendant(&g, &c, BVertex::left(0), BVertex::right(3)).unwrap();
        assert_eq!(ext, k(1, 4));
        assert_eq!(ec.get(0, 3), 4);
    }

    #[test]
    fn extend_pendant_to_isolated_support() {
        let g = BipartiteGraph::new(1, 0, vec![]);
        let c = EdgeColoring::empty(&g);
        let (ext, ec) = extend_pendant(&g, &c, BVertex::left(0), BVertex::right(0)).unwrap();
        assert_eq!(ext, k(1, 1));
        assert_eq!(ec.get(0, 0), 1);
    }

    #[test]
    fn extend_p2_to_p3() {
        let g = k(1, 1);
        let mut c = EdgeColoring::empty(&g);
        c.set(0, 0, 1);
        let (ext, ec) = extend_pendant(&g, &c, BVertex::left(0), BVertex::right(1)).unwrap();
        assert_eq!(ext, k(1, 2));
        assert_eq!(ec.get(0, 1), 2);
        assert_eq!(
            verifier::palette(&ext, &ec, BVertex::left(0)).unwrap(),
            vec![1, 2]
        );
    }

    #[test]
    fn extend_pendant_rejects_invalid_coloring() {
        let g = k(1, 2);
        let mut c = EdgeColoring::empty(&g);
        c.set(0, 0, 1);
        c.set(0, 1, 1);
        assert!(matches!(
            extend_pendant(&g, &c, BVertex::left(0), BVertex::right(2)),
            Err(ReductionError::InvalidInput { .. })
        ));
    }

    #[test]
    fn reconstruct_requires_all_terminals() {
        let trace = reduce(&k(4, 4));
        assert!(matches!(
            reconstruct(&trace, &HashMap::new()),
            Err(ReductionError::MissingTerminal { id: 0 })
        ));
    }

    #[test]
    fn reconstruct_identity_lift() {
        use crate::solver::{solve, SolveOutcome, SolveParams};
        let g = k(4, 4);
        let trace = reduce(&g);
        assert!(trace.is_trivial());
        let SolveOutcome::Colorable { coloring, .. } =
            solve(&g, &SolveParams::defaults_for(&g, 1)).unwrap()
        else {
            panic!()
        };
        let mut terminals = HashMap::new();
        terminals.insert(0, coloring.clone());
        assert_eq!(reconstruct(&trace, &terminals).unwrap(), coloring);
    }

    #[test]
    fn reconstruct_merges_components() {
        use crate::solver::{solve, SolveOutcome, SolveParams};
        // K_{2,2} + K_{1,2} side by side
        let g = BipartiteGraph::new(
            3,
            4,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3)],
        );
        let trace = reduce(&g);
        let mut terminals = HashMap::new();
        for term in trace.terminals() {
            let tg = trace.problem(term.id);
            let SolveOutcome::Colorable { coloring, .. } =
                solve(tg, &SolveParams::defaults_for(tg, 2)).unwrap()
            else {
                panic!()
            };
            terminals.insert(term.id, coloring);
        }
        let coloring = reconstruct(&trace, &terminals).unwrap();
        assert!(verifier::verify(&g, &coloring)
            .unwrap()
            .is_valid_per_component());
    }
}
