//! Independent validity checking of interval colorings.
//!
//! This module deliberately shares no color-constraint logic with the solver:
//! it re-derives palettes from the coloring matrix and checks the definition
//! directly (properness, per-vertex consecutive palettes, surjectivity). Keep
//! it that way; it is the second route that catches solver bugs and corrupted
//! worker output.

use crate::coloring::{ColoringError, EdgeColoring};
use crate::graph::{connected_components, BipartiteGraph, BVertex, Side};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Colored non-edge or uncolored edge.
    Support,
    /// Duplicate color at a vertex.
    Proper,
    /// Palette is not a consecutive run.
    Interval,
    /// Colors used are not exactly 1..=t.
    Surjective,
    /// A component's colors are not exactly 1..=t_component.
    ComponentSurjective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationSite {
    Vertex(BVertex),
    Cell(usize, usize),
    Component(usize),
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub site: ViolationSite,
    pub detail: String,
}

/// Outcome of [`verify`]. All violations are enumerated, not just the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub support_ok: bool,
    pub proper: bool,
    pub intervals_ok: bool,
    /// Colors used over the whole graph are exactly 1..=t.
    pub surjective: bool,
    /// Every component's colors are exactly 1..=t_c (the normalized
    /// convention for disconnected graphs).
    pub per_component_surjective: bool,
    /// Largest color used anywhere (0 for an uncolored matrix).
    pub t: u32,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    /// Interval t-coloring per the global definition.
    pub fn is_valid(&self) -> bool {
        self.support_ok && self.proper && self.intervals_ok && self.surjective
    }

    /// Additionally requires each component to start at color 1.
    pub fn is_valid_per_component(&self) -> bool {
        self.is_valid() && self.per_component_surjective
    }
}

/// The multiset of colors on edges incident to `v`, sorted ascending.
/// Duplicates are preserved (their presence means the coloring is improper).
pub fn palette(
    g: &BipartiteGraph,
    coloring: &EdgeColoring,
    v: BVertex,
) -> Result<Vec<u32>, ColoringError> {
    coloring.matches_shape(g)?;
    let mut colors: Vec<u32> = match v.side {
        Side::Left => (0..g.n_right())
            .filter(|&j| g.has_edge(v.index, j))
            .map(|j| coloring.get(v.index, j))
            .filter(|&c| c != 0)
            .collect(),
        Side::Right => (0..g.n_left())
            .filter(|&i| g.has_edge(i, v.index))
            .map(|i| coloring.get(i, v.index))
            .filter(|&c| c != 0)
            .collect(),
    };
    colors.sort_unstable();
    Ok(colors)
}

/// Checks a coloring against the interval t-coloring definition.
///
/// Shape mismatches are the only hard error; everything else is reported as
/// violations in the returned report.
pub fn verify(
    g: &BipartiteGraph,
    coloring: &EdgeColoring,
) -> Result<VerificationReport, ColoringError> {
    coloring.matches_shape(g)?;
    let mut report = VerificationReport {
        support_ok: true,
        proper: true,
        intervals_ok: true,
        surjective: true,
        per_component_surjective: true,
        t: 0,
        violations: Vec::new(),
    };

    // support
    for &(x, y) in g.edges() {
        if coloring.get(x, y) == 0 {
            report.support_ok = false;
            report.violations.push(Violation {
                kind: ViolationKind::Support,
                site: ViolationSite::Cell(x, y),
                detail: format!("edge ({x}, {y}) has no color"),
            });
        }
    }
    for (x, y, c) in coloring.colored_cells() {
        if !g.has_edge(x, y) {
            report.support_ok = false;
            report.violations.push(Violation {
                kind: ViolationKind::Support,
                site: ViolationSite::Cell(x, y),
                detail: format!("non-edge cell ({x}, {y}) carries color {c}"),
            });
        }
    }

    // properness and interval palettes, per vertex
    let vertices = (0..g.n_left())
        .map(BVertex::left)
        .chain((0..g.n_right()).map(BVertex::right));
    for v in vertices {
        let colors = palette(g, coloring, v)?;
        for pair in colors.windows(2) {
            if pair[0] == pair[1] {
                report.proper = false;
                report.violations.push(Violation {
                    kind: ViolationKind::Proper,
                    site: ViolationSite::Vertex(v),
                    detail: format!("color {} appears twice at {v:?}", pair[0]),
                });
            }
        }
        let distinct: BTreeSet<u32> = colors.iter().copied().collect();
        if !distinct.is_empty() {
            let span = distinct.iter().max().unwrap() - distinct.iter().min().unwrap() + 1;
            if span as usize != distinct.len() {
                report.intervals_ok = false;
                report.violations.push(Violation {
                    kind: ViolationKind::Interval,
                    site: ViolationSite::Vertex(v),
                    detail: format!("palette {distinct:?} at {v:?} is not an interval"),
                });
            }
        }
    }

    // surjectivity, global then per component
    let used: BTreeSet<u32> = coloring.colored_cells().map(|(_, _, c)| c).collect();
    report.t = used.iter().max().copied().unwrap_or(0);
    if !used.is_empty() {
        let missing: Vec<u32> = (1..=report.t).filter(|c| !used.contains(c)).collect();
        if !missing.is_empty() {
            report.surjective = false;
            report.violations.push(Violation {
                kind: ViolationKind::Surjective,
                site: ViolationSite::Global,
                detail: format!("colors {missing:?} in 1..={} are unused", report.t),
            });
        }
    }
    for (id, comp) in connected_components(g).into_iter().enumerate() {
        let comp_used: BTreeSet<u32> = comp
            .graph
            .edges()
            .iter()
            .map(|&(x, y)| coloring.get(comp.left_map[x], comp.right_map[y]))
            .filter(|&c| c != 0)
            .collect();
        if comp_used.is_empty() {
            continue;
        }
        let t_c = *comp_used.iter().max().unwrap();
        if comp_used.len() as u32 != t_c || !comp_used.contains(&1) {
            report.per_component_surjective = false;
            report.violations.push(Violation {
                kind: ViolationKind::ComponentSurjective,
                site: ViolationSite::Component(id),
                detail: format!("component {id} uses {comp_used:?}, expected 1..={t_c}"),
            });
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> BipartiteGraph {
        BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)])
    }

    fn coloring(g: &BipartiteGraph, cells: &[(usize, usize, u32)]) -> EdgeColoring {
        let mut c = EdgeColoring::empty(g);
        for &(x, y, col) in cells {
            c.set(x, y, col);
        }
        c
    }

    #[test]
    fn alternating_c4_is_valid() {
        let g = c4();
        let c = coloring(&g, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1)]);
        let r = verify(&g, &c).unwrap();
        assert!(r.is_valid_per_component(), "{:?}", r.violations);
        assert_eq!(r.t, 2);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn palettes_of_c4_and_star() {
        let g = c4();
        let c = coloring(&g, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1)]);
        for v in [
            BVertex::left(0),
            BVertex::left(1),
            BVertex::right(0),
            BVertex::right(1),
        ] {
            assert_eq!(palette(&g, &c, v).unwrap(), vec![1, 2]);
        }

        let star = BipartiteGraph::new(1, 4, vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
        let sc = coloring(&star, &[(0, 0, 1), (0, 1, 2), (0, 2, 3), (0, 3, 4)]);
        assert_eq!(
            palette(&star, &sc, BVertex::left(0)).unwrap(),
            vec![1, 2, 3, 4]
        );
    }

    #[test]
    fn isolated_vertex_has_empty_palette() {
        let g = BipartiteGraph::new(2, 1, vec![(0, 0)]);
        let c = coloring(&g, &[(0, 0, 1)]);
        assert_eq!(palette(&g, &c, BVertex::left(1)).unwrap(), vec![]);
        // empty palette counts as interval: report stays valid
        assert!(verify(&g, &c).unwrap().is_valid());
    }

    #[test]
    fn gap_palette_is_flagged() {
        let g = BipartiteGraph::new(1, 2, vec![(0, 0), (0, 1)]);
        let c = coloring(&g, &[(0, 0, 1), (0, 1, 3)]);
        let r = verify(&g, &c).unwrap();
        assert!(!r.intervals_ok);
        assert!(r
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Interval
                && v.site == ViolationSite::Vertex(BVertex::left(0))));
    }

    #[test]
    fn shifted_colors_fail_surjectivity() {
        let g = BipartiteGraph::new(1, 2, vec![(0, 0), (0, 1)]);
        let c = coloring(&g, &[(0, 0, 2), (0, 1, 3)]);
        let r = verify(&g, &c).unwrap();
        assert!(r.proper && r.intervals_ok);
        assert!(!r.surjective);
        assert_eq!(r.t, 3);
    }

    #[test]
    fn duplicate_color_is_improper() {
        let g = BipartiteGraph::new(1, 2, vec![(0, 0), (0, 1)]);
        let c = coloring(&g, &[(0, 0, 2), (0, 1, 2)]);
        let r = verify(&g, &c).unwrap();
        assert!(!r.proper);
    }

    #[test]
    fn support_mismatch_is_flagged_both_ways() {
        let g = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 1)]);
        let missing = coloring(&g, &[(0, 0, 1)]);
        let r = verify(&g, &missing).unwrap();
        assert!(!r.support_ok);

        let spurious = coloring(&g, &[(0, 0, 1), (1, 1, 1), (0, 1, 1)]);
        let r = verify(&g, &spurious).unwrap();
        assert!(!r.support_ok);
    }

    #[test]
    fn per_component_flag_differs_from_global() {
        // two components colored {1,2} and {2}: globally surjective (1..2 all
        // used) but the second component does not start at 1
        let g = BipartiteGraph::new(2, 3, vec![(0, 0), (0, 1), (1, 2)]);
        let c = coloring(&g, &[(0, 0, 1), (0, 1, 2), (1, 2, 2)]);
        let r = verify(&g, &c).unwrap();
        assert!(r.is_valid());
        assert!(!r.per_component_surjective);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = c4();
        let c = EdgeColoring::from_rows(1, 2, vec![1, 2]).unwrap();
        assert!(verify(&g, &c).is_err());
        assert!(palette(&g, &c, BVertex::left(0)).is_err());
    }
}
