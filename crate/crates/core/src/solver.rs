//! Backtracking search for interval edge-colorings over the biadjacency
//! matrix.
//!
//! The search fills matrix cells (edges) one at a time. For each cell it
//! computes the set of colors that keep every touched vertex's palette inside
//! a window of its degree: a vertex of degree d that ends up with d distinct
//! colors spanning at most d consecutive values necessarily holds an interval.
//! Surjectivity is not enforced during search; [`normalize`] shifts each
//! connected component so its smallest color is 1, which restores it.
//!
//! Reproducibility: randomized order draws from ChaCha8 seeded with
//! `params.seed`; restart `k` uses stream `k` of the same seed, so outcomes
//! are bit-stable across platforms and runs.

use crate::coloring::{ColoringError, EdgeColoring};
use crate::graph::{connected_components, BipartiteGraph, BVertex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

/// Node budget per randomized restart slice.
pub const DEFAULT_RESTART_SLICE: u64 = 1_000_000;

/// Colors are tracked in 64-bit masks; color values stay below this.
pub const MAX_SUPPORTED_COLOR: u32 = 63;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("exact_t {exact_t} exceeds max_color {max_color}")]
    ExactTExceedsMaxColor { exact_t: u32, max_color: u32 },
    #[error("exact_t must be positive")]
    ZeroExactT,
    #[error("max_color must be positive")]
    ZeroMaxColor,
    #[error("max_color {max_color} exceeds the supported limit {limit}")]
    MaxColorTooLarge { max_color: u32, limit: u32 },
    #[error("t range {t_min}..={t_max} is empty or starts below 1")]
    BadRange { t_min: u32, t_max: u32 },
    #[error(transparent)]
    Shape(#[from] ColoringError),
    #[error("coloring violates the normalize precondition: {0}")]
    NotNormalizable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    /// The randomized search: colors tried in random order, restarting with a
    /// fresh stream whenever a slice of [`DEFAULT_RESTART_SLICE`] nodes is
    /// exhausted without an answer.
    RandomizedRestart,
    /// Deterministic complete search, colors in ascending order.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveParams {
    pub seed: u64,
    /// Largest color the search may place.
    pub max_color: u32,
    /// Maximum backtrack nodes; 0 means unlimited.
    pub node_budget: u64,
    /// Wall-clock limit in milliseconds; 0 means unlimited.
    pub time_budget_ms: u64,
    pub mode: SearchMode,
    /// When set, only accept colorings that normalize to exactly colors 1..=t.
    pub exact_t: Option<u32>,
}

impl SolveParams {
    /// Defaults for a given graph: `max_color = |V| - 1` (the tight bound for
    /// interval-colorable bipartite graphs), randomized order, no budgets.
    pub fn defaults_for(g: &BipartiteGraph, seed: u64) -> Self {
        SolveParams {
            seed,
            max_color: default_max_color(g),
            node_budget: 0,
            time_budget_ms: 0,
            mode: SearchMode::RandomizedRestart,
            exact_t: None,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.max_color == 0 {
            return Err(SolveError::ZeroMaxColor);
        }
        if self.max_color > MAX_SUPPORTED_COLOR {
            return Err(SolveError::MaxColorTooLarge {
                max_color: self.max_color,
                limit: MAX_SUPPORTED_COLOR,
            });
        }
        match self.exact_t {
            Some(0) => Err(SolveError::ZeroExactT),
            Some(t) if t > self.max_color => Err(SolveError::ExactTExceedsMaxColor {
                exact_t: t,
                max_color: self.max_color,
            }),
            _ => Ok(()),
        }
    }
}

pub fn default_max_color(g: &BipartiteGraph) -> u32 {
    (g.vertex_count().saturating_sub(1)).max(1) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownReason {
    TimeBudget,
    NodeBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Colorable {
        coloring: EdgeColoring,
        t: u32,
        nodes: u64,
        millis: u64,
    },
    NonColorable {
        nodes: u64,
        millis: u64,
    },
    Unknown {
        reason: UnknownReason,
        nodes: u64,
        millis: u64,
    },
}

impl SolveOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            SolveOutcome::Colorable { nodes, .. }
            | SolveOutcome::NonColorable { nodes, .. }
            | SolveOutcome::Unknown { nodes, .. } => *nodes,
        }
    }

    pub fn is_colorable(&self) -> bool {
        matches!(self, SolveOutcome::Colorable { .. })
    }
}

/// Per-vertex search state: colors placed so far on its incident edges.
#[derive(Debug, Clone, Copy, Default)]
struct VertexState {
    used: u64,
    min: u32,
    max: u32,
    count: u32,
}

impl VertexState {
    fn place(&mut self, c: u32) {
        self.used |= 1 << c;
        if self.count == 0 {
            self.min = c;
            self.max = c;
        } else {
            self.min = self.min.min(c);
            self.max = self.max.max(c);
        }
        self.count += 1;
    }

    fn window(&self, degree: u32, max_color: u32) -> (u32, u32) {
        if self.count == 0 {
            (1, max_color)
        } else {
            (
                (self.max + 1).saturating_sub(degree).max(1),
                (self.min + degree - 1).min(max_color),
            )
        }
    }
}

/// The colors placeable on an uncolored edge given current row/column state:
/// unused in the row and column, and keeping both endpoint spans within their
/// degrees.
///
/// Panics if `cell` is not an uncolored edge of `g`.
pub fn possible_colors(
    partial: &EdgeColoring,
    g: &BipartiteGraph,
    cell: (usize, usize),
    max_color: u32,
) -> Vec<u32> {
    partial.matches_shape(g).expect("coloring shape mismatch");
    let (i, j) = cell;
    assert!(g.has_edge(i, j), "cell {cell:?} is not an edge");
    assert_eq!(partial.get(i, j), 0, "cell {cell:?} already colored");

    let mut row = VertexState::default();
    let mut col = VertexState::default();
    for (x, y, c) in partial.colored_cells() {
        if x == i {
            row.place(c);
        }
        if y == j {
            col.place(c);
        }
    }
    let d_row = g.degree(BVertex::left(i)) as u32;
    let d_col = g.degree(BVertex::right(j)) as u32;
    let (rlo, rhi) = row.window(d_row, max_color);
    let (clo, chi) = col.window(d_col, max_color);
    let lo = rlo.max(clo).max(1);
    let hi = rhi.min(chi).min(max_color.min(MAX_SUPPORTED_COLOR));
    let used = row.used | col.used;
    (lo..=hi).filter(|&c| used & (1 << c) == 0).collect()
}

struct Cell {
    row: usize,
    col: usize,
    comp: usize,
}

struct Frame {
    candidates: Vec<u32>,
    next: usize,
}

enum DfsEnd {
    Found,
    Exhausted,
    SliceLimit,
    Budget(UnknownReason),
}

struct Search<'a> {
    g: &'a BipartiteGraph,
    cells: Vec<Cell>,
    n_comps: usize,
    left_deg: Vec<u32>,
    right_deg: Vec<u32>,
    max_color: u32,
    rows: Vec<VertexState>,
    cols: Vec<VertexState>,
    assignment: Vec<u32>,
    trail: Vec<(VertexState, VertexState)>,
    frames: Vec<Frame>,
    nodes: u64,
    started: Instant,
    node_budget: u64,
    time_budget_ms: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a BipartiteGraph, params: &SolveParams, effective_max: u32) -> Self {
        let (left_deg, right_deg) = g.degrees();
        let mut row_order: Vec<usize> = (0..g.n_left()).collect();
        row_order.sort_by_key(|&i| (std::cmp::Reverse(left_deg[i]), i));
        let mut col_order: Vec<usize> = (0..g.n_right()).collect();
        col_order.sort_by_key(|&j| (std::cmp::Reverse(right_deg[j]), j));

        // component id of every left vertex, for the exact-t completion check
        let comps = connected_components(g);
        let mut left_comp = vec![0usize; g.n_left()];
        for (id, comp) in comps.iter().enumerate() {
            for &x in &comp.left_map {
                left_comp[x] = id;
            }
        }

        let mut cells = Vec::with_capacity(g.edge_count());
        for &i in &row_order {
            for &j in &col_order {
                if g.has_edge(i, j) {
                    cells.push(Cell {
                        row: i,
                        col: j,
                        comp: left_comp[i],
                    });
                }
            }
        }
        let n_cells = cells.len();
        Search {
            g,
            cells,
            n_comps: comps.len(),
            left_deg: left_deg.iter().map(|&d| d as u32).collect(),
            right_deg: right_deg.iter().map(|&d| d as u32).collect(),
            max_color: effective_max,
            rows: vec![VertexState::default(); g.n_left()],
            cols: vec![VertexState::default(); g.n_right()],
            assignment: vec![0; n_cells],
            trail: vec![(VertexState::default(), VertexState::default()); n_cells],
            frames: (0..n_cells)
                .map(|_| Frame {
                    candidates: Vec::new(),
                    next: 0,
                })
                .collect(),
            nodes: 0,
            started: Instant::now(),
            node_budget: params.node_budget,
            time_budget_ms: params.time_budget_ms,
        }
    }

    fn reset(&mut self) {
        self.rows.fill(VertexState::default());
        self.cols.fill(VertexState::default());
        self.assignment.fill(0);
    }

    fn fill_candidates(&mut self, depth: usize, rng: Option<&mut ChaCha8Rng>) {
        let cell = &self.cells[depth];
        let row = &self.rows[cell.row];
        let col = &self.cols[cell.col];
        let (rlo, rhi) = row.window(self.left_deg[cell.row], self.max_color);
        let (clo, chi) = col.window(self.right_deg[cell.col], self.max_color);
        let lo = rlo.max(clo);
        let hi = rhi.min(chi);
        let used = row.used | col.used;
        let frame = &mut self.frames[depth];
        frame.candidates.clear();
        frame.next = 0;
        if lo <= hi {
            frame
                .candidates
                .extend((lo..=hi).filter(|&c| used & (1 << c) == 0));
        }
        if let Some(rng) = rng {
            frame.candidates.shuffle(rng);
        }
    }

    fn assign(&mut self, depth: usize, c: u32) {
        let cell = &self.cells[depth];
        self.trail[depth] = (self.rows[cell.row], self.cols[cell.col]);
        self.rows[cell.row].place(c);
        self.cols[cell.col].place(c);
        self.assignment[depth] = c;
    }

    fn undo(&mut self, depth: usize) {
        let cell = &self.cells[depth];
        let (row, col) = self.trail[depth];
        self.rows[cell.row] = row;
        self.cols[cell.col] = col;
        self.assignment[depth] = 0;
    }

    fn over_time(&self) -> bool {
        self.time_budget_ms > 0 && self.started.elapsed().as_millis() as u64 >= self.time_budget_ms
    }

    /// Runs one depth-first pass. `slice` of 0 means no per-slice cap.
    fn dfs(&mut self, mut rng: Option<&mut ChaCha8Rng>, slice: u64, exact_t: Option<u32>) -> DfsEnd {
        if self.cells.is_empty() {
            return DfsEnd::Found;
        }
        let mut slice_nodes = 0u64;
        let mut depth = 0usize;
        self.fill_candidates(0, rng.as_deref_mut());
        loop {
            let frame = &self.frames[depth];
            if frame.next < frame.candidates.len() {
                let c = frame.candidates[frame.next];
                self.frames[depth].next += 1;
                self.nodes += 1;
                slice_nodes += 1;
                if self.node_budget > 0 && self.nodes >= self.node_budget {
                    return DfsEnd::Budget(UnknownReason::NodeBudget);
                }
                if self.nodes % 4096 == 0 && self.over_time() {
                    return DfsEnd::Budget(UnknownReason::TimeBudget);
                }
                if slice > 0 && slice_nodes >= slice {
                    return DfsEnd::SliceLimit;
                }
                self.assign(depth, c);
                depth += 1;
                if depth == self.cells.len() {
                    match exact_t {
                        Some(t) if self.max_component_span() != t => {
                            depth -= 1;
                            self.undo(depth);
                            continue;
                        }
                        _ => return DfsEnd::Found,
                    }
                }
                self.fill_candidates(depth, rng.as_deref_mut());
            } else if depth == 0 {
                return DfsEnd::Exhausted;
            } else {
                depth -= 1;
                self.undo(depth);
            }
        }
    }

    /// Largest per-component color span of the completed assignment.
    fn max_component_span(&self) -> u32 {
        let mut min = vec![u32::MAX; self.n_comps];
        let mut max = vec![0u32; self.n_comps];
        for (k, cell) in self.cells.iter().enumerate() {
            let c = self.assignment[k];
            min[cell.comp] = min[cell.comp].min(c);
            max[cell.comp] = max[cell.comp].max(c);
        }
        (0..self.n_comps)
            .filter(|&i| max[i] > 0)
            .map(|i| max[i] - min[i] + 1)
            .max()
            .unwrap_or(0)
    }

    fn to_coloring(&self) -> EdgeColoring {
        let mut coloring = EdgeColoring::empty(self.g);
        for (k, cell) in self.cells.iter().enumerate() {
            coloring.set(cell.row, cell.col, self.assignment[k]);
        }
        coloring
    }
}

/// Decides interval colorability of `g` under `params`.
///
/// A `Colorable` witness is normalized (every component's smallest color is
/// 1) and `t` is its largest color. `NonColorable` is a proof by exhaustion
/// relative to `params.max_color`. Edgeless graphs are trivially `Colorable`
/// with `t = 0` (and never satisfy a positive `exact_t`).
pub fn solve(g: &BipartiteGraph, params: &SolveParams) -> Result<SolveOutcome, SolveError> {
    params.validate()?;
    let started = Instant::now();
    if g.edge_count() == 0 {
        return Ok(match params.exact_t {
            None => SolveOutcome::Colorable {
                coloring: EdgeColoring::empty(g),
                t: 0,
                nodes: 0,
                millis: started.elapsed().as_millis() as u64,
            },
            Some(_) => SolveOutcome::NonColorable {
                nodes: 0,
                millis: started.elapsed().as_millis() as u64,
            },
        });
    }

    // With exact_t, capping the palette at t keeps the search complete: an
    // interval t-coloring uses colors 1..=t by definition.
    let effective_max = match params.exact_t {
        Some(t) => t,
        None => params.max_color,
    };
    let mut search = Search::new(g, params, effective_max);

    let end = match params.mode {
        SearchMode::Exhaustive => search.dfs(None, 0, params.exact_t),
        SearchMode::RandomizedRestart => {
            let mut restart = 0u64;
            loop {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(restart);
                match search.dfs(Some(&mut rng), DEFAULT_RESTART_SLICE, params.exact_t) {
                    DfsEnd::SliceLimit => {
                        search.reset();
                        restart += 1;
                    }
                    other => break other,
                }
            }
        }
    };

    let nodes = search.nodes;
    let millis = started.elapsed().as_millis() as u64;
    Ok(match end {
        DfsEnd::Found => {
            let raw = search.to_coloring();
            let coloring = normalize(&raw, g)?;
            let t = coloring.max_color();
            SolveOutcome::Colorable {
                coloring,
                t,
                nodes,
                millis,
            }
        }
        DfsEnd::Exhausted => SolveOutcome::NonColorable { nodes, millis },
        DfsEnd::Budget(reason) => SolveOutcome::Unknown {
            reason,
            nodes,
            millis,
        },
        DfsEnd::SliceLimit => unreachable!("slice limits restart in the loop above"),
    })
}

/// Shifts every connected component of the coloring so its smallest color is
/// 1. Requires a proper coloring with interval palettes, which guarantees the
/// shifted component uses exactly the colors `1..=span`.
pub fn normalize(coloring: &EdgeColoring, g: &BipartiteGraph) -> Result<EdgeColoring, SolveError> {
    coloring.matches_shape(g)?;
    // precondition: support matches, palettes proper and interval
    for &(x, y) in g.edges() {
        if coloring.get(x, y) == 0 {
            return Err(SolveError::NotNormalizable(format!(
                "edge ({x}, {y}) is uncolored"
            )));
        }
    }
    for (x, y, _) in coloring.colored_cells() {
        if !g.has_edge(x, y) {
            return Err(SolveError::NotNormalizable(format!(
                "colored cell ({x}, {y}) is not an edge"
            )));
        }
    }
    for side in 0..2 {
        let count = if side == 0 { g.n_left() } else { g.n_right() };
        for v in 0..count {
            let mut colors: Vec<u32> = (0..if side == 0 { g.n_right() } else { g.n_left() })
                .map(|w| {
                    if side == 0 {
                        coloring.get(v, w)
                    } else {
                        coloring.get(w, v)
                    }
                })
                .filter(|&c| c != 0)
                .collect();
            colors.sort_unstable();
            for pair in colors.windows(2) {
                if pair[0] == pair[1] {
                    return Err(SolveError::NotNormalizable(format!(
                        "duplicate color {} at a vertex",
                        pair[0]
                    )));
                }
                if pair[1] != pair[0] + 1 {
                    return Err(SolveError::NotNormalizable(
                        "palette is not an interval".to_string(),
                    ));
                }
            }
        }
    }

    let mut out = coloring.clone();
    for comp in connected_components(g) {
        if comp.graph.edge_count() == 0 {
            continue;
        }
        let min = comp
            .graph
            .edges()
            .iter()
            .map(|&(x, y)| coloring.get(comp.left_map[x], comp.right_map[y]))
            .min()
            .unwrap();
        let shift = min - 1;
        if shift > 0 {
            for &(x, y) in comp.graph.edges() {
                let (px, py) = (comp.left_map[x], comp.right_map[y]);
                out.set(px, py, coloring.get(px, py) - shift);
            }
        }
    }
    Ok(out)
}

/// The feasible values of t in a range, each decided by an exhaustive
/// exact-t search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub feasible: BTreeSet<u32>,
    /// Values of t whose search exhausted a budget; nonempty means partial.
    pub unknown: Vec<u32>,
    pub nodes: u64,
    pub millis: u64,
}

impl SpectrumResult {
    pub fn is_partial(&self) -> bool {
        !self.unknown.is_empty()
    }
}

pub fn spectrum(
    g: &BipartiteGraph,
    t_min: u32,
    t_max: u32,
    base: &SolveParams,
) -> Result<SpectrumResult, SolveError> {
    if t_min < 1 || t_min > t_max {
        return Err(SolveError::BadRange { t_min, t_max });
    }
    let started = Instant::now();
    let mut result = SpectrumResult {
        feasible: BTreeSet::new(),
        unknown: Vec::new(),
        nodes: 0,
        millis: 0,
    };
    for t in t_min..=t_max {
        let params = SolveParams {
            seed: base.seed,
            max_color: t,
            node_budget: base.node_budget,
            time_budget_ms: base.time_budget_ms,
            mode: SearchMode::Exhaustive,
            exact_t: Some(t),
        };
        let out = solve(g, &params)?;
        result.nodes += out.nodes();
        match out {
            SolveOutcome::Colorable { .. } => {
                result.feasible.insert(t);
            }
            SolveOutcome::NonColorable { .. } => {}
            SolveOutcome::Unknown { .. } => result.unknown.push(t),
        }
    }
    result.millis = started.elapsed().as_millis() as u64;
    Ok(result)
}
