//! Instance sources: a tiny exact enumerator with isomorphism dedup, named
//! graph families, seeded random samplers, and graph6 ingestion.

use crate::canon::canonical_form_with_limit;
use crate::graph::{find_bipartition, BipartiteGraph, GraphError};
use crate::graph6::{parse_graph6, Graph6Error};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::io::BufRead;
use thiserror::Error;

/// Hard cap on biadjacency cells for the bitmask enumerator.
pub const MAX_ENUM_CELLS: usize = 30;
/// Cap on `n_left! * n_right!` for enumeration with dedup.
pub const DEFAULT_DEDUP_WORK_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("bipartition ({n_left}, {n_right}) has {cells} cells; the enumerator is limited to {limit}")]
    TooManyCells {
        n_left: usize,
        n_right: usize,
        cells: usize,
        limit: usize,
    },
    #[error("dedup at ({n_left}, {n_right}) needs {work} permutations, over the limit {limit}")]
    DedupWorkLimit {
        n_left: usize,
        n_right: usize,
        work: u128,
        limit: u128,
    },
    #[error("invalid family parameters: {0}")]
    BadParameters(String),
}

/// What to enumerate: a fixed bipartition with optional degree/connectivity
/// filters, one representative per isomorphism class when `dedup` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumSpec {
    pub n_left: usize,
    pub n_right: usize,
    pub min_degree: usize,
    pub connected_only: bool,
    pub dedup: bool,
}

impl EnumSpec {
    pub fn all(n_left: usize, n_right: usize) -> Self {
        EnumSpec {
            n_left,
            n_right,
            min_degree: 0,
            connected_only: false,
            dedup: true,
        }
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Streams the graphs of a bipartition in ascending bitmask order.
pub fn enumerate_bipartite(spec: EnumSpec) -> Result<EnumIter, GeneratorError> {
    let cells = spec.n_left * spec.n_right;
    if cells > MAX_ENUM_CELLS {
        return Err(GeneratorError::TooManyCells {
            n_left: spec.n_left,
            n_right: spec.n_right,
            cells,
            limit: MAX_ENUM_CELLS,
        });
    }
    if spec.dedup {
        let work = factorial(spec.n_left) * factorial(spec.n_right);
        if work > DEFAULT_DEDUP_WORK_LIMIT {
            return Err(GeneratorError::DedupWorkLimit {
                n_left: spec.n_left,
                n_right: spec.n_right,
                work,
                limit: DEFAULT_DEDUP_WORK_LIMIT,
            });
        }
    }
    Ok(EnumIter {
        spec,
        next_mask: 0,
        end: 1u64 << cells,
        semi_seen: HashSet::new(),
        keys_seen: HashSet::new(),
    })
}

pub struct EnumIter {
    spec: EnumSpec,
    next_mask: u64,
    end: u64,
    /// Row-and-column-sorted forms already emitted; equal forms are always
    /// isomorphic, so this skips most duplicates before the exact key.
    semi_seen: HashSet<u64>,
    keys_seen: HashSet<String>,
}

impl EnumIter {
    fn graph_of(&self, mask: u64) -> BipartiteGraph {
        let b = self.spec.n_right;
        let edges = (0..self.spec.n_left)
            .flat_map(|i| (0..b).map(move |j| (i, j)))
            .filter(|&(i, j)| mask >> (i * b + j) & 1 != 0)
            .collect();
        BipartiteGraph::new(self.spec.n_left, self.spec.n_right, edges)
    }

    fn passes_filters(&self, mask: u64) -> bool {
        let (a, b) = (self.spec.n_left, self.spec.n_right);
        if self.spec.min_degree > 0 {
            for i in 0..a {
                let row = mask >> (i * b) & ((1 << b) - 1);
                if (row.count_ones() as usize) < self.spec.min_degree {
                    return false;
                }
            }
            for j in 0..b {
                let mut d = 0usize;
                for i in 0..a {
                    d += (mask >> (i * b + j) & 1) as usize;
                }
                if d < self.spec.min_degree {
                    return false;
                }
            }
        }
        if self.spec.connected_only && !mask_connected(mask, a, b) {
            return false;
        }
        true
    }

    fn semi_canonical(&self, mask: u64) -> u64 {
        let (a, b) = (self.spec.n_left, self.spec.n_right);
        let mut rows: Vec<u32> = (0..a)
            .map(|i| (mask >> (i * b) & ((1 << b) - 1)) as u32)
            .collect();
        rows.sort_unstable_by(|x, y| y.cmp(x));
        let mut cols: Vec<u32> = (0..b)
            .map(|j| {
                let mut c = 0u32;
                for (i, row) in rows.iter().enumerate() {
                    c |= (row >> j & 1) << i;
                }
                c
            })
            .collect();
        cols.sort_unstable_by(|x, y| y.cmp(x));
        let mut packed = 0u64;
        for (j, col) in cols.iter().enumerate() {
            for i in 0..a {
                packed |= u64::from(col >> i & 1) << (j * a + i);
            }
        }
        packed
    }
}

/// Connectivity over all `a + b` vertices (isolated vertices disconnect).
fn mask_connected(mask: u64, a: usize, b: usize) -> bool {
    let n = a + b;
    if n == 0 {
        return true;
    }
    let mut visited = 0u64;
    let mut stack = vec![0usize];
    visited |= 1;
    while let Some(v) = stack.pop() {
        if v < a {
            for j in 0..b {
                let w = a + j;
                if mask >> (v * b + j) & 1 != 0 && visited >> w & 1 == 0 {
                    visited |= 1 << w;
                    stack.push(w);
                }
            }
        } else {
            let j = v - a;
            for i in 0..a {
                if mask >> (i * b + j) & 1 != 0 && visited >> i & 1 == 0 {
                    visited |= 1 << i;
                    stack.push(i);
                }
            }
        }
    }
    visited.count_ones() as usize == n
}

impl Iterator for EnumIter {
    type Item = BipartiteGraph;

    fn next(&mut self) -> Option<BipartiteGraph> {
        while self.next_mask < self.end {
            let mask = self.next_mask;
            self.next_mask += 1;
            if !self.passes_filters(mask) {
                continue;
            }
            if !self.spec.dedup {
                return Some(self.graph_of(mask));
            }
            if !self.semi_seen.insert(self.semi_canonical(mask)) {
                continue;
            }
            let g = self.graph_of(mask);
            let form = canonical_form_with_limit(&g, g.vertex_count())
                .expect("enumerator sizes are within the key limit");
            if self.keys_seen.insert(form.key.0) {
                return Some(g);
            }
        }
        None
    }
}

pub fn complete_bipartite(m: usize, n: usize) -> Result<BipartiteGraph, GeneratorError> {
    if m == 0 || n == 0 {
        return Err(GeneratorError::BadParameters(
            "complete_bipartite needs both parts nonempty".into(),
        ));
    }
    let edges = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    Ok(BipartiteGraph::new(m, n, edges))
}

/// The n-dimensional hypercube: vertices are bit patterns, sides by parity.
pub fn hypercube(n: u32) -> Result<BipartiteGraph, GeneratorError> {
    if n > 5 {
        return Err(GeneratorError::BadParameters(format!(
            "hypercube({n}) exceeds 62 vertices"
        )));
    }
    let size = 1usize << n;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut local = vec![0usize; size];
    for v in 0..size {
        if v.count_ones() % 2 == 0 {
            local[v] = left.len();
            left.push(v);
        } else {
            local[v] = right.len();
            right.push(v);
        }
    }
    let mut edges = Vec::new();
    for &v in &left {
        for k in 0..n {
            let w = v ^ (1 << k);
            edges.push((local[v], local[w]));
        }
    }
    Ok(BipartiteGraph::new(left.len(), right.len(), edges))
}

pub fn even_cycle(len: usize) -> Result<BipartiteGraph, GeneratorError> {
    if len < 4 || len % 2 != 0 {
        return Err(GeneratorError::BadParameters(format!(
            "even_cycle needs an even length >= 4, got {len}"
        )));
    }
    let k = len / 2;
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((i, i));
        edges.push(((i + 1) % k, i));
    }
    Ok(BipartiteGraph::new(k, k, edges))
}

/// A seeded random tree (uniform attachment), bipartitioned by depth parity.
pub fn random_tree(n: usize, seed: u64) -> Result<BipartiteGraph, GeneratorError> {
    if n == 0 || n > 62 {
        return Err(GeneratorError::BadParameters(format!(
            "random_tree size {n} out of range 1..=62"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut depth = vec![0usize; n];
    let mut parent = vec![0usize; n];
    for v in 1..n {
        parent[v] = rng.random_range(0..v);
        depth[v] = depth[parent[v]] + 1;
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut local = vec![0usize; n];
    for v in 0..n {
        if depth[v] % 2 == 0 {
            local[v] = left.len();
            left.push(v);
        } else {
            local[v] = right.len();
            right.push(v);
        }
    }
    let edges = (1..n)
        .map(|v| match depth[v] % 2 {
            1 => (local[parent[v]], local[v]),
            _ => (local[v], local[parent[v]]),
        })
        .collect();
    Ok(BipartiteGraph::new(left.len(), right.len(), edges))
}

/// Each of the `a*b` possible edges independently with probability `p`.
pub fn random_bipartite(
    a: usize,
    b: usize,
    p: f64,
    seed: u64,
) -> Result<BipartiteGraph, GeneratorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeneratorError::BadParameters(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    if a + b > 62 {
        return Err(GeneratorError::BadParameters(
            "random_bipartite exceeds 62 vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(BipartiteGraph::new(a, b, edges))
}

/// Adds cells in a seeded random order while both endpoints stay below
/// degree 3; the result always has maximum degree at most 3.
pub fn random_maxdeg3(a: usize, b: usize, seed: u64) -> Result<BipartiteGraph, GeneratorError> {
    if a + b > 62 {
        return Err(GeneratorError::BadParameters(
            "random_maxdeg3 exceeds 62 vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<(usize, usize)> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, j)))
        .collect();
    cells.shuffle(&mut rng);
    let mut left_deg = vec![0usize; a];
    let mut right_deg = vec![0usize; b];
    let mut edges = Vec::new();
    for (i, j) in cells {
        if left_deg[i] < 3 && right_deg[j] < 3 && rng.random::<f64>() < 0.8 {
            left_deg[i] += 1;
            right_deg[j] += 1;
            edges.push((i, j));
        }
    }
    Ok(BipartiteGraph::new(a, b, edges))
}

/// A parsed `name:params` family description, e.g. `hypercube:3`,
/// `complete_bipartite:4,5`, `random_tree:9,42`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    CompleteBipartite(usize, usize),
    Hypercube(u32),
    EvenCycle(usize),
    RandomTree { n: usize, seed: u64 },
    RandomBipartite { a: usize, b: usize, p: f64, seed: u64 },
    RandomMaxdeg3 { a: usize, b: usize, seed: u64 },
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self, GeneratorError> {
        let bad = |msg: &str| GeneratorError::BadParameters(format!("{msg} in {text:?}"));
        let (name, rest) = text
            .split_once(':')
            .ok_or_else(|| bad("expected name:params"))?;
        let args: Vec<&str> = rest.split(',').collect();
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad integer"));
        let long = |s: &str| s.trim().parse::<u64>().map_err(|_| bad("bad integer"));
        match (name, args.len()) {
            ("complete_bipartite", 2) => Ok(FamilySpec::CompleteBipartite(
                int(args[0])?,
                int(args[1])?,
            )),
            ("hypercube", 1) => Ok(FamilySpec::Hypercube(int(args[0])? as u32)),
            ("even_cycle", 1) => Ok(FamilySpec::EvenCycle(int(args[0])?)),
            ("random_tree", 2) => Ok(FamilySpec::RandomTree {
                n: int(args[0])?,
                seed: long(args[1])?,
            }),
            ("random_bipartite", 4) => Ok(FamilySpec::RandomBipartite {
                a: int(args[0])?,
                b: int(args[1])?,
                p: args[2]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("bad probability"))?,
                seed: long(args[3])?,
            }),
            ("random_maxdeg3", 3) => Ok(FamilySpec::RandomMaxdeg3 {
                a: int(args[0])?,
                b: int(args[1])?,
                seed: long(args[2])?,
            }),
            _ => Err(bad("unknown family or wrong arity")),
        }
    }

    pub fn build(&self) -> Result<BipartiteGraph, GeneratorError> {
        match *self {
            FamilySpec::CompleteBipartite(m, n) => complete_bipartite(m, n),
            FamilySpec::Hypercube(n) => hypercube(n),
            FamilySpec::EvenCycle(len) => even_cycle(len),
            FamilySpec::RandomTree { n, seed } => random_tree(n, seed),
            FamilySpec::RandomBipartite { a, b, p, seed } => random_bipartite(a, b, p, seed),
            FamilySpec::RandomMaxdeg3 { a, b, seed } => random_maxdeg3(a, b, seed),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error at line {line_no}: {source}")]
    Io {
        line_no: usize,
        source: std::io::Error,
    },
    #[error("line {line_no}: {source}")]
    Malformed {
        line_no: usize,
        source: Graph6Error,
    },
}

#[derive(Debug)]
pub enum IngestEvent {
    Graph {
        line_no: usize,
        graph: BipartiteGraph,
    },
    /// The line held a valid graph6 graph that is not bipartite.
    SkippedNonBipartite {
        line_no: usize,
        odd_cycle: Vec<usize>,
    },
}

/// Streams bipartite graphs out of graph6 lines. Lines beginning with the
/// `>>graph6<<` header and blank lines are skipped; non-bipartite graphs are
/// reported as skip events so callers can count and log them.
pub fn ingest_graph6<R: BufRead>(reader: R) -> Graph6Lines<R> {
    Graph6Lines { reader, line_no: 0 }
}

pub struct Graph6Lines<R: BufRead> {
    reader: R,
    line_no: usize,
}

impl<R: BufRead> Iterator for Graph6Lines<R> {
    type Item = Result<IngestEvent, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let mut line = String::new();
            self.line_no += 1;
            let line_no = self.line_no;
            match self.reader.read_line(&mut line) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(source) => return Some(Err(IngestError::Io { line_no, source })),
            }
            let trimmed = line.trim_end_matches(['\n', '\r']);
            if trimmed.is_empty() || trimmed.starts_with(">>graph6<<") {
                continue;
            }
            let simple = match parse_graph6(trimmed) {
                Ok(g) => g,
                Err(source) => return Some(Err(IngestError::Malformed { line_no, source })),
            };
            return Some(match find_bipartition(&simple) {
                Ok(bip) => {
                    let (graph, _, _) = BipartiteGraph::from_simple(&simple, &bip);
                    Ok(IngestEvent::Graph { line_no, graph })
                }
                Err(GraphError::OddCycle(odd_cycle)) => {
                    Ok(IngestEvent::SkippedNonBipartite { line_no, odd_cycle })
                }
                Err(_) => unreachable!("find_bipartition only fails with OddCycle"),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_1x1_yields_two_classes() {
        let graphs: Vec<_> = enumerate_bipartite(EnumSpec::all(1, 1)).unwrap().collect();
        assert_eq!(graphs.len(), 2);
    }

    #[test]
    fn enumerate_2x2_connected_yields_p4_and_c4() {
        let spec = EnumSpec {
            connected_only: true,
            ..EnumSpec::all(2, 2)
        };
        let graphs: Vec<_> = enumerate_bipartite(spec).unwrap().collect();
        assert_eq!(graphs.len(), 2);
        let mut edge_counts: Vec<usize> = graphs.iter().map(|g| g.edge_count()).collect();
        edge_counts.sort_unstable();
        assert_eq!(edge_counts, vec![3, 4]);
    }

    #[test]
    fn enumerate_2x2_connected_min_degree_2_is_c4_only() {
        let spec = EnumSpec {
            connected_only: true,
            min_degree: 2,
            ..EnumSpec::all(2, 2)
        };
        let graphs: Vec<_> = enumerate_bipartite(spec).unwrap().collect();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].edge_count(), 4);
    }

    #[test]
    fn enumerator_rejects_oversize() {
        assert!(matches!(
            enumerate_bipartite(EnumSpec::all(6, 6)),
            Err(GeneratorError::TooManyCells { .. })
        ));
    }

    #[test]
    fn hypercube_3_shape() {
        let g = hypercube(3).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 12);
        let (l, r) = g.degrees();
        assert!(l.iter().chain(r.iter()).all(|&d| d == 3));
    }

    #[test]
    fn complete_bipartite_4_5_shape() {
        let g = complete_bipartite(4, 5).unwrap();
        assert_eq!(g.edge_count(), 20);
        let (l, r) = g.degrees();
        assert!(l.iter().all(|&d| d == 5));
        assert!(r.iter().all(|&d| d == 4));
    }

    #[test]
    fn even_cycle_is_two_regular() {
        let g = even_cycle(8).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 8);
        let (l, r) = g.degrees();
        assert!(l.iter().chain(r.iter()).all(|&d| d == 2));
        assert!(even_cycle(5).is_err());
        assert!(even_cycle(2).is_err());
    }

    #[test]
    fn max_degree_3_always() {
        for seed in 0..50 {
            let g = random_maxdeg3(6, 6, seed).unwrap();
            assert!(g.max_degree() <= 3, "seed {seed}");
        }
    }

    #[test]
    fn random_samplers_are_seed_deterministic() {
        assert_eq!(
            random_tree(9, 7).unwrap(),
            random_tree(9, 7).unwrap()
        );
        assert_eq!(
            random_bipartite(4, 5, 0.5, 11).unwrap(),
            random_bipartite(4, 5, 0.5, 11).unwrap()
        );
        assert_ne!(
            random_bipartite(4, 5, 0.5, 11).unwrap(),
            random_bipartite(4, 5, 0.5, 12).unwrap()
        );
    }

    #[test]
    fn random_tree_is_a_tree() {
        for seed in 0..20 {
            let g = random_tree(10, seed).unwrap();
            assert_eq!(g.edge_count(), 9);
            assert_eq!(crate::graph::connected_components(&g).len(), 1);
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!(
            FamilySpec::parse("hypercube:3").unwrap(),
            FamilySpec::Hypercube(3)
        );
        assert_eq!(
            FamilySpec::parse("complete_bipartite:4,5").unwrap(),
            FamilySpec::CompleteBipartite(4, 5)
        );
        assert!(FamilySpec::parse("frob:1").is_err());
        assert!(FamilySpec::parse("hypercube").is_err());
    }

    #[test]
    fn ingest_parses_counts_and_skips() {
        // two bipartite graphs, one triangle, a header and a blank line
        let input = ">>graph6<<\nA_\n\nBw\nCl\n";
        let events: Vec<_> = ingest_graph6(input.as_bytes())
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        assert_eq!(events.len(), 3);
        let graphs: Vec<_> = events
            .iter()
            .filter_map(|e| match e {
                IngestEvent::Graph { graph, .. } => Some(graph),
                _ => None,
            })
            .collect();
        assert_eq!(graphs.len(), 2);
        let skipped: Vec<_> = events
            .iter()
            .filter_map(|e| match e {
                IngestEvent::SkippedNonBipartite { line_no, .. } => Some(*line_no),
                _ => None,
            })
            .collect();
        assert_eq!(skipped, vec![4]);
    }

    #[test]
    fn ingest_empty_input() {
        assert!(ingest_graph6(&b""[..]).next().is_none());
    }

    #[test]
    fn ingest_cites_malformed_line() {
        let input = "A_\n~oops\n";
        let results: Vec<_> = ingest_graph6(input.as_bytes()).collect();
        assert!(results[0].is_ok());
        assert!(
            matches!(&results[1], Err(IngestError::Malformed { line_no: 2, .. })),
            "{:?}",
            results[1]
        );
    }

    #[test]
    fn families_are_bipartite_by_construction() {
        let specs = [
            "complete_bipartite:3,4",
            "hypercube:4",
            "even_cycle:10",
            "random_tree:12,3",
            "random_bipartite:4,4,0.6,9",
            "random_maxdeg3:5,7,1",
        ];
        for text in specs {
            let g = FamilySpec::parse(text).unwrap().build().unwrap();
            let simple = g.to_simple();
            let bip = find_bipartition(&simple).unwrap();
            // left-first labeling must be a valid 2-coloring
            for &(u, v) in simple.edges() {
                assert_ne!(bip.side[u], bip.side[v], "{text}");
            }
        }
    }
}
