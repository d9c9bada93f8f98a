//! Graph data model: simple graphs, bipartite graphs with an explicit
//! bipartition, bipartition discovery and connected components.

use crate::graph6::{self, Graph6Error};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) out of bounds for graph with {n} vertices")]
    EdgeOutOfBounds { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("bipartite edge ({x}, {y}) out of bounds for parts ({n_left}, {n_right})")]
    BipartiteEdgeOutOfBounds {
        x: usize,
        y: usize,
        n_left: usize,
        n_right: usize,
    },
    #[error("graph contains an odd cycle through vertices {0:?}")]
    OddCycle(Vec<usize>),
    #[error(transparent)]
    Graph6(#[from] Graph6Error),
}

/// An undirected simple graph on vertices `0..n`.
///
/// Edges are stored sorted as `(min, max)` pairs with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    /// Builds a graph, normalizing edge orientation and dropping duplicates.
    ///
    /// Panics on out-of-range endpoints or self-loops; use [`SimpleGraph::try_new`]
    /// for fallible construction from untrusted input.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Self::try_new(n, edges).expect("invalid simple graph")
    }

    pub fn try_new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            if u >= n || v >= n {
                return Err(GraphError::EdgeOutOfBounds { u, v, n });
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self { n, edges: norm })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A vertex of a [`BipartiteGraph`], addressed by side and local index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BVertex {
    pub side: Side,
    pub index: usize,
}

impl BVertex {
    pub fn left(index: usize) -> Self {
        BVertex {
            side: Side::Left,
            index,
        }
    }

    pub fn right(index: usize) -> Self {
        BVertex {
            side: Side::Right,
            index,
        }
    }
}

/// A side assignment for every vertex of a simple graph such that every edge
/// joins Left to Right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub side: Vec<Side>,
}

/// A bipartite graph with parts X (left) and Y (right) and edges given as
/// `(x-index, y-index)` pairs, both 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<(usize, usize)>) -> Self {
        Self::try_new(n_left, n_right, edges).expect("invalid bipartite graph")
    }

    pub fn try_new(
        n_left: usize,
        n_right: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut norm = edges;
        for &(x, y) in &norm {
            if x >= n_left || y >= n_right {
                return Err(GraphError::BipartiteEdgeOutOfBounds {
                    x,
                    y,
                    n_left,
                    n_right,
                });
            }
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self {
            n_left,
            n_right,
            edges: norm,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn vertex_count(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.edges.binary_search(&(x, y)).is_ok()
    }

    pub fn part_size(&self, side: Side) -> usize {
        match side {
            Side::Left => self.n_left,
            Side::Right => self.n_right,
        }
    }

    pub fn degree(&self, v: BVertex) -> usize {
        match v.side {
            Side::Left => self.edges.iter().filter(|&&(x, _)| x == v.index).count(),
            Side::Right => self.edges.iter().filter(|&&(_, y)| y == v.index).count(),
        }
    }

    /// Degrees of all left vertices followed by all right vertices.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut left = vec![0usize; self.n_left];
        let mut right = vec![0usize; self.n_right];
        for &(x, y) in &self.edges {
            left[x] += 1;
            right[y] += 1;
        }
        (left, right)
    }

    pub fn max_degree(&self) -> usize {
        let (l, r) = self.degrees();
        l.into_iter().chain(r).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: BVertex) -> Vec<usize> {
        match v.side {
            Side::Left => self
                .edges
                .iter()
                .filter(|&&(x, _)| x == v.index)
                .map(|&(_, y)| y)
                .collect(),
            Side::Right => self
                .edges
                .iter()
                .filter(|&&(_, y)| y == v.index)
                .map(|&(x, _)| x)
                .collect(),
        }
    }

    /// The underlying simple graph: left vertices first (`0..n_left`), then
    /// right vertices (`n_left..n_left+n_right`).
    pub fn to_simple(&self) -> SimpleGraph {
        let edges = self
            .edges
            .iter()
            .map(|&(x, y)| (x, self.n_left + y))
            .collect();
        SimpleGraph::new(self.vertex_count(), edges)
    }

    /// The transposed graph: sides swapped, edges mirrored.
    pub fn transposed(&self) -> BipartiteGraph {
        let edges = self.edges.iter().map(|&(x, y)| (y, x)).collect();
        BipartiteGraph::new(self.n_right, self.n_left, edges)
    }

    /// Builds the typed bipartite graph of a simple graph under a given
    /// bipartition. Left/right local indices follow ascending vertex order.
    /// Returns the graph together with the local-to-global index maps.
    pub fn from_simple(
        g: &SimpleGraph,
        bipartition: &Bipartition,
    ) -> (BipartiteGraph, Vec<usize>, Vec<usize>) {
        assert_eq!(bipartition.side.len(), g.vertex_count());
        let mut left_map = Vec::new();
        let mut right_map = Vec::new();
        let mut local = vec![0usize; g.vertex_count()];
        for (v, &s) in bipartition.side.iter().enumerate() {
            match s {
                Side::Left => {
                    local[v] = left_map.len();
                    left_map.push(v);
                }
                Side::Right => {
                    local[v] = right_map.len();
                    right_map.push(v);
                }
            }
        }
        let edges = g
            .edges()
            .iter()
            .map(|&(u, v)| match bipartition.side[u] {
                Side::Left => (local[u], local[v]),
                Side::Right => (local[v], local[u]),
            })
            .collect();
        (
            BipartiteGraph::new(left_map.len(), right_map.len(), edges),
            left_map,
            right_map,
        )
    }

    /// Parses a graph6 line and derives the bipartition (BFS roots on the
    /// left). Fails on malformed input or odd cycles.
    pub fn from_graph6(line: &str) -> Result<BipartiteGraph, GraphError> {
        let g = graph6::parse_graph6(line)?;
        let bip = find_bipartition(&g)?;
        Ok(Self::from_simple(&g, &bip).0)
    }

    /// Encodes the underlying simple graph (left-first labeling) as graph6.
    pub fn to_graph6(&self) -> Result<String, Graph6Error> {
        graph6::encode_graph6(&self.to_simple())
    }
}

/// 2-colors each connected component by BFS, visiting components in ascending
/// order of their smallest vertex; every component root is assigned Left.
///
/// Returns the first odd cycle found (as a closed walk of vertices) when the
/// graph is not bipartite.
pub fn find_bipartition(g: &SimpleGraph) -> Result<Bipartition, GraphError> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut side: Vec<Option<Side>> = vec![None; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(Side::Left);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let s = side[u].unwrap();
            for &v in &adj[u] {
                match side[v] {
                    None => {
                        side[v] = Some(s.flip());
                        parent[v] = u;
                        depth[v] = depth[u] + 1;
                        queue.push_back(v);
                    }
                    Some(t) if t == s => {
                        return Err(GraphError::OddCycle(odd_cycle_witness(
                            u, v, &parent, &depth,
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(Bipartition {
        side: side.into_iter().map(|s| s.unwrap()).collect(),
    })
}

/// Reconstructs the closed odd walk `u .. lca .. v u` from BFS parents.
fn odd_cycle_witness(u: usize, v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut a, mut b) = (u, v);
    let mut up_a = vec![a];
    let mut up_b = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        up_a.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        up_b.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        up_a.push(a);
        up_b.push(b);
    }
    // up_a ends at the LCA; append the v-side path back down, excluding the LCA.
    up_b.pop();
    up_a.extend(up_b.into_iter().rev());
    up_a
}

/// One connected component of a bipartite graph, with maps from the
/// component's local indices back to the parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub graph: BipartiteGraph,
    /// Component left index -> parent left index.
    pub left_map: Vec<usize>,
    /// Component right index -> parent right index.
    pub right_map: Vec<usize>,
}

/// Splits a bipartite graph into connected components. Isolated vertices form
/// singleton components. Components are ordered by their smallest vertex in
/// the left-first ordering; local indices ascend with parent indices.
pub fn connected_components(g: &BipartiteGraph) -> Vec<Component> {
    let n = g.vertex_count();
    let simple = g.to_simple();
    let adj = simple.adjacency();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for root in 0..n {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = count;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }

    let mut left_maps = vec![Vec::new(); count];
    let mut right_maps = vec![Vec::new(); count];
    let mut local = vec![0usize; n];
    for v in 0..n {
        let c = comp[v];
        if v < g.n_left() {
            local[v] = left_maps[c].len();
            left_maps[c].push(v);
        } else {
            local[v] = right_maps[c].len();
            right_maps[c].push(v - g.n_left());
        }
    }
    let mut edges = vec![Vec::new(); count];
    for &(x, y) in g.edges() {
        let c = comp[x];
        edges[c].push((local[x], local[g.n_left() + y]));
    }
    (0..count)
        .map(|c| Component {
            graph: BipartiteGraph::new(left_maps[c].len(), right_maps[c].len(), edges[c].clone()),
            left_map: left_maps[c].clone(),
            right_map: right_maps[c].clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> SimpleGraph {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        SimpleGraph::new(n, edges)
    }

    #[test]
    fn c4_bipartition_alternates() {
        let bip = find_bipartition(&cycle(4)).unwrap();
        assert_eq!(
            bip.side,
            vec![Side::Left, Side::Right, Side::Left, Side::Right]
        );
    }

    #[test]
    fn triangle_reports_odd_cycle() {
        let err = find_bipartition(&cycle(3)).unwrap_err();
        let GraphError::OddCycle(cyc) = err else {
            panic!("expected odd cycle");
        };
        assert_eq!(cyc.len() % 2, 1);
        assert!(cyc.len() >= 3);
        // consecutive vertices (cyclically) must be adjacent and distinct
        let g = cycle(3);
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            assert!(g.has_edge(a, b), "{a} and {b} not adjacent in witness");
        }
    }

    #[test]
    fn odd_cycle_in_larger_graph() {
        // C_5 with a pendant path in front so the root is not on the cycle
        let g = SimpleGraph::new(
            7,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 2)],
        );
        let GraphError::OddCycle(cyc) = find_bipartition(&g).unwrap_err() else {
            panic!("expected odd cycle");
        };
        assert_eq!(cyc.len() % 2, 1);
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            assert!(g.has_edge(a, b));
        }
    }

    #[test]
    fn disjoint_edges_bipartition() {
        let g = SimpleGraph::new(4, vec![(0, 1), (2, 3)]);
        let bip = find_bipartition(&g).unwrap();
        assert_eq!(
            bip.side,
            vec![Side::Left, Side::Right, Side::Left, Side::Right]
        );
        let (bg, left_map, right_map) = BipartiteGraph::from_simple(&g, &bip);
        assert_eq!((bg.n_left(), bg.n_right()), (2, 2));
        assert_eq!(left_map, vec![0, 2]);
        assert_eq!(right_map, vec![1, 3]);
        assert_eq!(bg.edges(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn components_of_connected_graph() {
        let g = BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].graph, g);
        assert_eq!(comps[0].left_map, vec![0, 1]);
    }

    #[test]
    fn components_of_two_k2() {
        let g = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 1)]);
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].graph.edges(), &[(0, 0)]);
        assert_eq!(comps[1].graph.edges(), &[(0, 0)]);
        assert_eq!(comps[1].left_map, vec![1]);
        assert_eq!(comps[1].right_map, vec![1]);
    }

    #[test]
    fn edgeless_graph_splits_into_singletons() {
        let g = BipartiteGraph::new(2, 1, vec![]);
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.graph.edge_count() == 0));
        assert!(comps.iter().all(|c| c.graph.vertex_count() == 1));
    }

    #[test]
    fn from_graph6_typed_roundtrip() {
        // C_4 = K_{2,2}
        let g = BipartiteGraph::from_graph6("Cl").unwrap();
        assert_eq!((g.n_left(), g.n_right()), (2, 2));
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn every_edge_crosses_sides_exhaustively() {
        // all graphs on <= 5 vertices with <= 5 edges, built from edge masks
        for n in 1..=5usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let g = SimpleGraph::new(n, edges);
                if let Ok(bip) = find_bipartition(&g) {
                    for &(u, v) in g.edges() {
                        assert_ne!(bip.side[u], bip.side[v]);
                    }
                }
            }
        }
    }
}
