//! Interval edge-coloring of bipartite graphs.
//!
//! An interval t-coloring assigns colors 1..=t to edges so that adjacent
//! edges differ, every color is used, and the colors at each vertex form a
//! consecutive run. This crate decides colorability by backtracking over the
//! biadjacency matrix, filters easy instances through pendant/component
//! reductions, verifies every witness on an independent path, and runs batch
//! campaigns over enumerated or ingested graph families.

pub mod campaign;
pub mod canon;
pub mod coloring;
pub mod generator;
pub mod graph;
pub mod graph6;
pub mod oracle;
pub mod reductions;
pub mod solver;
pub mod verifier;

pub use canon::{canonical_form, canonical_key, CanonicalForm, CanonicalKey};
pub use coloring::EdgeColoring;
pub use graph::{
    connected_components, find_bipartition, BipartiteGraph, Bipartition, BVertex, Side,
    SimpleGraph,
};
pub use graph6::{encode_graph6, parse_graph6};
pub use reductions::{classify, extend_pendant, reconstruct, reduce, Classification,
    ReductionTrace};
pub use solver::{
    normalize, possible_colors, solve, spectrum, SearchMode, SolveOutcome, SolveParams,
    SpectrumResult,
};
pub use verifier::{palette, verify, VerificationReport};
