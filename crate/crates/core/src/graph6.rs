//! graph6 encoding and decoding for simple graphs on at most 62 vertices.
//!
//! The format is the single-size-byte variant: byte `n + 63`, followed by the
//! upper triangle of the adjacency matrix in column-major order
//! (`x(0,1), x(0,2), x(1,2), x(0,3), ...`) packed into 6-bit groups, each
//! group offset by 63. Multi-byte sizes (`~` prefix, n > 62) are rejected.

use crate::graph::SimpleGraph;
use thiserror::Error;

pub const MAX_GRAPH6_VERTICES: usize = 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("multi-byte graph6 sizes (n > 62) are not supported")]
    MultiByteSize,
    #[error("malformed graph6 byte {byte:#04x} at position {pos} (must be 63..=126)")]
    MalformedByte { pos: usize, byte: u8 },
    #[error("truncated graph6 bit stream: expected {expected} data bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("trailing garbage after {expected} data bytes")]
    TrailingGarbage { expected: usize },
    #[error("nonzero padding bits in final graph6 byte")]
    NonzeroPadding,
    #[error("graph has {n} vertices; graph6 v1 supports at most 62")]
    OversizeN { n: usize },
}

fn data_bytes(n: usize) -> usize {
    (n * (n - 1) / 2).div_ceil(6)
}

/// Decodes one graph6 line (no trailing newline) into a simple graph.
pub fn parse_graph6(line: &str) -> Result<SimpleGraph, Graph6Error> {
    let bytes = line.as_bytes();
    let first = *bytes.first().ok_or(Graph6Error::Empty)?;
    if first == 126 {
        return Err(Graph6Error::MultiByteSize);
    }
    if !(63..=126).contains(&first) {
        return Err(Graph6Error::MalformedByte { pos: 0, byte: first });
    }
    let n = (first - 63) as usize;
    let expected = if n == 0 { 0 } else { data_bytes(n) };
    let data = &bytes[1..];
    if data.len() < expected {
        return Err(Graph6Error::Truncated {
            expected,
            found: data.len(),
        });
    }
    if data.len() > expected {
        return Err(Graph6Error::TrailingGarbage { expected });
    }
    for (i, &b) in data.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(Graph6Error::MalformedByte { pos: i + 1, byte: b });
        }
    }

    let nbits = n * (n - 1) / 2;
    let mut edges = Vec::new();
    let mut bit = 0usize;
    for j in 1..n {
        for i in 0..j {
            let group = (data[bit / 6] - 63) as usize;
            if group & (1 << (5 - bit % 6)) != 0 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    // The final group must be zero-padded.
    if nbits % 6 != 0 {
        let last = (data[expected - 1] - 63) as usize;
        let pad = 6 - nbits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::NonzeroPadding);
        }
    }
    Ok(SimpleGraph::new(n, edges))
}

/// Encodes a simple graph as a graph6 line (without trailing newline).
pub fn encode_graph6(g: &SimpleGraph) -> Result<String, Graph6Error> {
    let n = g.vertex_count();
    if n > MAX_GRAPH6_VERTICES {
        return Err(Graph6Error::OversizeN { n });
    }
    let mut out = Vec::with_capacity(1 + data_bytes(n.max(1)));
    out.push(n as u8 + 63);
    let mut group = 0u8;
    let mut fill = 0u8;
    for j in 1..n {
        for i in 0..j {
            group <<= 1;
            if g.has_edge(i, j) {
                group |= 1;
            }
            fill += 1;
            if fill == 6 {
                out.push(group + 63);
                group = 0;
                fill = 0;
            }
        }
    }
    if fill > 0 {
        out.push((group << (6 - fill)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}
