//! Line-delimited JSON protocol between the coordinator and workers, and the
//! persisted result record shape. Field names here are load-bearing: logs and
//! worker streams are inspected and replayed as written.

use crate::solver::{SearchMode, SolveParams};
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};

pub const PROTOCOL_VERSION: u32 = 1;

/// Solver knobs as they travel in a task; the per-attempt seed rides at the
/// task level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireParams {
    pub max_color: u32,
    pub node_budget: u64,
    pub time_budget_ms: u64,
    pub mode: SearchMode,
    pub exact_t: Option<u32>,
}

impl WireParams {
    pub fn with_seed(&self, seed: u64) -> SolveParams {
        SolveParams {
            seed,
            max_color: self.max_color,
            node_budget: self.node_budget,
            time_budget_ms: self.time_budget_ms,
            mode: self.mode,
            exact_t: self.exact_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireTask {
    pub key: String,
    pub g6: String,
    pub seed: u64,
    pub params: WireParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordStatus {
    Colored,
    Timeout,
    Rejected,
}

/// One persisted campaign result. `verified` is set by the coordinator after
/// the independent check; workers always send `false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub key: String,
    pub graph6: String,
    pub n_left: usize,
    pub n_right: usize,
    pub status: RecordStatus,
    /// Row-major colors, 0 for non-edges; present only when Colored.
    pub coloring: Option<Vec<u32>>,
    pub t: Option<u32>,
    pub seed: u64,
    pub nodes: u64,
    pub millis: u64,
    pub worker_id: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Hello {
        version: u32,
    },
    Batch {
        id: u64,
        deadline_ms: u64,
        tasks: Vec<WireTask>,
    },
    Result {
        id: u64,
        records: Vec<ResultRecord>,
    },
    Bye,
    Error {
        message: String,
    },
}

pub fn write_message<W: Write>(writer: &mut W, message: &Message) -> io::Result<()> {
    let line = serde_json::to_string(message).map_err(io::Error::other)?;
    writer.write_all(line.as_bytes())?;
    writer.write_all(b"\n")?;
    writer.flush()
}

/// Reads the next line and parses it. `None` at end of stream; a parse
/// failure carries the offending line for the error reply.
pub fn read_message<R: BufRead>(reader: &mut R) -> Option<io::Result<Result<Message, String>>> {
    let mut line = String::new();
    match reader.read_line(&mut line) {
        Ok(0) => None,
        Ok(_) => {
            let trimmed = line.trim_end_matches(['\n', '\r']);
            if trimmed.is_empty() {
                return read_message(reader);
            }
            match serde_json::from_str::<Message>(trimmed) {
                Ok(msg) => Some(Ok(Ok(msg))),
                Err(e) => Some(Ok(Err(format!("unparseable message: {e}")))),
            }
        }
        Err(e) => Some(Err(e)),
    }
}
