//! The worker side of the protocol: consume batches from a message stream,
//! solve each task within the batch deadline, stream results back one task at
//! a time.

use crate::campaign::protocol::{
    read_message, write_message, Message, RecordStatus, ResultRecord, WireTask, PROTOCOL_VERSION,
};
use crate::campaign::stable_hash;
use crate::graph::BipartiteGraph;
use crate::solver::{solve, SolveOutcome};
use std::io::{self, BufRead, Write};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct WorkerOptions {
    pub id: String,
    /// Fault injection: fraction of Colored results whose reported coloring
    /// is damaged before sending. Deterministic per task (keyed by
    /// `corrupt_seed`, task key and task seed). 0.0 disables it.
    pub corrupt_rate: f64,
    pub corrupt_seed: u64,
}

impl WorkerOptions {
    pub fn new(id: impl Into<String>) -> Self {
        WorkerOptions {
            id: id.into(),
            corrupt_rate: 0.0,
            corrupt_seed: 0,
        }
    }
}

/// Runs the worker loop until `bye` or end of input.
pub fn worker_main<R: BufRead, W: Write>(
    mut input: R,
    mut output: W,
    opts: &WorkerOptions,
) -> io::Result<()> {
    while let Some(next) = read_message(&mut input) {
        let parsed = next?;
        let message = match parsed {
            Ok(m) => m,
            Err(detail) => {
                write_message(&mut output, &Message::Error { message: detail })?;
                continue;
            }
        };
        match message {
            Message::Hello { version } => {
                if version != PROTOCOL_VERSION {
                    write_message(
                        &mut output,
                        &Message::Error {
                            message: format!(
                                "unsupported protocol version {version}, expected {PROTOCOL_VERSION}"
                            ),
                        },
                    )?;
                } else {
                    write_message(
                        &mut output,
                        &Message::Hello {
                            version: PROTOCOL_VERSION,
                        },
                    )?;
                }
            }
            Message::Batch {
                id,
                deadline_ms,
                tasks,
            } => {
                let started = Instant::now();
                for task in tasks {
                    let elapsed = started.elapsed().as_millis() as u64;
                    let remaining = deadline_ms.saturating_sub(elapsed);
                    let record = if remaining == 0 {
                        timeout_record(&task, &opts.id)
                    } else {
                        solve_task(&task, remaining, opts)
                    };
                    write_message(
                        &mut output,
                        &Message::Result {
                            id,
                            records: vec![record],
                        },
                    )?;
                }
            }
            Message::Bye => break,
            Message::Result { .. } => {
                write_message(
                    &mut output,
                    &Message::Error {
                        message: "workers do not accept result messages".into(),
                    },
                )?;
            }
            Message::Error { message } => {
                // peer-reported problem; nothing to do but keep serving
                let _ = message;
            }
        }
    }
    Ok(())
}

fn timeout_record(task: &WireTask, worker_id: &str) -> ResultRecord {
    ResultRecord {
        key: task.key.clone(),
        graph6: task.g6.clone(),
        n_left: 0,
        n_right: 0,
        status: RecordStatus::Timeout,
        coloring: None,
        t: None,
        seed: task.seed,
        nodes: 0,
        millis: 0,
        worker_id: worker_id.to_string(),
        verified: false,
    }
}

/// Solves one task under the remaining batch time. Solver `Unknown` outcomes
/// report as Timeout (retriable); a proof of non-colorability reports as
/// Rejected, which the retry cap escalates into a loud campaign failure.
pub fn solve_task(task: &WireTask, remaining_ms: u64, opts: &WorkerOptions) -> ResultRecord {
    let graph = match BipartiteGraph::from_graph6(&task.g6) {
        Ok(g) => g,
        Err(_) => {
            let mut r = timeout_record(task, &opts.id);
            r.status = RecordStatus::Rejected;
            return r;
        }
    };
    let mut params = task.params.with_seed(task.seed);
    params.time_budget_ms = if params.time_budget_ms == 0 {
        remaining_ms
    } else {
        params.time_budget_ms.min(remaining_ms)
    };

    let mut record = ResultRecord {
        key: task.key.clone(),
        graph6: task.g6.clone(),
        n_left: graph.n_left(),
        n_right: graph.n_right(),
        status: RecordStatus::Timeout,
        coloring: None,
        t: None,
        seed: task.seed,
        nodes: 0,
        millis: 0,
        worker_id: opts.id.clone(),
        verified: false,
    };
    match solve(&graph, &params) {
        Ok(SolveOutcome::Colorable {
            coloring,
            t,
            nodes,
            millis,
        }) => {
            record.status = RecordStatus::Colored;
            record.t = Some(t);
            record.nodes = nodes;
            record.millis = millis;
            let mut rows = coloring.rows().to_vec();
            if should_corrupt(task, opts) {
                corrupt(&mut rows);
            }
            record.coloring = Some(rows);
        }
        Ok(SolveOutcome::Unknown { nodes, millis, .. }) => {
            record.nodes = nodes;
            record.millis = millis;
        }
        Ok(SolveOutcome::NonColorable { nodes, millis }) => {
            record.status = RecordStatus::Rejected;
            record.nodes = nodes;
            record.millis = millis;
        }
        Err(_) => {
            record.status = RecordStatus::Rejected;
        }
    }
    record
}

fn should_corrupt(task: &WireTask, opts: &WorkerOptions) -> bool {
    if opts.corrupt_rate <= 0.0 {
        return false;
    }
    let h = stable_hash(&[
        &opts.corrupt_seed.to_le_bytes(),
        task.key.as_bytes(),
        &task.seed.to_le_bytes(),
    ]);
    (h as f64 / u64::MAX as f64) < opts.corrupt_rate
}

/// Blanks the first colored cell: the record keeps claiming Colored but the
/// coloring no longer covers the edge set, so verification must reject it.
fn corrupt(rows: &mut [u32]) {
    if let Some(cell) = rows.iter_mut().find(|c| **c != 0) {
        *cell = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::protocol::WireParams;
    use crate::solver::SearchMode;

    fn params() -> WireParams {
        WireParams {
            max_color: 3,
            node_budget: 0,
            time_budget_ms: 0,
            mode: SearchMode::RandomizedRestart,
            exact_t: None,
        }
    }

    fn run_worker(input: &str) -> Vec<Message> {
        let mut out = Vec::new();
        worker_main(input.as_bytes(), &mut out, &WorkerOptions::new("w0")).unwrap();
        let mut reader = &out[..];
        let mut messages = Vec::new();
        while let Some(next) = read_message(&mut reader) {
            messages.push(next.unwrap().unwrap());
        }
        messages
    }

    #[test]
    fn hello_bye_clean_exit() {
        let replies = run_worker("{\"type\":\"hello\",\"version\":1}\n{\"type\":\"bye\"}\n");
        assert_eq!(replies, vec![Message::Hello { version: 1 }]);
    }

    #[test]
    fn batch_of_easy_graphs_all_colored() {
        let tasks: Vec<WireTask> = ["A_", "Cl", "DQc"]
            .iter()
            .enumerate()
            .map(|(i, g6)| WireTask {
                key: format!("k{i}"),
                g6: g6.to_string(),
                seed: i as u64,
                params: params(),
            })
            .collect();
        let batch = serde_json::to_string(&Message::Batch {
            id: 1,
            deadline_ms: 60_000,
            tasks,
        })
        .unwrap();
        let replies = run_worker(&format!("{batch}\n{{\"type\":\"bye\"}}\n"));
        assert_eq!(replies.len(), 3);
        for reply in replies {
            let Message::Result { id, records } = reply else {
                panic!("expected result, got {reply:?}");
            };
            assert_eq!(id, 1);
            assert_eq!(records.len(), 1);
            assert_eq!(records[0].status, RecordStatus::Colored);
            assert!(!records[0].verified);
        }
    }

    #[test]
    fn zero_deadline_means_all_timeout() {
        let tasks: Vec<WireTask> = (0..3)
            .map(|i| WireTask {
                key: format!("k{i}"),
                g6: "A_".into(),
                seed: i,
                params: params(),
            })
            .collect();
        let batch = serde_json::to_string(&Message::Batch {
            id: 9,
            deadline_ms: 0,
            tasks,
        })
        .unwrap();
        let replies = run_worker(&format!("{batch}\n{{\"type\":\"bye\"}}\n"));
        assert_eq!(replies.len(), 3);
        for reply in replies {
            let Message::Result { records, .. } = reply else {
                panic!()
            };
            assert_eq!(records[0].status, RecordStatus::Timeout);
        }
    }

    #[test]
    fn malformed_message_gets_error_reply_and_service_continues() {
        let replies = run_worker(
            "this is not json\n{\"type\":\"hello\",\"version\":1}\n{\"type\":\"bye\"}\n",
        );
        assert_eq!(replies.len(), 2);
        assert!(matches!(replies[0], Message::Error { .. }));
        assert_eq!(replies[1], Message::Hello { version: 1 });
    }

    #[test]
    fn version_mismatch_is_an_error() {
        let replies = run_worker("{\"type\":\"hello\",\"version\":2}\n{\"type\":\"bye\"}\n");
        assert!(matches!(replies[0], Message::Error { .. }));
    }

    #[test]
    fn corruption_damages_the_coloring_not_the_claim() {
        let task = WireTask {
            key: "k".into(),
            g6: "Cl".into(),
            seed: 5,
            params: params(),
        };
        let honest = solve_task(
            &task,
            60_000,
            &WorkerOptions::new("w"),
        );
        let corrupted = solve_task(
            &task,
            60_000,
            &WorkerOptions {
                id: "w".into(),
                corrupt_rate: 1.0,
                corrupt_seed: 1,
            },
        );
        assert_eq!(honest.status, RecordStatus::Colored);
        assert_eq!(corrupted.status, RecordStatus::Colored);
        assert_ne!(honest.coloring, corrupted.coloring);
        assert_eq!(
            corrupted.coloring.as_ref().unwrap().iter().filter(|&&c| c != 0).count(),
            honest.coloring.as_ref().unwrap().iter().filter(|&&c| c != 0).count() - 1
        );
    }
}
