//! Coordinator/worker batch campaigns: filter graphs through the reductions,
//! dispatch solver tasks in batches, verify every returned coloring on the
//! independent path, requeue failures with fresh seeds until everything is
//! colored, and persist the results as an append-only JSONL log so runs can
//! resume after a crash.

pub mod coordinator;
pub mod log;
pub mod plan;
pub mod protocol;
pub mod worker;

use crate::canon::KeyError;
use crate::generator::{
    enumerate_bipartite, ingest_graph6, EnumSpec, GeneratorError, IngestError, IngestEvent,
};
use crate::graph::BipartiteGraph;
use crate::graph6::Graph6Error;
use crate::reductions::ReductionError;
use crate::solver::SearchMode;
use protocol::{RecordStatus, ResultRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Key(KeyError),
    #[error(transparent)]
    Graph6(Graph6Error),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("campaign config: {0}")]
    BadConfig(String),
    #[error("worker {id} failed: {detail}")]
    Worker { id: usize, detail: String },
    #[error("retry cap exceeded; unresolved graphs: {}", format_unresolved(.0))]
    Unresolved(Vec<(String, String)>),
    #[error("reconstructed coloring for {key} failed verification: {detail}")]
    ReconstructionInvalid { key: String, detail: String },
}

fn format_unresolved(keys: &[(String, String)]) -> String {
    keys.iter()
        .map(|(key, g6)| format!("{key} (graph6 {g6})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Stable 64-bit hash used everywhere a cross-platform, cross-run value is
/// needed (per-attempt seeds, fault-injection decisions).
pub fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 is long enough"))
}

/// Seed for a given attempt at a task: differs across attempts and keys, and
/// does not depend on scheduling.
pub fn attempt_seed(campaign_seed: u64, key: &str, attempt: u32) -> u64 {
    stable_hash(&[
        &campaign_seed.to_le_bytes(),
        key.as_bytes(),
        &attempt.to_le_bytes(),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// None uses |V| - 1 per task graph.
    pub max_color: Option<u32>,
    pub node_budget: u64,
    pub time_budget_ms: u64,
    pub mode: SearchMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_color: None,
            node_budget: 50_000_000,
            time_budget_ms: 0,
            mode: SearchMode::RandomizedRestart,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceConfig {
    /// Built-in enumeration over one or more bipartitions.
    Enum {
        pairs: Vec<[usize; 2]>,
        #[serde(default)]
        min_degree: usize,
        #[serde(default)]
        connected_only: bool,
        #[serde(default = "default_true")]
        dedup: bool,
    },
    /// graph6 lines from a file (e.g. external genbg output).
    File { path: String },
}

fn default_true() -> bool {
    true
}

fn default_batch_size() -> usize {
    200
}

fn default_deadline_ms() -> u64 {
    300_000
}

fn default_retry_cap() -> u32 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_deadline_ms")]
    pub deadline_ms: u64,
    #[serde(default = "default_retry_cap")]
    pub retry_cap: u32,
    #[serde(default)]
    pub campaign_seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Command line used to spawn each worker process.
    #[serde(default)]
    pub worker_cmd: Vec<String>,
    pub source: SourceConfig,
}

impl CampaignConfig {
    pub fn new(source: SourceConfig) -> Self {
        CampaignConfig {
            batch_size: default_batch_size(),
            deadline_ms: default_deadline_ms(),
            retry_cap: default_retry_cap(),
            campaign_seed: 0,
            solver: SolverConfig::default(),
            worker_cmd: Vec::new(),
            source,
        }
    }
}

/// Materializes the configured source. Returns the graphs and the number of
/// non-bipartite lines that were skipped.
pub fn source_graphs(source: &SourceConfig) -> Result<(Vec<BipartiteGraph>, u64), CampaignError> {
    match source {
        SourceConfig::Enum {
            pairs,
            min_degree,
            connected_only,
            dedup,
        } => {
            let mut graphs = Vec::new();
            for &[a, b] in pairs {
                let spec = EnumSpec {
                    n_left: a,
                    n_right: b,
                    min_degree: *min_degree,
                    connected_only: *connected_only,
                    dedup: *dedup,
                };
                graphs.extend(enumerate_bipartite(spec)?);
            }
            Ok((graphs, 0))
        }
        SourceConfig::File { path } => {
            let file = File::open(path)?;
            let mut graphs = Vec::new();
            let mut skipped = 0u64;
            for event in ingest_graph6(BufReader::new(file)) {
                match event? {
                    IngestEvent::Graph { graph, .. } => graphs.push(graph),
                    IngestEvent::SkippedNonBipartite { .. } => skipped += 1,
                }
            }
            Ok((graphs, skipped))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RowCounters {
    pub colored: u64,
    pub timeouts: u64,
    pub rejected: u64,
    pub cpu_millis: u64,
}

/// Per-bipartition stats row, in the shape of the paper's tables
/// (vertices split, number of graphs, CPU time).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitionRow {
    pub n_left: usize,
    pub n_right: usize,
    /// Distinct input graphs planned with these part sizes.
    pub graphs: u64,
    /// Solver tasks with these part sizes.
    pub tasks: u64,
    pub colored: u64,
    pub timeouts: u64,
    pub rejected: u64,
    pub cpu_millis: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CampaignStats {
    pub rows: Vec<BipartitionRow>,
    pub total_graphs: u64,
    pub total_tasks: u64,
    pub total_colored: u64,
    pub total_cpu_millis: u64,
    /// attempts needed -> number of task keys that needed that many.
    pub attempts_histogram: Vec<(u32, u64)>,
    pub skipped_non_bipartite: u64,
    pub duplicate_inputs: u64,
}

impl CampaignStats {
    /// Plain-text table, one row per bipartition.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("vertices     graphs      tasks    colored  timeouts  rejected     cpu ms\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:>2} / {:<2} {:>10} {:>10} {:>10} {:>9} {:>9} {:>10}\n",
                row.n_left,
                row.n_right,
                row.graphs,
                row.tasks,
                row.colored,
                row.timeouts,
                row.rejected,
                row.cpu_millis
            ));
        }
        out.push_str(&format!(
            "total   {:>10} {:>10} {:>10} {:>30}\n",
            self.total_graphs, self.total_tasks, self.total_colored, self.total_cpu_millis
        ));
        if !self.attempts_histogram.is_empty() {
            out.push_str("attempts histogram:");
            for (attempts, count) in &self.attempts_histogram {
                out.push_str(&format!("  {attempts}:{count}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A campaign rooted in a directory holding `config.json`, `log.jsonl` and
/// `snapshot.json`. The log is the source of truth; the plan is re-derived
/// from the config on load.
pub struct Campaign {
    pub dir: PathBuf,
    pub config: CampaignConfig,
    pub plan: plan::CampaignPlan,
    /// Verified records by key: tasks and reconstructed inputs.
    pub done: BTreeMap<String, ResultRecord>,
    /// Failed attempts so far, per task key.
    pub attempts: HashMap<String, u32>,
    pub unresolved: Vec<String>,
    pub skipped_non_bipartite: u64,
    row_counters: BTreeMap<(usize, usize), RowCounters>,
}

impl Campaign {
    /// Starts a fresh campaign: plans the source and writes the config
    /// snapshot. Fails if the directory already holds a campaign log.
    pub fn create(dir: &Path, config: CampaignConfig) -> Result<Campaign, CampaignError> {
        std::fs::create_dir_all(dir)?;
        if dir.join(log::LOG_FILE).exists() {
            return Err(CampaignError::BadConfig(format!(
                "{} already contains a campaign log; use resume",
                dir.display()
            )));
        }
        let config_path = dir.join(log::CONFIG_FILE);
        let mut file = File::create(config_path)?;
        serde_json::to_writer_pretty(&mut file, &config).map_err(io::Error::other)?;
        file.write_all(b"\n")?;
        file.sync_all()?;
        Self::assemble(dir.to_path_buf(), config, Vec::new())
    }

    /// Reopens an existing campaign: re-derives the plan and replays the log,
    /// re-verifying every Colored record before trusting it.
    pub fn load(dir: &Path) -> Result<Campaign, CampaignError> {
        let file = File::open(dir.join(log::CONFIG_FILE))?;
        let config: CampaignConfig =
            serde_json::from_reader(BufReader::new(file)).map_err(io::Error::other)?;
        let replayed = log::replay(dir)?;
        Self::assemble(dir.to_path_buf(), config, replayed.records)
    }

    fn assemble(
        dir: PathBuf,
        config: CampaignConfig,
        history: Vec<ResultRecord>,
    ) -> Result<Campaign, CampaignError> {
        let (graphs, skipped) = source_graphs(&config.source)?;
        let plan = plan::plan(graphs)?;
        let mut campaign = Campaign {
            dir,
            config,
            plan,
            done: BTreeMap::new(),
            attempts: HashMap::new(),
            unresolved: Vec::new(),
            skipped_non_bipartite: skipped,
            row_counters: BTreeMap::new(),
        };
        for record in history {
            campaign.absorb_history(record);
        }
        Ok(campaign)
    }

    /// Replays one logged record into the in-memory state.
    fn absorb_history(&mut self, record: ResultRecord) {
        match record.status {
            RecordStatus::Colored => {
                if !record.verified || self.done.contains_key(&record.key) {
                    return;
                }
                if self.verify_record(&record).is_ok() {
                    self.count_record(&record);
                    self.done.insert(record.key.clone(), record);
                }
            }
            RecordStatus::Timeout | RecordStatus::Rejected => {
                self.count_record(&record);
                *self.attempts.entry(record.key.clone()).or_insert(0) += 1;
            }
        }
    }

    /// Independent check of a Colored record against the planned graph for
    /// its key.
    pub fn verify_record(&self, record: &ResultRecord) -> Result<u32, String> {
        let graph = if let Some(task) = self.plan.task(&record.key) {
            &task.graph
        } else if let Some(input) = self.plan.input(&record.key) {
            input.trace.input()
        } else {
            return Err("record key is not in the plan".to_string());
        };
        if record.n_left != graph.n_left() || record.n_right != graph.n_right() {
            return Err(format!(
                "claimed shape {}x{} does not match {}x{}",
                record.n_left,
                record.n_right,
                graph.n_left(),
                graph.n_right()
            ));
        }
        let Some(rows) = &record.coloring else {
            return Err("Colored record without a coloring".to_string());
        };
        let coloring =
            crate::coloring::EdgeColoring::from_rows(graph.n_left(), graph.n_right(), rows.clone())
                .map_err(|e| e.to_string())?;
        let report = crate::verifier::verify(graph, &coloring).map_err(|e| e.to_string())?;
        if !report.is_valid_per_component() {
            return Err(format!("coloring invalid: {:?}", report.violations));
        }
        if record.t != Some(report.t) {
            return Err(format!("claimed t {:?} but verifier found {}", record.t, report.t));
        }
        Ok(report.t)
    }

    fn count_record(&mut self, record: &ResultRecord) {
        let entry = self
            .row_counters
            .entry((record.n_left, record.n_right))
            .or_default();
        match record.status {
            RecordStatus::Colored => entry.colored += 1,
            RecordStatus::Timeout => entry.timeouts += 1,
            RecordStatus::Rejected => entry.rejected += 1,
        }
        entry.cpu_millis += record.millis;
    }

    pub fn pending_tasks(&self) -> Vec<String> {
        self.plan
            .tasks
            .iter()
            .map(|t| t.key.clone())
            .filter(|k| !self.done.contains_key(k))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.plan
            .inputs
            .iter()
            .all(|input| self.done.contains_key(&input.key))
            && self
                .plan
                .tasks
                .iter()
                .all(|task| self.done.contains_key(&task.key))
    }

    /// key -> (status, coloring) over all planned inputs and tasks, the
    /// scheduling-independent view compared across runs.
    pub fn result_map(&self) -> BTreeMap<String, (RecordStatus, Option<Vec<u32>>)> {
        self.done
            .iter()
            .map(|(k, r)| (k.clone(), (r.status, r.coloring.clone())))
            .collect()
    }

    pub fn stats(&self) -> CampaignStats {
        let mut rows: BTreeMap<(usize, usize), BipartitionRow> = BTreeMap::new();
        let mut row = |dims: (usize, usize)| -> &mut BipartitionRow {
            rows.entry(dims).or_insert(BipartitionRow {
                n_left: dims.0,
                n_right: dims.1,
                graphs: 0,
                tasks: 0,
                colored: 0,
                timeouts: 0,
                rejected: 0,
                cpu_millis: 0,
            })
        };
        for input in &self.plan.inputs {
            row((input.n_left, input.n_right)).graphs += 1;
        }
        for task in &self.plan.tasks {
            row((task.graph.n_left(), task.graph.n_right())).tasks += 1;
        }
        for (&dims, counters) in &self.row_counters {
            let r = row(dims);
            r.colored += counters.colored;
            r.timeouts += counters.timeouts;
            r.rejected += counters.rejected;
            r.cpu_millis += counters.cpu_millis;
        }
        let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
        for task in &self.plan.tasks {
            if self.done.contains_key(&task.key) {
                let attempts = self.attempts.get(&task.key).copied().unwrap_or(0) + 1;
                *histogram.entry(attempts).or_insert(0) += 1;
            }
        }
        CampaignStats {
            total_graphs: self.plan.inputs.len() as u64,
            total_tasks: self.plan.tasks.len() as u64,
            total_colored: self.done.len() as u64,
            total_cpu_millis: rows.values().map(|r| r.cpu_millis).sum(),
            rows: rows.into_values().collect(),
            attempts_histogram: histogram.into_iter().collect(),
            skipped_non_bipartite: self.skipped_non_bipartite,
            duplicate_inputs: self.plan.duplicate_inputs as u64,
        }
    }

    pub fn write_snapshot(&self) -> io::Result<()> {
        log::write_snapshot(
            &self.dir,
            &log::Snapshot {
                done_keys: self.done.keys().cloned().collect(),
                unresolved_keys: self.unresolved.clone(),
                stats: self.stats(),
                complete: self.is_complete(),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attempt_seeds_differ_by_attempt_and_key() {
        let s1 = attempt_seed(7, "k1", 1);
        let s2 = attempt_seed(7, "k1", 2);
        let s3 = attempt_seed(7, "k2", 1);
        let s4 = attempt_seed(8, "k1", 1);
        assert_ne!(s1, s2);
        assert_ne!(s1, s3);
        assert_ne!(s1, s4);
        assert_eq!(s1, attempt_seed(7, "k1", 1));
    }

    #[test]
    fn config_defaults_mirror_the_documented_values() {
        let json = r#"{"source":{"type":"enum","pairs":[[1,1]]}}"#;
        let config: CampaignConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.batch_size, 200);
        assert_eq!(config.deadline_ms, 300_000);
        assert_eq!(config.retry_cap, 100);
        assert_eq!(config.campaign_seed, 0);
        assert!(matches!(
            config.source,
            SourceConfig::Enum { ref pairs, dedup: true, .. } if pairs == &vec![[1, 1]]
        ));
    }

    #[test]
    fn enum_source_streams_all_pairs() {
        let source = SourceConfig::Enum {
            pairs: vec![[1, 1], [1, 2]],
            min_degree: 0,
            connected_only: false,
            dedup: true,
        };
        let (graphs, skipped) = source_graphs(&source).unwrap();
        // 2 classes at (1,1) and 3 at (1,2): none, one edge, two edges
        assert_eq!(graphs.len(), 5);
        assert_eq!(skipped, 0);
    }
}
