//! Append-only JSONL result log and the compacted snapshot next to it.

use crate::campaign::protocol::ResultRecord;
use crate::campaign::CampaignStats;
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const LOG_FILE: &str = "log.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const CONFIG_FILE: &str = "config.json";

pub struct ResultLog {
    writer: BufWriter<File>,
}

impl ResultLog {
    pub fn open_append(dir: &Path) -> io::Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(LOG_FILE))?;
        Ok(ResultLog {
            writer: BufWriter::new(file),
        })
    }

    /// Appends one record and flushes the line to the OS, so a killed
    /// coordinator loses at most a partial final line.
    pub fn append(&mut self, record: &ResultRecord) -> io::Result<()> {
        let line = serde_json::to_string(record).map_err(io::Error::other)?;
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()
    }

    pub fn sync(&mut self) -> io::Result<()> {
        self.writer.flush()?;
        self.writer.get_ref().sync_all()
    }
}

#[derive(Debug, Default)]
pub struct Replay {
    pub records: Vec<ResultRecord>,
    /// Lines that did not parse (a truncated tail after a crash).
    pub skipped_lines: usize,
}

/// Reads the log back; missing file means an empty campaign.
pub fn replay(dir: &Path) -> io::Result<Replay> {
    let path = dir.join(LOG_FILE);
    let mut replay = Replay::default();
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(replay),
        Err(e) => return Err(e),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ResultRecord>(&line) {
            Ok(record) => replay.records.push(record),
            Err(_) => replay.skipped_lines += 1,
        }
    }
    Ok(replay)
}

/// Compacted view of a campaign: enough to render stats without the log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub done_keys: Vec<String>,
    pub unresolved_keys: Vec<String>,
    pub stats: CampaignStats,
    pub complete: bool,
}

pub fn write_snapshot(dir: &Path, snapshot: &Snapshot) -> io::Result<()> {
    let tmp: PathBuf = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
    let file = File::create(&tmp)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, snapshot).map_err(io::Error::other)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    writer.get_ref().sync_all()?;
    std::fs::rename(tmp, dir.join(SNAPSHOT_FILE))
}

pub fn read_snapshot(dir: &Path) -> io::Result<Option<Snapshot>> {
    let path = dir.join(SNAPSHOT_FILE);
    match File::open(&path) {
        Ok(file) => {
            let snapshot = serde_json::from_reader(BufReader::new(file))
                .map_err(io::Error::other)?;
            Ok(Some(snapshot))
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::protocol::RecordStatus;

    fn record(key: &str) -> ResultRecord {
        ResultRecord {
            key: key.into(),
            graph6: "A_".into(),
            n_left: 1,
            n_right: 1,
            status: RecordStatus::Colored,
            coloring: Some(vec![1]),
            t: Some(1),
            seed: 0,
            nodes: 1,
            millis: 0,
            worker_id: "w".into(),
            verified: true,
        }
    }

    #[test]
    fn append_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = ResultLog::open_append(dir.path()).unwrap();
        log.append(&record("a")).unwrap();
        log.append(&record("b")).unwrap();
        log.sync().unwrap();
        drop(log);
        let got = replay(dir.path()).unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.skipped_lines, 0);
        assert_eq!(got.records[0].key, "a");
    }

    #[test]
    fn replay_tolerates_truncated_tail() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = ResultLog::open_append(dir.path()).unwrap();
        log.append(&record("a")).unwrap();
        log.sync().unwrap();
        drop(log);
        use std::io::Write as _;
        let mut file = OpenOptions::new()
            .append(true)
            .open(dir.path().join(LOG_FILE))
            .unwrap();
        file.write_all(b"{\"key\":\"b\",\"graph").unwrap();
        drop(file);
        let got = replay(dir.path()).unwrap();
        assert_eq!(got.records.len(), 1);
        assert_eq!(got.skipped_lines, 1);
    }

    #[test]
    fn missing_log_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(replay(dir.path()).unwrap().records.is_empty());
    }
}
