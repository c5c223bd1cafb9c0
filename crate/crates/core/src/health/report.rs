use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;

use super::datagram::split_file_id;
use super::sensors::StreamType;
use crate::bench::stats;
use crate::fsutil::write_atomic;

pub const LATENCY_HEADER: [&str; 6] = ["cycle", "stream_type", "seal_ms", "send_ms", "end_to_end_ms", "status"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FileStatus {
    /// Left the sender; nothing heard from the collector (yet).
    Sent,
    SealFailed,
    SendFailed,
    /// Decrypted, and matched the sidecar hash when one was sent.
    Delivered,
    PolicyNotSatisfied,
    AuthenticationFailure,
    HashMismatch,
    /// Chunks missing when the reassembly window closed.
    Dropped,
}

impl FileStatus {
    pub fn name(self) -> &'static str {
        match self {
            FileStatus::Sent => "sent",
            FileStatus::SealFailed => "seal_failed",
            FileStatus::SendFailed => "send_failed",
            FileStatus::Delivered => "ok",
            FileStatus::PolicyNotSatisfied => "policy_not_satisfied",
            FileStatus::AuthenticationFailure => "auth_failed",
            FileStatus::HashMismatch => "hash_mismatch",
            FileStatus::Dropped => "dropped",
        }
    }
}

impl fmt::Display for FileStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One measurement file's trip. Sender-side fields are empty in rows the
/// collector produces on its own, and the other way round.
#[derive(Clone, Debug, PartialEq)]
pub struct LatencyRow {
    pub file_id: u32,
    pub cycle: u32,
    pub stream: StreamType,
    pub seal_ms: Option<f64>,
    pub send_ms: Option<f64>,
    /// File close to last chunk sent.
    pub sender_ms: Option<f64>,
    /// File close to decrypted and verified at the collector.
    pub end_to_end_ms: Option<f64>,
    pub status: FileStatus,
}

impl LatencyRow {
    pub fn new(file_id: u32, status: FileStatus) -> Option<Self> {
        let (cycle, ty) = split_file_id(file_id);
        Some(LatencyRow {
            file_id,
            cycle,
            stream: StreamType::from_u8(ty)?,
            seal_ms: None,
            send_ms: None,
            sender_ms: None,
            end_to_end_ms: None,
            status,
        })
    }
}

/// Joins sender rows with the collector's verdicts. A file the collector
/// never saw counts as dropped unless it already failed at the sender.
pub fn merge_rows(sender: &[LatencyRow], collector: &[LatencyRow]) -> Vec<LatencyRow> {
    let seen: BTreeMap<u32, &LatencyRow> = collector.iter().map(|r| (r.file_id, r)).collect();
    let mut out: Vec<LatencyRow> = sender
        .iter()
        .map(|s| {
            let mut r = s.clone();
            match seen.get(&s.file_id) {
                Some(c) => {
                    r.end_to_end_ms = c.end_to_end_ms;
                    r.status = c.status;
                }
                None if s.status == FileStatus::Sent => r.status = FileStatus::Dropped,
                None => {}
            }
            r
        })
        .collect();
    out.sort_by_key(|r| (r.cycle, r.stream));
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

pub fn latency_csv(rows: &[LatencyRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LATENCY_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.cycle.to_string(),
            r.stream.name().to_string(),
            opt(r.seal_ms),
            opt(r.send_ms),
            opt(r.end_to_end_ms),
            r.status.name().to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_latency_csv(path: &Path, rows: &[LatencyRow]) -> io::Result<()> {
    write_atomic(path, &latency_csv(rows))
}

/// Everything that happened to one cycle's files.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleLatency {
    pub cycle: u32,
    pub files: usize,
    pub delivered: usize,
    pub ecg_bytes: usize,
    /// Slowest file of the cycle, close to verified.
    pub max_end_to_end_ms: Option<f64>,
}

impl CycleLatency {
    pub fn within(&self, budget_ms: f64) -> bool {
        self.files == self.delivered && self.max_end_to_end_ms.is_some_and(|m| m <= budget_ms)
    }
}

pub fn per_cycle(rows: &[LatencyRow], ecg_sizes: &BTreeMap<u32, usize>) -> Vec<CycleLatency> {
    let mut by: BTreeMap<u32, CycleLatency> = BTreeMap::new();
    for r in rows {
        let c = by.entry(r.cycle).or_insert(CycleLatency {
            cycle: r.cycle,
            files: 0,
            delivered: 0,
            ecg_bytes: 0,
            max_end_to_end_ms: None,
        });
        c.files += 1;
        if r.status == FileStatus::Delivered {
            c.delivered += 1;
            if r.stream == StreamType::Ecg {
                c.ecg_bytes += ecg_sizes.get(&r.file_id).copied().unwrap_or(0);
            }
        }
        if let Some(e) = r.end_to_end_ms {
            c.max_end_to_end_ms = Some(c.max_end_to_end_ms.map_or(e, |m: f64| m.max(e)));
        }
    }
    by.into_values().collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatencyStats {
    pub count: usize,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

/// Nearest-rank statistics of the end-to-end latencies present in `rows`.
pub fn latency_stats(rows: &[LatencyRow]) -> Option<LatencyStats> {
    let mut v: Vec<f64> = rows.iter().filter_map(|r| r.end_to_end_ms).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let rank = ((0.95 * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Some(LatencyStats { count: v.len(), mean_ms: stats::mean(&v), p95_ms: v[rank - 1], max_ms: v[v.len() - 1] })
}
