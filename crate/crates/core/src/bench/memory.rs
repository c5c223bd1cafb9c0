//! Best-effort resident-set sampling. On Linux the kernel's high-water mark
//! can be reset through `clear_refs`, which gives the peak of a single call;
//! elsewhere every sample reads as zero.

use std::fs;

fn status_kib(field: &str) -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with(field))?;
    line[field.len()..].trim().trim_end_matches("kB").trim().parse().ok()
}

pub struct PeakSampler {
    rss_before: Option<u64>,
}

impl PeakSampler {
    /// Resets the high-water mark and records the current RSS.
    pub fn start() -> Self {
        let _ = fs::write("/proc/self/clear_refs", "5");
        PeakSampler { rss_before: status_kib("VmRSS:") }
    }

    /// Peak RSS growth in bytes since `start`.
    pub fn finish(self) -> u64 {
        match (self.rss_before, status_kib("VmHWM:")) {
            (Some(before), Some(hwm)) => hwm.saturating_sub(before) * 1024,
            _ => 0,
        }
    }
}

/// Current resident set in bytes, if the platform exposes it.
pub fn resident_bytes() -> Option<u64> {
    status_kib("VmRSS:").map(|k| k * 1024)
}
