//! Reader service: turns the simulated sensors into one measurement file per
//! stream type and cycle.

use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::clock::Clock;
use super::sensors::StreamType;
use crate::fsutil::write_atomic;

pub const CYCLE_US: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub dir: PathBuf,
    pub duration_s: u32,
    pub seed: u64,
    /// Clock reading at which cycle 0 starts.
    pub start_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedFile {
    pub stream: StreamType,
    pub cycle: u32,
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub closed_at_us: u64,
}

pub fn file_name(stream: StreamType, cycle: u32) -> String {
    format!("{}-{cycle}.bin", stream.name())
}

/// Inverse of [`file_name`]; temp files and anything else yield `None`.
pub fn parse_file_name(name: &str) -> Option<(StreamType, u32)> {
    let stem = name.strip_suffix(".bin")?;
    let (ty, cycle) = stem.rsplit_once('-')?;
    if cycle.is_empty() || !cycle.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((ty.parse().ok()?, cycle.parse().ok()?))
}

/// Nominal close time of `cycle`: the end of its one-second window.
pub fn cycle_close_us(start_us: u64, cycle: u32) -> u64 {
    start_us + (u64::from(cycle) + 1) * CYCLE_US
}

fn stream_rng(seed: u64, stream: StreamType) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ ((stream as u64) << 56))
}

/// Contents of one stream's file for `cycle`, or `None` when the sensor
/// takes no sample in that window.
fn cycle_payload(stream: StreamType, cycle: u32, rng: &mut ChaCha20Rng) -> Option<Vec<u8>> {
    let spec = stream.spec();
    let from = u64::from(cycle) * CYCLE_US;
    let first = from.div_ceil(spec.interval_us);
    let n = spec.samples_in(from, from + CYCLE_US);
    if n == 0 {
        return None;
    }
    Some((first..first + n).flat_map(|k| spec.sample(k, rng)).collect())
}

/// Runs the reader for `duration_s` cycles, sleeping on `clock` until each
/// cycle ends and then publishing its files atomically. Stops early when
/// `stop` is raised.
pub fn generate_streams(
    cfg: &GeneratorConfig,
    clock: &dyn Clock,
    stop: Option<&AtomicBool>,
    mut on_file: impl FnMut(&GeneratedFile),
) -> io::Result<Vec<GeneratedFile>> {
    let mut rngs: Vec<(StreamType, ChaCha20Rng)> =
        StreamType::ALL.iter().map(|&s| (s, stream_rng(cfg.seed, s))).collect();
    let mut out = Vec::new();
    for cycle in 0..cfg.duration_s {
        if stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            break;
        }
        // sample values are drawn during the window, the file closes at its end
        let payloads: Vec<(StreamType, Vec<u8>)> = rngs
            .iter_mut()
            .filter_map(|(s, rng)| cycle_payload(*s, cycle, rng).map(|p| (*s, p)))
            .collect();
        clock.sleep_until(cycle_close_us(cfg.start_us, cycle));
        for (stream, bytes) in payloads {
            let path = cfg.dir.join(file_name(stream, cycle));
            write_atomic(&path, &bytes)?;
            let f = GeneratedFile { stream, cycle, path, bytes, closed_at_us: clock.now_us() };
            on_file(&f);
            out.push(f);
        }
    }
    Ok(out)
}

/// Completed measurement files currently in `dir`, oldest cycle first.
pub fn pending_files(dir: &Path) -> io::Result<Vec<(StreamType, u32, PathBuf)>> {
    let mut v = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if let Some((s, c)) = entry.file_name().to_str().and_then(parse_file_name) {
            v.push((s, c, entry.path()));
        }
    }
    v.sort_by_key(|(s, c, _)| (*c, *s));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::health::clock::SimClock;

    fn run(seconds: u32) -> (tempfile::TempDir, Vec<GeneratedFile>, SimClock) {
        let dir = tempfile::tempdir().unwrap();
        let clock = SimClock::new(5_000_000);
        let cfg = GeneratorConfig { dir: dir.path().into(), duration_s: seconds, seed: 1, start_us: 5_000_000 };
        let files = generate_streams(&cfg, &clock, None, |_| {}).unwrap();
        (dir, files, clock)
    }

    fn total(files: &[GeneratedFile], s: StreamType) -> (usize, usize) {
        let v: Vec<_> = files.iter().filter(|f| f.stream == s).collect();
        (v.len(), v.iter().map(|f| f.bytes.len()).sum())
    }

    #[test]
    fn ten_seconds_of_ecg() {
        let (dir, files, clock) = run(10);
        assert_eq!(total(&files, StreamType::Ecg), (10, 15_000));
        assert!(files.iter().filter(|f| f.stream == StreamType::Ecg).all(|f| f.bytes.len() == 1500));
        assert_eq!(total(&files, StreamType::SpO2), (10, 30));
        assert_eq!(total(&files, StreamType::HeartRate), (2, 2));
        assert_eq!(total(&files, StreamType::Respiration), (1, 1));
        assert_eq!(clock.now_us(), 15_000_000);
        assert_eq!(pending_files(dir.path()).unwrap().len(), files.len());
        for f in &files {
            assert_eq!(std::fs::read(&f.path).unwrap(), f.bytes);
            assert_eq!(f.closed_at_us, cycle_close_us(5_000_000, f.cycle));
        }
    }

    #[test]
    fn one_temperature_file_per_minute() {
        let (_d, files, _) = run(60);
        assert_eq!(total(&files, StreamType::BodyTemp), (1, 3));
        assert_eq!(total(&files, StreamType::HeartRate), (12, 12));
        assert_eq!(total(&files, StreamType::Ecg), (60, 90_000));
    }

    #[test]
    fn zero_duration_writes_nothing() {
        let (dir, files, _) = run(0);
        assert!(files.is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn deterministic_and_named() {
        let (_a, f1, _) = run(3);
        let (_b, f2, _) = run(3);
        assert_eq!(f1.iter().map(|f| &f.bytes).collect::<Vec<_>>(), f2.iter().map(|f| &f.bytes).collect::<Vec<_>>());
        assert_eq!(file_name(StreamType::Ecg, 12), "ecg-12.bin");
        assert_eq!(parse_file_name("ecg-12.bin"), Some((StreamType::Ecg, 12)));
        assert_eq!(parse_file_name(".ecg-12.bin.tmp77"), None);
        assert_eq!(parse_file_name("ecg-.bin"), None);
        assert_eq!(parse_file_name("foo-1.bin"), None);
    }

    #[test]
    fn stop_flag_ends_early() {
        let dir = tempfile::tempdir().unwrap();
        let clock = SimClock::new(0);
        let stop = AtomicBool::new(true);
        let cfg = GeneratorConfig { dir: dir.path().into(), duration_s: 5, seed: 0, start_us: 0 };
        assert!(generate_streams(&cfg, &clock, Some(&stop), |_| {}).unwrap().is_empty());
    }
}
