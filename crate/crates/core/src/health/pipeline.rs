//! Generator, sender and collector wired together over loopback UDP, each on
//! its own thread with its own pairing suite.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use super::clock::{Clock, RealClock};
use super::datagram::file_id;
use super::collector::{CollectedFile, Collector, CollectorConfig, CollectorStats};
use super::generator::{generate_streams, GeneratedFile, GeneratorConfig};
use super::report::{latency_stats, merge_rows, per_cycle, CycleLatency, LatencyRow, LatencyStats};
use super::sender::{Sender, SenderConfig, SenderError, SenderStats};
use super::sensors::StreamType;
use crate::abe::{cp, CpPublicParams};
use crate::pairing::{PairingSuite, SecurityLevel};
use crate::tree::{AttributeBag, BagError};

pub const DEFAULT_BUDGET_MS: f64 = 1000.0;
pub const DEFAULT_POLICY: &str = "Doctor and Cardiology and Hospital_A and ICU and Shift_Day";
pub const DEFAULT_KEY_ATTRS: &str = "Doctor, Cardiology, Hospital_A, ICU, Shift_Day";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Sender(#[from] SenderError),
    #[error("key attributes: {0}")]
    Attributes(#[from] BagError),
    #[error("key generation: {0}")]
    Keygen(#[from] crate::abe::AbeError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} thread panicked")]
    Panic(&'static str),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub dir: PathBuf,
    pub duration_s: u32,
    pub level: SecurityLevel,
    pub policy: String,
    /// Attributes of the collector's decryption key.
    pub key_attrs: String,
    pub budget_ms: f64,
    pub drop_every: Option<u32>,
    pub sidecar: bool,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(dir: impl Into<PathBuf>, duration_s: u32) -> Self {
        PipelineConfig {
            dir: dir.into(),
            duration_s,
            level: SecurityLevel::S80,
            policy: DEFAULT_POLICY.into(),
            key_attrs: DEFAULT_KEY_ATTRS.into(),
            budget_ms: DEFAULT_BUDGET_MS,
            drop_every: None,
            sidecar: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub generated: Vec<GeneratedFile>,
    pub collected: Vec<CollectedFile>,
    pub rows: Vec<LatencyRow>,
    pub cycles: Vec<CycleLatency>,
    pub sender: SenderStats,
    pub collector: CollectorStats,
    pub budget_ms: f64,
}

impl PipelineReport {
    /// Delivered files whose bytes match what the generator wrote.
    pub fn byte_identical(&self) -> usize {
        let by_id: BTreeMap<(u32, StreamType), &Vec<u8>> =
            self.generated.iter().map(|f| ((f.cycle, f.stream), &f.bytes)).collect();
        self.collected.iter().filter(|c| by_id.get(&(c.cycle, c.stream)) == Some(&&c.payload)).count()
    }

    pub fn cycles_within_budget(&self) -> usize {
        self.cycles.iter().filter(|c| c.within(self.budget_ms)).count()
    }

    pub fn latency(&self) -> Option<LatencyStats> {
        latency_stats(&self.rows)
    }
}

/// What the device side (generator plus sender) produced.
#[derive(Clone, Debug)]
pub struct SendReport {
    pub generated: Vec<GeneratedFile>,
    pub rows: Vec<LatencyRow>,
    pub stats: SenderStats,
}

/// Runs the generator on the calling thread and the sender on a second one
/// for `duration_s` cycles against `server`, starting at `start_us`.
pub fn run_send(
    cfg: &PipelineConfig,
    pk: CpPublicParams,
    server: SocketAddr,
    clock: Arc<dyn Clock>,
    start_us: u64,
) -> Result<SendReport, PipelineError> {
    std::fs::create_dir_all(&cfg.dir)?;
    let sender_cfg = SenderConfig {
        dir: cfg.dir.clone(),
        server,
        policy: cfg.policy.clone(),
        start_us,
        drop_every: cfg.drop_every,
        sidecar: cfg.sidecar,
        poll_interval: Duration::from_millis(2),
        seed: cfg.seed.wrapping_add(1),
    };
    let mut sender = Sender::new(sender_cfg, pk)?;
    let gen_cfg = GeneratorConfig { dir: cfg.dir.clone(), duration_s: cfg.duration_s, seed: cfg.seed, start_us };
    let generated_done = Arc::new(AtomicBool::new(false));
    let sender_thread = {
        let (clock, done) = (clock.clone(), generated_done.clone());
        thread::spawn(move || sender.run(clock.as_ref(), &done).map(|rows| (rows, sender.stats)))
    };
    let generated = generate_streams(&gen_cfg, clock.as_ref(), None, |_| {});
    generated_done.store(true, Ordering::Release);
    let (rows, stats) = sender_thread.join().map_err(|_| PipelineError::Panic("sender"))??;
    Ok(SendReport { generated: generated?, rows, stats })
}

/// Runs all three services in real time for `duration_s` one-second cycles.
pub fn run_loopback(cfg: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    let suite = PairingSuite::new(cfg.level);
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let (pk, mk) = cp::setup(&suite, &mut rng);
    let sk = cp::keygen(&suite, &pk, &mk, &AttributeBag::parse(&cfg.key_attrs)?, &mut rng)?;

    let clock: Arc<dyn Clock> = Arc::new(RealClock::new());
    let collector_cfg =
        CollectorConfig { bind: "127.0.0.1:0".parse().unwrap(), reassembly_timeout: Duration::from_secs(2) };
    let mut collector = Collector::bind(collector_cfg, pk.clone(), sk)?;
    let server = collector.local_addr()?;

    let sender_done = Arc::new(AtomicBool::new(false));
    let collector_thread = {
        let (clock, stop) = (clock.clone(), sender_done.clone());
        thread::spawn(move || collector.run(clock.as_ref(), &stop, Duration::from_millis(300)).map(|_| collector))
    };
    // first cycle starts a little ahead so every thread is up
    let start_us = clock.now_us() + 50_000;
    let sent = run_send(cfg, pk, server, clock, start_us);
    sender_done.store(true, Ordering::Release);
    let collector = collector_thread.join().map_err(|_| PipelineError::Panic("collector"))??;
    let sent = sent?;

    let rows = merge_rows(&sent.rows, &collector.rows);
    let ecg_sizes: BTreeMap<u32, usize> = sent
        .generated
        .iter()
        .filter(|f| f.stream == StreamType::Ecg)
        .map(|f| (file_id(f.cycle, f.stream as u8), f.bytes.len()))
        .collect();
    let cycles = per_cycle(&rows, &ecg_sizes);
    Ok(PipelineReport {
        generated: sent.generated,
        collected: collector.files,
        rows,
        cycles,
        sender: sent.stats,
        collector: collector.stats,
        budget_ms: cfg.budget_ms,
    })
}
