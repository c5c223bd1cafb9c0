//! Encryptor service: seals each completed measurement file under the
//! CP-ABE policy with a fresh key and ships it to the collector over UDP.

use std::io;
use std::net::{SocketAddr, UdpSocket};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::clock::Clock;
use super::datagram::{chunk_container, file_id, sidecar};
use super::generator::{cycle_close_us, pending_files};
use super::report::{FileStatus, LatencyRow};
use super::sensors::StreamType;
use crate::abe::CpPublicParams;
use crate::container::{seal_cp, ContainerError};
use crate::pairing::PairingSuite;
use crate::policy::parse_policy;
use crate::tree::compile;

#[derive(Debug, Error)]
pub enum SenderError {
    #[error("socket: {0}")]
    Io(#[from] io::Error),
    #[error("policy: {0}")]
    Policy(#[from] ContainerError),
}

#[derive(Clone, Debug)]
pub struct SenderConfig {
    pub dir: PathBuf,
    pub server: SocketAddr,
    pub policy: String,
    /// Clock reading at which cycle 0 started; file close times derive from it.
    pub start_us: u64,
    /// Test hook: silently skip every n-th data datagram.
    pub drop_every: Option<u32>,
    /// Announce each file with its plaintext SHA-256 first.
    pub sidecar: bool,
    pub poll_interval: Duration,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SenderStats {
    pub files: usize,
    pub sent: usize,
    pub seal_failed: usize,
    pub send_failed: usize,
    pub datagrams: usize,
    pub dropped_datagrams: usize,
    /// Most files found waiting in one directory scan.
    pub max_backlog: usize,
}

pub struct Sender {
    cfg: SenderConfig,
    suite: PairingSuite,
    pk: CpPublicParams,
    socket: UdpSocket,
    rng: ChaCha20Rng,
    data_count: u64,
    pub stats: SenderStats,
}

impl Sender {
    pub fn new(cfg: SenderConfig, pk: CpPublicParams) -> Result<Self, SenderError> {
        let ast = parse_policy(&cfg.policy).map_err(ContainerError::from)?;
        compile(&ast).map_err(|_| ContainerError::UnsatisfiablePolicy)?;
        let bind: SocketAddr = if cfg.server.is_ipv4() { "0.0.0.0:0" } else { "[::]:0" }.parse().unwrap();
        let socket = UdpSocket::bind(bind)?;
        // connected, so ICMP unreachable surfaces as a send error
        socket.connect(cfg.server)?;
        let suite = PairingSuite::new(pk.level());
        let rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        Ok(Sender { cfg, suite, pk, socket, rng, data_count: 0, stats: SenderStats::default() })
    }

    /// Seals and sends one file. The returned row carries the sender-side
    /// timings; socket errors mark it failed instead of aborting.
    pub fn send_file(&mut self, stream: StreamType, cycle: u32, payload: &[u8], clock: &dyn Clock) -> LatencyRow {
        let id = file_id(cycle, stream as u8);
        let closed = cycle_close_us(self.cfg.start_us, cycle);
        let mut row = LatencyRow::new(id, FileStatus::Sent).expect("known stream");
        self.stats.files += 1;

        let t0 = clock.now_us();
        let sealed = match seal_cp(&self.suite, &self.pk, &self.cfg.policy, payload, &mut self.rng) {
            Ok(c) => c.to_bytes(),
            Err(e) => {
                log::warn!("sealing {stream}-{cycle} failed: {e}");
                self.stats.seal_failed += 1;
                row.status = FileStatus::SealFailed;
                return row;
            }
        };
        let t1 = clock.now_us();
        let result = self.transmit(id, stream, closed, payload, &sealed);
        let t2 = clock.now_us();
        row.seal_ms = Some((t1 - t0) as f64 / 1e3);
        row.send_ms = Some((t2 - t1) as f64 / 1e3);
        row.sender_ms = Some(t2.saturating_sub(closed) as f64 / 1e3);
        match result {
            Ok(()) => self.stats.sent += 1,
            Err(e) => {
                log::warn!("sending {stream}-{cycle} failed: {e}");
                self.stats.send_failed += 1;
                row.status = FileStatus::SendFailed;
            }
        }
        row
    }

    fn transmit(&mut self, id: u32, stream: StreamType, closed: u64, payload: &[u8], sealed: &[u8]) -> io::Result<()> {
        if self.cfg.sidecar {
            let hash: [u8; 32] = Sha256::digest(payload).into();
            self.socket.send(&sidecar(id, closed, hash).to_bytes())?;
        }
        for d in chunk_container(stream as u8, id, closed, sealed) {
            self.data_count += 1;
            if self.cfg.drop_every.is_some_and(|k| k > 0 && self.data_count.is_multiple_of(u64::from(k))) {
                self.stats.dropped_datagrams += 1;
                continue;
            }
            self.socket.send(&d.to_bytes())?;
            self.stats.datagrams += 1;
        }
        Ok(())
    }

    /// Drains the handoff directory until `done` is raised and nothing is
    /// left, deleting each file once handled.
    pub fn run(&mut self, clock: &dyn Clock, done: &AtomicBool) -> io::Result<Vec<LatencyRow>> {
        let mut rows = Vec::new();
        loop {
            // read the flag first so files published just before it are seen
            let finished = done.load(Ordering::Acquire);
            let pending = pending_files(&self.cfg.dir)?;
            self.stats.max_backlog = self.stats.max_backlog.max(pending.len());
            if pending.is_empty() {
                if finished {
                    return Ok(rows);
                }
                std::thread::sleep(self.cfg.poll_interval);
                continue;
            }
            for (stream, cycle, path) in pending {
                let payload = std::fs::read(&path)?;
                rows.push(self.send_file(stream, cycle, &payload, clock));
                std::fs::remove_file(&path)?;
            }
        }
    }
}
