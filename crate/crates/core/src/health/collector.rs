//! Collection server: reassembles datagrams into containers, opens them and
//! checks them against the sidecar hashes.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::net::{SocketAddr, UdpSocket};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use sha2::{Digest, Sha256};

use super::clock::Clock;
use super::datagram::{split_file_id, TelemetryDatagram, SIDECAR_TYPE};
use super::report::{FileStatus, LatencyRow};
use super::sensors::StreamType;
use crate::abe::{CpPublicParams, CpSecretKey};
use crate::container::{open_cp, ContainerError};
use crate::pairing::PairingSuite;

#[derive(Clone, Debug)]
pub struct CollectorConfig {
    pub bind: SocketAddr,
    /// A file whose chunks are still incomplete this long after its first
    /// datagram is dropped.
    pub reassembly_timeout: Duration,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CollectorStats {
    pub datagrams: usize,
    pub malformed: usize,
    pub delivered: usize,
    pub verified: usize,
    pub hash_mismatch: usize,
    pub policy_not_satisfied: usize,
    pub auth_failures: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectedFile {
    pub file_id: u32,
    pub stream: StreamType,
    pub cycle: u32,
    pub payload: Vec<u8>,
}

struct Partial {
    first_seen_us: u64,
    chunks: Vec<Option<Vec<u8>>>,
    received: usize,
}

pub struct Collector {
    cfg: CollectorConfig,
    socket: UdpSocket,
    suite: PairingSuite,
    pk: CpPublicParams,
    sk: CpSecretKey,
    partial: HashMap<u32, Partial>,
    hashes: HashMap<u32, [u8; 32]>,
    finished: HashMap<u32, FileStatus>,
    pub files: Vec<CollectedFile>,
    pub rows: Vec<LatencyRow>,
    pub stats: CollectorStats,
}

impl Collector {
    pub fn bind(cfg: CollectorConfig, pk: CpPublicParams, sk: CpSecretKey) -> io::Result<Self> {
        let socket = UdpSocket::bind(cfg.bind)?;
        let suite = PairingSuite::new(pk.level());
        Ok(Collector {
            cfg,
            socket,
            suite,
            pk,
            sk,
            partial: HashMap::new(),
            hashes: HashMap::new(),
            finished: HashMap::new(),
            files: Vec::new(),
            rows: Vec::new(),
            stats: CollectorStats::default(),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.socket.local_addr()
    }

    /// Waits up to `wait` for one datagram and handles it, then expires
    /// stale partial files. Returns whether a datagram arrived.
    pub fn poll(&mut self, clock: &dyn Clock, wait: Duration) -> io::Result<bool> {
        self.socket.set_read_timeout(Some(wait.max(Duration::from_micros(100))))?;
        let mut buf = [0u8; 2048];
        let got = match self.socket.recv(&mut buf) {
            Ok(n) => {
                self.handle(&buf[..n], clock);
                true
            }
            Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => false,
            Err(e) => return Err(e),
        };
        self.expire(clock, false);
        Ok(got)
    }

    /// Serves until `stop` is raised, keeps draining until the socket has
    /// been quiet for `grace`, then drops whatever is still incomplete.
    pub fn run(&mut self, clock: &dyn Clock, stop: &AtomicBool, grace: Duration) -> io::Result<()> {
        while !stop.load(Ordering::Acquire) {
            self.poll(clock, Duration::from_millis(20))?;
        }
        self.drain(clock, grace)
    }

    /// Handles datagrams until the socket is quiet for `grace`, then drops
    /// every file that is still incomplete.
    pub fn drain(&mut self, clock: &dyn Clock, grace: Duration) -> io::Result<()> {
        while self.poll(clock, grace)? {}
        self.expire(clock, true);
        Ok(())
    }

    fn handle(&mut self, bytes: &[u8], clock: &dyn Clock) {
        self.stats.datagrams += 1;
        let Ok(d) = TelemetryDatagram::from_bytes(bytes) else {
            self.stats.malformed += 1;
            return;
        };
        if d.stream_type == SIDECAR_TYPE {
            match <[u8; 32]>::try_from(d.chunk.as_slice()) {
                Ok(h) => {
                    self.hashes.insert(d.file_id, h);
                }
                Err(_) => self.stats.malformed += 1,
            }
            return;
        }
        let (_, ty) = split_file_id(d.file_id);
        if ty != d.stream_type || StreamType::from_u8(ty).is_none() {
            self.stats.malformed += 1;
            return;
        }
        if self.finished.contains_key(&d.file_id) {
            return;
        }
        let now = clock.now_us();
        let p = self.partial.entry(d.file_id).or_insert_with(|| Partial {
            first_seen_us: now,
            chunks: vec![None; d.total_chunks as usize],
            received: 0,
        });
        if p.chunks.len() != d.total_chunks as usize {
            self.stats.malformed += 1;
            return;
        }
        let slot = &mut p.chunks[d.seq as usize];
        if slot.is_none() {
            *slot = Some(d.chunk);
            p.received += 1;
        }
        if p.received == p.chunks.len() {
            let p = self.partial.remove(&d.file_id).expect("present");
            let sealed: Vec<u8> = p.chunks.into_iter().flatten().flatten().collect();
            self.complete(d.file_id, d.timestamp_us, &sealed, clock);
        }
    }

    fn complete(&mut self, id: u32, closed_us: u64, sealed: &[u8], clock: &dyn Clock) {
        let (cycle, ty) = split_file_id(id);
        let stream = StreamType::from_u8(ty).expect("checked on arrival");
        let status = match open_cp(&self.suite, &self.pk, &self.sk, sealed) {
            Ok(payload) => {
                let expected = self.hashes.get(&id);
                let ok = expected.is_none_or(|h| *h == <[u8; 32]>::from(Sha256::digest(&payload)));
                if !ok {
                    self.stats.hash_mismatch += 1;
                    FileStatus::HashMismatch
                } else {
                    if expected.is_some() {
                        self.stats.verified += 1;
                    }
                    self.stats.delivered += 1;
                    self.files.push(CollectedFile { file_id: id, stream, cycle, payload });
                    FileStatus::Delivered
                }
            }
            Err(ContainerError::PolicyNotSatisfied) => {
                self.stats.policy_not_satisfied += 1;
                FileStatus::PolicyNotSatisfied
            }
            Err(e) => {
                log::debug!("file {id:#x}: {e}");
                self.stats.auth_failures += 1;
                FileStatus::AuthenticationFailure
            }
        };
        let mut row = LatencyRow::new(id, status).expect("known stream");
        row.end_to_end_ms = Some(clock.now_us().saturating_sub(closed_us) as f64 / 1e3);
        self.rows.push(row);
        self.finished.insert(id, status);
    }

    fn expire(&mut self, clock: &dyn Clock, all: bool) {
        let now = clock.now_us();
        let limit = self.cfg.reassembly_timeout.as_micros() as u64;
        let stale: Vec<u32> = self
            .partial
            .iter()
            .filter(|(_, p)| all || now.saturating_sub(p.first_seen_us) > limit)
            .map(|(id, _)| *id)
            .collect();
        let mut lost = stale;
        if all {
            // announced by a sidecar but not a single chunk arrived
            lost.extend(self.hashes.keys().filter(|id| !self.finished.contains_key(id) && !self.partial.contains_key(id)));
        }
        for id in lost {
            self.partial.remove(&id);
            if self.finished.contains_key(&id) {
                continue;
            }
            self.stats.dropped += 1;
            self.finished.insert(id, FileStatus::Dropped);
            if let Some(row) = LatencyRow::new(id, FileStatus::Dropped) {
                self.rows.push(row);
            }
        }
    }

    /// Verdict per file id so far.
    pub fn outcomes(&self) -> BTreeMap<u32, FileStatus> {
        self.finished.iter().map(|(k, v)| (*k, *v)).collect()
    }
}
