use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

/// Microsecond time source shared by the generator, sender and collector.
pub trait Clock: Send + Sync {
    fn now_us(&self) -> u64;
    fn sleep_until(&self, t_us: u64);
}

/// Wall time anchored to the Unix epoch once, then advanced by a monotonic
/// clock, so readings from different threads and processes on one host
/// are comparable and never go backwards.
#[derive(Clone, Debug)]
pub struct RealClock {
    base: Instant,
    base_us: u64,
}

impl RealClock {
    pub fn new() -> Self {
        let base_us = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_micros() as u64).unwrap_or(0);
        RealClock { base: Instant::now(), base_us }
    }
}

impl Default for RealClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for RealClock {
    fn now_us(&self) -> u64 {
        self.base_us + self.base.elapsed().as_micros() as u64
    }

    fn sleep_until(&self, t_us: u64) {
        let now = self.now_us();
        if t_us > now {
            std::thread::sleep(Duration::from_micros(t_us - now));
        }
    }
}

/// Simulated time: sleeping jumps the clock forward instantly.
#[derive(Clone, Debug, Default)]
pub struct SimClock {
    now: Arc<AtomicU64>,
}

impl SimClock {
    pub fn new(start_us: u64) -> Self {
        SimClock { now: Arc::new(AtomicU64::new(start_us)) }
    }

    pub fn advance(&self, us: u64) {
        self.now.fetch_add(us, Ordering::SeqCst);
    }
}

impl Clock for SimClock {
    fn now_us(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }

    fn sleep_until(&self, t_us: u64) {
        self.now.fetch_max(t_us, Ordering::SeqCst);
    }
}
