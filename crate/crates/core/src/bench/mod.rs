//! Measurement harness: wall time, peak memory, operation counts and an
//! energy estimate for encryption and decryption across schemes, security
//! levels and attribute counts.

mod energy;
mod memory;
mod report;
pub mod stats;

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::abe::{cp, kp, Scheme};
use crate::pairing::{OpCounters, PairingSuite, SecurityLevel};
use crate::tree::{AccessTree, AttributeBag};

pub use energy::{estimate_energy, DeviceProfile};
pub use memory::{resident_bytes, PeakSampler};
pub use report::{plot_svg, summary_csv, write_outputs, BenchOutputs, CSV_HEADER, SUMMARY_HEADER};

pub const MAX_ATTRS: usize = 64;
pub const MIN_TRIALS: usize = 3;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    InvalidConfig(String),
    #[error("cannot write bench output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchOp {
    Encrypt,
    Decrypt,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Encrypt => "encrypt",
            BenchOp::Decrypt => "decrypt",
        }
    }
}

impl FromStr for BenchOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "encrypt" | "enc" => Ok(BenchOp::Encrypt),
            "decrypt" | "dec" => Ok(BenchOp::Decrypt),
            _ => Err(format!("unknown operation `{s}`")),
        }
    }
}

/// How the benchmark policy over `attr_1 .. attr_n` is built.
///
/// The chains nest two-input gates, `attr_1 and (attr_2 and (...))`, the
/// way a binary-operator policy parser leaves them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyShape {
    AndChain,
    OrChain,
    /// Random threshold gates, reproducible from the config seed and `n`.
    Random,
}

impl FromStr for PolicyShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "and" | "and-chain" => Ok(PolicyShape::AndChain),
            "or" | "or-chain" => Ok(PolicyShape::OrChain),
            "random" => Ok(PolicyShape::Random),
            _ => Err(format!("unknown policy shape `{s}` (and, or, random)")),
        }
    }
}

pub fn bench_attribute(i: usize) -> String {
    format!("attr_{i}")
}

/// Builds the benchmark tree over `attr_1 .. attr_n`.
pub fn bench_tree(shape: PolicyShape, n: usize, seed: u64) -> AccessTree {
    assert!(n >= 1);
    let leaves: Vec<AccessTree> = (1..=n).map(|i| AccessTree::leaf(bench_attribute(i))).collect();
    match shape {
        PolicyShape::AndChain => chain(leaves, 2),
        PolicyShape::OrChain => chain(leaves, 1),
        PolicyShape::Random => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            random_gates(leaves, &mut rng)
        }
    }
}

fn chain(mut leaves: Vec<AccessTree>, k: usize) -> AccessTree {
    let mut acc = leaves.pop().expect("non-empty");
    while let Some(l) = leaves.pop() {
        acc = AccessTree::Threshold { k, children: vec![l, acc] };
    }
    acc
}

fn random_gates(mut nodes: Vec<AccessTree>, rng: &mut impl Rng) -> AccessTree {
    while nodes.len() > 1 {
        let take = rng.random_range(2..=nodes.len().min(4));
        let start = rng.random_range(0..=nodes.len() - take);
        let children: Vec<AccessTree> = nodes.drain(start..start + take).collect();
        let k = rng.random_range(1..=children.len());
        nodes.insert(start, AccessTree::Threshold { k, children });
    }
    nodes.pop().expect("non-empty")
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub schemes: Vec<Scheme>,
    pub levels: Vec<SecurityLevel>,
    pub attr_counts: Vec<usize>,
    pub trials: usize,
    pub ops: Vec<BenchOp>,
    pub shape: PolicyShape,
    pub device: DeviceProfile,
    pub seed: u64,
    /// Raw CSV path. The summary goes next to it as `<stem>.summary.csv`.
    pub output: Option<PathBuf>,
    pub plots: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            schemes: vec![Scheme::Cp],
            levels: SecurityLevel::ALL.to_vec(),
            attr_counts: (1..=30).collect(),
            trials: 5,
            ops: vec![BenchOp::Encrypt, BenchOp::Decrypt],
            shape: PolicyShape::AndChain,
            device: DeviceProfile::default(),
            seed: 0,
            output: None,
            plots: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.schemes.is_empty() || self.levels.is_empty() || self.ops.is_empty() {
            return bad("schemes, levels and operations must be non-empty".into());
        }
        if self.attr_counts.is_empty() {
            return bad("no attribute counts".into());
        }
        if let Some(&n) = self.attr_counts.iter().find(|&&n| n == 0 || n > MAX_ATTRS) {
            return bad(format!("attribute count {n} outside 1..={MAX_ATTRS}"));
        }
        if self.trials < MIN_TRIALS {
            return bad(format!("need at least {MIN_TRIALS} trials, got {}", self.trials));
        }
        Ok(())
    }
}

/// One measured call.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub scheme: Scheme,
    pub op: BenchOp,
    pub level: SecurityLevel,
    pub n_attrs: usize,
    pub trial: usize,
    pub wall_time_ms: f64,
    pub peak_mem_bytes: u64,
    pub counters: OpCounters,
    pub energy_est_j: f64,
}

impl BenchRecord {
    pub fn exp_count(&self) -> u64 {
        self.counters.exponentiations()
    }

    pub fn pairing_count(&self) -> u64 {
        self.counters.pairings
    }

    pub fn hash_count(&self) -> u64 {
        self.counters.hash_to_group
    }
}

/// Per-cell aggregate over the trials.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub scheme: Scheme,
    pub op: BenchOp,
    pub level: SecurityLevel,
    pub n_attrs: usize,
    pub trials: usize,
    pub mean_ms: f64,
    pub ci95_ms: f64,
    pub median_ms: f64,
    pub mean_energy_j: f64,
    pub counters: OpCounters,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<CellSummary>,
    pub outputs: Option<BenchOutputs>,
}

impl BenchReport {
    pub fn cell(&self, scheme: Scheme, op: BenchOp, level: SecurityLevel, n: usize) -> Option<&CellSummary> {
        self.summary.iter().find(|c| c.scheme == scheme && c.op == op && c.level == level && c.n_attrs == n)
    }
}

pub fn summarize(records: &[BenchRecord]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let r0 = &records[i];
        let same = |r: &BenchRecord| r.scheme == r0.scheme && r.op == r0.op && r.level == r0.level && r.n_attrs == r0.n_attrs;
        let cell: Vec<&BenchRecord> = records[i..].iter().take_while(|r| same(r)).collect();
        let times: Vec<f64> = cell.iter().map(|r| r.wall_time_ms).collect();
        let energy: Vec<f64> = cell.iter().map(|r| r.energy_est_j).collect();
        out.push(CellSummary {
            scheme: r0.scheme,
            op: r0.op,
            level: r0.level,
            n_attrs: r0.n_attrs,
            trials: cell.len(),
            mean_ms: stats::mean(&times),
            ci95_ms: stats::ci95_half_width(&times),
            median_ms: stats::median(&times),
            mean_energy_j: stats::mean(&energy),
            counters: r0.counters,
        });
        i += cell.len();
    }
    out
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Keys and parameters for one (scheme, level), covering the largest count.
enum Fixture {
    Cp { pk: cp::CpPublicParams, sk: cp::CpSecretKey },
    Kp { pk: kp::KpPublicParams, mk: kp::KpMasterKey, universe: kp::KpUniverse, public: kp::KpPublicUniverse },
}

impl Fixture {
    fn new(suite: &PairingSuite, scheme: Scheme, max_n: usize, rng: &mut ChaCha20Rng) -> Fixture {
        let bag = AttributeBag::from_canonical((1..=max_n).map(bench_attribute));
        match scheme {
            Scheme::Cp => {
                let (pk, mk) = cp::setup(suite, rng);
                let sk = cp::keygen(suite, &pk, &mk, &bag, rng).expect("non-empty bag");
                Fixture::Cp { pk, sk }
            }
            Scheme::Kp => {
                let (pk, mk, mut universe) = kp::setup(suite, rng);
                universe.register_all(suite, &bag, rng).expect("fresh universe");
                let public = universe.public();
                Fixture::Kp { pk, mk, universe, public }
            }
        }
    }
}

/// One cell prepared for repeated trials.
enum Prepared<'a> {
    Cp { pk: &'a cp::CpPublicParams, sk: &'a cp::CpSecretKey, tree: AccessTree },
    Kp { pk: &'a kp::KpPublicParams, key: kp::KpKey, public: &'a kp::KpPublicUniverse, bag: AttributeBag },
}

enum Sealed {
    Cp(cp::CpCiphertext),
    Kp(kp::KpCiphertext),
}

impl<'a> Prepared<'a> {
    fn new(suite: &PairingSuite, fx: &'a Fixture, tree: AccessTree, n: usize, rng: &mut ChaCha20Rng) -> Self {
        match fx {
            Fixture::Cp { pk, sk } => Prepared::Cp { pk, sk, tree },
            Fixture::Kp { pk, mk, universe, public } => {
                let key = kp::keygen(suite, pk, mk, universe, &tree, rng).expect("registered attributes");
                let bag = AttributeBag::from_canonical((1..=n).map(bench_attribute));
                Prepared::Kp { pk, key, public, bag }
            }
        }
    }

    fn encrypt(&self, suite: &PairingSuite, rng: &mut ChaCha20Rng) -> Sealed {
        match self {
            Prepared::Cp { pk, tree, .. } => Sealed::Cp(cp::encrypt(suite, pk, tree, rng).expect("valid tree").0),
            Prepared::Kp { pk, public, bag, .. } => {
                Sealed::Kp(kp::encrypt(suite, pk, public, bag, rng).expect("registered bag").0)
            }
        }
    }

    fn decrypt(&self, suite: &PairingSuite, ct: &Sealed) {
        let k = match (self, ct) {
            (Prepared::Cp { pk, sk, .. }, Sealed::Cp(ct)) => cp::decrypt(suite, pk, sk, ct),
            (Prepared::Kp { pk, key, .. }, Sealed::Kp(ct)) => kp::decrypt(suite, pk, key, ct),
            _ => unreachable!("ciphertext from the same cell"),
        };
        std::hint::black_box(k.expect("bench key satisfies its own policy"));
    }
}

struct Measured<T> {
    value: T,
    wall_ms: f64,
    peak: u64,
    counters: OpCounters,
}

fn measure<T>(suite: &PairingSuite, f: impl FnOnce() -> T) -> Measured<T> {
    let sampler = PeakSampler::start();
    let before = suite.counters();
    let start = Instant::now();
    let value = f();
    let wall_ms = ms(start);
    let counters = suite.counters().since(&before);
    Measured { value, wall_ms, peak: sampler.finish(), counters }
}

/// Runs every (scheme, level, n) cell: one unrecorded warmup, then
/// `trials` recorded encrypt/decrypt pairs. Writes the CSV, summary and
/// optional plots when an output path is configured.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let max_n = *config.attr_counts.iter().max().expect("validated");
    let mut records = Vec::new();
    for &scheme in &config.schemes {
        for &level in &config.levels {
            let suite = PairingSuite::new(level);
            let mut rng = ChaCha20Rng::seed_from_u64(config.seed ^ ((scheme as u64) << 32) ^ u64::from(level.bits()));
            let fx = Fixture::new(&suite, scheme, max_n, &mut rng);
            let cells: Vec<(usize, Prepared)> = config
                .attr_counts
                .iter()
                .map(|&n| (n, Prepared::new(&suite, &fx, bench_tree(config.shape, n, config.seed), n, &mut rng)))
                .collect();
            for (_, cell) in &cells {
                let warm = cell.encrypt(&suite, &mut rng);
                cell.decrypt(&suite, &warm);
            }
            // Each trial sweeps every count in a fresh order, so slow phases
            // of a shared machine land on random cells rather than on runs of
            // neighbouring counts.
            let want_dec = config.ops.contains(&BenchOp::Decrypt);
            let mut order: Vec<usize> = (0..cells.len()).collect();
            for trial in 1..=config.trials {
                log::info!("bench {scheme} {level} trial {trial}/{}", config.trials);
                order.shuffle(&mut rng);
                for &i in &order {
                    let (n, cell) = &cells[i];
                    let enc = measure(&suite, || cell.encrypt(&suite, &mut rng));
                    let dec = want_dec.then(|| measure(&suite, || cell.decrypt(&suite, &enc.value)));
                    for &op in &config.ops {
                        let m = match op {
                            BenchOp::Encrypt => (enc.wall_ms, enc.peak, enc.counters),
                            BenchOp::Decrypt => dec.as_ref().map(|d| (d.wall_ms, d.peak, d.counters)).expect("measured"),
                        };
                        let (wall_ms, peak, counters) = m;
                        records.push(BenchRecord {
                            scheme,
                            op,
                            level,
                            n_attrs: *n,
                            trial,
                            wall_time_ms: wall_ms,
                            peak_mem_bytes: peak,
                            counters,
                            energy_est_j: estimate_energy(&config.device, wall_ms),
                        });
                    }
                }
            }
        }
    }
    // group rows by cell so each op's trials are contiguous
    records.sort_by_key(|r| (r.scheme as u8, r.op, r.level, r.n_attrs, r.trial));
    let summary = summarize(&records);
    let mut report = BenchReport { records, summary, outputs: None };
    if let Some(path) = &config.output {
        report.outputs = Some(write_outputs(&report, path, config.plots)?);
    }
    Ok(report)
}

/// Share of wall time spent in each operation class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileBreakdown {
    pub hash_to_group: f64,
    pub exponentiation: f64,
    pub pairing: f64,
    pub other: f64,
    pub wall_time_ms: f64,
}

const PROFILE_REPEATS: usize = 3;

/// Times `op` with per-class accounting on an AND-chain over `n_attrs`
/// attributes and returns each class's share of the wall time.
pub fn profile_breakdown(scheme: Scheme, op: BenchOp, n_attrs: usize, level: SecurityLevel) -> ProfileBreakdown {
    assert!((1..=MAX_ATTRS).contains(&n_attrs));
    let suite = PairingSuite::new(level);
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed ^ n_attrs as u64);
    let fx = Fixture::new(&suite, scheme, n_attrs, &mut rng);
    let cell = Prepared::new(&suite, &fx, bench_tree(PolicyShape::AndChain, n_attrs, 0), n_attrs, &mut rng);
    let warm = cell.encrypt(&suite, &mut rng);
    cell.decrypt(&suite, &warm);

    let cts: Vec<Sealed> = match op {
        BenchOp::Decrypt => (0..PROFILE_REPEATS).map(|_| cell.encrypt(&suite, &mut rng)).collect(),
        BenchOp::Encrypt => Vec::new(),
    };
    suite.enable_timing();
    let start = Instant::now();
    for i in 0..PROFILE_REPEATS {
        match op {
            BenchOp::Encrypt => drop(std::hint::black_box(cell.encrypt(&suite, &mut rng))),
            BenchOp::Decrypt => cell.decrypt(&suite, &cts[i]),
        }
    }
    let wall = start.elapsed().as_secs_f64();
    let t = suite.timings().expect("timing enabled");
    suite.disable_timing();
    let frac = |d: std::time::Duration| (d.as_secs_f64() / wall).clamp(0.0, 1.0);
    let (h, e, p) = (frac(t.hash_to_group), frac(t.exponentiation), frac(t.pairing));
    let scale = (h + e + p).max(1.0);
    let (h, e, p) = (h / scale, e / scale, p / scale);
    ProfileBreakdown {
        hash_to_group: h,
        exponentiation: e,
        pairing: p,
        other: (1.0 - h - e - p).max(0.0),
        wall_time_ms: wall * 1e3 / PROFILE_REPEATS as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::satisfies;

    fn quick(schemes: Vec<Scheme>, counts: Vec<usize>, trials: usize) -> BenchConfig {
        BenchConfig { schemes, levels: vec![SecurityLevel::S80], attr_counts: counts, trials, ..Default::default() }
    }

    #[test]
    fn validation() {
        assert!(quick(vec![Scheme::Cp], vec![0, 1], 3).validate().is_err());
        assert!(quick(vec![Scheme::Cp], vec![65], 3).validate().is_err());
        assert!(quick(vec![Scheme::Cp], vec![64], 3).validate().is_ok());
        assert!(quick(vec![Scheme::Cp], vec![1], 2).validate().is_err());
        assert!(quick(vec![], vec![1], 3).validate().is_err());
        assert!(quick(vec![Scheme::Cp], vec![], 3).validate().is_err());
        assert!(matches!(run_bench(&quick(vec![Scheme::Cp], vec![0], 3)), Err(BenchError::InvalidConfig(_))));
    }

    #[test]
    fn shapes() {
        for n in 1..=12 {
            for shape in [PolicyShape::AndChain, PolicyShape::OrChain, PolicyShape::Random] {
                let t = bench_tree(shape, n, 7);
                assert!(t.is_valid());
                let mut names: Vec<&str> = t.leaves().into_iter().map(|(_, a)| a).collect();
                names.sort();
                let mut want: Vec<String> = (1..=n).map(bench_attribute).collect();
                want.sort();
                assert_eq!(names, want);
                assert!(satisfies(&t, &AttributeBag::from_canonical(want)).is_ok());
            }
            assert_eq!(bench_tree(PolicyShape::Random, n, 7), bench_tree(PolicyShape::Random, n, 7));
        }
        assert_eq!(bench_tree(PolicyShape::AndChain, 3, 0).stats().and_gates, 2);
        assert_eq!(bench_tree(PolicyShape::OrChain, 3, 0).stats().or_gates, 2);
    }

    #[test]
    fn cp_encrypt_counts_follow_the_law() {
        let report = run_bench(&quick(vec![Scheme::Cp], (1..=5).collect(), 3)).unwrap();
        // 5 cells x 2 ops x 3 trials
        assert_eq!(report.records.len(), 30);
        assert_eq!(report.summary.len(), 10);
        for r in &report.records {
            let n = r.n_attrs as u64;
            match r.op {
                BenchOp::Encrypt => {
                    assert_eq!(r.exp_count(), 2 * n + 3);
                    assert_eq!(r.hash_count(), n);
                    assert_eq!(r.pairing_count(), 0);
                }
                BenchOp::Decrypt => {
                    assert_eq!(r.pairing_count(), 2 * n + 1);
                    assert_eq!(r.counters.exp_gt, n);
                }
            }
            assert!(r.wall_time_ms > 0.0 && r.energy_est_j > 0.0);
        }
        for c in &report.summary {
            assert_eq!(c.trials, 3);
            let cell: Vec<_> = report
                .records
                .iter()
                .filter(|r| r.op == c.op && r.n_attrs == c.n_attrs)
                .collect();
            assert!(cell.iter().all(|r| r.counters == c.counters));
            assert!(c.ci95_ms >= 0.0 && c.median_ms > 0.0);
        }
    }

    #[test]
    fn kp_and_or_shapes() {
        let mut cfg = quick(vec![Scheme::Kp], vec![4], 3);
        let report = run_bench(&cfg).unwrap();
        let dec = report.cell(Scheme::Kp, BenchOp::Decrypt, SecurityLevel::S80, 4).unwrap();
        assert_eq!(dec.counters.pairings, 4);
        let enc = report.cell(Scheme::Kp, BenchOp::Encrypt, SecurityLevel::S80, 4).unwrap();
        assert_eq!(enc.counters.exp_g1, 4);

        cfg.schemes = vec![Scheme::Cp, Scheme::Kp];
        cfg.shape = PolicyShape::OrChain;
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.cell(Scheme::Cp, BenchOp::Decrypt, SecurityLevel::S80, 4).unwrap().counters.pairings, 3);
        assert_eq!(report.cell(Scheme::Kp, BenchOp::Decrypt, SecurityLevel::S80, 4).unwrap().counters.pairings, 1);
    }

    #[test]
    fn breakdown_fractions_are_bounded() {
        for op in [BenchOp::Encrypt, BenchOp::Decrypt] {
            let b = profile_breakdown(Scheme::Cp, op, 1, SecurityLevel::S80);
            let sum = b.hash_to_group + b.exponentiation + b.pairing;
            assert!(sum <= 1.0 + 1e-12 && b.other >= 0.0);
            assert!((sum + b.other - 1.0).abs() < 1e-9);
        }
        let dec = profile_breakdown(Scheme::Cp, BenchOp::Decrypt, 5, SecurityLevel::S80);
        assert!(dec.pairing > 0.5, "{dec:?}");
        let enc = profile_breakdown(Scheme::Cp, BenchOp::Encrypt, 5, SecurityLevel::S80);
        assert_eq!(enc.pairing, 0.0);
        assert!(enc.hash_to_group + enc.exponentiation > 0.5, "{enc:?}");
    }
}
