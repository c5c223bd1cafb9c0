use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use abekit_core::abe::wire::{peek_header, ObjectKind};
use abekit_core::abe::{self, CpMasterKey, CpPublicParams, CpSecretKey, KpKey, KpMasterKey, KpPublicParams,
    KpPublicUniverse, KpUniverse, Scheme};
use abekit_core::bench::{self, BenchConfig, BenchError, BenchOp, DeviceProfile, PolicyShape};
use abekit_core::container::{self, SealedContainer};
use abekit_core::health::clock::{Clock, RealClock};
use abekit_core::health::collector::{Collector, CollectorConfig};
use abekit_core::health::pipeline::{self, PipelineConfig, PipelineError, DEFAULT_POLICY};
use abekit_core::health::report::{latency_stats, write_latency_csv};
use abekit_core::pairing::{PairingSuite, SecurityLevel};
use abekit_core::policy::{parse_policy, print_policy};
use abekit_core::tree::{compile, satisfies, AccessTree, AttributeBag};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{io_err, Class, CliError, Result};
use crate::keys::{read_file, write_file, KeyDir, KeyFile};

/// Attribute-based encryption toolkit.
#[derive(Parser, Debug)]
#[command(name = "abekit", version)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate public parameters and a master key.
    Setup(SetupArgs),
    /// Issue a user key (CP: attribute list, KP: policy).
    Keygen(KeygenArgs),
    /// Seal a file into a hybrid container.
    Encrypt(EncryptArgs),
    /// Open a container with a user key.
    Decrypt(DecryptArgs),
    /// Parse and inspect a policy.
    Policy(PolicyArgs),
    /// Time encryption and decryption across levels and attribute counts.
    Bench(BenchArgs),
    /// Generate sensor files and stream them, sealed, to a collector.
    SimSend(SimSendArgs),
    /// Receive, reassemble and decrypt sensor files.
    SimCollect(SimCollectArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value = "cp")]
    scheme: Scheme,
    #[arg(long, default_value = "80")]
    level: SecurityLevel,
    /// Key directory (default: $ABE_HOME, then ~/.abekit).
    #[arg(long, value_name = "DIR")]
    keys: Option<PathBuf>,
    /// Seed for reproducible output.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SetupArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory; overrides --keys.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// KP only: attributes to register up front.
    #[arg(long)]
    attrs: Option<String>,
    /// Replace an existing master key.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[command(flatten)]
    common: Common,
    /// CP: the key's attributes.
    #[arg(long)]
    attrs: Option<String>,
    /// KP: the key's policy.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EncryptArgs {
    #[command(flatten)]
    common: Common,
    /// CP: access policy of the container.
    #[arg(long)]
    policy: Option<String>,
    /// KP: attributes attached to the container.
    #[arg(long)]
    attrs: Option<String>,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    #[arg(long, value_name = "FILE")]
    key: PathBuf,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_name = "DIR")]
    keys: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolicyArgs {
    /// Policy text, e.g. "(Doctor and Cardiology) or Age < 11".
    policy: String,
    /// Print the compiled tree and its shape.
    #[arg(long)]
    explain: bool,
    /// Check whether these attributes satisfy the policy.
    #[arg(long)]
    attrs: Option<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Schemes to run, comma separated.
    #[arg(long, default_value = "cp", value_delimiter = ',')]
    scheme: Vec<Scheme>,
    #[arg(long, default_value = "80,112,128", value_delimiter = ',')]
    levels: Vec<SecurityLevel>,
    /// Attribute counts: `1..30`, `1..=30` or a comma list.
    #[arg(long, default_value = "1..30")]
    attrs: String,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value = "encrypt,decrypt", value_delimiter = ',')]
    ops: Vec<BenchOp>,
    #[arg(long, default_value = "and")]
    shape: PolicyShape,
    /// Device profile for the energy estimate (edison, galileo, rpi1, rpizero).
    #[arg(long, default_value = "edison")]
    device: String,
    /// Override the device's active power delta in mW.
    #[arg(long)]
    delta_mw: Option<f64>,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Also write SVG plots next to the CSV.
    #[arg(long)]
    plots: bool,
    /// Print an operation-class time breakdown at the largest count.
    #[arg(long)]
    profile: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SimSendArgs {
    #[arg(long)]
    server: SocketAddr,
    /// Number of one-second cycles.
    #[arg(long, default_value_t = 10)]
    duration: u32,
    #[arg(long, default_value = DEFAULT_POLICY)]
    policy: String,
    #[arg(long, default_value = "80")]
    level: SecurityLevel,
    #[arg(long, value_name = "DIR")]
    keys: Option<PathBuf>,
    /// Sensor file directory (default: a fresh directory under the system temp dir).
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Drop every k-th datagram before it leaves.
    #[arg(long)]
    drop_every: Option<u32>,
    /// Send a SHA-256 sidecar per file so the collector can verify it.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SimCollectArgs {
    #[arg(long, default_value = "127.0.0.1:9750")]
    bind: SocketAddr,
    /// CP key file of the collector.
    #[arg(long, value_name = "FILE")]
    key: PathBuf,
    #[arg(long, value_name = "DIR")]
    keys: Option<PathBuf>,
    /// Seconds to listen before draining.
    #[arg(long, default_value_t = 15)]
    duration: u64,
    /// Incomplete files are dropped this long after their first datagram.
    #[arg(long, default_value_t = 2000)]
    timeout_ms: u64,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Setup(a) => setup(a),
        Command::Keygen(a) => keygen(a),
        Command::Encrypt(a) => encrypt(a),
        Command::Decrypt(a) => decrypt(a),
        Command::Policy(a) => policy(a),
        Command::Bench(a) => bench(a),
        Command::SimSend(a) => sim_send(a),
        Command::SimCollect(a) => sim_collect(a),
    }
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_rng(&mut rand::rng()),
    }
}

fn parse_bag(text: &str) -> Result<AttributeBag> {
    let bag = AttributeBag::parse(text).map_err(|e| CliError::usage(format!("--attrs: {e}")))?;
    if bag.is_empty() {
        return Err(CliError::usage("--attrs: empty attribute list"));
    }
    Ok(bag)
}

fn parse_tree(text: &str) -> Result<(String, AccessTree)> {
    let ast = parse_policy(text).map_err(|e| CliError::new(Class::Policy, format!("policy {e}")))?;
    let tree = compile(&ast).map_err(|e| CliError::new(Class::Policy, e.to_string()))?;
    Ok((print_policy(&ast), tree))
}

fn need<'a>(v: &'a Option<String>, flag: &str, scheme: Scheme) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| CliError::usage(format!("{flag} is required for --scheme {scheme}")))
}

fn forbid(v: &Option<String>, flag: &str, scheme: Scheme) -> Result<()> {
    match v {
        Some(_) => Err(CliError::usage(format!("{flag} does not apply to --scheme {scheme}"))),
        None => Ok(()),
    }
}

fn malformed(what: &Path) -> impl Fn(abe::AbeError) -> CliError + '_ {
    move |e| CliError::new(Class::Key, format!("{}: {e}", what.display()))
}

fn load<T>(
    dir: &KeyDir,
    scheme: Scheme,
    level: SecurityLevel,
    kind: KeyFile,
    decode: fn(&[u8]) -> std::result::Result<T, abe::AbeError>,
) -> Result<T> {
    let bytes = dir.read(scheme, level, kind)?;
    let path = dir.path(scheme, level, kind);
    decode(&bytes).map_err(malformed(&path))
}

fn setup(a: SetupArgs) -> Result<()> {
    let Common { scheme, level, keys, seed } = a.common;
    let bag = match scheme {
        Scheme::Cp => {
            forbid(&a.attrs, "--attrs", scheme)?;
            None
        }
        Scheme::Kp => a.attrs.as_deref().map(parse_bag).transpose()?,
    };
    let dir = KeyDir::resolve(a.out.as_deref().or(keys.as_deref()))?;
    if !a.force && dir.path(scheme, level, KeyFile::Master).exists() {
        return Err(CliError::new(
            Class::Key,
            format!("{} exists; pass --force to replace it", dir.path(scheme, level, KeyFile::Master).display()),
        ));
    }
    let suite = PairingSuite::new(level);
    let mut rng = rng(seed);
    let mut written = Vec::new();
    match scheme {
        Scheme::Cp => {
            let (pk, mk) = abe::cp::setup(&suite, &mut rng);
            written.push(dir.write(scheme, level, KeyFile::Master, &mk.to_bytes())?);
            written.push(dir.write(scheme, level, KeyFile::Public, &pk.to_bytes())?);
        }
        Scheme::Kp => {
            let (pk, mk, mut uni) = abe::kp::setup(&suite, &mut rng);
            if let Some(bag) = &bag {
                uni.register_all(&suite, bag, &mut rng)?;
            }
            written.push(dir.write(scheme, level, KeyFile::Master, &mk.to_bytes())?);
            written.push(dir.write(scheme, level, KeyFile::Universe, &uni.to_bytes())?);
            written.push(dir.write(scheme, level, KeyFile::Public, &pk.to_bytes())?);
            written.push(dir.write(scheme, level, KeyFile::PublicUniverse, &uni.public().to_bytes())?);
        }
    }
    println!("{scheme} setup at {level} bits ({})", level.curve_name());
    for p in written {
        println!("  {}", p.display());
    }
    Ok(())
}

fn keygen(a: KeygenArgs) -> Result<()> {
    let Common { scheme, level, keys, seed } = a.common;
    let dir = KeyDir::resolve(keys.as_deref())?;
    let suite = PairingSuite::new(level);
    let mut rng = rng(seed);
    let summary = match scheme {
        Scheme::Cp => {
            forbid(&a.policy, "--policy", scheme)?;
            let bag = parse_bag(need(&a.attrs, "--attrs", scheme)?)?;
            let pk = load(&dir, scheme, level, KeyFile::Public, CpPublicParams::from_bytes)?;
            let mk = load(&dir, scheme, level, KeyFile::Master, CpMasterKey::from_bytes)?;
            let sk = abe::cp::keygen(&suite, &pk, &mk, &bag, &mut rng)?;
            write_file(&a.out, &sk.to_bytes())?;
            format!("{} attributes", bag.len())
        }
        Scheme::Kp => {
            forbid(&a.attrs, "--attrs", scheme)?;
            let (canonical, tree) = parse_tree(need(&a.policy, "--policy", scheme)?)?;
            let pk = load(&dir, scheme, level, KeyFile::Public, KpPublicParams::from_bytes)?;
            let mk = load(&dir, scheme, level, KeyFile::Master, KpMasterKey::from_bytes)?;
            let mut uni = load(&dir, scheme, level, KeyFile::Universe, KpUniverse::from_bytes)?;
            // Leaves the authority has not seen yet join the universe now.
            let leaves = AttributeBag::from_canonical(tree.leaves().into_iter().map(|(_, a)| a.to_string()));
            let added = uni.register_all(&suite, &leaves, &mut rng)?;
            let key = abe::kp::keygen(&suite, &pk, &mk, &uni, &tree, &mut rng)?;
            if added > 0 {
                dir.write(scheme, level, KeyFile::Universe, &uni.to_bytes())?;
                dir.write(scheme, level, KeyFile::PublicUniverse, &uni.public().to_bytes())?;
                log::info!("registered {added} new attributes");
            }
            write_file(&a.out, &key.to_bytes())?;
            format!("policy {canonical}")
        }
    };
    println!("wrote {scheme} key to {} ({summary})", a.out.display());
    Ok(())
}

fn encrypt(a: EncryptArgs) -> Result<()> {
    let Common { scheme, level, keys, seed } = a.common;
    let target = match scheme {
        Scheme::Cp => {
            forbid(&a.attrs, "--attrs", scheme)?;
            let text = need(&a.policy, "--policy", scheme)?;
            parse_tree(text)?;
            Err(text)
        }
        Scheme::Kp => {
            forbid(&a.policy, "--policy", scheme)?;
            Ok(parse_bag(need(&a.attrs, "--attrs", scheme)?)?)
        }
    };
    let payload = read_file(&a.input)?;
    let dir = KeyDir::resolve(keys.as_deref())?;
    let suite = PairingSuite::new(level);
    let mut rng = rng(seed);
    let sealed = match target {
        Err(policy) => {
            let pk = load(&dir, scheme, level, KeyFile::Public, CpPublicParams::from_bytes)?;
            container::seal_cp(&suite, &pk, policy, &payload, &mut rng)?
        }
        Ok(bag) => {
            let pk = load(&dir, scheme, level, KeyFile::Public, KpPublicParams::from_bytes)?;
            let uni = load(&dir, scheme, level, KeyFile::PublicUniverse, KpPublicUniverse::from_bytes)?;
            container::seal_kp(&suite, &pk, &uni, &bag, &payload, &mut rng)?
        }
    };
    let bytes = sealed.to_bytes();
    write_file(&a.out, &bytes)?;
    println!("sealed {} bytes into {} ({} bytes, {scheme} {level})", payload.len(), a.out.display(), bytes.len());
    Ok(())
}

fn decrypt(a: DecryptArgs) -> Result<()> {
    let key_bytes = read_file(&a.key)?;
    let header = peek_header(&key_bytes).map_err(malformed(&a.key))?;
    if header.kind != ObjectKind::SecretKey {
        return Err(CliError::new(Class::Key, format!("{} is not a user key", a.key.display())));
    }
    let bytes = read_file(&a.input)?;
    let c = SealedContainer::from_bytes(&bytes)?;
    if c.scheme != header.scheme || c.level != header.level {
        return Err(CliError::new(
            Class::Key,
            format!("container is {} {} but the key is {} {}", c.scheme, c.level, header.scheme, header.level),
        ));
    }
    let (scheme, level) = (header.scheme, header.level);
    let dir = KeyDir::resolve(a.keys.as_deref())?;
    let suite = PairingSuite::new(level);
    let plain = match scheme {
        Scheme::Cp => {
            let sk = CpSecretKey::from_bytes(&key_bytes).map_err(malformed(&a.key))?;
            let pk = load(&dir, scheme, level, KeyFile::Public, CpPublicParams::from_bytes)?;
            container::open_cp(&suite, &pk, &sk, &bytes)?
        }
        Scheme::Kp => {
            let key = KpKey::from_bytes(&key_bytes).map_err(malformed(&a.key))?;
            let pk = load(&dir, scheme, level, KeyFile::Public, KpPublicParams::from_bytes)?;
            container::open_kp(&suite, &pk, &key, &bytes)?
        }
    };
    write_file(&a.out, &plain)?;
    println!("recovered {} bytes into {}", plain.len(), a.out.display());
    Ok(())
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn policy(a: PolicyArgs) -> Result<()> {
    let (canonical, tree) = parse_tree(&a.policy)?;
    println!("{canonical}");
    if a.explain {
        let s = tree.stats();
        println!(
            "{}, {}, {}, {}, depth {}",
            plural(s.leaves, "leaf").replace("leafs", "leaves"),
            plural(s.and_gates, "AND gate"),
            plural(s.or_gates, "OR gate"),
            plural(s.threshold_gates, "threshold gate"),
            s.depth
        );
        println!("{}", tree.render());
    }
    if let Some(attrs) = &a.attrs {
        let bag = parse_bag(attrs)?;
        match satisfies(&tree, &bag) {
            Ok(w) => println!("satisfied ({} of the leaves used)", w.len()),
            Err(_) => {
                return Err(CliError::new(Class::PolicyNotSatisfied, "attributes do not satisfy the policy"));
            }
        }
    }
    Ok(())
}

/// `1..30` and `1..=30` are both inclusive; otherwise a comma list.
fn parse_counts(text: &str) -> Result<Vec<usize>> {
    let bad = || CliError::usage(format!("--attrs: cannot read `{text}` (expected 1..30 or 1,5,10)"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(num).collect()
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut device =
        DeviceProfile::by_name(&a.device).ok_or_else(|| CliError::usage(format!("unknown device `{}`", a.device)))?;
    if let Some(d) = a.delta_mw {
        device = device.with_delta(d).map_err(CliError::usage)?;
    }
    let cfg = BenchConfig {
        schemes: a.scheme.clone(),
        levels: a.levels.clone(),
        attr_counts: parse_counts(&a.attrs)?,
        trials: a.trials,
        ops: a.ops.clone(),
        shape: a.shape,
        device,
        seed: a.seed,
        output: a.csv.clone(),
        plots: a.plots,
    };
    let report = bench::run_bench(&cfg).map_err(|e| match e {
        BenchError::InvalidConfig(m) => CliError::usage(m),
        other => CliError::new(Class::Io, other.to_string()),
    })?;
    println!("scheme op      level  n   mean_ms    ci95_ms   exp  pair  energy_J");
    for c in &report.summary {
        println!(
            "{:<6} {:<7} {:<6} {:<3} {:>9.3} {:>9.3} {:>5} {:>5} {:>9.6}",
            c.scheme.name(),
            c.op.name(),
            c.level.bits(),
            c.n_attrs,
            c.mean_ms,
            c.ci95_ms,
            c.counters.exponentiations(),
            c.counters.pairings,
            c.mean_energy_j
        );
    }
    if a.profile {
        let n = *cfg.attr_counts.iter().max().expect("validated");
        for &scheme in &cfg.schemes {
            for &level in &cfg.levels {
                for &op in &cfg.ops {
                    let p = bench::profile_breakdown(scheme, op, n, level);
                    println!(
                        "profile {scheme} {} {level} n={n}: pairing {:.1}%, exp {:.1}%, hash {:.1}%, other {:.1}%",
                        op.name(),
                        100.0 * p.pairing,
                        100.0 * p.exponentiation,
                        100.0 * p.hash_to_group,
                        100.0 * p.other
                    );
                }
            }
        }
    }
    if let Some(out) = &report.outputs {
        println!("wrote {}", out.csv.display());
        println!("wrote {}", out.summary.display());
        for p in &out.plots {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn pipeline_err(e: PipelineError) -> CliError {
    match e {
        PipelineError::Sender(s) => CliError::new(Class::Policy, s.to_string()),
        PipelineError::Io(e) => io_err("sim", e),
        other => CliError::new(Class::Network, other.to_string()),
    }
}

fn sim_send(a: SimSendArgs) -> Result<()> {
    parse_tree(&a.policy)?;
    if a.duration == 0 {
        return Err(CliError::usage("--duration must be at least 1"));
    }
    if a.drop_every == Some(0) {
        return Err(CliError::usage("--drop-every must be at least 1"));
    }
    let keys = KeyDir::resolve(a.keys.as_deref())?;
    let pk = load(&keys, Scheme::Cp, a.level, KeyFile::Public, CpPublicParams::from_bytes)?;
    let dir = a.dir.clone().unwrap_or_else(|| std::env::temp_dir().join(format!("abekit-sim-{}", std::process::id())));
    let mut cfg = PipelineConfig::new(&dir, a.duration);
    cfg.level = a.level;
    cfg.policy = a.policy.clone();
    cfg.drop_every = a.drop_every;
    cfg.sidecar = a.verify;
    cfg.seed = a.seed.unwrap_or_else(rand::random);
    let clock: Arc<dyn Clock> = Arc::new(RealClock::new());
    let start_us = clock.now_us() + 100_000;
    let report = pipeline::run_send(&cfg, pk, a.server, clock, start_us).map_err(pipeline_err)?;
    let s = report.stats;
    println!(
        "generated {} files, sent {} ({} datagrams, {} dropped), seal failures {}, send failures {}, max backlog {}",
        report.generated.len(),
        s.sent,
        s.datagrams,
        s.dropped_datagrams,
        s.seal_failed,
        s.send_failed,
        s.max_backlog
    );
    if let Some(l) = latency_stats(&report.rows) {
        println!("sender latency: mean {:.2} ms, p95 {:.2} ms, max {:.2} ms", l.mean_ms, l.p95_ms, l.max_ms);
    }
    if let Some(csv) = &a.csv {
        write_latency_csv(csv, &report.rows).map_err(|e| io_err(csv.display(), e))?;
    }
    if a.dir.is_none() {
        let _ = std::fs::remove_dir(&dir);
    }
    Ok(())
}

fn sim_collect(a: SimCollectArgs) -> Result<()> {
    let key_bytes = read_file(&a.key)?;
    let sk = CpSecretKey::from_bytes(&key_bytes).map_err(malformed(&a.key))?;
    let level = sk.level();
    let keys = KeyDir::resolve(a.keys.as_deref())?;
    let pk = load(&keys, Scheme::Cp, level, KeyFile::Public, CpPublicParams::from_bytes)?;
    let cfg = CollectorConfig { bind: a.bind, reassembly_timeout: Duration::from_millis(a.timeout_ms) };
    let mut collector =
        Collector::bind(cfg, pk, sk).map_err(|e| CliError::new(Class::Network, format!("bind {}: {e}", a.bind)))?;
    let addr = collector.local_addr().map_err(|e| io_err("socket", e))?;
    println!("listening on {addr} for {} s", a.duration);
    let clock = RealClock::new();
    let deadline = clock.now_us() + a.duration * 1_000_000;
    let net = |e: std::io::Error| CliError::new(Class::Network, e.to_string());
    while clock.now_us() < deadline {
        collector.poll(&clock, Duration::from_millis(50)).map_err(net)?;
    }
    collector.drain(&clock, Duration::from_millis(500)).map_err(net)?;
    let s = collector.stats;
    println!(
        "delivered {}, verified {}, hash mismatches {}, policy not satisfied {}, auth failures {}, dropped {}, malformed datagrams {}",
        s.delivered, s.verified, s.hash_mismatch, s.policy_not_satisfied, s.auth_failures, s.dropped, s.malformed
    );
    if let Some(l) = latency_stats(&collector.rows) {
        println!("end-to-end latency: mean {:.2} ms, p95 {:.2} ms, max {:.2} ms", l.mean_ms, l.p95_ms, l.max_ms);
    }
    if let Some(csv) = &a.csv {
        write_latency_csv(csv, &collector.rows).map_err(|e| io_err(csv.display(), e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attr_count_forms() {
        assert_eq!(parse_counts("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_counts("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_counts("5, 10,15").unwrap(), vec![5, 10, 15]);
        assert!(parse_counts("3..1").is_err());
        assert!(parse_counts("a..b").is_err());
        assert!(parse_counts("").is_err());
    }

    #[test]
    fn plural_forms() {
        assert_eq!(plural(1, "AND gate"), "1 AND gate");
        assert_eq!(plural(0, "OR gate"), "0 OR gates");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
