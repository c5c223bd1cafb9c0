//! Python module `abekit`: CP/KP-ABE authorities, hybrid containers and
//! policy inspection. Keys and containers cross the boundary as `bytes` in
//! the same encoding the command-line tool writes.

use abekit_core::abe::{self, CpMasterKey, CpPublicParams, CpSecretKey, KpKey, KpMasterKey, KpPublicParams,
    KpPublicUniverse, KpUniverse, Scheme};
use abekit_core::bench::{self, BenchOp};
use abekit_core::container::{self, ContainerError};
use abekit_core::pairing::{PairingSuite, SecurityLevel};
use abekit_core::policy::{parse_policy, print_policy};
use abekit_core::tree::{compile, satisfies as tree_satisfies, AccessTree, AttributeBag};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

create_exception!(abekit, AbeError, PyException);
create_exception!(abekit, PolicyError, AbeError);
create_exception!(abekit, PolicyNotSatisfied, AbeError);
create_exception!(abekit, AuthenticationFailure, AbeError);

fn parse_level(bits: u16) -> PyResult<SecurityLevel> {
    SecurityLevel::from_bits(bits).ok_or_else(|| PyValueError::new_err(format!("level must be 80, 112 or 128, got {bits}")))
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_rng(&mut rand::rng()),
    }
}

fn abe_err(e: abe::AbeError) -> PyErr {
    match e {
        abe::AbeError::PolicyNotSatisfied => PolicyNotSatisfied::new_err(e.to_string()),
        abe::AbeError::UnsatisfiablePolicy => PolicyError::new_err(e.to_string()),
        _ => AbeError::new_err(e.to_string()),
    }
}

fn container_err(e: ContainerError) -> PyErr {
    match e {
        ContainerError::PolicyNotSatisfied => PolicyNotSatisfied::new_err(e.to_string()),
        ContainerError::AuthenticationFailure => AuthenticationFailure::new_err(e.to_string()),
        ContainerError::Abe(a) => abe_err(a),
        _ => PolicyError::new_err(e.to_string()),
    }
}

fn bag(attrs: &str) -> PyResult<AttributeBag> {
    AttributeBag::parse(attrs).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn tree(policy: &str) -> PyResult<(String, AccessTree)> {
    let ast = parse_policy(policy).map_err(|e| PolicyError::new_err(e.to_string()))?;
    let t = compile(&ast).map_err(|e| PolicyError::new_err(e.to_string()))?;
    Ok((print_policy(&ast), t))
}

/// CP-ABE key authority holding public parameters and the master key.
#[pyclass(module = "abekit")]
struct CpAuthority {
    pk: CpPublicParams,
    mk: CpMasterKey,
}

#[pymethods]
impl CpAuthority {
    #[new]
    #[pyo3(signature = (level=80, seed=None))]
    fn new(level: u16, seed: Option<u64>) -> PyResult<Self> {
        let suite = PairingSuite::new(parse_level(level)?);
        let (pk, mk) = abe::cp::setup(&suite, &mut rng(seed));
        Ok(CpAuthority { pk, mk })
    }

    #[staticmethod]
    fn load(public_key: &[u8], master_key: &[u8]) -> PyResult<Self> {
        let pk = CpPublicParams::from_bytes(public_key).map_err(abe_err)?;
        let mk = CpMasterKey::from_bytes(master_key).map_err(abe_err)?;
        Ok(CpAuthority { pk, mk })
    }

    #[getter]
    fn level(&self) -> u16 {
        self.pk.level().bits()
    }

    fn public_key<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.pk.to_bytes())
    }

    fn master_key<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.mk.to_bytes())
    }

    /// Issues a secret key for a comma separated attribute list.
    #[pyo3(signature = (attrs, seed=None))]
    fn keygen<'py>(&self, py: Python<'py>, attrs: &str, seed: Option<u64>) -> PyResult<Bound<'py, PyBytes>> {
        let b = bag(attrs)?;
        let suite = PairingSuite::new(self.pk.level());
        let sk = abe::cp::keygen(&suite, &self.pk, &self.mk, &b, &mut rng(seed)).map_err(abe_err)?;
        Ok(PyBytes::new(py, &sk.to_bytes()))
    }
}

/// KP-ABE key authority with its attribute registry.
#[pyclass(module = "abekit")]
struct KpAuthority {
    pk: KpPublicParams,
    mk: KpMasterKey,
    universe: KpUniverse,
    seed: Option<u64>,
}

#[pymethods]
impl KpAuthority {
    #[new]
    #[pyo3(signature = (level=80, seed=None))]
    fn new(level: u16, seed: Option<u64>) -> PyResult<Self> {
        let suite = PairingSuite::new(parse_level(level)?);
        let (pk, mk, universe) = abe::kp::setup(&suite, &mut rng(seed));
        Ok(KpAuthority { pk, mk, universe, seed })
    }

    #[getter]
    fn level(&self) -> u16 {
        self.pk.level().bits()
    }

    /// Registers attributes; returns how many were new.
    fn register(&mut self, attrs: &str) -> PyResult<usize> {
        let b = bag(attrs)?;
        let suite = PairingSuite::new(self.pk.level());
        let mut r = rng(self.seed.map(|s| s ^ self.universe.len() as u64));
        self.universe.register_all(&suite, &b, &mut r).map_err(abe_err)
    }

    fn public_key<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.pk.to_bytes())
    }

    fn public_universe<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.universe.public().to_bytes())
    }

    /// Issues a key for `policy`, registering any leaf not seen before.
    #[pyo3(signature = (policy, seed=None))]
    fn keygen<'py>(&mut self, py: Python<'py>, policy: &str, seed: Option<u64>) -> PyResult<Bound<'py, PyBytes>> {
        let (_, t) = tree(policy)?;
        let suite = PairingSuite::new(self.pk.level());
        let mut r = rng(seed);
        let leaves = AttributeBag::from_canonical(t.leaves().into_iter().map(|(_, a)| a.to_string()));
        self.universe.register_all(&suite, &leaves, &mut r).map_err(abe_err)?;
        let key = abe::kp::keygen(&suite, &self.pk, &self.mk, &self.universe, &t, &mut r).map_err(abe_err)?;
        Ok(PyBytes::new(py, &key.to_bytes()))
    }
}

/// Seals `payload` under a CP-ABE policy.
#[pyfunction]
#[pyo3(signature = (public_key, policy, payload, seed=None))]
fn cp_seal<'py>(
    py: Python<'py>,
    public_key: &[u8],
    policy: &str,
    payload: &[u8],
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyBytes>> {
    let pk = CpPublicParams::from_bytes(public_key).map_err(abe_err)?;
    let suite = PairingSuite::new(pk.level());
    let c = container::seal_cp(&suite, &pk, policy, payload, &mut rng(seed)).map_err(container_err)?;
    Ok(PyBytes::new(py, &c.to_bytes()))
}

#[pyfunction]
fn cp_open<'py>(py: Python<'py>, public_key: &[u8], secret_key: &[u8], sealed: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    let pk = CpPublicParams::from_bytes(public_key).map_err(abe_err)?;
    let sk = CpSecretKey::from_bytes(secret_key).map_err(abe_err)?;
    let suite = PairingSuite::new(pk.level());
    let plain = container::open_cp(&suite, &pk, &sk, sealed).map_err(container_err)?;
    Ok(PyBytes::new(py, &plain))
}

/// Seals `payload` with an attribute set for KP-ABE keys.
#[pyfunction]
#[pyo3(signature = (public_key, public_universe, attrs, payload, seed=None))]
fn kp_seal<'py>(
    py: Python<'py>,
    public_key: &[u8],
    public_universe: &[u8],
    attrs: &str,
    payload: &[u8],
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyBytes>> {
    let pk = KpPublicParams::from_bytes(public_key).map_err(abe_err)?;
    let uni = KpPublicUniverse::from_bytes(public_universe).map_err(abe_err)?;
    let suite = PairingSuite::new(pk.level());
    let c = container::seal_kp(&suite, &pk, &uni, &bag(attrs)?, payload, &mut rng(seed)).map_err(container_err)?;
    Ok(PyBytes::new(py, &c.to_bytes()))
}

#[pyfunction]
fn kp_open<'py>(py: Python<'py>, public_key: &[u8], key: &[u8], sealed: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    let pk = KpPublicParams::from_bytes(public_key).map_err(abe_err)?;
    let key = KpKey::from_bytes(key).map_err(abe_err)?;
    let suite = PairingSuite::new(pk.level());
    let plain = container::open_kp(&suite, &pk, &key, sealed).map_err(container_err)?;
    Ok(PyBytes::new(py, &plain))
}

/// Canonical form, tree shape and indented rendering of a policy.
#[pyfunction]
fn explain<'py>(py: Python<'py>, policy: &str) -> PyResult<Bound<'py, PyDict>> {
    let (canonical, t) = tree(policy)?;
    let s = t.stats();
    let d = PyDict::new(py);
    d.set_item("canonical", canonical)?;
    d.set_item("leaves", s.leaves)?;
    d.set_item("and_gates", s.and_gates)?;
    d.set_item("or_gates", s.or_gates)?;
    d.set_item("threshold_gates", s.threshold_gates)?;
    d.set_item("depth", s.depth)?;
    d.set_item("tree", t.render())?;
    Ok(d)
}

#[pyfunction]
fn satisfies(policy: &str, attrs: &str) -> PyResult<bool> {
    let (_, t) = tree(policy)?;
    Ok(tree_satisfies(&t, &bag(attrs)?).is_ok())
}

/// Group-operation counts of one encrypt or decrypt over an AND chain of
/// `n_attrs` attributes.
#[pyfunction]
#[pyo3(signature = (scheme, op, n_attrs, level=80))]
fn op_counts<'py>(py: Python<'py>, scheme: &str, op: &str, n_attrs: usize, level: u16) -> PyResult<Bound<'py, PyDict>> {
    let scheme: Scheme = scheme.parse().map_err(PyValueError::new_err)?;
    let op: BenchOp = op.parse().map_err(PyValueError::new_err)?;
    if n_attrs == 0 || n_attrs > bench::MAX_ATTRS {
        return Err(PyValueError::new_err(format!("n_attrs must be in 1..={}", bench::MAX_ATTRS)));
    }
    let cfg = bench::BenchConfig {
        schemes: vec![scheme],
        levels: vec![parse_level(level)?],
        attr_counts: vec![n_attrs],
        trials: bench::MIN_TRIALS,
        ops: vec![op],
        ..Default::default()
    };
    let report = bench::run_bench(&cfg).map_err(|e| AbeError::new_err(e.to_string()))?;
    let c = &report.summary[0];
    let d = PyDict::new(py);
    d.set_item("exp_g1", c.counters.exp_g1)?;
    d.set_item("exp_g2", c.counters.exp_g2)?;
    d.set_item("exp_gt", c.counters.exp_gt)?;
    d.set_item("pairings", c.counters.pairings)?;
    d.set_item("hash_to_group", c.counters.hash_to_group)?;
    d.set_item("mean_ms", c.mean_ms)?;
    Ok(d)
}

#[pymodule]
fn abekit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("AbeError", py.get_type::<AbeError>())?;
    m.add("PolicyError", py.get_type::<PolicyError>())?;
    m.add("PolicyNotSatisfied", py.get_type::<PolicyNotSatisfied>())?;
    m.add("AuthenticationFailure", py.get_type::<AuthenticationFailure>())?;
    m.add_class::<CpAuthority>()?;
    m.add_class::<KpAuthority>()?;
    m.add_function(wrap_pyfunction!(cp_seal, m)?)?;
    m.add_function(wrap_pyfunction!(cp_open, m)?)?;
    m.add_function(wrap_pyfunction!(kp_seal, m)?)?;
    m.add_function(wrap_pyfunction!(kp_open, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(satisfies, m)?)?;
    m.add_function(wrap_pyfunction!(op_counts, m)?)?;
    Ok(())
}
