//! Hybrid container: an ABE-encapsulated GT element keys an AES-GCM
//! encryption of the payload.
//!
//! ```text
//! "ABEH" version:u8 scheme:u8 level:u8
//! policy_len:u32le policy:utf8        CP: canonical policy text
//!                                     KP: comma separated attribute list
//! abe_len:u32le abe_blob              serialized CP or KP ciphertext
//! nonce[12]
//! dem_len:u64le dem_ciphertext||tag
//! ```
//!
//! Version 1 uses AES-128-GCM at the 80-bit level and AES-256-GCM above.
//! The associated data is every byte before the nonce. The DEM key is
//! `SHA-256(KDF_DOMAIN || canonical GT bytes)` truncated to the key size.

use aes_gcm::aead::{Aead, Nonce, Payload};
use aes_gcm::{Aes128Gcm, Aes256Gcm, KeyInit};
use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::abe::{self, AbeError, CpCiphertext, CpPublicParams, CpSecretKey, KpCiphertext, KpKey, KpPublicParams,
    KpPublicUniverse, Scheme};
use crate::pairing::{Gt, PairingSuite, SecurityLevel};
use crate::policy::{parse_policy, print_policy, ParseError};
use crate::tree::{compile, satisfies, AttributeBag};

pub const MAGIC: &[u8; 4] = b"ABEH";
pub const VERSION: u8 = 1;
pub const NONCE_LEN: usize = 12;
pub const TAG_LEN: usize = 16;
pub const KDF_DOMAIN: &[u8] = b"ABEKIT-V01-KDF-SHA256-AES-GCM";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("attributes do not satisfy the policy")]
    PolicyNotSatisfied,
    #[error("container failed authentication")]
    AuthenticationFailure,
    #[error("policy can never be satisfied")]
    UnsatisfiablePolicy,
    #[error("policy syntax: {0}")]
    Policy(#[from] ParseError),
    #[error(transparent)]
    Abe(AbeError),
}

impl From<AbeError> for ContainerError {
    fn from(e: AbeError) -> Self {
        match e {
            AbeError::PolicyNotSatisfied => ContainerError::PolicyNotSatisfied,
            AbeError::UnsatisfiablePolicy => ContainerError::UnsatisfiablePolicy,
            other => ContainerError::Abe(other),
        }
    }
}

/// Parsed container. `to_bytes(from_bytes(b)) == b` for every accepted `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SealedContainer {
    pub version: u8,
    pub scheme: Scheme,
    pub level: SecurityLevel,
    pub policy: String,
    pub abe_blob: Vec<u8>,
    pub nonce: [u8; NONCE_LEN],
    pub dem: Vec<u8>,
}

impl SealedContainer {
    fn header_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(15 + self.policy.len() + self.abe_blob.len());
        out.extend_from_slice(MAGIC);
        out.push(self.version);
        out.push(self.scheme as u8);
        out.push(self.level.bits() as u8);
        out.extend_from_slice(&(self.policy.len() as u32).to_le_bytes());
        out.extend_from_slice(self.policy.as_bytes());
        out.extend_from_slice(&(self.abe_blob.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.abe_blob);
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header_bytes();
        out.extend_from_slice(&self.nonce);
        out.extend_from_slice(&(self.dem.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.dem);
        out
    }

    /// Structural parse; any deviation from the layout is reported as an
    /// authentication failure.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        let bad = || ContainerError::AuthenticationFailure;
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8], ContainerError> {
            let end = pos.checked_add(n).filter(|&e| e <= bytes.len()).ok_or_else(bad)?;
            let s = &bytes[pos..end];
            pos = end;
            Ok(s)
        };
        if take(4)? != MAGIC {
            return Err(bad());
        }
        let version = take(1)?[0];
        if version != VERSION {
            return Err(bad());
        }
        let scheme = match take(1)?[0] {
            0 => Scheme::Cp,
            1 => Scheme::Kp,
            _ => return Err(bad()),
        };
        let level = SecurityLevel::from_bits(take(1)?[0] as u16).ok_or_else(bad)?;
        let policy_len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let policy = String::from_utf8(take(policy_len)?.to_vec()).map_err(|_| bad())?;
        let abe_len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let abe_blob = take(abe_len)?.to_vec();
        let nonce: [u8; NONCE_LEN] = take(NONCE_LEN)?.try_into().unwrap();
        let dem_len = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let dem_len = usize::try_from(dem_len).map_err(|_| bad())?;
        let dem = take(dem_len)?.to_vec();
        if pos != bytes.len() || dem.len() < TAG_LEN {
            return Err(bad());
        }
        Ok(SealedContainer { version, scheme, level, policy, abe_blob, nonce, dem })
    }

    /// Size of the encoding without building it.
    pub fn encoded_len(&self) -> usize {
        4 + 3 + 4 + self.policy.len() + 4 + self.abe_blob.len() + NONCE_LEN + 8 + self.dem.len()
    }
}

/// DEM key length in bytes for a level.
pub fn dem_key_len(level: SecurityLevel) -> usize {
    match level {
        SecurityLevel::S80 => 16,
        SecurityLevel::S112 | SecurityLevel::S128 => 32,
    }
}

/// `SHA-256(KDF_DOMAIN || gt)` truncated to the DEM key size of its level.
pub fn derive_key(k: &Gt) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(KDF_DOMAIN);
    h.update(k.to_bytes());
    let digest = h.finalize();
    digest[..dem_key_len(k.level())].to_vec()
}

fn dem_seal(key: &[u8], nonce: &[u8; NONCE_LEN], aad: &[u8], msg: &[u8]) -> Vec<u8> {
    let payload = Payload { msg, aad };
    let out = match key.len() {
        16 => Aes128Gcm::new_from_slice(key)
            .expect("key size")
            .encrypt(&Nonce::<Aes128Gcm>::from(*nonce), payload),
        _ => Aes256Gcm::new_from_slice(key)
            .expect("key size")
            .encrypt(&Nonce::<Aes256Gcm>::from(*nonce), payload),
    };
    out.expect("payload within AES-GCM limits")
}

fn dem_open(key: &[u8], nonce: &[u8; NONCE_LEN], aad: &[u8], msg: &[u8]) -> Result<Vec<u8>, ContainerError> {
    let payload = Payload { msg, aad };
    let out = match key.len() {
        16 => Aes128Gcm::new_from_slice(key)
            .expect("key size")
            .decrypt(&Nonce::<Aes128Gcm>::from(*nonce), payload),
        _ => Aes256Gcm::new_from_slice(key)
            .expect("key size")
            .decrypt(&Nonce::<Aes256Gcm>::from(*nonce), payload),
    };
    out.map_err(|_| ContainerError::AuthenticationFailure)
}

fn finish<R: RngCore + ?Sized>(
    scheme: Scheme,
    level: SecurityLevel,
    policy: String,
    abe_blob: Vec<u8>,
    k: &Gt,
    payload: &[u8],
    rng: &mut R,
) -> SealedContainer {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let mut c = SealedContainer { version: VERSION, scheme, level, policy, abe_blob, nonce, dem: Vec::new() };
    let aad = c.header_bytes();
    c.dem = dem_seal(&derive_key(k), &nonce, &aad, payload);
    c
}

/// Seals `payload` under a CP-ABE policy given as text.
pub fn seal_cp<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &CpPublicParams,
    policy: &str,
    payload: &[u8],
    rng: &mut R,
) -> Result<SealedContainer, ContainerError> {
    let ast = parse_policy(policy)?;
    let tree = compile(&ast).map_err(|_| ContainerError::UnsatisfiablePolicy)?;
    let (ct, k) = abe::cp::encrypt(suite, pk, &tree, rng)?;
    Ok(finish(Scheme::Cp, suite.level(), print_policy(&ast), ct.to_bytes(), &k, payload, rng))
}

/// Seals `payload` for KP-ABE keys whose policy `attrs` satisfies.
pub fn seal_kp<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &KpPublicParams,
    universe: &KpPublicUniverse,
    attrs: &AttributeBag,
    payload: &[u8],
    rng: &mut R,
) -> Result<SealedContainer, ContainerError> {
    let (ct, k) = abe::kp::encrypt(suite, pk, universe, attrs, rng)?;
    let list = attrs.iter().collect::<Vec<_>>().join(",");
    Ok(finish(Scheme::Kp, suite.level(), list, ct.to_bytes(), &k, payload, rng))
}

fn check_header(c: &SealedContainer, scheme: Scheme, suite: &PairingSuite) -> Result<(), ContainerError> {
    // The ABE blob repeats scheme and level. Disagreement means the bytes
    // were altered; agreement with the wrong key is a caller mistake.
    let inner = abe::wire::peek_header(&c.abe_blob).map_err(|_| ContainerError::AuthenticationFailure)?;
    if inner.scheme != c.scheme || inner.level != c.level {
        return Err(ContainerError::AuthenticationFailure);
    }
    if c.scheme != scheme {
        return Err(ContainerError::Abe(AbeError::SchemeMismatch));
    }
    if c.level != suite.level() {
        return Err(ContainerError::Abe(AbeError::LevelMismatch { expected: suite.level(), found: c.level }));
    }
    Ok(())
}

fn auth<T>(r: Result<T, AbeError>) -> Result<T, ContainerError> {
    r.map_err(|_| ContainerError::AuthenticationFailure)
}

/// Opens a CP container. Policy mismatch is reported before any payload
/// byte is touched; every integrity problem is an authentication failure.
pub fn open_cp(
    suite: &PairingSuite,
    pk: &CpPublicParams,
    sk: &CpSecretKey,
    bytes: &[u8],
) -> Result<Vec<u8>, ContainerError> {
    let c = SealedContainer::from_bytes(bytes)?;
    check_header(&c, Scheme::Cp, suite)?;
    let ct = auth(CpCiphertext::from_bytes(&c.abe_blob))?;
    let declared = parse_policy(&c.policy)
        .ok()
        .and_then(|ast| compile(&ast).ok())
        .ok_or(ContainerError::AuthenticationFailure)?;
    if declared != ct.tree {
        return Err(ContainerError::AuthenticationFailure);
    }
    if satisfies(&ct.tree, &sk.attributes()).is_err() {
        return Err(ContainerError::PolicyNotSatisfied);
    }
    let k = abe::cp::decrypt(suite, pk, sk, &ct)?;
    dem_open(&derive_key(&k), &c.nonce, &c.header_bytes(), &c.dem)
}

pub fn open_kp(
    suite: &PairingSuite,
    pk: &KpPublicParams,
    key: &KpKey,
    bytes: &[u8],
) -> Result<Vec<u8>, ContainerError> {
    let c = SealedContainer::from_bytes(bytes)?;
    check_header(&c, Scheme::Kp, suite)?;
    let ct = auth(KpCiphertext::from_bytes(&c.abe_blob))?;
    let listed = if c.policy.is_empty() { Vec::new() } else { c.policy.split(',').collect() };
    if !listed.iter().copied().eq(ct.components.keys().map(String::as_str)) {
        return Err(ContainerError::AuthenticationFailure);
    }
    if satisfies(&key.tree, &ct.attributes()).is_err() {
        return Err(ContainerError::PolicyNotSatisfied);
    }
    let k = abe::kp::decrypt(suite, pk, key, &ct)?;
    dem_open(&derive_key(&k), &c.nonce, &c.header_bytes(), &c.dem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abe::cp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const POLICY: &str = "Nurse and Ward_3 and Shift=Night and Clearance >= 2 and Hospital_A";
    const ATTRS: &str = "Nurse, Ward_3, Shift=Night, Clearance=3, Hospital_A";

    fn cp_fixture() -> (PairingSuite, ChaCha20Rng, CpPublicParams, CpSecretKey) {
        let suite = PairingSuite::new(SecurityLevel::S80);
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let (pk, mk) = cp::setup(&suite, &mut rng);
        let sk = cp::keygen(&suite, &pk, &mk, &AttributeBag::parse(ATTRS).unwrap(), &mut rng).unwrap();
        (suite, rng, pk, sk)
    }

    #[test]
    fn empty_and_ecg_payloads() {
        let (suite, mut rng, pk, sk) = cp_fixture();
        for payload in [Vec::new(), (0..1500u32).map(|i| (i * 7) as u8).collect()] {
            let c = seal_cp(&suite, &pk, POLICY, &payload, &mut rng).unwrap();
            let bytes = c.to_bytes();
            assert_eq!(bytes.len(), c.encoded_len());
            assert_eq!(SealedContainer::from_bytes(&bytes).unwrap(), c);
            assert_eq!(open_cp(&suite, &pk, &sk, &bytes).unwrap(), payload);
        }
    }

    #[test]
    fn sealing_is_randomised() {
        let (suite, mut rng, pk, _) = cp_fixture();
        let a = seal_cp(&suite, &pk, "A", b"same", &mut rng).unwrap();
        let b = seal_cp(&suite, &pk, "A", b"same", &mut rng).unwrap();
        assert_ne!(a.nonce, b.nonce);
        assert_ne!(a.abe_blob, b.abe_blob);
        assert_ne!(a.dem, b.dem);
    }

    #[test]
    fn bit_flips_never_yield_plaintext() {
        let (suite, mut rng, pk, sk) = cp_fixture();
        let bytes = seal_cp(&suite, &pk, "Nurse or Doctor", b"vitals", &mut rng).unwrap().to_bytes();
        // one flip per byte keeps this fast while touching every region
        for i in 0..bytes.len() {
            let mut t = bytes.clone();
            t[i] ^= 1 << (i % 8);
            match open_cp(&suite, &pk, &sk, &t) {
                Err(ContainerError::AuthenticationFailure | ContainerError::PolicyNotSatisfied) => {}
                Err(ContainerError::Abe(AbeError::SchemeMismatch | AbeError::LevelMismatch { .. })) => {}
                other => panic!("byte {i}: {other:?}"),
            }
        }
    }

    #[test]
    fn non_satisfying_key() {
        let (suite, mut rng, pk, _) = cp_fixture();
        // same seed as the fixture, so this is the fixture's master key
        let (_, mk) = cp::setup(&suite, &mut ChaCha20Rng::seed_from_u64(21));
        let weak = cp::keygen(&suite, &pk, &mk, &AttributeBag::parse("Nurse").unwrap(), &mut rng).unwrap();
        let bytes = seal_cp(&suite, &pk, POLICY, b"x", &mut rng).unwrap().to_bytes();
        assert_eq!(open_cp(&suite, &pk, &weak, &bytes), Err(ContainerError::PolicyNotSatisfied));
    }

    #[test]
    fn unsatisfiable_policy_is_propagated() {
        let (suite, mut rng, pk, _) = cp_fixture();
        assert_eq!(seal_cp(&suite, &pk, "A < 0", b"x", &mut rng), Err(ContainerError::UnsatisfiablePolicy));
    }

    #[test]
    fn kdf_is_deterministic_and_sized() {
        let (suite, _, pk, _) = cp_fixture();
        let k1 = derive_key(&pk.e_gg_alpha);
        assert_eq!(k1, derive_key(&pk.e_gg_alpha));
        assert_eq!(k1.len(), 16);
        let s = PairingSuite::new(SecurityLevel::S112);
        let gt = s.pair(s.g1_generator(), s.g2_generator());
        assert_eq!(derive_key(&gt).len(), 32);
        assert_ne!(derive_key(&gt)[..16], derive_key(&suite.pair(suite.g1_generator(), suite.g2_generator()))[..]);
    }

    #[test]
    fn kp_round_trip() {
        let suite = PairingSuite::new(SecurityLevel::S80);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pk, mk, mut universe) = abe::kp::setup(&suite, &mut rng);
        let attrs = AttributeBag::parse("Sensor_ECG, Ward_3").unwrap();
        universe.register_all(&suite, &attrs, &mut rng).unwrap();
        let tree = compile(&parse_policy("Sensor_ECG and Ward_3").unwrap()).unwrap();
        let key = abe::kp::keygen(&suite, &pk, &mk, &universe, &tree, &mut rng).unwrap();
        let c = seal_kp(&suite, &pk, &universe.public(), &attrs, b"ecg", &mut rng).unwrap();
        assert_eq!(c.policy, "Sensor_ECG,Ward_3");
        let bytes = c.to_bytes();
        assert_eq!(open_kp(&suite, &pk, &key, &bytes).unwrap(), b"ecg");
        let mut t = bytes.clone();
        t[9] ^= 0x20;
        assert!(open_kp(&suite, &pk, &key, &t).is_err());
    }
}
