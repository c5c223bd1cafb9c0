//! Ciphertext-policy ABE: the policy tree travels with the ciphertext and
//! keys carry attribute sets.
//!
//! Keys hold `D = g1^((α+r)/β)` plus, per attribute j, `D_j = g1^r · H(j)^(r_j)`
//! and `D'_j = g2^(r_j)`. A ciphertext under tree T with secret s holds
//! `C~ = K · e(g1,g2)^(αs)`, `C = h^s` and, per leaf y with share q_y(0),
//! `C_y = g2^(q_y(0))` and `C'_y = H(att(y))^(q_y(0))`.

use std::collections::BTreeMap;

use rand::RngCore;

use super::wire::{ObjectKind, Reader, Writer};
use super::{check_level, AbeError, Scheme};
use crate::pairing::{PairingSuite, Scalar, SecurityLevel, DST_CP_ATTRIBUTE, G1, G2, Gt};
use crate::tree::{leaf_coefficients, satisfies, share_secret, AccessTree, AttributeBag};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpPublicParams {
    pub g1: G1,
    pub g2: G2,
    /// `g2^β`
    pub h: G2,
    /// `g1^(1/β)`
    pub f: G1,
    /// `e(g1, g2)^α`
    pub e_gg_alpha: Gt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpMasterKey {
    pub beta: Scalar,
    pub g1_alpha: G1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpSecretKey {
    pub d: G1,
    /// `attribute -> (D_j, D'_j)`
    pub components: BTreeMap<String, (G1, G2)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpCiphertext {
    pub tree: AccessTree,
    pub c_tilde: Gt,
    pub c: G2,
    /// `(C_y, C'_y)` for every leaf, in preorder.
    pub leaves: Vec<(G2, G1)>,
}

pub fn setup<R: RngCore + ?Sized>(suite: &PairingSuite, rng: &mut R) -> (CpPublicParams, CpMasterKey) {
    let alpha = suite.random_nonzero_scalar(rng);
    let beta = suite.random_nonzero_scalar(rng);
    let g1 = suite.g1_generator().clone();
    let g2 = suite.g2_generator().clone();
    let h = suite.exp_g2(&g2, &beta);
    let f = suite.exp_g1(&g1, &beta.invert().expect("non-zero"));
    let g1_alpha = suite.exp_g1(&g1, &alpha);
    let e_gg_alpha = suite.pair(&g1_alpha, &g2);
    (CpPublicParams { g1, g2, h, f, e_gg_alpha }, CpMasterKey { beta, g1_alpha })
}

pub fn keygen<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &CpPublicParams,
    mk: &CpMasterKey,
    bag: &AttributeBag,
    rng: &mut R,
) -> Result<CpSecretKey, AbeError> {
    check_level(suite, pk.level())?;
    check_level(suite, mk.beta.level())?;
    if bag.is_empty() {
        return Err(AbeError::EmptyAttributeSet);
    }
    let r = suite.random_scalar(rng);
    let g_r = suite.exp_g1(&pk.g1, &r);
    let inv_beta = mk.beta.invert().ok_or_else(|| AbeError::Malformed("zero beta".into()))?;
    let d = suite.exp_g1(&mk.g1_alpha.combine(&g_r), &inv_beta);
    let mut components = BTreeMap::new();
    for attr in bag.iter() {
        let r_j = suite.random_scalar(rng);
        let h_j = suite.hash_to_g1(DST_CP_ATTRIBUTE, attr.as_bytes());
        let d_j = g_r.combine(&suite.exp_g1(&h_j, &r_j));
        let d_j_prime = suite.exp_g2(&pk.g2, &r_j);
        components.insert(attr.to_string(), (d_j, d_j_prime));
    }
    Ok(CpSecretKey { d, components })
}

/// Encapsulates a fresh random GT element under `tree`.
pub fn encrypt<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &CpPublicParams,
    tree: &AccessTree,
    rng: &mut R,
) -> Result<(CpCiphertext, Gt), AbeError> {
    check_level(suite, pk.level())?;
    if !tree.is_valid() {
        return Err(AbeError::Malformed("invalid access tree".into()));
    }
    let k = suite.exp_gt(&pk.e_gg_alpha, &suite.random_nonzero_scalar(rng));
    let s = suite.random_scalar(rng);
    let c_tilde = k.combine(&suite.exp_gt(&pk.e_gg_alpha, &s));
    let c = suite.exp_g2(&pk.h, &s);
    let shares = share_secret(suite, tree, &s, rng);
    let leaves = tree
        .leaves()
        .into_iter()
        .map(|(id, attr)| {
            let q = shares.get(id);
            let c_y = suite.exp_g2(&pk.g2, q);
            let c_y_prime = suite.exp_g1(&suite.hash_to_g1(DST_CP_ATTRIBUTE, attr.as_bytes()), q);
            (c_y, c_y_prime)
        })
        .collect();
    Ok((CpCiphertext { tree: tree.clone(), c_tilde, c, leaves }, k))
}

pub fn decrypt(
    suite: &PairingSuite,
    pk: &CpPublicParams,
    sk: &CpSecretKey,
    ct: &CpCiphertext,
) -> Result<Gt, AbeError> {
    check_level(suite, pk.level())?;
    check_level(suite, sk.level())?;
    check_level(suite, ct.level())?;
    let bag = sk.attributes();
    let witness = satisfies(&ct.tree, &bag).map_err(|_| AbeError::PolicyNotSatisfied)?;
    let leaves = ct.tree.leaves();
    let position: BTreeMap<usize, (usize, &str)> =
        leaves.iter().enumerate().map(|(pos, &(id, attr))| (id, (pos, attr))).collect();

    // A = e(g1, g2)^(r s)
    let mut a = Gt::identity(suite.level());
    for (id, coeff) in leaf_coefficients(&ct.tree, &witness, suite.level()) {
        let (pos, attr) = position[&id];
        let (c_y, c_y_prime) = &ct.leaves[pos];
        let (d_j, d_j_prime) = &sk.components[attr];
        let f_y = suite.pair(d_j, c_y).divide(&suite.pair(c_y_prime, d_j_prime));
        a = a.combine(&suite.exp_gt(&f_y, &coeff));
    }
    Ok(ct.c_tilde.combine(&a).divide(&suite.pair(&sk.d, &ct.c)))
}

impl CpPublicParams {
    pub fn level(&self) -> SecurityLevel {
        self.g1.level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Cp, self.level(), ObjectKind::PublicParams);
        w.g1(&self.g1);
        w.g2(&self.g2);
        w.g2(&self.h);
        w.g1(&self.f);
        w.gt(&self.e_gg_alpha);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Cp, ObjectKind::PublicParams)?;
        let pk = CpPublicParams { g1: r.g1()?, g2: r.g2()?, h: r.g2()?, f: r.g1()?, e_gg_alpha: r.gt()? };
        r.finish()?;
        Ok(pk)
    }
}

impl CpMasterKey {
    pub fn level(&self) -> SecurityLevel {
        self.beta.level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Cp, self.level(), ObjectKind::MasterKey);
        w.scalar(&self.beta);
        w.g1(&self.g1_alpha);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Cp, ObjectKind::MasterKey)?;
        let mk = CpMasterKey { beta: r.scalar()?, g1_alpha: r.g1()? };
        r.finish()?;
        Ok(mk)
    }
}

impl CpSecretKey {
    pub fn level(&self) -> SecurityLevel {
        self.d.level()
    }

    pub fn attributes(&self) -> AttributeBag {
        AttributeBag::from_canonical(self.components.keys().cloned())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Cp, self.level(), ObjectKind::SecretKey);
        w.g1(&self.d);
        w.u32(self.components.len());
        for (attr, (d_j, d_j_prime)) in &self.components {
            w.string(attr);
            w.g1(d_j);
            w.g2(d_j_prime);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Cp, ObjectKind::SecretKey)?;
        let d = r.g1()?;
        let n = r.u32()?;
        let mut components = BTreeMap::new();
        for _ in 0..n {
            let attr = r.string()?;
            let pair = (r.g1()?, r.g2()?);
            if components.insert(attr, pair).is_some() {
                return Err(AbeError::Malformed("duplicate attribute".into()));
            }
        }
        r.finish()?;
        Ok(CpSecretKey { d, components })
    }
}

impl CpCiphertext {
    pub fn level(&self) -> SecurityLevel {
        self.c.level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Cp, self.level(), ObjectKind::Ciphertext);
        w.tree(&self.tree);
        w.gt(&self.c_tilde);
        w.g2(&self.c);
        w.u32(self.leaves.len());
        for (c_y, c_y_prime) in &self.leaves {
            w.g2(c_y);
            w.g1(c_y_prime);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Cp, ObjectKind::Ciphertext)?;
        let tree = r.tree()?;
        let c_tilde = r.gt()?;
        let c = r.g2()?;
        let n = r.u32()?;
        if n != tree.leaf_count() {
            return Err(AbeError::Malformed("leaf component count does not match tree".into()));
        }
        let leaves = (0..n).map(|_| Ok((r.g2()?, r.g1()?))).collect::<Result<_, AbeError>>()?;
        r.finish()?;
        Ok(CpCiphertext { tree, c_tilde, c, leaves })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::parse_policy;
    use crate::tree::compile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn tree(text: &str) -> AccessTree {
        compile(&parse_policy(text).unwrap()).unwrap()
    }

    fn fixture(level: SecurityLevel) -> (PairingSuite, ChaCha20Rng, CpPublicParams, CpMasterKey) {
        let suite = PairingSuite::new(level);
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let (pk, mk) = setup(&suite, &mut rng);
        (suite, rng, pk, mk)
    }

    #[test]
    fn setup_is_consistent() {
        let (suite, _, pk, mk) = fixture(SecurityLevel::S80);
        assert_eq!(pk.e_gg_alpha, suite.pair(&mk.g1_alpha, &pk.g2));
        assert_eq!(suite.exp_g1(&pk.f, &mk.beta), pk.g1);
    }

    #[test]
    fn round_trip_every_level() {
        for level in SecurityLevel::ALL {
            let (suite, mut rng, pk, mk) = fixture(level);
            let sk = keygen(&suite, &pk, &mk, &AttributeBag::parse("A, C").unwrap(), &mut rng).unwrap();
            let (ct, k) = encrypt(&suite, &pk, &tree("(A and B) or C"), &mut rng).unwrap();
            assert_eq!(ct.leaves.len(), 3);
            assert_eq!(decrypt(&suite, &pk, &sk, &ct).unwrap(), k);
        }
    }

    #[test]
    fn missing_attribute_is_rejected() {
        let (suite, mut rng, pk, mk) = fixture(SecurityLevel::S80);
        let sk = keygen(&suite, &pk, &mk, &AttributeBag::parse("A").unwrap(), &mut rng).unwrap();
        let (ct, _) = encrypt(&suite, &pk, &tree("A and B"), &mut rng).unwrap();
        assert_eq!(decrypt(&suite, &pk, &sk, &ct), Err(AbeError::PolicyNotSatisfied));
        assert_eq!(
            keygen(&suite, &pk, &mk, &AttributeBag::new(), &mut rng).unwrap_err(),
            AbeError::EmptyAttributeSet
        );
    }

    #[test]
    fn keygen_costs() {
        let (suite, mut rng, pk, mk) = fixture(SecurityLevel::S80);
        for s in [1usize, 2, 7] {
            let bag = AttributeBag::from_canonical((0..s).map(|i| format!("x{i}")));
            let before = suite.counters();
            let sk = keygen(&suite, &pk, &mk, &bag, &mut rng).unwrap();
            let d = suite.counters().since(&before);
            assert_eq!(sk.components.len(), s);
            assert_eq!((d.hash_to_group, d.exp_g1, d.exp_g2, d.exp_gt, d.pairings), (s as u64, 2 + s as u64, s as u64, 0, 0));
        }
        let bag = AttributeBag::parse("A=9, Doctor").unwrap();
        let sk = keygen(&suite, &pk, &mk, &bag, &mut rng).unwrap();
        assert_eq!(sk.components.len(), crate::tree::expand_numeric("A", 9).len() + 1);
    }

    #[test]
    fn mixing_key_components_does_not_decrypt() {
        let (suite, mut rng, pk, mk) = fixture(SecurityLevel::S80);
        let k1 = keygen(&suite, &pk, &mk, &AttributeBag::parse("A").unwrap(), &mut rng).unwrap();
        let k2 = keygen(&suite, &pk, &mk, &AttributeBag::parse("B").unwrap(), &mut rng).unwrap();
        let (ct, k) = encrypt(&suite, &pk, &tree("A and B"), &mut rng).unwrap();
        let mut mixed = k1.clone();
        mixed.components.extend(k2.components.clone());
        let got = decrypt(&suite, &pk, &mixed, &ct).unwrap();
        assert_ne!(got, k);
    }

    #[test]
    fn encodings_round_trip_and_reject_tampering() {
        let (suite, mut rng, pk, mk) = fixture(SecurityLevel::S112);
        let sk = keygen(&suite, &pk, &mk, &AttributeBag::parse("A, B").unwrap(), &mut rng).unwrap();
        let (ct, _) = encrypt(&suite, &pk, &tree("2 of (A, B, C)"), &mut rng).unwrap();
        assert_eq!(CpPublicParams::from_bytes(&pk.to_bytes()).unwrap(), pk);
        assert_eq!(CpMasterKey::from_bytes(&mk.to_bytes()).unwrap(), mk);
        assert_eq!(CpSecretKey::from_bytes(&sk.to_bytes()).unwrap(), sk);
        let bytes = ct.to_bytes();
        assert_eq!(CpCiphertext::from_bytes(&bytes).unwrap(), ct);
        assert!(CpCiphertext::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(CpCiphertext::from_bytes(&extra).is_err());
        assert_eq!(CpSecretKey::from_bytes(&pk.to_bytes()).unwrap_err(), AbeError::Malformed("unexpected object kind".into()));
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let (_, mut rng, pk, mk) = fixture(SecurityLevel::S80);
        let other = PairingSuite::new(SecurityLevel::S112);
        assert!(matches!(
            keygen(&other, &pk, &mk, &AttributeBag::parse("A").unwrap(), &mut rng),
            Err(AbeError::LevelMismatch { .. })
        ));
    }
}
