//! Key-policy ABE over a small, registered attribute universe.
//!
//! The authority keeps a secret exponent t_i per attribute and publishes
//! `T_i = g1^(t_i)`. A key for tree T with master secret y holds, per leaf x,
//! `D_x = g2^(q_x(0) / t_att(x))`. A ciphertext for attribute set γ holds
//! `E' = K · e(g1,g2)^(ys)` and `E_i = T_i^s` for i in γ, so decryption costs
//! one pairing per witness leaf.

use std::collections::BTreeMap;

use rand::RngCore;

use super::wire::{ObjectKind, Reader, Writer};
use super::{check_level, AbeError, Scheme};
use crate::pairing::{PairingSuite, Scalar, SecurityLevel, G1, G2, Gt};
use crate::tree::{leaf_coefficients, satisfies, share_secret, AccessTree, AttributeBag};

/// Registry format version written after the object header.
pub const UNIVERSE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpPublicParams {
    pub g1: G1,
    pub g2: G2,
    /// `e(g1, g2)^y`
    pub y_pub: Gt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpMasterKey {
    pub y: Scalar,
}

/// Authority-side registry: attribute -> (t_i, T_i), append-only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpUniverse {
    level: SecurityLevel,
    entries: Vec<(String, Scalar, G1)>,
    index: BTreeMap<String, usize>,
}

/// Public projection of [`KpUniverse`]: attribute -> T_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpPublicUniverse {
    level: SecurityLevel,
    entries: BTreeMap<String, G1>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpKey {
    pub tree: AccessTree,
    /// `D_x` for every leaf, in preorder.
    pub leaves: Vec<G2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpCiphertext {
    pub e_prime: Gt,
    /// `attribute -> E_i`
    pub components: BTreeMap<String, G1>,
}

pub fn setup<R: RngCore + ?Sized>(suite: &PairingSuite, rng: &mut R) -> (KpPublicParams, KpMasterKey, KpUniverse) {
    let y = suite.random_nonzero_scalar(rng);
    let g1 = suite.g1_generator().clone();
    let g2 = suite.g2_generator().clone();
    let y_pub = suite.exp_gt(&suite.pair(&g1, &g2), &y);
    (KpPublicParams { g1, g2, y_pub }, KpMasterKey { y }, KpUniverse::new(suite.level()))
}

impl KpUniverse {
    pub fn new(level: SecurityLevel) -> Self {
        KpUniverse { level, entries: Vec::new(), index: BTreeMap::new() }
    }

    pub fn level(&self) -> SecurityLevel {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.index.contains_key(attr)
    }

    /// Registers `attr` if it is new and returns its public element.
    /// Registering an existing attribute changes nothing.
    pub fn register<R: RngCore + ?Sized>(
        &mut self,
        suite: &PairingSuite,
        attr: &str,
        rng: &mut R,
    ) -> Result<&G1, AbeError> {
        check_level(suite, self.level)?;
        if attr.is_empty() {
            return Err(AbeError::Malformed("empty attribute".into()));
        }
        let i = match self.index.get(attr) {
            Some(&i) => i,
            None => {
                let t = suite.random_nonzero_scalar(rng);
                let big_t = suite.exp_g1(suite.g1_generator(), &t);
                self.entries.push((attr.to_string(), t, big_t));
                self.index.insert(attr.to_string(), self.entries.len() - 1);
                self.entries.len() - 1
            }
        };
        Ok(&self.entries[i].2)
    }

    /// Registers every attribute of `bag`; returns how many were new.
    pub fn register_all<R: RngCore + ?Sized>(
        &mut self,
        suite: &PairingSuite,
        bag: &AttributeBag,
        rng: &mut R,
    ) -> Result<usize, AbeError> {
        let before = self.len();
        for a in bag.iter() {
            self.register(suite, a, rng)?;
        }
        Ok(self.len() - before)
    }

    fn secret(&self, attr: &str) -> Option<&Scalar> {
        self.index.get(attr).map(|&i| &self.entries[i].1)
    }

    pub fn public(&self) -> KpPublicUniverse {
        KpPublicUniverse {
            level: self.level,
            entries: self.entries.iter().map(|(a, _, t)| (a.clone(), t.clone())).collect(),
        }
    }

    /// Attributes in registration order.
    pub fn attributes(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(a, _, _)| a.as_str())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level, ObjectKind::Universe);
        w.u32(UNIVERSE_VERSION as usize);
        w.u32(self.entries.len());
        for (a, t, big_t) in &self.entries {
            w.string(a);
            w.scalar(t);
            w.g1(big_t);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        let level = r.expect(Scheme::Kp, ObjectKind::Universe)?;
        if r.u32()? != UNIVERSE_VERSION as usize {
            return Err(AbeError::Malformed("unsupported universe version".into()));
        }
        let n = r.u32()?;
        let mut u = KpUniverse::new(level);
        for _ in 0..n {
            let a = r.string()?;
            let t = r.scalar()?;
            let big_t = r.g1()?;
            if a.is_empty() || u.index.contains_key(&a) {
                return Err(AbeError::Malformed("duplicate or empty attribute".into()));
            }
            u.index.insert(a.clone(), u.entries.len());
            u.entries.push((a, t, big_t));
        }
        r.finish()?;
        Ok(u)
    }
}

impl KpPublicUniverse {
    pub fn level(&self) -> SecurityLevel {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, attr: &str) -> Option<&G1> {
        self.entries.get(attr)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level, ObjectKind::PublicUniverse);
        w.u32(UNIVERSE_VERSION as usize);
        w.u32(self.entries.len());
        for (a, t) in &self.entries {
            w.string(a);
            w.g1(t);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        let level = r.expect(Scheme::Kp, ObjectKind::PublicUniverse)?;
        if r.u32()? != UNIVERSE_VERSION as usize {
            return Err(AbeError::Malformed("unsupported universe version".into()));
        }
        let n = r.u32()?;
        let mut entries = BTreeMap::new();
        for _ in 0..n {
            let a = r.string()?;
            let t = r.g1()?;
            if entries.insert(a, t).is_some() {
                return Err(AbeError::Malformed("duplicate attribute".into()));
            }
        }
        r.finish()?;
        Ok(KpPublicUniverse { level, entries })
    }
}

pub fn keygen<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &KpPublicParams,
    mk: &KpMasterKey,
    universe: &KpUniverse,
    tree: &AccessTree,
    rng: &mut R,
) -> Result<KpKey, AbeError> {
    check_level(suite, pk.level())?;
    check_level(suite, mk.y.level())?;
    check_level(suite, universe.level())?;
    if !tree.is_valid() {
        return Err(AbeError::Malformed("invalid access tree".into()));
    }
    let leaves = tree.leaves();
    let mut inverses = Vec::with_capacity(leaves.len());
    for &(_, attr) in &leaves {
        let t = universe.secret(attr).ok_or_else(|| AbeError::UnknownAttribute(attr.to_string()))?;
        inverses.push(t.invert().expect("registered exponents are non-zero"));
    }
    let shares = share_secret(suite, tree, &mk.y, rng);
    let leaves = leaves
        .iter()
        .zip(&inverses)
        .map(|(&(id, _), inv)| suite.exp_g2(&pk.g2, &(shares.get(id) * inv)))
        .collect();
    Ok(KpKey { tree: tree.clone(), leaves })
}

/// Encapsulates a fresh random GT element under the attribute set `bag`.
pub fn encrypt<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    pk: &KpPublicParams,
    universe: &KpPublicUniverse,
    bag: &AttributeBag,
    rng: &mut R,
) -> Result<(KpCiphertext, Gt), AbeError> {
    check_level(suite, pk.level())?;
    check_level(suite, universe.level())?;
    if bag.is_empty() {
        return Err(AbeError::EmptyAttributeSet);
    }
    let tables: Vec<(&str, &G1)> = bag
        .iter()
        .map(|a| universe.get(a).map(|t| (a, t)).ok_or_else(|| AbeError::UnknownAttribute(a.to_string())))
        .collect::<Result<_, _>>()?;
    let k = suite.exp_gt(&pk.y_pub, &suite.random_nonzero_scalar(rng));
    let s = suite.random_scalar(rng);
    let e_prime = k.combine(&suite.exp_gt(&pk.y_pub, &s));
    let components = tables.into_iter().map(|(a, t)| (a.to_string(), suite.exp_g1(t, &s))).collect();
    Ok((KpCiphertext { e_prime, components }, k))
}

pub fn decrypt(suite: &PairingSuite, pk: &KpPublicParams, key: &KpKey, ct: &KpCiphertext) -> Result<Gt, AbeError> {
    check_level(suite, pk.level())?;
    check_level(suite, ct.level())?;
    check_level(suite, key.level())?;
    let witness = satisfies(&key.tree, &ct.attributes()).map_err(|_| AbeError::PolicyNotSatisfied)?;
    let leaves = key.tree.leaves();
    let position: BTreeMap<usize, (usize, &str)> =
        leaves.iter().enumerate().map(|(pos, &(id, attr))| (id, (pos, attr))).collect();

    // e(g1, g2)^(ys)
    let mut y_s = Gt::identity(suite.level());
    for (id, coeff) in leaf_coefficients(&key.tree, &witness, suite.level()) {
        let (pos, attr) = position[&id];
        let e = suite.pair(&ct.components[attr], &key.leaves[pos]);
        y_s = y_s.combine(&suite.exp_gt(&e, &coeff));
    }
    Ok(ct.e_prime.divide(&y_s))
}

impl KpPublicParams {
    pub fn level(&self) -> SecurityLevel {
        self.g1.level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level(), ObjectKind::PublicParams);
        w.g1(&self.g1);
        w.g2(&self.g2);
        w.gt(&self.y_pub);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Kp, ObjectKind::PublicParams)?;
        let pk = KpPublicParams { g1: r.g1()?, g2: r.g2()?, y_pub: r.gt()? };
        r.finish()?;
        Ok(pk)
    }
}

impl KpMasterKey {
    pub fn level(&self) -> SecurityLevel {
        self.y.level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level(), ObjectKind::MasterKey);
        w.scalar(&self.y);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Kp, ObjectKind::MasterKey)?;
        let mk = KpMasterKey { y: r.scalar()? };
        r.finish()?;
        Ok(mk)
    }
}

impl KpKey {
    /// Every tree has at least one leaf, so a key always has a component.
    pub fn level(&self) -> SecurityLevel {
        self.leaves[0].level()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level(), ObjectKind::SecretKey);
        w.tree(&self.tree);
        w.u32(self.leaves.len());
        for d in &self.leaves {
            w.g2(d);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Kp, ObjectKind::SecretKey)?;
        let tree = r.tree()?;
        let n = r.u32()?;
        if n != tree.leaf_count() {
            return Err(AbeError::Malformed("leaf component count does not match tree".into()));
        }
        let leaves = (0..n).map(|_| r.g2()).collect::<Result<_, _>>()?;
        r.finish()?;
        Ok(KpKey { tree, leaves })
    }
}

impl KpCiphertext {
    pub fn level(&self) -> SecurityLevel {
        self.e_prime.level()
    }

    pub fn attributes(&self) -> AttributeBag {
        AttributeBag::from_canonical(self.components.keys().cloned())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(Scheme::Kp, self.level(), ObjectKind::Ciphertext);
        w.gt(&self.e_prime);
        w.u32(self.components.len());
        for (a, e) in &self.components {
            w.string(a);
            w.g1(e);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader::new(bytes);
        r.expect(Scheme::Kp, ObjectKind::Ciphertext)?;
        let e_prime = r.gt()?;
        let n = r.u32()?;
        let mut components = BTreeMap::new();
        for _ in 0..n {
            let a = r.string()?;
            let e = r.g1()?;
            if components.insert(a, e).is_some() {
                return Err(AbeError::Malformed("duplicate attribute".into()));
            }
        }
        r.finish()?;
        Ok(KpCiphertext { e_prime, components })
    }
}
