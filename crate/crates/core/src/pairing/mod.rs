//! Bilinear group context with per-operation instrumentation.
//!
//! A [`PairingSuite`] binds one [`SecurityLevel`] to a fixed pairing-friendly
//! curve and counts every hash-to-group, exponentiation and pairing it
//! performs. The counters are the ground truth for the cost laws checked by
//! the scheme tests and reported by the benchmark harness.
//!
//! | level | curve      | scalar bits | base field bits |
//! |-------|------------|-------------|-----------------|
//! | S80   | BN254      | 254         | 254             |
//! | S112  | BLS12-381  | 255         | 381             |
//! | S128  | BLS12-461  | 308         | 461             |
//!
//! The table is parameter set version 1; changing it invalidates every
//! serialized key and ciphertext.

mod backend;
mod scalar;

use std::cell::{Cell, RefCell};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use miracl_core::{bls12381, bls12461, bn254};
use rand::RngCore;

pub use scalar::{group_order, Scalar};

/// Version of the level → curve table above.
pub const PARAMETER_SET_VERSION: u8 = 1;

/// Domain tag for hashing CP-ABE leaf attributes onto G1.
pub const DST_CP_ATTRIBUTE: &[u8] = b"ABEKIT-V01-G1_XMD:SHA-256_SVDW_RO_CP_ATTRIBUTE_";
/// Domain tag for KP-ABE contexts (reserved: the small-universe KP scheme
/// never hashes attributes, its exponents come from the registry).
pub const DST_KP_CONTEXT: &[u8] = b"ABEKIT-V01-G1_XMD:SHA-256_SVDW_RO_KP_CONTEXT_";

/// Symmetric-equivalent security strength.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SecurityLevel {
    S80,
    S112,
    S128,
}

impl SecurityLevel {
    pub const ALL: [SecurityLevel; 3] = [SecurityLevel::S80, SecurityLevel::S112, SecurityLevel::S128];

    pub fn bits(self) -> u16 {
        match self {
            SecurityLevel::S80 => 80,
            SecurityLevel::S112 => 112,
            SecurityLevel::S128 => 128,
        }
    }

    /// RSA modulus size offering comparable strength.
    pub fn rsa_equivalent_bits(self) -> u16 {
        match self {
            SecurityLevel::S80 => 1024,
            SecurityLevel::S112 => 2048,
            SecurityLevel::S128 => 3072,
        }
    }

    pub fn curve_name(self) -> &'static str {
        match self {
            SecurityLevel::S80 => "BN254",
            SecurityLevel::S112 => "BLS12-381",
            SecurityLevel::S128 => "BLS12-461",
        }
    }

    pub fn from_bits(bits: u16) -> Option<Self> {
        match bits {
            80 => Some(SecurityLevel::S80),
            112 => Some(SecurityLevel::S112),
            128 => Some(SecurityLevel::S128),
            _ => None,
        }
    }

    /// Byte used in serialized headers (the strength in bits).
    pub fn wire_id(self) -> u8 {
        self.bits() as u8
    }

    pub fn from_wire_id(b: u8) -> Option<Self> {
        Self::from_bits(b as u16)
    }

    /// Bit length of the group order p.
    pub fn scalar_bits(self) -> u64 {
        group_order(self).bits()
    }

    /// Bit length of the base field prime.
    pub fn base_field_bits(self) -> usize {
        match self {
            SecurityLevel::S80 => backend::bn254::modulus_bits(),
            SecurityLevel::S112 => backend::bls12381::modulus_bits(),
            SecurityLevel::S128 => backend::bls12461::modulus_bits(),
        }
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl FromStr for SecurityLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches(['S', 's']);
        t.parse::<u16>()
            .ok()
            .and_then(Self::from_bits)
            .ok_or_else(|| format!("unknown security level `{s}` (expected 80, 112 or 128)"))
    }
}

// Each group type is a newtype over a per-curve enum; the variant doubles as
// the security-level tag of the element.
macro_rules! group_repr {
    ($repr:ident, $bn:ty, $b381:ty, $b461:ty) => {
        #[derive(Clone)]
        pub(crate) enum $repr {
            S80($bn),
            S112($b381),
            S128($b461),
        }

        impl $repr {
            fn level(&self) -> SecurityLevel {
                match self {
                    $repr::S80(_) => SecurityLevel::S80,
                    $repr::S112(_) => SecurityLevel::S112,
                    $repr::S128(_) => SecurityLevel::S128,
                }
            }
        }
    };
}

group_repr!(G1Repr, bn254::ecp::ECP, bls12381::ecp::ECP, bls12461::ecp::ECP);
group_repr!(G2Repr, bn254::ecp2::ECP2, bls12381::ecp2::ECP2, bls12461::ecp2::ECP2);
group_repr!(GtRepr, bn254::fp12::FP12, bls12381::fp12::FP12, bls12461::fp12::FP12);

/// Build a value of `$repr` at `$level` from a per-curve expression.
macro_rules! construct {
    ($level:expr, $repr:ident, |$b:ident| $body:expr) => {
        match $level {
            SecurityLevel::S80 => {
                use backend::bn254 as $b;
                $repr::S80($body)
            }
            SecurityLevel::S112 => {
                use backend::bls12381 as $b;
                $repr::S112($body)
            }
            SecurityLevel::S128 => {
                use backend::bls12461 as $b;
                $repr::S128($body)
            }
        }
    };
}

/// Unary map over one element, keeping the variant.
macro_rules! map1 {
    ($val:expr, $repr:ident, |$x:ident, $b:ident| $body:expr) => {
        match $val {
            $repr::S80($x) => {
                use backend::bn254 as $b;
                $repr::S80($body)
            }
            $repr::S112($x) => {
                use backend::bls12381 as $b;
                $repr::S112($body)
            }
            $repr::S128($x) => {
                use backend::bls12461 as $b;
                $repr::S128($body)
            }
        }
    };
}

/// Unary reduction over one element to a curve-independent value.
macro_rules! fold1 {
    ($val:expr, $repr:ident, |$x:ident, $b:ident| $body:expr) => {
        match $val {
            $repr::S80($x) => {
                use backend::bn254 as $b;
                $body
            }
            $repr::S112($x) => {
                use backend::bls12381 as $b;
                $body
            }
            $repr::S128($x) => {
                use backend::bls12461 as $b;
                $body
            }
        }
    };
}

/// Binary operation on two elements of the same level.
macro_rules! zip2 {
    ($a:expr, $b_:expr, $ra:ident, $rb:ident, $rout:ident, |$x:ident, $y:ident, $b:ident| $body:expr) => {
        match ($a, $b_) {
            ($ra::S80($x), $rb::S80($y)) => {
                use backend::bn254 as $b;
                $rout::S80($body)
            }
            ($ra::S112($x), $rb::S112($y)) => {
                use backend::bls12381 as $b;
                $rout::S112($body)
            }
            ($ra::S128($x), $rb::S128($y)) => {
                use backend::bls12461 as $b;
                $rout::S128($body)
            }
            _ => panic!("group elements from different security levels"),
        }
    };
}

macro_rules! eq2 {
    ($a:expr, $b_:expr, $r:ident, $f:ident) => {
        match ($a, $b_) {
            ($r::S80(x), $r::S80(y)) => backend::bn254::$f(x, y),
            ($r::S112(x), $r::S112(y)) => backend::bls12381::$f(x, y),
            ($r::S128(x), $r::S128(y)) => backend::bls12461::$f(x, y),
            _ => false,
        }
    };
}

/// Which group an element belongs to; also the tag byte on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Scalar = 0,
    G1 = 1,
    G2 = 2,
    Gt = 3,
}

impl GroupKind {
    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(GroupKind::Scalar),
            1 => Some(GroupKind::G1),
            2 => Some(GroupKind::G2),
            3 => Some(GroupKind::Gt),
            _ => None,
        }
    }
}

macro_rules! element_type {
    ($name:ident, $repr:ident, $to:ident, $from:ident, $eq:ident, $kind:expr) => {
        #[derive(Clone)]
        pub struct $name(pub(crate) $repr);

        impl $name {
            pub fn level(&self) -> SecurityLevel {
                self.0.level()
            }

            /// Canonical encoding: compressed point (or the single byte `0x00`
            /// for the identity); GT elements as 12 base-field coordinates.
            pub fn to_bytes(&self) -> Vec<u8> {
                fold1!(&self.0, $repr, |x, b| b::$to(x))
            }

            /// Decodes and validates subgroup membership and canonicity.
            pub fn from_bytes(level: SecurityLevel, bytes: &[u8]) -> Option<Self> {
                Some($name(match level {
                    SecurityLevel::S80 => $repr::S80(backend::bn254::$from(bytes)?),
                    SecurityLevel::S112 => $repr::S112(backend::bls12381::$from(bytes)?),
                    SecurityLevel::S128 => $repr::S128(backend::bls12461::$from(bytes)?),
                }))
            }

            pub const KIND: GroupKind = $kind;
        }

        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                eq2!(&self.0, &other.0, $repr, $eq)
            }
        }

        impl Eq for $name {}

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let bytes = self.to_bytes();
                let head: String = bytes.iter().take(8).map(|b| format!("{b:02x}")).collect();
                write!(f, "{}({:?}, {}…)", stringify!($name), self.level(), head)
            }
        }
    };
}

element_type!(G1, G1Repr, g1_to_bytes, g1_from_bytes, g1_eq, GroupKind::G1);
element_type!(G2, G2Repr, g2_to_bytes, g2_from_bytes, g2_eq, GroupKind::G2);
element_type!(Gt, GtRepr, gt_to_bytes, gt_from_bytes, gt_eq, GroupKind::Gt);

impl G1 {
    pub fn identity(level: SecurityLevel) -> Self {
        G1(construct!(level, G1Repr, |b| b::g1_identity()))
    }

    /// Group law (additive notation on the curve, multiplicative in the schemes).
    pub fn combine(&self, other: &G1) -> G1 {
        G1(zip2!(&self.0, &other.0, G1Repr, G1Repr, G1Repr, |x, y, b| b::g1_add(x, y)))
    }

    pub fn inverse(&self) -> G1 {
        G1(map1!(&self.0, G1Repr, |x, b| b::g1_neg(x)))
    }

    pub fn is_identity(&self) -> bool {
        *self == G1::identity(self.level())
    }
}

impl G2 {
    pub fn identity(level: SecurityLevel) -> Self {
        G2(construct!(level, G2Repr, |b| b::g2_identity()))
    }

    pub fn combine(&self, other: &G2) -> G2 {
        G2(zip2!(&self.0, &other.0, G2Repr, G2Repr, G2Repr, |x, y, b| b::g2_add(x, y)))
    }

    pub fn inverse(&self) -> G2 {
        G2(map1!(&self.0, G2Repr, |x, b| b::g2_neg(x)))
    }

    pub fn is_identity(&self) -> bool {
        *self == G2::identity(self.level())
    }
}

impl Gt {
    pub fn identity(level: SecurityLevel) -> Self {
        Gt(construct!(level, GtRepr, |b| b::gt_identity()))
    }

    pub fn combine(&self, other: &Gt) -> Gt {
        Gt(zip2!(&self.0, &other.0, GtRepr, GtRepr, GtRepr, |x, y, b| b::gt_mul(x, y)))
    }

    pub fn inverse(&self) -> Gt {
        Gt(map1!(&self.0, GtRepr, |x, b| b::gt_inv(x)))
    }

    /// `self / other`
    pub fn divide(&self, other: &Gt) -> Gt {
        self.combine(&other.inverse())
    }

    pub fn is_identity(&self) -> bool {
        *self == Gt::identity(self.level())
    }
}

/// Snapshot of the operation counters. Take one before and one after a call
/// and use [`OpCounters::since`] for the per-call delta.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounters {
    pub exp_g1: u64,
    pub exp_g2: u64,
    pub exp_gt: u64,
    pub pairings: u64,
    pub hash_to_group: u64,
}

impl OpCounters {
    pub fn since(&self, earlier: &OpCounters) -> OpCounters {
        OpCounters {
            exp_g1: self.exp_g1 - earlier.exp_g1,
            exp_g2: self.exp_g2 - earlier.exp_g2,
            exp_gt: self.exp_gt - earlier.exp_gt,
            pairings: self.pairings - earlier.pairings,
            hash_to_group: self.hash_to_group - earlier.hash_to_group,
        }
    }

    pub fn exponentiations(&self) -> u64 {
        self.exp_g1 + self.exp_g2 + self.exp_gt
    }
}

/// Wall time accumulated inside each operation class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTimings {
    pub hash_to_group: Duration,
    pub exponentiation: Duration,
    pub pairing: Duration,
}

impl OpTimings {
    pub fn since(&self, earlier: &OpTimings) -> OpTimings {
        OpTimings {
            hash_to_group: self.hash_to_group - earlier.hash_to_group,
            exponentiation: self.exponentiation - earlier.exponentiation,
            pairing: self.pairing - earlier.pairing,
        }
    }

    pub fn total(&self) -> Duration {
        self.hash_to_group + self.exponentiation + self.pairing
    }
}

#[derive(Clone, Copy)]
enum OpClass {
    Hash,
    Exp,
    Pairing,
}

/// Pairing group context for one security level.
///
/// Counters use interior mutability so group operations take `&self`; a suite
/// is `!Sync` and belongs to a single thread. Create one per worker.
pub struct PairingSuite {
    level: SecurityLevel,
    g1: G1,
    g2: G2,
    counters: Cell<OpCounters>,
    timings: RefCell<Option<OpTimings>>,
}

impl PairingSuite {
    pub fn new(level: SecurityLevel) -> Self {
        PairingSuite {
            level,
            g1: G1(construct!(level, G1Repr, |b| b::g1_generator())),
            g2: G2(construct!(level, G2Repr, |b| b::g2_generator())),
            counters: Cell::new(OpCounters::default()),
            timings: RefCell::new(None),
        }
    }

    pub fn level(&self) -> SecurityLevel {
        self.level
    }

    pub fn order(&self) -> &'static num_bigint::BigUint {
        group_order(self.level)
    }

    pub fn g1_generator(&self) -> &G1 {
        &self.g1
    }

    pub fn g2_generator(&self) -> &G2 {
        &self.g2
    }

    pub fn counters(&self) -> OpCounters {
        self.counters.get()
    }

    /// Starts per-class wall-clock accounting (adds two clock reads per
    /// operation, so leave it off for plain timing runs).
    pub fn enable_timing(&self) {
        let mut t = self.timings.borrow_mut();
        if t.is_none() {
            *t = Some(OpTimings::default());
        }
    }

    pub fn disable_timing(&self) {
        *self.timings.borrow_mut() = None;
    }

    pub fn timings(&self) -> Option<OpTimings> {
        *self.timings.borrow()
    }

    pub fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar::random(self.level, rng)
    }

    pub fn random_nonzero_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar::random_nonzero(self.level, rng)
    }

    fn instrument<T>(&self, class: OpClass, f: impl FnOnce() -> T) -> T {
        let mut c = self.counters.get();
        match class {
            OpClass::Hash => c.hash_to_group += 1,
            OpClass::Pairing => c.pairings += 1,
            OpClass::Exp => {}
        }
        self.counters.set(c);
        if self.timings.borrow().is_none() {
            return f();
        }
        let start = Instant::now();
        let out = f();
        let dt = start.elapsed();
        if let Some(t) = self.timings.borrow_mut().as_mut() {
            match class {
                OpClass::Hash => t.hash_to_group += dt,
                OpClass::Exp => t.exponentiation += dt,
                OpClass::Pairing => t.pairing += dt,
            }
        }
        out
    }

    fn bump_exp(&self, kind: GroupKind) {
        let mut c = self.counters.get();
        match kind {
            GroupKind::G1 => c.exp_g1 += 1,
            GroupKind::G2 => c.exp_g2 += 1,
            GroupKind::Gt => c.exp_gt += 1,
            GroupKind::Scalar => unreachable!(),
        }
        self.counters.set(c);
    }

    fn check_level(&self, level: SecurityLevel) {
        assert_eq!(level, self.level, "element from a {level:?} suite used with a {:?} suite", self.level);
    }

    /// Deterministic hash of `(domain_tag, input)` onto G1.
    pub fn hash_to_g1(&self, domain_tag: &[u8], input: &[u8]) -> G1 {
        let level = self.level;
        self.instrument(OpClass::Hash, || G1(construct!(level, G1Repr, |b| b::hash_to_g1(domain_tag, input))))
    }

    pub fn exp_g1(&self, base: &G1, e: &Scalar) -> G1 {
        self.check_level(base.level());
        self.bump_exp(GroupKind::G1);
        let (bytes, negate) = e.signed_exponent();
        self.instrument(OpClass::Exp, || {
            let r = G1(map1!(&base.0, G1Repr, |x, b| b::g1_mul(x, &bytes)));
            if negate {
                r.inverse()
            } else {
                r
            }
        })
    }

    pub fn exp_g2(&self, base: &G2, e: &Scalar) -> G2 {
        self.check_level(base.level());
        self.bump_exp(GroupKind::G2);
        let (bytes, negate) = e.signed_exponent();
        self.instrument(OpClass::Exp, || {
            let r = G2(map1!(&base.0, G2Repr, |x, b| b::g2_mul(x, &bytes)));
            if negate {
                r.inverse()
            } else {
                r
            }
        })
    }

    pub fn exp_gt(&self, base: &Gt, e: &Scalar) -> Gt {
        self.check_level(base.level());
        self.bump_exp(GroupKind::Gt);
        let (bytes, negate) = e.signed_exponent();
        self.instrument(OpClass::Exp, || {
            if bytes.is_empty() {
                return Gt::identity(base.level());
            }
            let r = Gt(map1!(&base.0, GtRepr, |x, b| b::gt_pow(x, &bytes)));
            if negate {
                r.inverse()
            } else {
                r
            }
        })
    }

    pub fn pair(&self, x: &G1, y: &G2) -> Gt {
        self.check_level(x.level());
        self.instrument(OpClass::Pairing, || {
            Gt(zip2!(&x.0, &y.0, G1Repr, G2Repr, GtRepr, |p, q, b| b::pairing(p, q)))
        })
    }
}

impl fmt::Debug for PairingSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairingSuite")
            .field("level", &self.level)
            .field("curve", &self.level.curve_name())
            .field("counters", &self.counters.get())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn init_is_deterministic_and_zeroed() {
        for level in SecurityLevel::ALL {
            let a = PairingSuite::new(level);
            let b = PairingSuite::new(level);
            assert_eq!(a.counters(), OpCounters::default());
            assert_eq!(a.g1_generator().to_bytes(), b.g1_generator().to_bytes());
            assert_eq!(a.g2_generator().to_bytes(), b.g2_generator().to_bytes());
        }
    }

    #[test]
    fn scalar_sizes_grow_with_level() {
        assert_eq!(SecurityLevel::S80.scalar_bits(), 254);
        assert_eq!(SecurityLevel::S112.scalar_bits(), 255);
        assert_eq!(SecurityLevel::S128.scalar_bits(), 308);
        assert!(SecurityLevel::S128.scalar_bits() > SecurityLevel::S80.scalar_bits());
        assert!(SecurityLevel::S80.base_field_bits() < SecurityLevel::S112.base_field_bits());
        assert!(SecurityLevel::S112.base_field_bits() < SecurityLevel::S128.base_field_bits());
    }

    #[test]
    fn hash_counts_and_separates() {
        let s = PairingSuite::new(SecurityLevel::S80);
        let before = s.counters();
        let a1 = s.hash_to_g1(DST_CP_ATTRIBUTE, b"A");
        assert_eq!(s.counters().since(&before).hash_to_group, 1);
        let a2 = s.hash_to_g1(DST_CP_ATTRIBUTE, b"A");
        let b = s.hash_to_g1(DST_CP_ATTRIBUTE, b"B");
        let other_tag = s.hash_to_g1(DST_KP_CONTEXT, b"A");
        assert_eq!(a1, a2);
        assert_ne!(a1.to_bytes(), b.to_bytes());
        assert_ne!(a1, other_tag);
        assert!(!a1.is_identity());
    }

    #[test]
    fn exponent_edge_cases() {
        for level in SecurityLevel::ALL {
            let s = PairingSuite::new(level);
            let g = s.g1_generator().clone();
            assert!(s.exp_g1(&g, &Scalar::zero(level)).is_identity());
            assert_eq!(s.exp_g1(&g, &Scalar::one(level)), g);
            let h = s.g2_generator().clone();
            assert!(s.exp_g2(&h, &Scalar::zero(level)).is_identity());
            assert_eq!(s.exp_g2(&h, &Scalar::one(level)), h);
            let e = s.pair(&g, &h);
            assert!(s.exp_gt(&e, &Scalar::zero(level)).is_identity());
            assert_eq!(s.exp_gt(&e, &Scalar::one(level)), e);
            // p - 1 takes the negated short path
            let minus_one = -Scalar::one(level);
            assert_eq!(s.exp_gt(&e, &minus_one), e.inverse());
            assert_eq!(s.exp_g1(&g, &minus_one), g.inverse());
            let c = s.counters();
            assert_eq!((c.exp_g1, c.exp_g2, c.exp_gt, c.pairings), (3, 2, 3, 1));
        }
    }

    #[test]
    fn pairing_is_bilinear_on_every_level() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for level in SecurityLevel::ALL {
            let s = PairingSuite::new(level);
            let a = s.random_scalar(&mut rng);
            let b = s.random_scalar(&mut rng);
            let g1 = s.g1_generator();
            let g2 = s.g2_generator();
            let lhs = s.pair(&s.exp_g1(g1, &a), &s.exp_g2(g2, &b));
            let rhs = s.exp_gt(&s.pair(g1, g2), &(&a * &b));
            assert_eq!(lhs, rhs);
            assert_eq!(s.pair(&s.exp_g1(g1, &a), g2), s.pair(g1, &s.exp_g2(g2, &a)));
        }
    }

    #[test]
    fn encodings_round_trip_and_reject_garbage() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for level in SecurityLevel::ALL {
            let s = PairingSuite::new(level);
            let a = s.random_scalar(&mut rng);
            let p = s.exp_g1(s.g1_generator(), &a);
            let q = s.exp_g2(s.g2_generator(), &a);
            let t = s.pair(&p, &q);
            assert_eq!(G1::from_bytes(level, &p.to_bytes()), Some(p.clone()));
            assert_eq!(G2::from_bytes(level, &q.to_bytes()), Some(q.clone()));
            assert_eq!(Gt::from_bytes(level, &t.to_bytes()), Some(t.clone()));
            assert_eq!(Scalar::from_bytes(level, &a.to_bytes()), Some(a.clone()));
            assert_eq!(G1::from_bytes(level, &G1::identity(level).to_bytes()), Some(G1::identity(level)));
            assert_eq!(G2::from_bytes(level, &G2::identity(level).to_bytes()), Some(G2::identity(level)));
            let mut bad = p.to_bytes();
            bad[0] = 0x07;
            assert!(G1::from_bytes(level, &bad).is_none());
            let mut bad_t = t.to_bytes();
            bad_t[5] ^= 1;
            assert!(Gt::from_bytes(level, &bad_t).is_none());
            let too_big = vec![0xffu8; a.to_bytes().len()];
            assert!(Scalar::from_bytes(level, &too_big).is_none());
        }
    }

    #[test]
    fn random_scalars_are_seeded_and_in_range() {
        let level = SecurityLevel::S80;
        let s = PairingSuite::new(level);
        let mut r1 = ChaCha20Rng::seed_from_u64(99);
        let mut r2 = ChaCha20Rng::seed_from_u64(99);
        let xs: Vec<_> = (0..50).map(|_| s.random_scalar(&mut r1)).collect();
        let ys: Vec<_> = (0..50).map(|_| s.random_scalar(&mut r2)).collect();
        assert_eq!(xs, ys);
        for _ in 0..10_000 {
            assert!(s.random_scalar(&mut r1).value() < s.order());
        }
    }

    #[test]
    fn timing_accumulates_per_class() {
        let s = PairingSuite::new(SecurityLevel::S80);
        assert!(s.timings().is_none());
        s.enable_timing();
        s.pair(s.g1_generator(), s.g2_generator());
        let t = s.timings().unwrap();
        assert!(t.pairing > Duration::ZERO);
        assert_eq!(t.hash_to_group, Duration::ZERO);
    }

    #[test]
    fn level_parsing() {
        assert_eq!("80".parse::<SecurityLevel>().unwrap(), SecurityLevel::S80);
        assert_eq!("S128".parse::<SecurityLevel>().unwrap(), SecurityLevel::S128);
        assert!("96".parse::<SecurityLevel>().is_err());
        assert_eq!(SecurityLevel::S112.rsa_equivalent_bits(), 2048);
    }
}
