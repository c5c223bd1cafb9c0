use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use super::{backend, SecurityLevel};

fn order_cell(level: SecurityLevel) -> &'static (BigUint, usize) {
    static CELLS: [OnceLock<(BigUint, usize)>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let (idx, f): (usize, fn() -> Vec<u8>) = match level {
        SecurityLevel::S80 => (0, backend::bn254::order_bytes),
        SecurityLevel::S112 => (1, backend::bls12381::order_bytes),
        SecurityLevel::S128 => (2, backend::bls12461::order_bytes),
    };
    CELLS[idx].get_or_init(|| {
        let bytes = f();
        (BigUint::from_bytes_be(&bytes), bytes.len())
    })
}

/// Prime order of the pairing groups at `level`.
pub fn group_order(level: SecurityLevel) -> &'static BigUint {
    &order_cell(level).0
}

/// An element of Z_p for the group order p of one security level.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    level: SecurityLevel,
    value: BigUint,
}

impl Scalar {
    pub fn zero(level: SecurityLevel) -> Self {
        Self { level, value: BigUint::zero() }
    }

    pub fn one(level: SecurityLevel) -> Self {
        Self { level, value: BigUint::one() }
    }

    pub fn from_u64(level: SecurityLevel, v: u64) -> Self {
        Self::from_biguint(level, BigUint::from(v))
    }

    /// Reduces an arbitrary integer into the field.
    pub fn from_biguint(level: SecurityLevel, v: BigUint) -> Self {
        Self { level, value: v % group_order(level) }
    }

    /// `-v mod p`
    pub fn from_negative_u64(level: SecurityLevel, v: u64) -> Self {
        Self::from_u64(level, v).neg()
    }

    /// Uniform sample in `[0, p)` by rejection on the bit length of p.
    pub fn random<R: RngCore + ?Sized>(level: SecurityLevel, rng: &mut R) -> Self {
        let p = group_order(level);
        let bits = p.bits() as usize;
        let nbytes = bits.div_ceil(8);
        let excess = nbytes * 8 - bits;
        let mut buf = vec![0u8; nbytes];
        loop {
            rng.fill_bytes(&mut buf);
            buf[0] &= 0xffu8 >> excess;
            let v = BigUint::from_bytes_be(&buf);
            if &v < p {
                return Self { level, value: v };
            }
        }
    }

    /// Uniform sample in `[1, p)`.
    pub fn random_nonzero<R: RngCore + ?Sized>(level: SecurityLevel, rng: &mut R) -> Self {
        loop {
            let s = Self::random(level, rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn level(&self) -> SecurityLevel {
        self.level
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn invert(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = group_order(self.level);
        let e = p - BigUint::from(2u8);
        Some(Self { level: self.level, value: self.value.modpow(&e, p) })
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        let p = group_order(self.level);
        Self { level: self.level, value: self.value.modpow(&BigUint::from(e), p) }
    }

    /// Fixed-width big-endian encoding (the byte length of p).
    pub fn to_bytes(&self) -> Vec<u8> {
        let width = order_cell(self.level).1;
        let raw = self.value.to_bytes_be();
        let mut out = vec![0u8; width];
        out[width - raw.len()..].copy_from_slice(&raw);
        out
    }

    /// Parses the fixed-width encoding; rejects values `>= p`.
    pub fn from_bytes(level: SecurityLevel, bytes: &[u8]) -> Option<Self> {
        if bytes.len() != order_cell(level).1 {
            return None;
        }
        let value = BigUint::from_bytes_be(bytes);
        if &value >= group_order(level) {
            return None;
        }
        Some(Self { level, value })
    }

    /// Exponent actually fed to the curve code: the shorter of `e` and `p - e`,
    /// plus whether the result has to be inverted afterwards. Lagrange
    /// coefficients such as `-3 mod p` become 2-bit exponents this way.
    pub(crate) fn signed_exponent(&self) -> (Vec<u8>, bool) {
        let p = group_order(self.level);
        let neg = p - &self.value;
        if !self.value.is_zero() && neg < self.value {
            (neg.to_bytes_be(), true)
        } else {
            (self.value.to_bytes_be(), false)
        }
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(self.level, other.level, "scalar security level mismatch");
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({:?}, {:x})", self.level, self.value)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        Scalar::from_biguint(self.level, &self.value + &rhs.value)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        let p = group_order(self.level);
        Scalar::from_biguint(self.level, &self.value + p - &rhs.value)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        Scalar::from_biguint(self.level, &self.value * &rhs.value)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        if self.value.is_zero() {
            return self.clone();
        }
        Scalar { level: self.level, value: group_order(self.level) - &self.value }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}
