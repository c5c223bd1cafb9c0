//! Thin per-curve adapters over `miracl_core`.
//!
//! Every curve module exposes the same free functions so the dispatch layer in
//! `pairing::mod` can treat them uniformly. Scalars cross this boundary as
//! big-endian byte strings no longer than the base field encoding.

macro_rules! curve_backend {
    ($name:ident, $m:ident) => {
        #[allow(non_snake_case, clippy::needless_range_loop)]
        pub(crate) mod $name {
            use miracl_core::$m::big::{BIG, MODBYTES};
            use miracl_core::$m::dbig::DBIG;
            use miracl_core::$m::ecp::{self, ECP};
            use miracl_core::$m::ecp2::ECP2;
            use miracl_core::$m::fp::{self, FP};
            use miracl_core::$m::fp12::FP12;
            use miracl_core::$m::{pair, rom};
            use miracl_core::hmac;

            pub(crate) const G1_BYTES: usize = MODBYTES + 1;
            pub(crate) const G2_BYTES: usize = 2 * MODBYTES + 1;
            pub(crate) const GT_BYTES: usize = 12 * MODBYTES;

            pub(crate) fn order_bytes() -> Vec<u8> {
                let mut out = vec![0u8; MODBYTES];
                BIG::new_ints(&rom::CURVE_ORDER).tobytes(&mut out);
                out
            }

            pub(crate) fn modulus_bits() -> usize {
                fp::MODBITS
            }

            fn big(e: &[u8]) -> BIG {
                let mut buf = [0u8; MODBYTES];
                buf[MODBYTES - e.len()..].copy_from_slice(e);
                BIG::frombytes(&buf)
            }

            pub(crate) fn g1_generator() -> ECP {
                ECP::generator()
            }

            pub(crate) fn g2_generator() -> ECP2 {
                ECP2::generator()
            }

            pub(crate) fn g1_identity() -> ECP {
                ECP::new()
            }

            pub(crate) fn g2_identity() -> ECP2 {
                ECP2::new()
            }

            pub(crate) fn gt_identity() -> FP12 {
                FP12::new_int(1)
            }

            pub(crate) fn g1_mul(p: &ECP, e: &[u8]) -> ECP {
                pair::g1mul(p, &big(e))
            }

            pub(crate) fn g2_mul(p: &ECP2, e: &[u8]) -> ECP2 {
                pair::g2mul(p, &big(e))
            }

            // gtpow runs a fixed-length ladder. Short exponents (Lagrange
            // coefficients, which are public) take plain square-and-multiply;
            // a random secret is this short with negligible probability.
            pub(crate) fn gt_pow(x: &FP12, e: &[u8]) -> FP12 {
                if e.len() <= 8 {
                    x.pow(&big(e))
                } else {
                    pair::gtpow(x, &big(e))
                }
            }

            pub(crate) fn g1_add(a: &ECP, b: &ECP) -> ECP {
                let mut r = a.clone();
                r.add(b);
                r
            }

            pub(crate) fn g2_add(a: &ECP2, b: &ECP2) -> ECP2 {
                let mut r = a.clone();
                r.add(b);
                r
            }

            pub(crate) fn gt_mul(a: &FP12, b: &FP12) -> FP12 {
                let mut r = a.clone();
                r.mul(b);
                r
            }

            pub(crate) fn g1_neg(a: &ECP) -> ECP {
                let mut r = a.clone();
                r.neg();
                r
            }

            pub(crate) fn g2_neg(a: &ECP2) -> ECP2 {
                let mut r = a.clone();
                r.neg();
                r
            }

            // GT lives in the cyclotomic subgroup, where conjugation inverts.
            pub(crate) fn gt_inv(a: &FP12) -> FP12 {
                let mut r = a.clone();
                r.conj();
                r
            }

            pub(crate) fn g1_eq(a: &ECP, b: &ECP) -> bool {
                a.equals(b)
            }

            pub(crate) fn g2_eq(a: &ECP2, b: &ECP2) -> bool {
                a.equals(b)
            }

            pub(crate) fn gt_eq(a: &FP12, b: &FP12) -> bool {
                a.equals(b)
            }

            pub(crate) fn pairing(p: &ECP, q: &ECP2) -> FP12 {
                pair::fexp(&pair::ate(q, p))
            }

            /// Random-oracle hash onto G1: expand_message_xmd(SHA-256) into two
            /// field elements, map each to the curve and clear the cofactor.
            pub(crate) fn hash_to_g1(dst: &[u8], msg: &[u8]) -> ECP {
                let q = BIG::new_ints(&rom::MODULUS);
                let nbq = q.nbits();
                let el = (nbq + ecp::AESKEY * 8 - 1) / 8 + 1;
                let mut okm = [0u8; 256];
                hmac::xmd_expand(hmac::MC_SHA2, ecp::HASH_TYPE, &mut okm, 2 * el, dst, msg);
                let mut u = [FP::new(), FP::new()];
                for i in 0..2 {
                    let mut d = DBIG::frombytes(&okm[el * i..el * (i + 1)]);
                    u[i] = FP::new_big(&d.ctdmod(&q, 8 * el - nbq));
                }
                let mut p = ECP::map2point(&u[0]);
                p.add(&ECP::map2point(&u[1]));
                p.cfp();
                p.affine();
                p
            }

            pub(crate) fn g1_to_bytes(p: &ECP) -> Vec<u8> {
                if p.is_infinity() {
                    return vec![0];
                }
                let mut out = vec![0u8; G1_BYTES];
                p.tobytes(&mut out, true);
                out
            }

            pub(crate) fn g2_to_bytes(p: &ECP2) -> Vec<u8> {
                if p.is_infinity() {
                    return vec![0];
                }
                let mut out = vec![0u8; G2_BYTES];
                p.tobytes(&mut out, true);
                out
            }

            pub(crate) fn gt_to_bytes(x: &FP12) -> Vec<u8> {
                let mut out = vec![0u8; GT_BYTES];
                x.clone().tobytes(&mut out);
                out
            }

            pub(crate) fn g1_from_bytes(b: &[u8]) -> Option<ECP> {
                if b == [0] {
                    return Some(ECP::new());
                }
                if b.len() != G1_BYTES || (b[0] != 2 && b[0] != 3) {
                    return None;
                }
                let p = ECP::frombytes(b);
                if p.is_infinity() || !pair::g1member(&p) {
                    return None;
                }
                // reject non-canonical x encodings
                if g1_to_bytes(&p) != b {
                    return None;
                }
                Some(p)
            }

            pub(crate) fn g2_from_bytes(b: &[u8]) -> Option<ECP2> {
                if b == [0] {
                    return Some(ECP2::new());
                }
                if b.len() != G2_BYTES || (b[0] != 2 && b[0] != 3) {
                    return None;
                }
                let p = ECP2::frombytes(b);
                if p.is_infinity() || !pair::g2member(&p) {
                    return None;
                }
                if g2_to_bytes(&p) != b {
                    return None;
                }
                Some(p)
            }

            pub(crate) fn gt_from_bytes(b: &[u8]) -> Option<FP12> {
                if b.len() != GT_BYTES {
                    return None;
                }
                let x = FP12::frombytes(b);
                if !pair::gtmember(&x) {
                    return None;
                }
                if gt_to_bytes(&x) != b {
                    return None;
                }
                Some(x)
            }
        }
    };
}

curve_backend!(bn254, bn254);
curve_backend!(bls12381, bls12381);
curve_backend!(bls12461, bls12461);
