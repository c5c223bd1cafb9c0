//! Versioned binary encoding of parameters, keys and ciphertexts.
//!
//! ```text
//! object  := "ABE1" scheme:u8 level:u8 kind:u8 body
//! element := tag:u8 len:u32le bytes        tag 0 scalar, 1 G1, 2 G2, 3 GT
//! string  := len:u32le utf8
//! tree    := preorder records of kind:u8 k:u32le n:u32le attr:string
//!            (kind 0 leaf with k = n = 0, kind 1 gate with an empty attr)
//! ```
//!
//! `level` is the security level in bits (80, 112 or 128). Every decoder
//! rejects trailing bytes.

use crate::pairing::{GroupKind, Scalar, SecurityLevel, G1, G2, Gt};
use crate::tree::AccessTree;

use super::{AbeError, Scheme};

pub const MAGIC: &[u8; 4] = b"ABE1";

/// Upper bounds applied while decoding untrusted input.
const MAX_TREE_NODES: usize = 1 << 16;
const MAX_TREE_DEPTH: usize = 256;
const MAX_STRING: usize = 1 << 16;

/// What a serialized object holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectKind {
    PublicParams = 0,
    MasterKey = 1,
    SecretKey = 2,
    Ciphertext = 3,
    Universe = 4,
    PublicUniverse = 5,
}

impl ObjectKind {
    fn from_u8(b: u8) -> Option<Self> {
        Some(match b {
            0 => ObjectKind::PublicParams,
            1 => ObjectKind::MasterKey,
            2 => ObjectKind::SecretKey,
            3 => ObjectKind::Ciphertext,
            4 => ObjectKind::Universe,
            5 => ObjectKind::PublicUniverse,
            _ => return None,
        })
    }
}

/// Header fields of any serialized object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub scheme: Scheme,
    pub level: SecurityLevel,
    pub kind: ObjectKind,
}

/// Reads only the header, e.g. to pick a decoder.
pub fn peek_header(bytes: &[u8]) -> Result<Header, AbeError> {
    let mut r = Reader::new(bytes);
    r.header()
}

pub(crate) struct Writer {
    pub buf: Vec<u8>,
    level: SecurityLevel,
}

impl Writer {
    pub fn new(scheme: Scheme, level: SecurityLevel, kind: ObjectKind) -> Self {
        let mut buf = Vec::with_capacity(256);
        buf.extend_from_slice(MAGIC);
        buf.push(scheme as u8);
        buf.push(level.bits() as u8);
        buf.push(kind as u8);
        Writer { buf, level }
    }

    pub fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("length fits in u32");
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn string(&mut self, s: &str) {
        self.u32(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn element(&mut self, kind: GroupKind, bytes: &[u8]) {
        self.buf.push(kind as u8);
        self.u32(bytes.len());
        self.buf.extend_from_slice(bytes);
    }

    pub fn scalar(&mut self, s: &Scalar) {
        debug_assert_eq!(s.level(), self.level);
        self.element(GroupKind::Scalar, &s.to_bytes());
    }

    pub fn g1(&mut self, x: &G1) {
        self.element(GroupKind::G1, &x.to_bytes());
    }

    pub fn g2(&mut self, x: &G2) {
        self.element(GroupKind::G2, &x.to_bytes());
    }

    pub fn gt(&mut self, x: &Gt) {
        self.element(GroupKind::Gt, &x.to_bytes());
    }

    pub fn tree(&mut self, t: &AccessTree) {
        t.walk(&mut |_, node| match node {
            AccessTree::Leaf(a) => {
                self.buf.push(0);
                self.u32(0);
                self.u32(0);
                self.string(a);
            }
            AccessTree::Threshold { k, children } => {
                self.buf.push(1);
                self.u32(*k);
                self.u32(children.len());
                self.string("");
            }
        });
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    pub level: SecurityLevel,
}

fn malformed(what: &str) -> AbeError {
    AbeError::Malformed(what.to_string())
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0, level: SecurityLevel::S80 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], AbeError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| malformed("truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, AbeError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<usize, AbeError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }

    pub fn header(&mut self) -> Result<Header, AbeError> {
        if self.take(4)? != MAGIC {
            return Err(malformed("bad magic"));
        }
        let scheme = match self.u8()? {
            0 => Scheme::Cp,
            1 => Scheme::Kp,
            _ => return Err(malformed("unknown scheme id")),
        };
        let level = SecurityLevel::from_bits(self.u8()? as u16).ok_or_else(|| malformed("unknown level"))?;
        let kind = ObjectKind::from_u8(self.u8()?).ok_or_else(|| malformed("unknown object kind"))?;
        self.level = level;
        Ok(Header { scheme, level, kind })
    }

    /// Reads and checks the header against what the caller expects.
    pub fn expect(&mut self, scheme: Scheme, kind: ObjectKind) -> Result<SecurityLevel, AbeError> {
        let h = self.header()?;
        if h.scheme != scheme {
            return Err(AbeError::SchemeMismatch);
        }
        if h.kind != kind {
            return Err(malformed("unexpected object kind"));
        }
        Ok(h.level)
    }

    pub fn string(&mut self) -> Result<String, AbeError> {
        let n = self.u32()?;
        if n > MAX_STRING {
            return Err(malformed("string too long"));
        }
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| malformed("invalid utf-8"))
    }

    fn element(&mut self, kind: GroupKind) -> Result<&'a [u8], AbeError> {
        if GroupKind::from_tag(self.u8()?) != Some(kind) {
            return Err(malformed("unexpected element tag"));
        }
        let n = self.u32()?;
        self.take(n)
    }

    pub fn scalar(&mut self) -> Result<Scalar, AbeError> {
        let b = self.element(GroupKind::Scalar)?;
        Scalar::from_bytes(self.level, b).ok_or_else(|| malformed("invalid scalar"))
    }

    pub fn g1(&mut self) -> Result<G1, AbeError> {
        let b = self.element(GroupKind::G1)?;
        G1::from_bytes(self.level, b).ok_or_else(|| malformed("invalid G1 element"))
    }

    pub fn g2(&mut self) -> Result<G2, AbeError> {
        let b = self.element(GroupKind::G2)?;
        G2::from_bytes(self.level, b).ok_or_else(|| malformed("invalid G2 element"))
    }

    pub fn gt(&mut self) -> Result<Gt, AbeError> {
        let b = self.element(GroupKind::Gt)?;
        Gt::from_bytes(self.level, b).ok_or_else(|| malformed("invalid GT element"))
    }

    pub fn tree(&mut self) -> Result<AccessTree, AbeError> {
        let mut budget = MAX_TREE_NODES;
        self.tree_node(0, &mut budget)
    }

    fn tree_node(&mut self, depth: usize, budget: &mut usize) -> Result<AccessTree, AbeError> {
        if depth > MAX_TREE_DEPTH || *budget == 0 {
            return Err(malformed("tree too large"));
        }
        *budget -= 1;
        let kind = self.u8()?;
        let k = self.u32()?;
        let n = self.u32()?;
        let attr = self.string()?;
        match kind {
            0 if k == 0 && n == 0 && !attr.is_empty() => Ok(AccessTree::Leaf(attr)),
            1 if attr.is_empty() && k >= 1 && k <= n && n <= *budget => {
                let children = (0..n).map(|_| self.tree_node(depth + 1, budget)).collect::<Result<_, _>>()?;
                Ok(AccessTree::Threshold { k, children })
            }
            _ => Err(malformed("invalid tree record")),
        }
    }

    pub fn finish(self) -> Result<(), AbeError> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(malformed("trailing bytes"))
        }
    }
}
