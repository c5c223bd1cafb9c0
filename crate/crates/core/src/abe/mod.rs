//! CP-ABE and KP-ABE key encapsulation.
//!
//! Both schemes only encapsulate: encryption returns a fresh uniformly random
//! GT element `K` alongside the ciphertext, and decryption recovers it.
//! Payload encryption under a key derived from `K` lives in
//! [`crate::container`].
//!
//! Group placement (G1 ≠ G2 on every supported curve):
//!
//! | scheme | G1                                  | G2                   |
//! |--------|-------------------------------------|----------------------|
//! | CP     | f, g^α, D, D_j, C'_y, H(attr)       | h, D'_j, C, C_y      |
//! | KP     | T_i, E_i                            | D_x                  |

pub mod cp;
pub mod kp;
pub mod wire;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pairing::{PairingSuite, SecurityLevel};
use crate::tree::TreeError;

pub use cp::{CpCiphertext, CpMasterKey, CpPublicParams, CpSecretKey};
pub use kp::{KpCiphertext, KpKey, KpMasterKey, KpPublicParams, KpPublicUniverse, KpUniverse};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Cp = 0,
    Kp = 1,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Cp => "cp",
            Scheme::Kp => "kp",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cp" | "cp-abe" => Ok(Scheme::Cp),
            "kp" | "kp-abe" => Ok(Scheme::Kp),
            _ => Err(format!("unknown scheme `{s}` (expected cp or kp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbeError {
    #[error("policy can never be satisfied")]
    UnsatisfiablePolicy,
    #[error("attribute set is empty")]
    EmptyAttributeSet,
    #[error("attributes do not satisfy the policy")]
    PolicyNotSatisfied,
    #[error("attribute `{0}` is not registered")]
    UnknownAttribute(String),
    #[error("security level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: SecurityLevel, found: SecurityLevel },
    #[error("object belongs to the other scheme")]
    SchemeMismatch,
    #[error("malformed encoding: {0}")]
    Malformed(String),
}

impl From<TreeError> for AbeError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::UnsatisfiablePolicy => AbeError::UnsatisfiablePolicy,
            other => AbeError::Malformed(other.to_string()),
        }
    }
}

pub(crate) fn check_level(suite: &PairingSuite, found: SecurityLevel) -> Result<(), AbeError> {
    if suite.level() == found {
        Ok(())
    } else {
        Err(AbeError::LevelMismatch { expected: suite.level(), found })
    }
}
