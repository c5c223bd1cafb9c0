//! Human-readable access-policy language.
//!
//! ```text
//! policy   := or_expr
//! or_expr  := and_expr { "or" and_expr }
//! and_expr := primary { "and" primary }
//! primary  := INT "of" "(" policy { "," policy } ")"
//!           | IDENT CMP INT
//!           | IDENT
//!           | "(" policy ")"
//! CMP      := "<" | ">" | "<=" | ">=" | "="
//! ```
//!
//! Keywords are case-insensitive, attribute names are not. `name = word`
//! with a non-numeric right-hand side is a single atomic attribute
//! (`Dev_role=Role_1`); with an all-digit right-hand side it is a numeric
//! equality test.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::parse_policy;

/// Comparison operator of a numeric clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
}

impl CmpOp {
    pub const ALL: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
        }
    }

    /// Truth of `lhs op rhs`.
    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Parsed access policy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    /// A plain attribute, possibly of the fused `name=value` form.
    Atom(String),
    /// `name op value` over an unsigned 64-bit numeric attribute.
    Cmp { name: String, op: CmpOp, value: u64 },
    /// `k`-of-`children.len()` threshold gate.
    Gate { k: usize, children: Vec<Policy> },
}

impl Policy {
    pub fn atom(name: impl Into<String>) -> Self {
        Policy::Atom(name.into())
    }

    pub fn and(children: Vec<Policy>) -> Self {
        Policy::Gate { k: children.len(), children }
    }

    pub fn or(children: Vec<Policy>) -> Self {
        Policy::Gate { k: 1, children }
    }

    pub fn threshold(k: usize, children: Vec<Policy>) -> Self {
        Policy::Gate { k, children }
    }

    pub fn cmp(name: impl Into<String>, op: CmpOp, value: u64) -> Self {
        Policy::Cmp { name: name.into(), op, value }
    }

    /// Checks the structural invariants: `1 <= k <= n` on every gate.
    pub fn is_valid(&self) -> bool {
        match self {
            Policy::Atom(a) => is_atom_name(a),
            Policy::Cmp { name, .. } => is_identifier(name),
            Policy::Gate { k, children } => {
                !children.is_empty() && *k >= 1 && *k <= children.len() && children.iter().all(Policy::is_valid)
            }
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Atom(a) => f.write_str(a),
            Policy::Cmp { name, op, value } => write!(f, "{name} {op} {value}"),
            Policy::Gate { k, children } => {
                let n = children.len();
                let sep = if n >= 2 && *k == n {
                    " and "
                } else if n >= 2 && *k == 1 {
                    " or "
                } else {
                    write!(f, "{k} of (")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    return f.write_str(")");
                };
                f.write_str("(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Canonical text of a policy; `parse_policy(&print_policy(p)) == p`.
pub fn print_policy(policy: &Policy) -> String {
    policy.to_string()
}

pub(crate) const KEYWORDS: [&str; 3] = ["and", "or", "of"];

pub(crate) fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

/// `[A-Za-z_][A-Za-z0-9_]*`, excluding keywords.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_keyword(s)
}

/// An identifier, optionally followed by `=` and a non-numeric word.
pub fn is_atom_name(s: &str) -> bool {
    match s.split_once('=') {
        None => is_identifier(s),
        Some((name, value)) => {
            is_identifier(name)
                && !value.is_empty()
                && value.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !value.chars().all(|c| c.is_ascii_digit())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: &'static str },
    #[error("threshold {k} of {n} is out of range (need 1 <= k <= n)")]
    Threshold { k: String, n: usize },
    #[error("numeric literal `{0}` does not fit in 64 bits")]
    NumericOverflow(String),
    #[error("policy nesting exceeds {0} levels")]
    TooDeep(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}
