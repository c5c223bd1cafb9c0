//! Threshold access trees: compilation from policies, numeric attributes,
//! satisfaction and secret sharing.

mod bag;
mod numeric;
mod satisfy;
mod share;

use std::fmt;

use thiserror::Error;

use crate::policy::Policy;

pub use bag::{AttributeBag, BagError};
pub use numeric::{compile_cmp, expand_numeric, minwidth, WIDTHS};
pub use satisfy::{satisfies, NotSatisfied, SatisfactionWitness};
pub use share::{lagrange_coeff, leaf_coefficients, share_secret, SecretShares};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("policy can never be satisfied")]
    UnsatisfiablePolicy,
    #[error("index {0} is not in the interpolation set")]
    IndexNotInSet(u64),
    #[error("interpolation set must hold distinct non-zero indices")]
    BadInterpolationSet,
}

/// Threshold-gate tree over canonical attribute strings.
///
/// Nodes are numbered in preorder starting at 0 (the root). A child's
/// 1-based position in its parent is its interpolation point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AccessTree {
    Leaf(String),
    Threshold { k: usize, children: Vec<AccessTree> },
}

/// Shape summary used by `policy --explain` and the benches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub leaves: usize,
    pub gates: usize,
    pub and_gates: usize,
    pub or_gates: usize,
    /// Gates with `1 < k < n`.
    pub threshold_gates: usize,
    pub depth: usize,
}

impl fmt::Display for TreeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} leaves, {} gates ({} AND, {} OR, {} threshold), depth {}",
            self.leaves, self.gates, self.and_gates, self.or_gates, self.threshold_gates, self.depth
        )
    }
}

impl AccessTree {
    pub fn leaf(attr: impl Into<String>) -> Self {
        AccessTree::Leaf(attr.into())
    }

    pub fn and(children: Vec<AccessTree>) -> Self {
        AccessTree::Threshold { k: children.len(), children }
    }

    pub fn or(children: Vec<AccessTree>) -> Self {
        AccessTree::Threshold { k: 1, children }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, AccessTree::Leaf(_))
    }

    pub fn node_count(&self) -> usize {
        match self {
            AccessTree::Leaf(_) => 1,
            AccessTree::Threshold { children, .. } => 1 + children.iter().map(AccessTree::node_count).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Leaves in preorder as `(node id, attribute)`.
    pub fn leaves(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        self.walk(&mut |id, node| {
            if let AccessTree::Leaf(a) = node {
                out.push((id, a.as_str()));
            }
        });
        out
    }

    /// Visits every node in preorder with its id.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(usize, &'a AccessTree)) {
        fn go<'a>(node: &'a AccessTree, next: &mut usize, f: &mut impl FnMut(usize, &'a AccessTree)) {
            let id = *next;
            *next += 1;
            f(id, node);
            if let AccessTree::Threshold { children, .. } = node {
                for c in children {
                    go(c, next, f);
                }
            }
        }
        let mut next = 0;
        go(self, &mut next, f);
    }

    pub fn stats(&self) -> TreeStats {
        let mut s = TreeStats { depth: self.depth(), ..TreeStats::default() };
        self.walk(&mut |_, node| match node {
            AccessTree::Leaf(_) => s.leaves += 1,
            AccessTree::Threshold { k, children } => {
                s.gates += 1;
                let n = children.len();
                if *k == n && n > 1 {
                    s.and_gates += 1;
                } else if *k == 1 {
                    s.or_gates += 1;
                } else {
                    s.threshold_gates += 1;
                }
            }
        });
        s
    }

    pub fn depth(&self) -> usize {
        match self {
            AccessTree::Leaf(_) => 0,
            AccessTree::Threshold { children, .. } => 1 + children.iter().map(AccessTree::depth).max().unwrap_or(0),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            AccessTree::Leaf(a) => !a.is_empty(),
            AccessTree::Threshold { k, children } => {
                *k >= 1 && *k <= children.len() && children.iter().all(AccessTree::is_valid)
            }
        }
    }

    /// Indented multi-line rendering.
    pub fn render(&self) -> String {
        fn go(node: &AccessTree, indent: usize, out: &mut String) {
            out.push_str(&"  ".repeat(indent));
            match node {
                AccessTree::Leaf(a) => out.push_str(a),
                AccessTree::Threshold { k, children } => {
                    let n = children.len();
                    let label = if *k == n && n > 1 {
                        "AND".to_string()
                    } else if *k == 1 {
                        "OR".to_string()
                    } else {
                        format!("{k} of {n}")
                    };
                    out.push_str(&label);
                    for c in children {
                        out.push('\n');
                        go(c, indent + 1, out);
                    }
                }
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

impl fmt::Display for AccessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessTree::Leaf(a) => f.write_str(a),
            AccessTree::Threshold { k, children } => {
                write!(f, "{k} of (")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Builds a `k`-of-n gate from possibly-false children (`None` is FALSE).
///
/// FALSE children are dropped; if fewer than `k` survive the gate is FALSE,
/// and a 1-of-1 gate collapses into its only child.
pub(crate) fn prune_gate(k: usize, children: Vec<Option<AccessTree>>) -> Option<AccessTree> {
    let live: Vec<AccessTree> = children.into_iter().flatten().collect();
    if live.len() < k || live.is_empty() {
        return None;
    }
    if live.len() == 1 {
        return live.into_iter().next();
    }
    Some(AccessTree::Threshold { k, children: live })
}

/// Compiles a parsed policy into an access tree.
pub fn compile(policy: &Policy) -> Result<AccessTree, TreeError> {
    fn go(p: &Policy) -> Option<AccessTree> {
        match p {
            Policy::Atom(a) => Some(AccessTree::Leaf(a.clone())),
            Policy::Cmp { name, op, value } => numeric::compile_cmp_opt(name, *op, *value),
            Policy::Gate { k, children } => prune_gate(*k, children.iter().map(go).collect()),
        }
    }
    go(policy).ok_or(TreeError::UnsatisfiablePolicy)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::AccessTree;
    use rand::Rng;
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn random_tree(rng: &mut ChaCha20Rng, depth: usize, universe: usize) -> AccessTree {
        if depth == 0 || rng.random_bool(0.35) {
            return AccessTree::Leaf(format!("a{}", rng.random_range(0..universe)));
        }
        let n = rng.random_range(1..=4);
        let k = rng.random_range(1..=n);
        AccessTree::Threshold { k, children: (0..n).map(|_| random_tree(rng, depth - 1, universe)).collect() }
    }
}
