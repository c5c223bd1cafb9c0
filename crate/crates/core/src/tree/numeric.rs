//! Bag-of-bits encoding of unsigned numeric attributes.
//!
//! A key holding `name = v` carries one attribute per bit of `v` at its
//! minimal byte width, an exact-match flag, and a `lt`/`ge` flag at every
//! byte boundary. Comparisons compile into monotone trees over those strings.

use std::collections::BTreeSet;

use super::{prune_gate, AccessTree, TreeError};
use crate::policy::CmpOp;

/// Supported word widths in bits.
pub const WIDTHS: [u32; 8] = [8, 16, 24, 32, 40, 48, 56, 64];

/// Smallest multiple of 8 (at least 8) whose range holds `v`.
pub fn minwidth(v: u64) -> u32 {
    let bits = 64 - v.leading_zeros();
    bits.div_ceil(8).max(1) * 8
}

pub(crate) fn bit_attr(name: &str, i: u32, bit: u8) -> String {
    format!("{name}#b{i}={bit}")
}

pub(crate) fn eq_attr(name: &str, v: u64) -> String {
    format!("{name}#eq={v}")
}

pub(crate) fn lt_attr(name: &str, k: u32) -> String {
    format!("{name}#lt=2^{k}")
}

pub(crate) fn ge_attr(name: &str, k: u32) -> String {
    format!("{name}#ge=2^{k}")
}

fn below_pow2(v: u64, k: u32) -> bool {
    k >= 64 || v < (1u64 << k)
}

/// Canonical attribute strings a key holding `name = value` carries.
pub fn expand_numeric(name: &str, value: u64) -> BTreeSet<String> {
    let w = minwidth(value);
    let mut out = BTreeSet::new();
    for i in 0..w {
        out.insert(bit_attr(name, i, ((value >> i) & 1) as u8));
    }
    out.insert(eq_attr(name, value));
    for k in WIDTHS {
        if below_pow2(value, k) {
            out.insert(lt_attr(name, k));
        } else {
            out.insert(ge_attr(name, k));
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Chain {
    And,
    Or,
}

/// Prepends `leaf` to a chain gate of the same kind, or wraps both in a new
/// gate. Keeps long runs of equal bits as one wide gate instead of a ladder.
fn chain(kind: Chain, leaf: AccessTree, rest: Option<AccessTree>) -> Option<AccessTree> {
    match (kind, rest) {
        (Chain::And, None) => None,
        (Chain::Or, None) => Some(leaf),
        (Chain::And, Some(AccessTree::Threshold { k, mut children })) if k == children.len() => {
            children.insert(0, leaf);
            Some(AccessTree::and(children))
        }
        (Chain::Or, Some(AccessTree::Threshold { k: 1, mut children })) => {
            children.insert(0, leaf);
            Some(AccessTree::or(children))
        }
        (Chain::And, Some(r)) => Some(AccessTree::and(vec![leaf, r])),
        (Chain::Or, Some(r)) => Some(AccessTree::or(vec![leaf, r])),
    }
}

/// Bitwise comparison over bits `w-1..0`, most significant bit at the root.
/// `less` selects `v < n`, otherwise `v > n`.
fn bit_tree(name: &str, n: u64, w: u32, less: bool) -> Option<AccessTree> {
    // the leaf tested at each bit is "v differs from n in the winning direction"
    let want: u8 = if less { 0 } else { 1 };
    let mut rest: Option<AccessTree> = None;
    for i in 0..w {
        let bit = ((n >> i) & 1) as u8;
        let leaf = AccessTree::Leaf(bit_attr(name, i, want));
        // bit of n opposite to `want`: v may win here or tie and continue;
        // equal to `want`: v must match it and win further down
        let kind = if bit != want { Chain::Or } else { Chain::And };
        rest = chain(kind, leaf, rest);
    }
    rest
}

pub(crate) fn compile_cmp_opt(name: &str, op: CmpOp, n: u64) -> Option<AccessTree> {
    let always = || Some(AccessTree::Leaf(lt_attr(name, 64)));
    match op {
        CmpOp::Eq => Some(AccessTree::Leaf(eq_attr(name, n))),
        CmpOp::Le => match n.checked_add(1) {
            Some(m) => compile_cmp_opt(name, CmpOp::Lt, m),
            None => always(),
        },
        CmpOp::Ge => match n.checked_sub(1) {
            Some(m) => compile_cmp_opt(name, CmpOp::Gt, m),
            None => always(),
        },
        CmpOp::Lt => {
            let w = minwidth(n);
            let guarded = prune_gate(2, vec![Some(AccessTree::Leaf(lt_attr(name, w))), bit_tree(name, n, w, true)]);
            if w > 8 {
                prune_gate(1, vec![Some(AccessTree::Leaf(lt_attr(name, w - 8))), guarded])
            } else {
                guarded
            }
        }
        CmpOp::Gt => {
            let w = minwidth(n);
            let above = (w < 64).then(|| AccessTree::Leaf(ge_attr(name, w)));
            let guarded = prune_gate(2, vec![Some(AccessTree::Leaf(lt_attr(name, w))), bit_tree(name, n, w, false)]);
            prune_gate(1, vec![above, guarded])
        }
    }
}

/// Monotone tree equivalent to `name op n` over keys built by
/// [`expand_numeric`].
pub fn compile_cmp(name: &str, op: CmpOp, n: u64) -> Result<AccessTree, TreeError> {
    compile_cmp_opt(name, op, n).ok_or(TreeError::UnsatisfiablePolicy)
}
