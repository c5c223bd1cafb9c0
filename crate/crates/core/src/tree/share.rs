use rand::RngCore;

use super::{AccessTree, SatisfactionWitness, TreeError};
use crate::pairing::{PairingSuite, Scalar, SecurityLevel};

/// Shares of a secret over every node of a tree, indexed by preorder id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretShares {
    pub shares: Vec<Scalar>,
}

impl SecretShares {
    pub fn get(&self, node: usize) -> &Scalar {
        &self.shares[node]
    }

    pub fn root(&self) -> &Scalar {
        &self.shares[0]
    }
}

/// Splits `secret` down the tree: each gate with share σ draws a random
/// polynomial q of degree k-1 with q(0) = σ and gives child i the value q(i).
pub fn share_secret<R: RngCore + ?Sized>(
    suite: &PairingSuite,
    tree: &AccessTree,
    secret: &Scalar,
    rng: &mut R,
) -> SecretShares {
    fn go<R: RngCore + ?Sized>(
        suite: &PairingSuite,
        node: &AccessTree,
        share: Scalar,
        rng: &mut R,
        out: &mut Vec<Scalar>,
    ) {
        out.push(share.clone());
        if let AccessTree::Threshold { k, children } = node {
            let mut coeffs = vec![share];
            coeffs.extend((1..*k).map(|_| suite.random_scalar(rng)));
            let level = suite.level();
            for (i, child) in children.iter().enumerate() {
                let x = Scalar::from_u64(level, i as u64 + 1);
                let y = coeffs.iter().rev().fold(Scalar::zero(level), |acc, c| &(&acc * &x) + c);
                go(suite, child, y, rng, out);
            }
        }
    }
    let mut shares = Vec::with_capacity(tree.node_count());
    go(suite, tree, secret.clone(), rng, &mut shares);
    SecretShares { shares }
}

/// Lagrange basis polynomial for point `i` over `set`, evaluated at 0.
pub fn lagrange_coeff(i: u64, set: &[u64], level: SecurityLevel) -> Result<Scalar, TreeError> {
    if !set.contains(&i) {
        return Err(TreeError::IndexNotInSet(i));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() || sorted[0] == 0 {
        return Err(TreeError::BadInterpolationSet);
    }
    let mut num = Scalar::one(level);
    let mut den = Scalar::one(level);
    for &j in set.iter().filter(|&&j| j != i) {
        num = &num * &Scalar::from_negative_u64(level, j);
        let diff = if i > j { Scalar::from_u64(level, i - j) } else { Scalar::from_negative_u64(level, j - i) };
        den = &den * &diff;
    }
    Ok(&num * &den.invert().expect("distinct points"))
}

/// Per-leaf products of Lagrange coefficients along the witness paths, so
/// that the root secret equals the sum over used leaves of coefficient
/// times leaf share. Returned in preorder.
pub fn leaf_coefficients(
    tree: &AccessTree,
    witness: &SatisfactionWitness,
    level: SecurityLevel,
) -> Vec<(usize, Scalar)> {
    fn go(
        node: &AccessTree,
        id: usize,
        coeff: Scalar,
        witness: &SatisfactionWitness,
        level: SecurityLevel,
        out: &mut Vec<(usize, Scalar)>,
    ) {
        match node {
            AccessTree::Leaf(_) => out.push((id, coeff)),
            AccessTree::Threshold { children, .. } => {
                let selected = &witness.selections[&id];
                let set: Vec<u64> = selected.iter().map(|&i| i as u64).collect();
                let mut child_id = id + 1;
                for (pos, child) in children.iter().enumerate() {
                    let index = pos as u64 + 1;
                    if set.contains(&index) {
                        let d = lagrange_coeff(index, &set, level).expect("index drawn from set");
                        go(child, child_id, &coeff * &d, witness, level, out);
                    }
                    child_id += child.node_count();
                }
            }
        }
    }
    let mut out = Vec::with_capacity(witness.len());
    go(tree, 0, Scalar::one(level), witness, level, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::group_order;
    use crate::tree::{satisfies, AttributeBag};
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    const L: SecurityLevel = SecurityLevel::S80;

    fn p_minus(v: u64) -> Scalar {
        Scalar::from_biguint(L, group_order(L) - BigUint::from(v))
    }

    #[test]
    fn small_coefficients() {
        assert_eq!(lagrange_coeff(1, &[1], L).unwrap(), Scalar::one(L));
        assert_eq!(lagrange_coeff(1, &[1, 2], L).unwrap(), Scalar::from_u64(L, 2));
        assert_eq!(lagrange_coeff(2, &[1, 2], L).unwrap(), p_minus(1));
        assert_eq!(lagrange_coeff(2, &[1, 2, 3], L).unwrap(), p_minus(3));
        assert_eq!(lagrange_coeff(3, &[1, 2], L), Err(TreeError::IndexNotInSet(3)));
        assert_eq!(lagrange_coeff(1, &[1, 1], L), Err(TreeError::BadInterpolationSet));
        assert_eq!(lagrange_coeff(0, &[0, 1], L), Err(TreeError::BadInterpolationSet));
    }

    #[test]
    fn leaf_share_is_secret() {
        let suite = PairingSuite::new(L);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let s = suite.random_scalar(&mut rng);
        let sh = share_secret(&suite, &AccessTree::leaf("A"), &s, &mut rng);
        assert_eq!(sh.shares, vec![s]);
    }

    #[test]
    fn one_of_n_copies_the_secret() {
        let suite = PairingSuite::new(L);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let s = suite.random_scalar(&mut rng);
        let t = AccessTree::or((0..5).map(|i| AccessTree::Leaf(format!("a{i}"))).collect());
        let sh = share_secret(&suite, &t, &s, &mut rng);
        assert!(sh.shares.iter().all(|x| *x == s));
    }

    #[test]
    fn two_of_three_any_pair_reconstructs() {
        let suite = PairingSuite::new(L);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let t = AccessTree::Threshold { k: 2, children: (0..3).map(|i| AccessTree::Leaf(format!("a{i}"))).collect() };
        for _ in 0..1000 {
            let s = suite.random_scalar(&mut rng);
            let sh = share_secret(&suite, &t, &s, &mut rng);
            let (i, j) = match rng.random_range(0..3) {
                0 => (1u64, 2u64),
                1 => (1, 3),
                _ => (2, 3),
            };
            let set = [i, j];
            let rec = &(&lagrange_coeff(i, &set, L).unwrap() * sh.get(i as usize))
                + &(&lagrange_coeff(j, &set, L).unwrap() * sh.get(j as usize));
            assert_eq!(rec, s);
        }
    }

    /// Folds child shares with Lagrange coefficients up the witness,
    /// one gate at a time.
    fn fold(t: &AccessTree, id: usize, w: &SatisfactionWitness, sh: &SecretShares) -> Scalar {
        match t {
            AccessTree::Leaf(_) => sh.get(id).clone(),
            AccessTree::Threshold { children, .. } => {
                let sel = &w.selections[&id];
                let set: Vec<u64> = sel.iter().map(|&i| i as u64).collect();
                let mut acc = Scalar::zero(L);
                let mut cid = id + 1;
                for (pos, c) in children.iter().enumerate() {
                    let idx = pos as u64 + 1;
                    if set.contains(&idx) {
                        let v = fold(c, cid, w, sh);
                        acc = &acc + &(&lagrange_coeff(idx, &set, L).unwrap() * &v);
                    }
                    cid += c.node_count();
                }
                acc
            }
        }
    }

    #[test]
    fn random_trees_reconstruct_through_witness() {
        let suite = PairingSuite::new(L);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut done = 0;
        while done < 300 {
            let t = crate::tree::testutil::random_tree(&mut rng, 4, 8);
            let bag = AttributeBag::from_canonical((0..8).filter(|_| rng.random_bool(0.7)).map(|i| format!("a{i}")));
            let Ok(w) = satisfies(&t, &bag) else { continue };
            let s = suite.random_scalar(&mut rng);
            let sh = share_secret(&suite, &t, &s, &mut rng);
            assert_eq!(fold(&t, 0, &w, &sh), s);
            let flat = leaf_coefficients(&t, &w, L)
                .into_iter()
                .fold(Scalar::zero(L), |acc, (id, c)| &acc + &(&c * sh.get(id)));
            assert_eq!(flat, s);
            done += 1;
        }
    }
}
