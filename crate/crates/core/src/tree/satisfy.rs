use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{AccessTree, AttributeBag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("attributes do not satisfy the access tree")]
pub struct NotSatisfied;

/// Minimal set of leaves that satisfies a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfactionWitness {
    /// Preorder ids of the leaves used.
    pub used_leaves: BTreeSet<usize>,
    /// For each gate on the witness, the 1-based indices of its `k`
    /// selected children, ascending.
    pub selections: BTreeMap<usize, Vec<usize>>,
}

impl SatisfactionWitness {
    /// Number of matching leaves, `l` in the decryption cost bounds.
    pub fn len(&self) -> usize {
        self.used_leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.used_leaves.is_empty()
    }
}

struct Eval {
    cost: Vec<Option<usize>>,
    kids: Vec<Vec<usize>>,
    chosen: Vec<Vec<usize>>,
}

fn eval(node: &AccessTree, bag: &AttributeBag, st: &mut Eval) -> usize {
    let id = st.cost.len();
    st.cost.push(None);
    st.kids.push(Vec::new());
    st.chosen.push(Vec::new());
    match node {
        AccessTree::Leaf(a) => {
            if bag.contains(a) {
                st.cost[id] = Some(1);
            }
        }
        AccessTree::Threshold { k, children } => {
            let ids: Vec<usize> = children.iter().map(|c| eval(c, bag, st)).collect();
            let mut ok: Vec<(usize, usize)> =
                ids.iter().enumerate().filter_map(|(i, &cid)| st.cost[cid].map(|c| (c, i))).collect();
            if ok.len() >= *k {
                // cheapest k; the stable sort keeps lower indices first on ties
                ok.sort_by_key(|&(c, _)| c);
                ok.truncate(*k);
                st.cost[id] = Some(ok.iter().map(|&(c, _)| c).sum());
                let mut pick: Vec<usize> = ok.iter().map(|&(_, i)| i).collect();
                pick.sort_unstable();
                st.chosen[id] = pick;
            }
            st.kids[id] = ids;
        }
    }
    id
}

/// Decides whether `bag` satisfies `tree` and returns a witness with the
/// fewest leaves. Ties go to the lowest child index.
pub fn satisfies(tree: &AccessTree, bag: &AttributeBag) -> Result<SatisfactionWitness, NotSatisfied> {
    let mut st = Eval { cost: Vec::new(), kids: Vec::new(), chosen: Vec::new() };
    eval(tree, bag, &mut st);
    st.cost[0].ok_or(NotSatisfied)?;

    let mut w = SatisfactionWitness { used_leaves: BTreeSet::new(), selections: BTreeMap::new() };
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        if st.kids[id].is_empty() {
            w.used_leaves.insert(id);
            continue;
        }
        let picked = &st.chosen[id];
        w.selections.insert(id, picked.iter().map(|i| i + 1).collect());
        stack.extend(picked.iter().map(|&i| st.kids[id][i]));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::parse_policy;
    use crate::tree::testutil::random_tree;
    use crate::tree::{compile, expand_numeric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn tree(text: &str) -> AccessTree {
        compile(&parse_policy(text).unwrap()).unwrap()
    }

    fn bag(items: &[&str]) -> AttributeBag {
        AttributeBag::from_canonical(items.iter().copied())
    }

    #[test]
    fn or_branch_uses_one_leaf() {
        let w = satisfies(&tree("(A and B) or C"), &bag(&["C"])).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.used_leaves, BTreeSet::from([4]));
        assert_eq!(w.selections, BTreeMap::from([(0, vec![2])]));
        assert_eq!(satisfies(&tree("(A and B) or C"), &bag(&["A"])), Err(NotSatisfied));
    }

    #[test]
    fn prefers_cheaper_branch_and_lower_index_on_ties() {
        let t = tree("(A and B) or C");
        let w = satisfies(&t, &bag(&["A", "B", "C"])).unwrap();
        assert_eq!(w.used_leaves, BTreeSet::from([4]));
        let t = tree("A or B");
        let w = satisfies(&t, &bag(&["A", "B"])).unwrap();
        assert_eq!(w.used_leaves, BTreeSet::from([1]));
    }

    #[test]
    fn numeric_release_date() {
        let t = tree("Release_Date > 2013");
        let b = AttributeBag::from_canonical(expand_numeric("Release_Date", 2014));
        assert!(satisfies(&t, &b).is_ok());
        let b = AttributeBag::from_canonical(expand_numeric("Release_Date", 2013));
        assert!(satisfies(&t, &b).is_err());
    }

    /// Smallest number of leaves whose attributes alone satisfy the tree,
    /// found by trying every leaf subset.
    fn brute_min(t: &AccessTree, bag: &AttributeBag) -> Option<usize> {
        let leaves = t.leaves();
        let l = leaves.len();
        let mut best: Option<usize> = None;
        for mask in 0u32..(1 << l) {
            let size = mask.count_ones() as usize;
            if best.is_some_and(|b| size >= b) {
                continue;
            }
            let ok = leaves.iter().enumerate().all(|(i, (_, a))| mask & (1 << i) == 0 || bag.contains(a));
            if !ok {
                continue;
            }
            let chosen: BTreeSet<usize> =
                leaves.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, (id, _))| *id).collect();
            if leaf_set_satisfies(t, &chosen) {
                best = Some(size);
            }
        }
        best
    }

    fn leaf_set_satisfies(t: &AccessTree, chosen: &BTreeSet<usize>) -> bool {
        fn go(node: &AccessTree, next: &mut usize, chosen: &BTreeSet<usize>) -> bool {
            let id = *next;
            *next += 1;
            match node {
                AccessTree::Leaf(_) => chosen.contains(&id),
                AccessTree::Threshold { k, children } => {
                    children.iter().map(|c| go(c, next, chosen)).filter(|&b| b).count() >= *k
                }
            }
        }
        go(t, &mut 0, chosen)
    }

    #[test]
    fn witness_is_minimal_against_brute_force() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 2000 {
            let t = random_tree(&mut rng, 4, 6);
            if t.leaf_count() > 10 {
                continue;
            }
            let b = AttributeBag::from_canonical((0..6).filter(|_| rng.random_bool(0.6)).map(|i| format!("a{i}")));
            let got = satisfies(&t, &b);
            let want = brute_min(&t, &b);
            assert_eq!(got.as_ref().ok().map(SatisfactionWitness::len), want, "{t}");
            if let Ok(w) = got {
                assert!(leaf_set_satisfies(&t, &w.used_leaves));
                for sel in w.selections.values() {
                    assert!(sel.windows(2).all(|p| p[0] < p[1]));
                }
            }
            checked += 1;
        }
    }
}
