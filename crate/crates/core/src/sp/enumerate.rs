use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use super::tree::{skeleton_cmp, NodeKind, SpTree};

/// Every canonical 2-sp tree (parallel root) with `n` edges and rank `k`,
/// each exactly once, in a deterministic order. Empty when none exists.
pub fn enumerate_rooted(n: usize, k: usize) -> Vec<SpTree> {
    if n < 2 || k == 0 || k >= n {
        return Vec::new();
    }
    let mut gen = Generator::default();
    gen.get(NodeKind::Parallel, n, k)
        .iter()
        .map(SpTree::relabeled)
        .collect()
}

/// Canonical skeletons keyed by (root kind, edges, rank). Leaf ids are
/// placeholders until relabeling.
#[derive(Default)]
struct Generator {
    memo: HashMap<(NodeKind, usize, usize), Rc<Vec<SpTree>>>,
}

impl Generator {
    fn get(&mut self, kind: NodeKind, n: usize, k: usize) -> Rc<Vec<SpTree>> {
        if let Some(v) = self.memo.get(&(kind, n, k)) {
            return v.clone();
        }
        let out = match kind {
            NodeKind::Leaf => {
                if n == 1 && k == 1 {
                    vec![SpTree::Leaf(0)]
                } else {
                    vec![]
                }
            }
            NodeKind::Parallel => self.parallel(n, k),
            NodeKind::Series => self.series(n, k),
        };
        let out = Rc::new(out);
        self.memo.insert((kind, n, k), out.clone());
        out
    }

    /// All canonical children of the given kind-class with fewer than `n`
    /// edges, sorted by skeleton order, with their (edges, rank).
    fn candidates(&mut self, inner: NodeKind, n: usize) -> Vec<(SpTree, usize, usize)> {
        let mut out = vec![(SpTree::Leaf(0), 1, 1)];
        for ni in 2..n {
            for ki in 1..=ni {
                for t in self.get(inner, ni, ki).iter() {
                    out.push((t.clone(), ni, ki));
                }
            }
        }
        out.sort_by(|a, b| skeleton_cmp(&a.0, &b.0));
        out
    }

    fn parallel(&mut self, n: usize, k: usize) -> Vec<SpTree> {
        if n < 2 || k == 0 || k >= n {
            return vec![];
        }
        let cands = self.candidates(NodeKind::Series, n);
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        // children ranks satisfy sum(k_i - 1) = k - 1
        choose_multiset(&cands, 0, n, k - 1, &mut chosen, &mut out);
        out
    }

    fn series(&mut self, n: usize, k: usize) -> Vec<SpTree> {
        if n < 2 || k < 2 || k > n {
            return vec![];
        }
        let cands = self.candidates(NodeKind::Parallel, n);
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        choose_sequence(&cands, n, k, &mut chosen, &mut out);
        out
    }
}

fn choose_multiset(
    cands: &[(SpTree, usize, usize)],
    start: usize,
    rem_n: usize,
    rem_excess: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SpTree>,
) {
    if rem_n == 0 {
        if rem_excess == 0 && chosen.len() >= 2 {
            out.push(SpTree::Parallel(
                chosen.iter().map(|&i| cands[i].0.clone()).collect(),
            ));
        }
        return;
    }
    for i in start..cands.len() {
        let (_, ni, ki) = cands[i];
        if ni > rem_n {
            // sorted by edge count first
            break;
        }
        if ki - 1 > rem_excess {
            continue;
        }
        chosen.push(i);
        choose_multiset(cands, i, rem_n - ni, rem_excess - (ki - 1), chosen, out);
        chosen.pop();
    }
}

fn choose_sequence(
    cands: &[(SpTree, usize, usize)],
    rem_n: usize,
    rem_k: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SpTree>,
) {
    if rem_n == 0 {
        if rem_k == 0 && chosen.len() >= 2 {
            let forward = chosen.iter().map(|&i| &cands[i].0);
            let backward = chosen.iter().rev().map(|&i| &cands[i].0);
            let not_greater = forward
                .zip(backward)
                .map(|(a, b)| skeleton_cmp(a, b))
                .find(|o| *o != Ordering::Equal)
                .is_none_or(|o| o == Ordering::Less);
            if not_greater {
                out.push(SpTree::Series(
                    chosen.iter().map(|&i| cands[i].0.clone()).collect(),
                ));
            }
        }
        return;
    }
    for (i, &(_, ni, ki)) in cands.iter().enumerate() {
        if ni > rem_n {
            break;
        }
        if ki > rem_k {
            continue;
        }
        chosen.push(i);
        choose_sequence(cands, rem_n - ni, rem_k - ki, chosen, out);
        chosen.pop();
    }
}
