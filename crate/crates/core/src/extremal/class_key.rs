//! Equivalence-class keys.
//!
//! Two instances are identified when their subspaces agree up to a signed
//! permutation of coordinates. The squared projection `Q = Y ∘ Yᵀ` (the
//! entrywise square of `𝒫`) is invariant under sign changes and permutes
//! simultaneously with the coordinates, so the key is a canonical form of
//! `Q` under simultaneous row/column permutation.

use std::collections::HashSet;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::numeric::{
    format_rational, incidence_matrix, squared_projection, transfer_current, RMatrix,
};
use crate::sp::{enumerate_rooted, realize_natural, SpTree};
use crate::weights::induced_weights;

use super::ExtremalInstance;

/// Canonical form of `Q`: the distinct values in increasing order, and the
/// lower triangle (diagonal included) of the lexicographically least
/// relabeling, read row by row, as indices into `values`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    n: usize,
    values: Vec<BigRational>,
    shells: Vec<u32>,
}

impl ClassKey {
    pub fn n(&self) -> usize {
        self.n
    }
}

impl Serialize for ClassKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ClassKey", 3)?;
        st.serialize_field("n", &self.n)?;
        let values: Vec<String> = self.values.iter().map(format_rational).collect();
        st.serialize_field("values", &values)?;
        st.serialize_field("shells", &self.shells)?;
        st.end()
    }
}

pub fn class_key(inst: &ExtremalInstance) -> ClassKey {
    canonical_form(&squared_projection(&inst.transfer))
}

/// Key of a 2-sp tree with natural directions, computed from the exact `Y`
/// alone.
pub fn class_key_of_tree(tree: &SpTree) -> Result<ClassKey> {
    let w = induced_weights(tree)?;
    let g = realize_natural(tree)?;
    let y = transfer_current(&incidence_matrix(&g), &w)?;
    Ok(canonical_form(&squared_projection(&y)))
}

/// Number of distinct keys among the rooted 2-sp trees with `n` edges and
/// rank `k`.
pub fn count_classes(n: usize, k: usize) -> Result<usize> {
    let trees = enumerate_rooted(n, k);
    let keys: Vec<ClassKey> = trees
        .par_iter()
        .map(class_key_of_tree)
        .collect::<Result<_>>()?;
    Ok(keys.into_iter().collect::<HashSet<_>>().len())
}

/// Canonical form of a symmetric matrix under simultaneous permutation.
pub(crate) fn canonical_form(q: &RMatrix) -> ClassKey {
    let n = q.rows();
    let mut values: Vec<BigRational> = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)].clone())
        .collect();
    values.sort();
    values.dedup();
    let labels: Vec<u32> = (0..n * n)
        .map(|idx| values.binary_search(&q[(idx / n, idx % n)]).unwrap() as u32)
        .collect();
    let mut search = Search {
        n,
        labels,
        twin_rep: Vec::new(),
        best: None,
    };
    search.twin_rep = search.twin_representatives();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut prefix = Vec::with_capacity(n * (n + 1) / 2);
    search.descend(&mut order, &mut used, &mut prefix);
    ClassKey {
        n,
        values,
        shells: search.best.unwrap_or_default(),
    }
}

struct Search {
    n: usize,
    labels: Vec<u32>,
    /// For each vertex, the smallest vertex it is a twin of (itself if none).
    twin_rep: Vec<usize>,
    best: Option<Vec<u32>>,
}

impl Search {
    fn at(&self, i: usize, j: usize) -> u32 {
        self.labels[i * self.n + j]
    }

    /// `u` and `v` are twins when swapping them fixes the matrix. Twins are
    /// interchangeable at every level of the search, so one representative
    /// suffices.
    fn twins(&self, u: usize, v: usize) -> bool {
        self.at(u, u) == self.at(v, v)
            && (0..self.n)
                .filter(|&x| x != u && x != v)
                .all(|x| self.at(u, x) == self.at(v, x))
    }

    fn twin_representatives(&self) -> Vec<usize> {
        (0..self.n)
            .map(|v| (0..v).find(|&u| self.twins(u, v)).unwrap_or(v))
            .collect()
    }

    fn shell(&self, order: &[usize], v: usize) -> Vec<u32> {
        let mut s: Vec<u32> = order.iter().map(|&u| self.at(v, u)).collect();
        s.push(self.at(v, v));
        s
    }

    fn descend(&mut self, order: &mut Vec<usize>, used: &mut [bool], prefix: &mut Vec<u32>) {
        if let Some(best) = &self.best {
            if prefix.as_slice() > &best[..prefix.len()] {
                return;
            }
        }
        if order.len() == self.n {
            if self.best.as_ref().is_none_or(|b| *prefix < *b) {
                self.best = Some(prefix.clone());
            }
            return;
        }
        // only the least shell can start an optimal continuation; among
        // unused twins a single representative is explored
        let mut least: Option<Vec<u32>> = None;
        let mut candidates = Vec::new();
        let mut seen_rep = Vec::new();
        for v in (0..self.n).filter(|&v| !used[v]) {
            let rep = self.twin_rep[v];
            if seen_rep.contains(&rep) {
                continue;
            }
            seen_rep.push(rep);
            let s = self.shell(order, v);
            match &least {
                Some(l) if s > *l => {}
                Some(l) if s == *l => candidates.push(v),
                _ => {
                    least = Some(s);
                    candidates.clear();
                    candidates.push(v);
                }
            }
        }
        let shell = least.expect("an unused vertex remains");
        let len = prefix.len();
        prefix.extend_from_slice(&shell);
        for v in candidates {
            used[v] = true;
            order.push(v);
            self.descend(order, used, prefix);
            order.pop();
            used[v] = false;
        }
        prefix.truncate(len);
    }
}
