//! Duality check: the dual instance has reciprocal induced weights and its
//! projection is the complementary one up to edge signs.

use num_rational::BigRational;
use serde::Serialize;

use super::{build_natural, ExtremalInstance};
use crate::error::Result;
use crate::numeric::{target, FMatrix};
use crate::sp::dual_two_sp;
use crate::weights::proportional;

/// Entries of `I − 𝒫` below this are treated as zero when propagating signs.
const SIGN_EPS: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct DualReport {
    pub dual_tree: String,
    pub dual_rank: usize,
    /// `w*_e · w_e`, constant over edges, when the weights are reciprocal.
    pub reciprocal_factor: Option<String>,
    /// Largest `|𝒫* − D(I − 𝒫)D|` for the sign matrix found.
    pub complement_error: f64,
    pub complement_ok: bool,
    pub dual_target_cos: f64,
    pub dual_target_ok: bool,
}

impl DualReport {
    pub fn ok(&self) -> bool {
        self.reciprocal_factor.is_some() && self.complement_ok && self.dual_target_ok
    }
}

/// Builds the dual instance and checks reciprocity, complementarity and the
/// dual's target at tolerance `tol`.
pub fn check_dual(inst: &ExtremalInstance, tol: f64) -> Result<DualReport> {
    let dual_tree = dual_two_sp(&inst.tree)?;
    let dual = build_natural(&dual_tree)?;
    let recip: Vec<BigRational> = inst.weights.as_slice().iter().map(|w| w.recip()).collect();
    let factor = proportional(dual.weights.as_slice(), &recip);

    let n = inst.n();
    let complement = FMatrix::identity(n).sub(&inst.projection);
    let signs = propagate_signs(&complement, &dual.projection);
    let complement_error = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (dual.projection[(i, j)] - signs[i] * signs[j] * complement[(i, j)]).abs())
        .fold(0.0, f64::max);

    let t = target(&dual.subspace)?;
    Ok(DualReport {
        dual_tree: dual_tree.to_string(),
        dual_rank: dual.k(),
        reciprocal_factor: factor.map(|f| crate::numeric::format_rational(&f.recip())),
        complement_error,
        complement_ok: complement_error <= tol,
        dual_target_cos: t.cos,
        dual_target_ok: (t.cos - 1.0 / (n as f64).sqrt()).abs() <= tol,
    })
}

/// Signs `d` with `b ≈ d_i d_j a_ij`, fixed along a spanning forest of the
/// non-zero pattern of `a`.
fn propagate_signs(a: &FMatrix, b: &FMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut d = vec![0.0; n];
    for start in 0..n {
        if d[start] != 0.0 {
            continue;
        }
        d[start] = 1.0;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if d[j] == 0.0 && a[(i, j)].abs() > SIGN_EPS {
                    d[j] = if b[(i, j)] * a[(i, j)] * d[i] >= 0.0 { 1.0 } else { -1.0 };
                    stack.push(j);
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sp::{enumerate_rooted, parse_tree};

    #[test]
    fn banana_and_cycle_are_dual() {
        let i = build_natural(&parse_tree("P(e,e,e,e)").unwrap()).unwrap();
        let r = check_dual(&i, 1e-9).unwrap();
        assert_eq!(r.dual_tree, "P(e,S(e,e,e))");
        assert_eq!(r.dual_rank, 3);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn duals_pass_for_small_trees() {
        for n in 2..=6 {
            for k in 1..n {
                for t in enumerate_rooted(n, k) {
                    let r = check_dual(&build_natural(&t).unwrap(), 1e-9).unwrap();
                    assert_eq!(r.dual_rank, n - k);
                    assert!(r.ok(), "{t}: {r:?}");
                }
            }
        }
    }
}
