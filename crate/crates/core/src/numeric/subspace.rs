//! Subspaces of ℝⁿ given by orthonormal bases, principal angles, and the
//! deviation target.

use serde::Serialize;

use super::dense::{min_singular_value, singular_values, FMatrix};
use crate::error::{Error, Result};

/// Pivot size below which a column is considered linearly dependent.
const RANK_TOL: f64 = 1e-10;
/// Tolerance on `basisᵀ·basis = I`.
const ORTHO_TOL: f64 = 1e-12;
/// Largest ambient dimension for the exhaustive subset sweep of [`target`].
pub const TARGET_MAX_N: usize = 12;

/// A `k`-dimensional subspace of ℝⁿ with an orthonormal basis (n×k).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subspace {
    basis: FMatrix,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(basis: FMatrix) -> Result<Self> {
        if basis.cols() == 0 || basis.cols() > basis.rows() {
            return Err(Error::Dimension(format!(
                "basis of shape {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        let err = basis
            .gram()
            .sub(&FMatrix::identity(basis.cols()))
            .max_abs();
        if !(err <= ORTHO_TOL) {
            return Err(Error::InvalidArgument(format!(
                "basis columns are not orthonormal (error {err:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    pub fn basis(&self) -> &FMatrix {
        &self.basis
    }

    /// Ambient dimension n.
    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Orthogonal projector `A·Aᵀ`.
    pub fn projector(&self) -> FMatrix {
        &self.basis * &self.basis.transpose()
    }

    /// Applies the signed coordinate permutation `x ↦ y` with
    /// `y[perm[i]] = signs[i] · x[i]`.
    pub fn signed_permuted(&self, perm: &[usize], signs: &[f64]) -> Subspace {
        let mut b = FMatrix::zeros(self.ambient(), self.dim());
        for i in 0..self.ambient() {
            for j in 0..self.dim() {
                b[(perm[i], j)] = signs[i] * self.basis[(i, j)];
            }
        }
        Subspace { basis: b }
    }
}

/// Orthonormal basis of the column space of `m` (modified Gram-Schmidt with
/// one reorthogonalization pass).
pub fn orthonormalize(m: &FMatrix) -> Result<Subspace> {
    let (n, k) = (m.rows(), m.cols());
    if k == 0 || k > n {
        return Err(Error::Dimension(format!("cannot orthonormalize {n}x{k}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("non-finite entries".into()));
    }
    let mut q = m.clone();
    let mut smallest = f64::INFINITY;
    for j in 0..k {
        let original: f64 = (0..n).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for p in 0..j {
                let dot: f64 = (0..n).map(|i| q[(i, p)] * q[(i, j)]).sum();
                for i in 0..n {
                    q[(i, j)] -= dot * q[(i, p)];
                }
            }
        }
        let norm: f64 = (0..n).map(|i| q[(i, j)] * q[(i, j)]).sum::<f64>().sqrt();
        smallest = smallest.min(norm);
        if norm <= RANK_TOL * original.max(1.0) || norm == 0.0 {
            return Err(Error::RankDeficient(norm));
        }
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    debug_assert!(smallest > 0.0);
    Subspace::from_orthonormal(q)
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Principal angles between two subspaces of equal dimension, ascending.
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    if u.ambient() != v.ambient() || u.dim() != v.dim() {
        return Err(Error::Dimension(format!(
            "subspaces {}x{} and {}x{}",
            u.ambient(),
            u.dim(),
            v.ambient(),
            v.dim()
        )));
    }
    let m = &u.basis.transpose() * &v.basis;
    Ok(singular_values(&m)
        .into_iter()
        .map(|s| clamp_unit(s).acos())
        .collect())
}

/// Largest principal angle, as `asin ‖(I − V Vᵀ) U‖₂`, which keeps full
/// relative accuracy for small angles where `acos` of a cosine does not.
pub fn largest_angle(u: &Subspace, v: &Subspace) -> Result<f64> {
    if u.ambient() != v.ambient() || u.dim() != v.dim() {
        return Err(Error::Dimension(format!(
            "subspaces {}x{} and {}x{}",
            u.ambient(),
            u.dim(),
            v.ambient(),
            v.dim()
        )));
    }
    let vb = &v.basis;
    let residual = u.basis.sub(&(vb * &(&vb.transpose() * &u.basis)));
    let sin = singular_values(&residual).first().copied().unwrap_or(0.0);
    Ok(clamp_unit(sin).asin())
}

/// Deviation of a subspace from the closest coordinate subspace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Target {
    /// Smallest, over coordinate subspaces, of the largest principal angle.
    pub angle: f64,
    /// `cos(angle)`: the largest smallest singular value of a k×k row
    /// submatrix of the orthonormal basis.
    pub cos: f64,
    /// Rows (coordinates) of the closest coordinate subspace.
    pub subset: Vec<usize>,
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive target over all `C(n, k)` coordinate subspaces. Ties keep the
/// lexicographically first subset.
pub fn target(a: &Subspace) -> Result<Target> {
    let (n, k) = (a.ambient(), a.dim());
    if n > TARGET_MAX_N {
        return Err(Error::CapExceeded {
            what: "ambient dimension",
            value: n,
            cap: TARGET_MAX_N,
        });
    }
    let mut best = -1.0;
    let mut subset = Vec::new();
    for_each_subset(n, k, |s| {
        let sigma = min_singular_value(&a.basis.select_rows(s));
        if sigma > best {
            best = sigma;
            subset = s.to_vec();
        }
    });
    let cos = clamp_unit(best);
    Ok(Target {
        angle: cos.acos(),
        cos,
        subset,
    })
}
