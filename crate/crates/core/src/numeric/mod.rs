//! Exact and floating-point linear algebra for the construction and the
//! deviation target.

mod dense;
mod graph_matrices;
mod rational;
mod subspace;

pub use dense::{min_singular_value, singular_values, symmetric_eigenvalues, FMatrix};
pub use graph_matrices::{
    incidence_matrix, laplacian, pinv_laplacian, projection, projection_from_transfer,
    squared_projection, transfer_current, transfer_current_combinatorial,
};
pub(crate) use graph_matrices::sqrt_f64;
pub use rational::{
    format_rational, format_rational_pq, int, parse_rational, rat, to_f64, RMatrix,
};
pub use subspace::{
    for_each_subset, largest_angle, orthonormalize, principal_angles, target, Subspace, Target,
    TARGET_MAX_N,
};
