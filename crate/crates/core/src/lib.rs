//! Subspaces of ℝⁿ that deviate as far as possible from every coordinate
//! subspace of the same dimension.
//!
//! The extremal subspaces are the scaled star spaces `col(W^{1/2} Bᵀ)` of
//! 2-connected series-parallel graphs carrying graph-induced edge weights.
//! The crate builds them from decomposition trees ([`sp`], [`weights`]),
//! verifies them exactly ([`extremal`]), and searches for them numerically
//! ([`search`]).

pub mod cli;
pub mod error;
pub mod extremal;
pub mod numeric;
pub mod search;
pub mod sp;
pub mod weights;

pub use error::{Error, Result};
