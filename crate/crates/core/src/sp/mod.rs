//! Series-parallel decomposition trees and their realization as graphs.

mod enumerate;
mod graph;
mod parse;
mod tree;

pub use enumerate::enumerate_rooted;
pub use graph::{
    decompose, decompose_randomized, dual_two_sp, realize, realize_natural, Decomposition, Edge,
    MultiGraph,
};
pub(crate) use graph::{embed, Dsu};
pub use parse::parse_tree;
pub use tree::{skeleton_cmp, NodeKind, SpTree};
