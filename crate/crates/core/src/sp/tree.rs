//! Series-parallel decomposition trees.
//!
//! A tree is either a single edge, a serial composition or a parallel
//! composition. Constructors keep the tree normalized: compositions of the
//! same kind never nest directly and every composition has at least two
//! children.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Node kind. The derived order (`Leaf < Parallel < Series`) is part of the
/// canonical skeleton order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Leaf,
    Parallel,
    Series,
}

/// Rooted alternating series/parallel decomposition tree. Leaves carry
/// edge-ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpTree {
    Leaf(usize),
    Series(Vec<SpTree>),
    Parallel(Vec<SpTree>),
}

impl SpTree {
    pub fn leaf(edge: usize) -> Self {
        SpTree::Leaf(edge)
    }

    /// Serial composition. Nested serial children are spliced in order and a
    /// single child is returned unchanged.
    ///
    /// Panics on an empty child list.
    pub fn series(children: Vec<SpTree>) -> Self {
        Self::compose(NodeKind::Series, children)
    }

    /// Parallel composition, flattening nested parallel children.
    ///
    /// Panics on an empty child list.
    pub fn parallel(children: Vec<SpTree>) -> Self {
        Self::compose(NodeKind::Parallel, children)
    }

    fn compose(kind: NodeKind, children: Vec<SpTree>) -> Self {
        assert!(!children.is_empty(), "composition needs at least one child");
        let mut flat = Vec::with_capacity(children.len());
        for child in children {
            match (kind, child) {
                (NodeKind::Series, SpTree::Series(inner))
                | (NodeKind::Parallel, SpTree::Parallel(inner)) => flat.extend(inner),
                (_, other) => flat.push(other),
            }
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        match kind {
            NodeKind::Series => SpTree::Series(flat),
            NodeKind::Parallel => SpTree::Parallel(flat),
            NodeKind::Leaf => unreachable!(),
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            SpTree::Leaf(_) => NodeKind::Leaf,
            SpTree::Series(_) => NodeKind::Series,
            SpTree::Parallel(_) => NodeKind::Parallel,
        }
    }

    pub fn children(&self) -> &[SpTree] {
        match self {
            SpTree::Leaf(_) => &[],
            SpTree::Series(c) | SpTree::Parallel(c) => c,
        }
    }

    /// Number of leaves (edges).
    pub fn edge_count(&self) -> usize {
        match self {
            SpTree::Leaf(_) => 1,
            SpTree::Series(c) | SpTree::Parallel(c) => c.iter().map(SpTree::edge_count).sum(),
        }
    }

    /// Rank of the associated cycle matroid: vertex count of the realized
    /// graph minus one.
    pub fn rank(&self) -> usize {
        match self {
            SpTree::Leaf(_) => 1,
            SpTree::Series(c) => c.iter().map(SpTree::rank).sum(),
            SpTree::Parallel(c) => c.iter().map(|t| t.rank() - 1).sum::<usize>() + 1,
        }
    }

    /// Edge-ids in left-to-right reading order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.edge_count());
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            SpTree::Leaf(e) => out.push(*e),
            SpTree::Series(c) | SpTree::Parallel(c) => {
                for t in c {
                    t.collect_leaves(out);
                }
            }
        }
    }

    /// True for a nontrivial 2-connected tree (parallel root).
    pub fn is_two_sp(&self) -> bool {
        matches!(self, SpTree::Parallel(_))
    }

    /// Checks arity, alternation and that the edge-ids are a permutation of
    /// `0..n`.
    pub fn validate(&self) -> Result<()> {
        self.validate_node(None)?;
        let mut ids = self.leaves();
        ids.sort_unstable();
        if ids.iter().enumerate().any(|(i, &e)| i != e) {
            return Err(Error::InvalidTree(format!(
                "edge-ids {ids:?} are not a permutation of 0..{}",
                ids.len()
            )));
        }
        Ok(())
    }

    fn validate_node(&self, parent: Option<NodeKind>) -> Result<()> {
        let kind = self.kind();
        if kind != NodeKind::Leaf {
            if Some(kind) == parent {
                return Err(Error::InvalidTree(format!(
                    "{kind:?} node directly inside a {kind:?} node"
                )));
            }
            if self.children().len() < 2 {
                return Err(Error::InvalidTree(format!(
                    "{kind:?} node with fewer than two children"
                )));
            }
            for c in self.children() {
                c.validate_node(Some(kind))?;
            }
        }
        Ok(())
    }

    /// Reassigns edge-ids `0..n` in left-to-right reading order.
    pub fn relabeled(&self) -> SpTree {
        let mut next = 0;
        self.relabel_from(&mut next)
    }

    fn relabel_from(&self, next: &mut usize) -> SpTree {
        match self {
            SpTree::Leaf(_) => {
                *next += 1;
                SpTree::Leaf(*next - 1)
            }
            SpTree::Series(c) => SpTree::Series(c.iter().map(|t| t.relabel_from(next)).collect()),
            SpTree::Parallel(c) => {
                SpTree::Parallel(c.iter().map(|t| t.relabel_from(next)).collect())
            }
        }
    }

    /// Canonical representative: parallel children sorted by skeleton order,
    /// each serial sequence replaced by the smaller of itself and its
    /// reversal, then edge-ids assigned left to right.
    pub fn canonicalize(&self) -> SpTree {
        self.canonical_skeleton().relabeled()
    }

    fn canonical_skeleton(&self) -> SpTree {
        match self {
            SpTree::Leaf(e) => SpTree::Leaf(*e),
            SpTree::Parallel(c) => {
                let mut kids: Vec<SpTree> = c.iter().map(SpTree::canonical_skeleton).collect();
                kids.sort_by(skeleton_cmp);
                SpTree::Parallel(kids)
            }
            SpTree::Series(c) => {
                let mut kids: Vec<SpTree> = c.iter().map(SpTree::canonical_skeleton).collect();
                if sequence_cmp(kids.iter().rev(), kids.iter()) == Ordering::Less {
                    kids.reverse();
                }
                SpTree::Series(kids)
            }
        }
    }

    /// True when the tree already equals its canonical form.
    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    /// Swaps serial and parallel compositions, keeping edge-ids.
    ///
    /// This is the dual of the 2-terminal network; `rank(t) +
    /// rank(dualize(t)) = n + 1`. The dual of the closed 2-sp graph is
    /// [`crate::sp::dual_two_sp`].
    pub fn dualize(&self) -> SpTree {
        match self {
            SpTree::Leaf(e) => SpTree::Leaf(*e),
            SpTree::Series(c) => SpTree::Parallel(c.iter().map(SpTree::dualize).collect()),
            SpTree::Parallel(c) => SpTree::Series(c.iter().map(SpTree::dualize).collect()),
        }
    }

    /// Same network with the two terminals swapped: every serial sequence is
    /// reversed recursively. Leaves keep their ids; their natural sense
    /// flips.
    pub fn reversed(&self) -> SpTree {
        match self {
            SpTree::Leaf(e) => SpTree::Leaf(*e),
            SpTree::Series(c) => SpTree::Series(c.iter().rev().map(SpTree::reversed).collect()),
            SpTree::Parallel(c) => SpTree::Parallel(c.iter().map(SpTree::reversed).collect()),
        }
    }
}

/// Total order on edge-id-erased skeletons: leaf count, then node kind, then
/// children lexicographically.
pub fn skeleton_cmp(a: &SpTree, b: &SpTree) -> Ordering {
    a.edge_count()
        .cmp(&b.edge_count())
        .then_with(|| a.kind().cmp(&b.kind()))
        .then_with(|| sequence_cmp(a.children().iter(), b.children().iter()))
}

fn sequence_cmp<'a, I, J>(a: I, b: J) -> Ordering
where
    I: Iterator<Item = &'a SpTree>,
    J: Iterator<Item = &'a SpTree>,
{
    let mut a = a;
    let mut b = b;
    loop {
        match (a.next(), b.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => match skeleton_cmp(x, y) {
                Ordering::Equal => continue,
                ord => return ord,
            },
        }
    }
}

/// Writes the tree in the text grammar (`e`, `P(..)`, `S(..)`); edge-ids are
/// implied by reading order and therefore not printed.
impl fmt::Display for SpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, kids) = match self {
            SpTree::Leaf(_) => return f.write_str("e"),
            SpTree::Series(c) => ("S(", c),
            SpTree::Parallel(c) => ("P(", c),
        };
        f.write_str(tag)?;
        for (i, c) in kids.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sp::parse_tree;

    fn e(i: usize) -> SpTree {
        SpTree::leaf(i)
    }

    #[test]
    fn constructors_flatten_and_unwrap() {
        let t = SpTree::parallel(vec![e(0), e(1)]);
        assert_eq!(t, SpTree::Parallel(vec![e(0), e(1)]));

        let t = SpTree::series(vec![e(0), SpTree::series(vec![e(1), e(2)])]);
        assert_eq!(t, SpTree::Series(vec![e(0), e(1), e(2)]));

        assert_eq!(SpTree::parallel(vec![e(0)]), e(0));
    }

    #[test]
    #[should_panic]
    fn empty_composition_panics() {
        SpTree::series(vec![]);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(parse_tree("P(e,e)").unwrap().rank(), 1);
        assert_eq!(parse_tree("P(e,S(e,e,e))").unwrap().rank(), 3);
        assert_eq!(parse_tree("S(e,e)").unwrap().rank(), 2);
    }

    #[test]
    fn canonical_sorting_and_reversal() {
        let t = parse_tree("P(S(e,e),e)").unwrap();
        assert_eq!(t.canonicalize().to_string(), "P(e,S(e,e))");

        let a = parse_tree("P(e,S(P(e,e),e))").unwrap().canonicalize();
        let b = parse_tree("P(e,S(e,P(e,e)))").unwrap().canonicalize();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "P(e,S(e,P(e,e)))");
    }

    #[test]
    fn canonical_relabels_left_to_right() {
        let t = SpTree::Parallel(vec![SpTree::Series(vec![e(2), e(0)]), e(1)]);
        let c = t.canonicalize();
        assert_eq!(c.leaves(), vec![0, 1, 2]);
        assert!(c.is_canonical());
    }

    #[test]
    fn dual_swaps_kinds() {
        let t = parse_tree("P(e,e)").unwrap();
        assert_eq!(t.dualize(), SpTree::Series(vec![e(0), e(1)]));
        let c4 = parse_tree("P(e,S(e,e,e))").unwrap();
        let d = c4.dualize();
        assert_eq!(d.to_string(), "S(e,P(e,e,e))");
        assert_eq!(c4.rank() + d.rank(), c4.edge_count() + 1);
        assert_eq!(d.dualize(), c4);
    }

    #[test]
    fn validate_rejects_bad_trees() {
        let nested = SpTree::Series(vec![SpTree::Series(vec![e(0), e(1)]), e(2)]);
        assert!(nested.validate().is_err());
        let unary = SpTree::Parallel(vec![e(0)]);
        assert!(unary.validate().is_err());
        let dup = SpTree::Parallel(vec![e(0), e(0)]);
        assert!(dup.validate().is_err());
        assert!(SpTree::Parallel(vec![e(1), e(0)]).validate().is_ok());
    }

    #[test]
    fn skeleton_order_kind_rank() {
        // equal leaf count: Parallel sorts before Series
        let p = parse_tree("P(e,e)").unwrap();
        let s = parse_tree("S(e,e)").unwrap();
        assert_eq!(skeleton_cmp(&p, &s), Ordering::Less);
        assert_eq!(skeleton_cmp(&e(7), &p), Ordering::Less);
    }
}
