//! Graph-induced edge weights, graph-tree-induced coefficients, and weighted
//! spanning-tree / 2-component-forest sums.
//!
//! All arithmetic is exact. A leaf's nested chain `G ⊃ G₁ ⊃ G₂ ⊃ … ⊃ {e}`
//! follows the decomposition from the root's child down to the leaf; odd
//! links are serial-level nodes, even links parallel-level nodes. A chain
//! ending on an odd link is closed by a dummy serial step, which contributes
//! a factor of one.

use std::collections::BTreeMap;
use std::env;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{for_each_subset, format_rational_pq, int};
use crate::sp::{embed, Dsu, MultiGraph, SpTree};

/// Default limit on edge count for exhaustive subset enumeration.
pub const DEFAULT_BRUTE_CAP: usize = 16;

/// Brute-force cap, overridable through `EXTREMAL_BRUTE_CAP`.
pub fn brute_cap() -> usize {
    env::var("EXTREMAL_BRUTE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BRUTE_CAP)
}

/// Positive exact weight per edge-id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeWeights(Vec<BigRational>);

impl EdgeWeights {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidArgument("edge weights must be positive".into()));
        }
        Ok(EdgeWeights(weights))
    }

    pub fn unit(n: usize) -> Self {
        EdgeWeights(vec![BigRational::one(); n])
    }

    pub fn get(&self, edge: usize) -> &BigRational {
        &self.0[edge]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.0
    }

    /// Weights divided by the weight of the first edge.
    pub fn normalized(&self) -> EdgeWeights {
        let w0 = self.0[0].clone();
        EdgeWeights(self.0.iter().map(|w| w / &w0).collect())
    }

    /// The common ratio `c` with `self = c · other`, if one exists.
    pub fn ratio_to(&self, other: &EdgeWeights) -> Option<BigRational> {
        proportional(&self.0, &other.0)
    }
}

/// Common factor `c` with `a = c · b` componentwise, if one exists (both
/// vectors must have the same support).
pub fn proportional(a: &[BigRational], b: &[BigRational]) -> Option<BigRational> {
    if a.len() != b.len() {
        return None;
    }
    let mut ratio: Option<BigRational> = None;
    for (x, y) in a.iter().zip(b) {
        match (x.is_zero(), y.is_zero()) {
            (true, true) => continue,
            (false, false) => {
                let r = x / y;
                match &ratio {
                    None => ratio = Some(r),
                    Some(c) if *c == r => {}
                    Some(_) => return None,
                }
            }
            _ => return None,
        }
    }
    ratio
}

fn serialize_rational_map<'a, S, I>(s: S, len: usize, items: I) -> std::result::Result<S::Ok, S::Error>
where
    S: Serializer,
    I: Iterator<Item = (usize, &'a BigRational)>,
{
    let mut map = s.serialize_map(Some(len))?;
    for (e, v) in items {
        map.serialize_entry(&e.to_string(), &format_rational_pq(v))?;
    }
    map.end()
}

/// `{"edge-id": "p/q"}`.
impl Serialize for EdgeWeights {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rational_map(s, self.0.len(), self.0.iter().enumerate())
    }
}

/// Signed coefficients on the edges of a spanning tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCoefficients(BTreeMap<usize, BigRational>);

impl EdgeCoefficients {
    pub fn get(&self, edge: usize) -> Option<&BigRational> {
        self.0.get(&edge)
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    /// Values ordered by edge-id.
    pub fn values(&self) -> Vec<BigRational> {
        self.0.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for EdgeCoefficients {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rational_map(s, self.0.len(), self.0.iter().map(|(e, v)| (*e, v)))
    }
}

/// Weighted spanning-tree sum `t` and 2-component-forest sum `t_prime`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSums {
    pub t: BigRational,
    pub t_prime: BigRational,
}

fn phi(x: usize, n: usize) -> BigRational {
    int((x * (n - x)) as i64)
}

/// Sizes of the nested chain for each leaf, from the root's child down to
/// the leaf (the root itself excluded).
fn leaf_chains(tree: &SpTree) -> Vec<(usize, Vec<usize>)> {
    fn walk(t: &SpTree, path: &mut Vec<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
        path.push(t.edge_count());
        match t {
            SpTree::Leaf(e) => out.push((*e, path.clone())),
            SpTree::Series(c) | SpTree::Parallel(c) => {
                for ch in c {
                    walk(ch, path, out);
                }
            }
        }
        path.pop();
    }
    let mut out = Vec::new();
    for c in tree.children() {
        walk(c, &mut Vec::new(), &mut out);
    }
    out
}

/// Product over odd links of `f(G_{2i-1}) / f(G_{2i})`; a trailing odd
/// link pairs with its dummy copy.
fn chain_product<T, F>(chain: &[T], f: F) -> BigRational
where
    F: Fn(&T) -> BigRational,
{
    chain
        .chunks(2)
        .filter(|pair| pair.len() == 2)
        .fold(BigRational::one(), |acc, pair| acc * f(&pair[0]) / f(&pair[1]))
}

/// G-induced weights `w_e = Π φ(|G_{2i-1}|)/φ(|G_{2i}|)` with
/// `φ(x) = x(|G| − x)`.
pub fn induced_weights(tree: &SpTree) -> Result<EdgeWeights> {
    tree.validate()?;
    if !tree.is_two_sp() {
        return Err(Error::NotTwoConnected);
    }
    let n = tree.edge_count();
    let mut w = vec![BigRational::zero(); n];
    for (e, chain) in leaf_chains(tree) {
        w[e] = chain_product(&chain, |&x| phi(x, n));
    }
    EdgeWeights::new(w)
}

/// (G,τ)-induced coefficients `y_e = ± Π ψ(G_{2i-1})/ψ(G_{2i})` on the
/// edges of the spanning tree `tau`, where `ψ(Γ) = |G| − |Γ|` if `τ ∩ Γ`
/// joins the terminals of Γ and `−|Γ|` otherwise. The sign is positive when
/// the edge runs along its natural l-to-r sense. Terminals are those of
/// `graph`.
pub fn induced_coefficients(
    tree: &SpTree,
    tau: &[usize],
    graph: &MultiGraph,
) -> Result<EdgeCoefficients> {
    if !tree.is_two_sp() {
        return Err(Error::NotTwoConnected);
    }
    if !graph.is_spanning_tree(tau) {
        return Err(Error::NotSpanningTree);
    }
    let (l, r) = graph.terminals();
    let emb = embed(tree, graph, l, r)?;
    let n = tree.edge_count();
    let mut in_tau = vec![false; n];
    for &e in tau {
        in_tau[e] = true;
    }
    let psi = |node: &usize| -> BigRational {
        let node = &emb.nodes[*node];
        let size = node.edges.len();
        let mut dsu = Dsu::new(graph.vertex_count());
        for &e in node.edges.iter().filter(|&&e| in_tau[e]) {
            let edge = graph.edge(e);
            dsu.union(edge.tail, edge.head);
        }
        let (a, b) = node.terminals;
        if dsu.find(a) == dsu.find(b) {
            int((n - size) as i64)
        } else {
            -int(size as i64)
        }
    };
    let mut out = BTreeMap::new();
    for &e in tau {
        let magnitude = chain_product(&emb.chain(e), psi);
        let y = if emb.natural(graph, e) { magnitude } else { -magnitude };
        out.insert(e, y);
    }
    Ok(EdgeCoefficients(out))
}

/// Spanning-tree and 2-component-forest sums by the series/parallel
/// recurrences:
///
/// * leaf: `(w_e, 1)`
/// * serial: `(Π Tᵢ, Σᵢ T₁…T′ᵢ…T_m)`
/// * parallel: `(Σᵢ T′₁…Tᵢ…T′_m, Π T′ᵢ)`
pub fn tree_sums(tree: &SpTree, w: &EdgeWeights) -> Result<TreeSums> {
    tree.validate()?;
    if w.len() != tree.edge_count() {
        return Err(Error::Dimension(format!(
            "{} weights for {} edges",
            w.len(),
            tree.edge_count()
        )));
    }
    Ok(sums(tree, w))
}

fn sums(tree: &SpTree, w: &EdgeWeights) -> TreeSums {
    match tree {
        SpTree::Leaf(e) => TreeSums {
            t: w.get(*e).clone(),
            t_prime: BigRational::one(),
        },
        SpTree::Series(c) => {
            let parts: Vec<TreeSums> = c.iter().map(|t| sums(t, w)).collect();
            TreeSums {
                t: product(parts.iter().map(|p| &p.t)),
                t_prime: one_swapped(&parts, |p| &p.t, |p| &p.t_prime),
            }
        }
        SpTree::Parallel(c) => {
            let parts: Vec<TreeSums> = c.iter().map(|t| sums(t, w)).collect();
            TreeSums {
                t: one_swapped(&parts, |p| &p.t_prime, |p| &p.t),
                t_prime: product(parts.iter().map(|p| &p.t_prime)),
            }
        }
    }
}

fn product<'a>(it: impl Iterator<Item = &'a BigRational>) -> BigRational {
    it.fold(BigRational::one(), |a, b| a * b)
}

/// `Σᵢ base(1)…swap(i)…base(m)`.
fn one_swapped(
    parts: &[TreeSums],
    base: impl Fn(&TreeSums) -> &BigRational,
    swap: impl Fn(&TreeSums) -> &BigRational,
) -> BigRational {
    (0..parts.len())
        .map(|i| {
            parts.iter().enumerate().fold(BigRational::one(), |acc, (j, p)| {
                acc * if i == j { swap(p) } else { base(p) }
            })
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

fn check_cap(graph: &MultiGraph) -> Result<()> {
    let cap = brute_cap();
    if graph.edge_count() > cap {
        return Err(Error::CapExceeded {
            what: "edge count",
            value: graph.edge_count(),
            cap,
        });
    }
    Ok(())
}

/// All spanning trees as sorted edge subsets, in lexicographic order.
pub fn spanning_trees(graph: &MultiGraph) -> Result<Vec<Vec<usize>>> {
    check_cap(graph)?;
    let mut out = Vec::new();
    if graph.vertex_count() == 0 {
        return Ok(out);
    }
    for_each_subset(graph.edge_count(), graph.vertex_count() - 1, |s| {
        if graph.is_spanning_tree(s) {
            out.push(s.to_vec());
        }
    });
    Ok(out)
}

/// Spanning forests with two trees, one holding each terminal.
pub fn two_component_forests(graph: &MultiGraph) -> Result<Vec<Vec<usize>>> {
    check_cap(graph)?;
    let (l, r) = graph.terminals();
    let mut out = Vec::new();
    if graph.vertex_count() < 2 || l == r {
        return Ok(out);
    }
    for_each_subset(graph.edge_count(), graph.vertex_count() - 2, |s| {
        let mut dsu = Dsu::new(graph.vertex_count());
        let acyclic = s.iter().all(|&e| {
            let edge = graph.edge(e);
            dsu.union(edge.tail, edge.head)
        });
        if acyclic && dsu.find(l) != dsu.find(r) {
            out.push(s.to_vec());
        }
    });
    Ok(out)
}

fn subset_weight(s: &[usize], w: &EdgeWeights) -> BigRational {
    product(s.iter().map(|&e| w.get(e)))
}

/// Exhaustive-enumeration oracle for [`tree_sums`], using the graph's
/// terminals for the forests.
pub fn brute_tree_sums(graph: &MultiGraph, w: &EdgeWeights) -> Result<TreeSums> {
    if w.len() != graph.edge_count() {
        return Err(Error::Dimension("weights do not match edges".into()));
    }
    let t = spanning_trees(graph)?
        .iter()
        .map(|s| subset_weight(s, w))
        .fold(BigRational::zero(), |a, b| a + b);
    let t_prime = two_component_forests(graph)?
        .iter()
        .map(|s| subset_weight(s, w))
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(TreeSums { t, t_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::sp::{parse_tree, realize, realize_natural};

    fn weights(s: &str) -> Vec<BigRational> {
        induced_weights(&parse_tree(s).unwrap())
            .unwrap()
            .as_slice()
            .to_vec()
    }

    #[test]
    fn banana_and_cycle_weights_are_one() {
        for n in 2..=6 {
            let banana = format!("P({})", vec!["e"; n].join(","));
            assert!(weights(&banana).iter().all(One::is_one));
        }
        for n in 3..=7 {
            let cycle = format!("P(e,S({}))", vec!["e"; n - 1].join(","));
            assert!(weights(&cycle).iter().all(One::is_one), "{cycle}");
        }
    }

    #[test]
    fn worked_example_weights() {
        assert_eq!(
            weights("P(e,S(e,P(e,e)))"),
            vec![int(1), int(1), rat(3, 4), rat(3, 4)]
        );
    }

    #[test]
    fn deep_chain_uses_each_level() {
        // n = 6: P(e, S(e, P(e, S(e, e), e)))
        // e2, e5: phi(5)/phi(4) = 5/8; e3, e4: phi(5)/phi(4) * phi(2)/phi(1) = 5/8 * 8/5 = 1
        let w = weights("P(e,S(e,P(e,S(e,e),e)))");
        assert_eq!(w, vec![int(1), int(1), rat(5, 8), int(1), int(1), rat(5, 8)]);
    }

    #[test]
    fn series_root_is_rejected() {
        assert_eq!(
            induced_weights(&parse_tree("S(e,e)").unwrap()),
            Err(Error::NotTwoConnected)
        );
    }

    #[test]
    fn banana_coefficient_is_one() {
        let t = parse_tree("P(e,e,e,e)").unwrap();
        let g = realize_natural(&t).unwrap();
        for e in 0..4 {
            let y = induced_coefficients(&t, &[e], &g).unwrap();
            assert_eq!(y.get(e), Some(&int(1)));
        }
    }

    #[test]
    fn cycle_coefficients() {
        for n in 3..=6 {
            let t = parse_tree(&format!("P(e,S({}))", vec!["e"; n - 1].join(","))).unwrap();
            let g = realize_natural(&t).unwrap();
            let tau: Vec<usize> = (1..n).collect();
            let y = induced_coefficients(&t, &tau, &g).unwrap();
            for &e in &tau {
                assert_eq!(y.get(e), Some(&rat(1, n as i64 - 1)));
            }
        }
    }

    #[test]
    fn flipping_an_edge_flips_its_coefficient() {
        let t = parse_tree("P(e,S(e,P(e,e)))").unwrap();
        let tau = [1, 2];
        let g = realize_natural(&t).unwrap();
        let base = induced_coefficients(&t, &tau, &g).unwrap();
        for flip in tau {
            let mut dirs = vec![false; 4];
            dirs[flip] = true;
            let gf = realize(&t, &dirs).unwrap();
            let y = induced_coefficients(&t, &tau, &gf).unwrap();
            for e in tau {
                let expect = if e == flip { -base.get(e).unwrap() } else { base.get(e).unwrap().clone() };
                assert_eq!(y.get(e), Some(&expect));
            }
        }
    }

    #[test]
    fn non_tree_is_rejected() {
        let t = parse_tree("P(e,S(e,e))").unwrap();
        let g = realize_natural(&t).unwrap();
        assert_eq!(induced_coefficients(&t, &[0], &g), Err(Error::NotSpanningTree));
        assert_eq!(induced_coefficients(&t, &[1, 2, 0], &g), Err(Error::NotSpanningTree));
    }

    #[test]
    fn tree_sum_examples() {
        let leaf = SpTree::Leaf(0);
        let w = EdgeWeights::new(vec![rat(7, 3)]).unwrap();
        assert_eq!(
            tree_sums(&leaf, &w).unwrap(),
            TreeSums { t: rat(7, 3), t_prime: int(1) }
        );

        let tri = parse_tree("P(e,S(e,e))").unwrap();
        let expect = TreeSums { t: int(3), t_prime: int(2) };
        assert_eq!(tree_sums(&tri, &EdgeWeights::unit(3)).unwrap(), expect);
        let g = realize_natural(&tri).unwrap();
        assert_eq!(brute_tree_sums(&g, &EdgeWeights::unit(3)).unwrap(), expect);

        let banana = parse_tree("P(e,e,e)").unwrap();
        let w = EdgeWeights::new(vec![int(2), rat(1, 3), int(5)]).unwrap();
        let expect = TreeSums { t: rat(22, 3), t_prime: int(1) };
        assert_eq!(tree_sums(&banana, &w).unwrap(), expect);
        let g = realize_natural(&banana).unwrap();
        assert_eq!(brute_tree_sums(&g, &w).unwrap(), expect);
    }

    #[test]
    fn spanning_tree_counts() {
        let count = |s: &str| spanning_trees(&realize_natural(&parse_tree(s).unwrap()).unwrap()).unwrap().len();
        assert_eq!(count("P(e,S(e,e))"), 3);
        assert_eq!(count("P(e,e,e,e)"), 4);
        assert_eq!(count("P(e,S(e,e,e))"), 4);
    }

    #[test]
    fn proportionality() {
        let a = [int(2), int(4), int(0)];
        let b = [int(1), int(2), int(0)];
        assert_eq!(proportional(&a, &b), Some(int(2)));
        assert_eq!(proportional(&a, &[int(1), int(3), int(0)]), None);
        assert_eq!(proportional(&a, &[int(1), int(2), int(1)]), None);
    }

    #[test]
    fn serialize_weights_as_map() {
        let w = EdgeWeights::new(vec![int(1), rat(3, 4)]).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"0":"1/1","1":"3/4"}"#);
    }
}
