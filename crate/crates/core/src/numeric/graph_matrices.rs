//! Incidence matrix, Laplacian, pseudoinverse, transfer current matrix and
//! the orthogonal projection onto the scaled star space.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{int, to_f64, FMatrix, RMatrix};
use crate::error::{Error, Result};
use crate::sp::MultiGraph;
use crate::weights::{spanning_trees, EdgeWeights};

/// Vertex-by-edge incidence matrix: column `e` has `+1` at the head and
/// `−1` at the tail.
pub fn incidence_matrix(graph: &MultiGraph) -> RMatrix {
    let mut b = RMatrix::zeros(graph.vertex_count(), graph.edge_count());
    for (e, edge) in graph.edges().iter().enumerate() {
        b[(edge.head, e)] += int(1);
        b[(edge.tail, e)] -= int(1);
    }
    b
}

fn check_weights(b: &RMatrix, w: &EdgeWeights) -> Result<()> {
    if b.cols() != w.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} edges",
            w.len(),
            b.cols()
        )));
    }
    Ok(())
}

/// `L = B W Bᵀ`.
pub fn laplacian(b: &RMatrix, w: &EdgeWeights) -> Result<RMatrix> {
    check_weights(b, w)?;
    let bw = RMatrix::from_fn(b.rows(), b.cols(), |i, e| &b[(i, e)] * w.get(e));
    Ok(&bw * &b.transpose())
}

/// Moore-Penrose inverse of a connected graph's Laplacian via
/// `L⁺ = (L + J/m)⁻¹ − J/m`.
pub fn pinv_laplacian(l: &RMatrix) -> Result<RMatrix> {
    let m = l.rows();
    if m != l.cols() || m == 0 {
        return Err(Error::Dimension("Laplacian must be square and non-empty".into()));
    }
    let j_over_m = RMatrix::from_fn(m, m, |_, _| BigRational::new(1.into(), (m as i64).into()));
    let shifted = l.add(&j_over_m).inverse()?;
    Ok(shifted.sub(&j_over_m))
}

/// Transfer current matrix `Y = W Bᵀ L⁺ B`.
pub fn transfer_current(b: &RMatrix, w: &EdgeWeights) -> Result<RMatrix> {
    let lp = pinv_laplacian(&laplacian(b, w)?)?;
    let bt = b.transpose();
    let wbt = RMatrix::from_fn(bt.rows(), bt.cols(), |e, i| w.get(e) * &bt[(e, i)]);
    Ok(&(&wbt * &lp) * b)
}

/// Edges on the unique path from `from` to `to` inside the spanning tree,
/// each with `true` when traversed tail to head.
fn tree_path(graph: &MultiGraph, tree: &[usize], from: usize, to: usize) -> Vec<(usize, bool)> {
    let m = graph.vertex_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for &e in tree {
        let edge = graph.edge(e);
        adj[edge.tail].push((edge.head, e));
        adj[edge.head].push((edge.tail, e));
    }
    let mut via: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut seen = vec![false; m];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                via[v] = Some((u, e));
                stack.push(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let (prev, e) = via[at].expect("spanning tree reaches every vertex");
        path.push((e, graph.edge(e).tail == prev));
        at = prev;
    }
    path.reverse();
    path
}

/// Transfer current matrix from spanning-tree sums:
/// `Y[e][f] = (T⁺ − T⁻)/T`, where `T±` sum the weights of spanning trees
/// whose path from f's tail to f's head crosses `e` forwards/backwards.
/// In particular `Y[e][e] = T_{e+}/T`.
pub fn transfer_current_combinatorial(graph: &MultiGraph, w: &EdgeWeights) -> Result<RMatrix> {
    let n = graph.edge_count();
    if w.len() != n {
        return Err(Error::Dimension("weights do not match edges".into()));
    }
    let mut y = RMatrix::zeros(n, n);
    let mut total = BigRational::zero();
    for tree in spanning_trees(graph)? {
        let weight = tree.iter().fold(BigRational::one(), |a, &e| a * w.get(e));
        for f in 0..n {
            let edge = graph.edge(f);
            for (e, forward) in tree_path(graph, &tree, edge.tail, edge.head) {
                if forward {
                    y[(e, f)] += &weight;
                } else {
                    y[(e, f)] -= &weight;
                }
            }
        }
        total += weight;
    }
    if total.is_zero() {
        return Err(Error::Singular);
    }
    Ok(y.scale(&total.recip()))
}

/// `√(a)` for a positive rational, in floating point.
pub(crate) fn sqrt_f64(a: &BigRational) -> f64 {
    to_f64(a).sqrt()
}

/// `𝒫 = W^{1/2} Bᵀ L⁺ B W^{1/2}`, computed from the exact `Y` as
/// `𝒫[e][f] = √(w_f / w_e) · Y[e][f]`.
pub fn projection(b: &RMatrix, w: &EdgeWeights) -> Result<FMatrix> {
    Ok(projection_from_transfer(&transfer_current(b, w)?, w))
}

pub fn projection_from_transfer(y: &RMatrix, w: &EdgeWeights) -> FMatrix {
    let n = y.rows();
    let mut p = FMatrix::from_fn(n, n, |e, f| {
        if y[(e, f)].is_zero() {
            0.0
        } else {
            sqrt_f64(&(w.get(f) / w.get(e))) * to_f64(&y[(e, f)])
        }
    });
    // the exact matrix is symmetric; average away rounding asymmetry
    for e in 0..n {
        for f in 0..e {
            let v = 0.5 * (p[(e, f)] + p[(f, e)]);
            p[(e, f)] = v;
            p[(f, e)] = v;
        }
    }
    p
}

/// Entrywise `Y[e][f] · Y[f][e]`, which equals `𝒫[e][f]²` exactly.
pub fn squared_projection(y: &RMatrix) -> RMatrix {
    RMatrix::from_fn(y.rows(), y.cols(), |e, f| &y[(e, f)] * &y[(f, e)])
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::sp::{parse_tree, realize, realize_natural, Edge};
    use num_traits::Signed;

    fn graph(s: &str) -> MultiGraph {
        realize_natural(&parse_tree(s).unwrap()).unwrap()
    }

    /// Checks the four Penrose conditions exactly.
    fn assert_penrose(a: &RMatrix, p: &RMatrix) {
        assert_eq!(&(a * p) * a, *a);
        assert_eq!(&(p * a) * p, *p);
        assert!((a * p).is_symmetric());
        assert!((p * a).is_symmetric());
    }

    #[test]
    fn incidence_of_single_edge() {
        let g = MultiGraph::new(2, vec![Edge { tail: 0, head: 1 }], (0, 1)).unwrap();
        let b = incidence_matrix(&g);
        assert_eq!(b[(0, 0)], int(-1));
        assert_eq!(b[(1, 0)], int(1));
    }

    #[test]
    fn laplacian_examples() {
        let g = graph("P(e,e,e)");
        let l = laplacian(&incidence_matrix(&g), &EdgeWeights::unit(3)).unwrap();
        assert_eq!(l, RMatrix::from_rows(vec![vec![int(3), int(-3)], vec![int(-3), int(3)]]).unwrap());

        let g = graph("P(e,S(e,e))");
        let l = laplacian(&incidence_matrix(&g), &EdgeWeights::unit(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], if i == j { int(2) } else { int(-1) });
            }
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let l = RMatrix::from_rows(vec![vec![int(1), int(-1)], vec![int(-1), int(1)]]).unwrap();
        let p = pinv_laplacian(&l).unwrap();
        assert_eq!(p[(0, 0)], rat(1, 4));
        assert_eq!(p[(0, 1)], rat(-1, 4));
        assert_penrose(&l, &p);

        for n in 2..=5i64 {
            let ln = l.scale(&int(n));
            let p = pinv_laplacian(&ln).unwrap();
            assert_eq!(p[(0, 0)], rat(1, 4 * n));
            assert_penrose(&ln, &p);
        }
    }

    #[test]
    fn pseudoinverse_of_disconnected_graph_is_singular() {
        let g = MultiGraph::new(3, vec![Edge { tail: 0, head: 1 }], (0, 1)).unwrap();
        let l = laplacian(&incidence_matrix(&g), &EdgeWeights::unit(1)).unwrap();
        assert_eq!(pinv_laplacian(&l), Err(Error::Singular));
    }

    #[test]
    fn banana_two_transfer_current() {
        let g = graph("P(e,e)");
        let b = incidence_matrix(&g);
        let w = EdgeWeights::unit(2);
        let y = transfer_current(&b, &w).unwrap();
        let half = rat(1, 2);
        assert!((0..2).all(|i| (0..2).all(|j| y[(i, j)] == half)));
        assert_eq!(transfer_current_combinatorial(&g, &w).unwrap(), y);
    }

    #[test]
    fn triangle_transfer_current_for_directed_cycle() {
        // e0 reversed closes the directed cycle l -> m -> r -> l
        let t = parse_tree("P(e,S(e,e))").unwrap();
        let g = realize(&t, &[true, false, false]).unwrap();
        let y = transfer_current(&incidence_matrix(&g), &EdgeWeights::unit(3)).unwrap();
        let expect = RMatrix::from_fn(3, 3, |i, j| if i == j { rat(2, 3) } else { rat(-1, 3) });
        assert_eq!(y, expect);
        let p = projection(&incidence_matrix(&g), &EdgeWeights::unit(3)).unwrap();
        assert!(p.sub(&expect.to_f64()).max_abs() < 1e-15);
    }

    #[test]
    fn combinatorial_diagonal_in_open_unit_interval() {
        let g = graph("P(e,S(e,P(e,e)))");
        let y = transfer_current_combinatorial(&g, &EdgeWeights::unit(4)).unwrap();
        for e in 0..4 {
            assert!(y[(e, e)].is_positive() && y[(e, e)] < int(1));
        }
    }
}
