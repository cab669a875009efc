//! Python bindings: decomposition trees, induced weights, the exact
//! verification of an instance, class counting and the randomized search.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use extremal_core::extremal::{self as ext, ExtremalInstance};
use extremal_core::numeric::{self, format_rational, FMatrix, Subspace};
use extremal_core::search::{self, SearchConfig};
use extremal_core::sp::{self, SpTree};
use extremal_core::weights;

fn err(e: extremal_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializable value to plain Python objects through `json.loads`.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn subspace_from_rows(rows: Vec<Vec<f64>>) -> PyResult<Subspace> {
    let m = FMatrix::from_rows(&rows).map_err(err)?;
    numeric::orthonormalize(&m).map_err(err)
}

/// A series-parallel decomposition tree.
#[pyclass(name = "Tree", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTree {
    inner: SpTree,
}

#[pymethods]
impl PyTree {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyTree {
            inner: sp::parse_tree(text).map_err(err)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Tree(\"{}\")", self.inner)
    }

    fn __eq__(&self, other: &PyTree) -> bool {
        self.inner == other.inner
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Edge ids in leaf order.
    fn leaves(&self) -> Vec<usize> {
        self.inner.leaves()
    }

    fn is_two_sp(&self) -> bool {
        self.inner.is_two_sp()
    }

    fn canonical(&self) -> PyTree {
        PyTree {
            inner: self.inner.canonicalize(),
        }
    }

    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    /// Tree of the dual graph, on the same edge ids.
    fn dual(&self) -> PyResult<PyTree> {
        Ok(PyTree {
            inner: sp::dual_two_sp(&self.inner).map_err(err)?,
        })
    }

    /// Induced weights as "p/q" strings indexed by edge id.
    fn weights(&self) -> PyResult<Vec<String>> {
        let w = weights::induced_weights(&self.inner).map_err(err)?;
        Ok(w.as_slice().iter().map(format_rational).collect())
    }
}

#[pyfunction]
fn parse_tree(text: &str) -> PyResult<PyTree> {
    PyTree::new(text)
}

/// Canonical rooted 2-sp trees with `n` edges and rank `k`.
#[pyfunction]
fn enumerate(n: usize, k: usize) -> Vec<PyTree> {
    sp::enumerate_rooted(n, k)
        .into_iter()
        .map(|inner| PyTree { inner })
        .collect()
}

#[pyfunction]
fn induced_weights(text: &str) -> PyResult<Vec<String>> {
    PyTree::new(text)?.weights()
}

#[pyfunction]
fn count_classes(n: usize, k: usize) -> PyResult<usize> {
    ext::count_classes(n, k).map_err(err)
}

/// The weighted star space of a realized 2-sp tree with its exact
/// matrices.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: ExtremalInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (tree, directions=None))]
    fn new(tree: &PyTree, directions: Option<Vec<bool>>) -> PyResult<Self> {
        let d = directions.unwrap_or_else(|| vec![false; tree.inner.edge_count()]);
        Ok(PyInstance {
            inner: ext::build(&tree.inner, &d).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn weights(&self) -> Vec<String> {
        self.inner.weights.as_slice().iter().map(format_rational).collect()
    }

    /// Edges as (tail, head) pairs.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.graph.edges().iter().map(|e| (e.tail, e.head)).collect()
    }

    /// Exact transfer current matrix as "p/q" strings.
    fn transfer(&self) -> Vec<Vec<String>> {
        let y = &self.inner.transfer;
        (0..y.rows())
            .map(|i| (0..y.cols()).map(|j| format_rational(&y[(i, j)])).collect())
            .collect()
    }

    fn projection(&self) -> Vec<Vec<f64>> {
        self.inner.projection.to_rows()
    }

    /// Orthonormal basis of the star space, n rows of k entries.
    fn basis(&self) -> Vec<Vec<f64>> {
        self.inner.subspace.basis().to_rows()
    }

    /// `(angle, cos, subset)` of the closest coordinate subspace.
    fn target(&self) -> PyResult<(f64, f64, Vec<usize>)> {
        let t = numeric::target(&self.inner.subspace).map_err(err)?;
        Ok((t.angle, t.cos, t.subset))
    }

    fn check_eigen(&self, tau: Vec<usize>) -> PyResult<bool> {
        ext::check_eigen(&self.inner, &tau).map_err(err)
    }

    fn check_degenerate(&self, subset: Vec<usize>) -> bool {
        ext::check_degenerate(&self.inner, &subset)
    }

    #[pyo3(signature = (tol=ext::DEFAULT_TARGET_TOL))]
    fn check_target(&self, tol: f64) -> PyResult<bool> {
        ext::check_target(&self.inner, tol).map_err(err)
    }

    #[pyo3(signature = (tol=ext::DEFAULT_TARGET_TOL))]
    fn check_dual<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ext::check_dual(&self.inner, tol).map_err(err)?)
    }

    /// Every check, as a dict.
    #[pyo3(signature = (tol=ext::DEFAULT_TARGET_TOL))]
    fn verify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ext::verify(&self.inner, tol).map_err(err)?)
    }

    fn class_key<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ext::class_key(&self.inner))
    }
}

/// `(angle, cos, subset)` for the column space of an n×k matrix.
#[pyfunction]
fn target(rows: Vec<Vec<f64>>) -> PyResult<(f64, f64, Vec<usize>)> {
    let t = numeric::target(&subspace_from_rows(rows)?).map_err(err)?;
    Ok((t.angle, t.cos, t.subset))
}

#[pyfunction]
fn principal_angles(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    numeric::principal_angles(&subspace_from_rows(a)?, &subspace_from_rows(b)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b, tol=1e-3))]
fn symmetry_equivalent(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, tol: f64) -> PyResult<bool> {
    Ok(search::symmetry_equivalent(
        &subspace_from_rows(a)?,
        &subspace_from_rows(b)?,
        tol,
    ))
}

/// Accumulates extremal subspaces; returns the outcome as a dict.
#[pyfunction]
#[pyo3(signature = (n, k, seed, attempts=None, eps=None, decay=None, max_steps=None))]
fn accumulate<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    seed: u64,
    attempts: Option<usize>,
    eps: Option<f64>,
    decay: Option<f64>,
    max_steps: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = SearchConfig::default();
    let cfg = SearchConfig {
        seed,
        attempts: attempts.unwrap_or(d.attempts),
        eps: eps.unwrap_or(d.eps),
        decay: decay.unwrap_or(d.decay),
        max_steps: max_steps.unwrap_or(d.max_steps),
        ..d
    };
    let out = py
        .detach(|| search::accumulate(n, k, &cfg))
        .map_err(err)?;
    to_py(py, &out)
}

#[pymodule]
fn extremal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(parse_tree, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(induced_weights, m)?)?;
    m.add_function(wrap_pyfunction!(count_classes, m)?)?;
    m.add_function(wrap_pyfunction!(target, m)?)?;
    m.add_function(wrap_pyfunction!(principal_angles, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(accumulate, m)?)?;
    Ok(())
}
