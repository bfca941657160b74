//! Python bindings: graph classification, Satake evaluation, the
//! verification battery, and cover realizations, mirroring the `lpx` CLI.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use lpx_core::graph::{classify, parse_edge_list, random_regular};
use lpx_core::satake;
use lpx_core::spectral::{self, AnyReport};
use lpx_core::verify::run_full_battery;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// `serde_json::Value` to native Python objects; "inf"/"-inf" strings stay
/// strings (the JSON schema's encoding of infinite exponents).
fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    match value {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_bound_py_any(py)
            } else {
                n.as_f64().unwrap().into_bound_py_any(py)
            }
        }
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

/// A validated finite simple connected graph.
#[pyclass]
struct Graph {
    inner: lpx_core::Graph,
}

#[pymethods]
impl Graph {
    /// Parse the edge-list text format: "u v" per line, '#' comments.
    #[new]
    fn new(edge_list: &str) -> PyResult<Self> {
        Ok(Graph {
            inner: parse_edge_list(edge_list).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.n() {
            return Err(err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.degree(v))
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// "regular", "biregular", or "neither", with the branching parameters.
    fn classification(&self) -> String {
        classify(&self.inner).to_string()
    }

    /// Full spectral report as a dict; raises for Neither-class graphs.
    #[pyo3(signature = (p=None))]
    fn analyze<'py>(&self, py: Python<'py>, p: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let report = spectral::analyze(&self.inner, p).map_err(err)?;
        match report {
            Some(AnyReport::Regular(r)) => json_to_py(py, &r.to_json()),
            Some(AnyReport::Biregular(r)) => json_to_py(py, &r.to_json()),
            None => Err(err(
                "unsupported graph class: neither regular nor biregular",
            )),
        }
    }

    /// Non-backtracking spectrum (2m complex values) of a regular graph.
    fn nb_spectrum(&self) -> PyResult<Vec<Complex64>> {
        spectral::nb_spectrum(&self.inner).map_err(err)
    }

    /// Adjacency eigenvalues as (value, multiplicity) pairs, ascending.
    fn spectrum(&self) -> PyResult<Vec<(f64, usize)>> {
        spectral::symmetric_spectrum(&self.inner).map_err(err)
    }

    fn edge_list(&self) -> String {
        self.inner.to_edge_list_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={}, {})",
            self.inner.n(),
            self.inner.m(),
            classify(&self.inner)
        )
    }
}

/// Numeric `A_k(theta)` for branching `q`.
#[pyfunction]
fn eval_ak(theta: Complex64, k: usize, q: i64) -> PyResult<Complex64> {
    satake::eval_ak(theta, k, q).map_err(err)
}

/// The exact Satake image of `A_k` as a readable Laurent polynomial.
#[pyfunction]
fn satake_ak_str(k: usize, q: i64) -> String {
    satake::satake_ak(k, q).poly.to_string()
}

/// `(dominant, p_star)` for a Satake parameter; `p_star` is `math.inf` at
/// the trivial point.
#[pyfunction]
fn temperedness(theta: Complex64, q: i64) -> PyResult<(f64, f64)> {
    let v = satake::temperedness_exponent(theta, q).map_err(err)?;
    Ok((v.dominant, v.p_star.as_f64()))
}

/// Exact symbolic verification of the distance-operator recurrence up to
/// `k_max`.
#[pyfunction]
fn hecke_symbolic_ok(k_max: usize, q: i64) -> bool {
    satake::verify_hecke_symbolic(k_max, q).all_pass()
}

/// Edge-list text of a random simple connected d-regular graph.
#[pyfunction]
fn gen_regular(n: usize, d: usize, seed: u64) -> PyResult<String> {
    Ok(random_regular(n, d, seed).map_err(err)?.to_edge_list_text())
}

/// Shell-growth measurement of the spherical eigenfunction on a truncated
/// cover of the graph, next to the analytic verdict.
#[pyfunction]
#[pyo3(signature = (edge_list, theta, p, radius=10))]
fn realize<'py>(
    py: Python<'py>,
    edge_list: &str,
    theta: Complex64,
    p: f64,
    radius: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_edge_list(edge_list).map_err(err)?;
    let report =
        spectral::realize_growth(&g, theta, p, radius, lpx_core::cover::DEFAULT_VERTEX_CAP)
            .map_err(err)?;
    json_to_py(py, &report.to_json())
}

/// Run the full verification battery; returns the JSON summary as a dict.
#[pyfunction]
#[pyo3(signature = (edge_list=None))]
fn verify_summary<'py>(py: Python<'py>, edge_list: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let extra = match edge_list {
        Some(text) => Some(parse_edge_list(text).map_err(err)?),
        None => None,
    };
    let summary = run_full_battery(extra.as_ref());
    json_to_py(py, &summary.to_json())
}

/// Relation-suite report for one graph as a dict.
#[pyfunction]
fn relation_report<'py>(py: Python<'py>, edge_list: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_edge_list(edge_list).map_err(err)?;
    let report = lpx_core::hecke::relation_suite(&g).map_err(err)?;
    json_to_py(py, &report.to_json())
}

#[pymodule]
fn lpx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(eval_ak, m)?)?;
    m.add_function(wrap_pyfunction!(satake_ak_str, m)?)?;
    m.add_function(wrap_pyfunction!(temperedness, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_symbolic_ok, m)?)?;
    m.add_function(wrap_pyfunction!(gen_regular, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(verify_summary, m)?)?;
    m.add_function(wrap_pyfunction!(relation_report, m)?)?;
    Ok(())
}
