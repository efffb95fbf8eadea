//! Python bindings. Reports come back as plain dicts built from the JSON form.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use pseudoherm::analysis::{
    ground_state_closed_form, integrability_classifier, polynomial_eigenfunctions, run_suite, spectrum_compare,
    verify_zero_mode, SpectrumOptions, SuiteOptions,
};
use pseudoherm::lattice::Grid;
use pseudoherm::opalg::{
    adjoint, build_class_hamiltonian, commutator, derive_metric as derive, hermitian_equivalent as image,
    normal_order_product, pseudo_hermiticity_residual,
};
use pseudoherm::{format, parse, OperatorPolynomial, Variant};

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(PyValueError::new_err)
}

fn runtime<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn value<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A normal-ordered polynomial in x, p and g with exact complex-rational coefficients.
#[pyclass(name = "Operator", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyOperator {
    inner: OperatorPolynomial,
}

#[pymethods]
impl PyOperator {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text).map(|inner| Self { inner }).map_err(value)
    }

    #[staticmethod]
    #[pyo3(signature = (epsilon, variant = "plain"))]
    fn hamiltonian(epsilon: i32, variant: &str) -> PyResult<Self> {
        Ok(Self { inner: build_class_hamiltonian(epsilon, self::variant(variant)?) })
    }

    fn __str__(&self) -> String {
        format(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Operator('{}')", format(&self.inner))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self { inner: &self.inner + &other.inner }
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self { inner: &self.inner - &other.inner }
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self { inner: normal_order_product(&self.inner, &other.inner) }
    }

    fn __neg__(&self) -> Self {
        Self { inner: -&self.inner }
    }

    fn commutator(&self, other: &Self) -> Self {
        Self { inner: commutator(&self.inner, &other.inner) }
    }

    fn adjoint(&self) -> Self {
        Self { inner: adjoint(&self.inner) }
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// The metric exponent Q for the given epsilon, rendered exactly.
#[pyfunction]
fn derive_metric(epsilon: i32) -> PyResult<String> {
    derive(epsilon).map(|q| q.to_string()).map_err(runtime)
}

#[pyfunction]
#[pyo3(signature = (epsilon, variant = "plain"))]
fn hermitian_equivalent(epsilon: i32, variant: &str) -> PyResult<PyOperator> {
    image(epsilon, self::variant(variant)?).map(|inner| PyOperator { inner }).map_err(runtime)
}

/// `exp(-Q) H exp(Q) - H^dagger` with the derived Q; the zero operator certifies the metric.
#[pyfunction]
#[pyo3(signature = (epsilon, variant = "plain"))]
fn metric_residual(epsilon: i32, variant: &str) -> PyResult<PyOperator> {
    let q = derive(epsilon).map_err(runtime)?;
    let h = build_class_hamiltonian(epsilon, self::variant(variant)?);
    Ok(PyOperator { inner: pseudo_hermiticity_residual(&q, &h) })
}

#[pyfunction]
#[pyo3(signature = (epsilon, g, n = 2000, l = 10.0, k = 8, variant = "plain"))]
fn spectrum<'py>(
    py: Python<'py>,
    epsilon: i32,
    g: f64,
    n: usize,
    l: f64,
    k: usize,
    variant: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let grid = Grid::new(l, n).map_err(value)?;
    let opts = SpectrumOptions { k, variant: self::variant(variant)?, ..Default::default() };
    let report = py.detach(|| spectrum_compare(epsilon, g, &grid, &opts)).map_err(runtime)?;
    to_py(py, &report)
}

#[pyfunction]
fn ground_state<'py>(py: Python<'py>, epsilon: i32, g: f64) -> PyResult<Bound<'py, PyAny>> {
    match ground_state_closed_form(epsilon, g) {
        Ok(gs) => to_py(py, &gs),
        Err(_) => {
            let verdict = integrability_classifier(epsilon, g).map_err(value)?;
            to_py(py, &serde_json::json!({ "epsilon": epsilon, "g": g, "verdict": verdict }))
        }
    }
}

#[pyfunction]
fn zero_mode<'py>(py: Python<'py>, epsilon: i32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &verify_zero_mode(epsilon).map_err(runtime)?)
}

#[pyfunction]
#[pyo3(signature = (epsilon, g, dmax = 8))]
fn polynomial_eigenpairs<'py>(py: Python<'py>, epsilon: i32, g: f64, dmax: usize) -> PyResult<Bound<'py, PyAny>> {
    if dmax > 64 {
        return Err(PyValueError::new_err("dmax must be at most 64"));
    }
    to_py(py, &polynomial_eigenfunctions(epsilon, g, dmax))
}

#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn verify<'py>(py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let summary = py.detach(|| run_suite(&SuiteOptions { seed, inject_wrong_metric: false }));
    to_py(py, &summary)
}

#[pymodule(name = "pseudoherm")]
pub fn pseudoherm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(derive_metric, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(metric_residual, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(zero_mode, m)?)?;
    m.add_function(wrap_pyfunction!(polynomial_eigenpairs, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
