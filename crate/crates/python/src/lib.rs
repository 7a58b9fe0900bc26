//! Python bindings: kernels, the partition-of-unity operators on user data and
//! the benchmark experiments.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mls_core::experiments::{
    self, GridKind, GridSpec, Method, OperatorParams, TestFunction,
};
use mls_core::{mls, oracle, selftest, KernelKind, PartitionCover, PuConfig, Samples, WeightKernel};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kernel(name: &str, truncation: f64) -> PyResult<WeightKernel> {
    let kind: KernelKind = name.parse().map_err(value_error)?;
    WeightKernel::with_truncation(kind, truncation).map_err(value_error)
}

fn params(kernel: WeightKernel, degree: usize, gamma: Option<f64>, t: f64, eps: f64) -> OperatorParams {
    let mut p = OperatorParams::new(kernel, degree);
    if let Some(g) = gamma {
        p.gamma = g;
    }
    p.t = t;
    p.eps_weno = eps;
    p
}

fn grid_kind(grid: &str, seed: u64) -> PyResult<GridKind> {
    match grid.to_ascii_lowercase().as_str() {
        "uniform" => Ok(GridKind::Uniform),
        "random" => Ok(GridKind::Random { seed }),
        other => Err(value_error(format!("grid must be 'uniform' or 'random', got '{other}'"))),
    }
}

/// Radial weight function with optional truncation of its tail.
#[pyclass(name = "Kernel", module = "adaptive_mls", frozen)]
struct PyKernel {
    inner: WeightKernel,
}

#[pymethods]
impl PyKernel {
    #[new]
    #[pyo3(signature = (name, truncation = mls_core::kernels::DEFAULT_TRUNCATION))]
    fn new(name: &str, truncation: f64) -> PyResult<Self> {
        Ok(PyKernel {
            inner: parse_kernel(name, truncation)?,
        })
    }

    fn __call__(&self, r: f64) -> f64 {
        self.inner.eval(r)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn is_compact(&self) -> bool {
        self.inner.kind().is_compact()
    }

    #[getter]
    fn effective_radius(&self) -> f64 {
        self.inner.effective_radius()
    }

    fn __repr__(&self) -> String {
        format!("Kernel('{}')", self.inner.kind())
    }
}

/// Linear and nonlinear partition-of-unity approximants of scattered data.
#[pyclass(name = "Cover", module = "adaptive_mls", frozen)]
struct PyCover {
    inner: PartitionCover,
}

#[pymethods]
impl PyCover {
    #[new]
    #[pyo3(signature = (x, f, kernel = "W2", degree = 2, gamma = None, t = 4.0, eps = 1e-14, truncation = mls_core::kernels::DEFAULT_TRUNCATION))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        x: Vec<f64>,
        f: Vec<f64>,
        kernel: &str,
        degree: usize,
        gamma: Option<f64>,
        t: f64,
        eps: f64,
        truncation: f64,
    ) -> PyResult<Self> {
        let kernel = parse_kernel(kernel, truncation)?;
        let p = params(kernel, degree, gamma, t, eps);
        let samples = Samples::new(x, f).map_err(value_error)?;
        let config = PuConfig::new(p.kernel, p.degree, p.gamma).with_t(p.t).with_eps(p.eps_weno);
        let inner = PartitionCover::build(samples, config).map_err(value_error)?;
        Ok(PyCover { inner })
    }

    /// `(linear, nonlinear)` at one point.
    fn __call__(&self, x: f64) -> PyResult<(f64, f64)> {
        let b = self.inner.evaluate(x).map_err(value_error)?;
        Ok((b.value_linear, b.value_nonlinear))
    }

    /// `(linear values, nonlinear values)` at many points.
    fn evaluate(&self, py: Python<'_>, xs: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let evals = py
            .detach(|| experiments::evaluate_many(&self.inner, &xs))
            .map_err(value_error)?;
        Ok(evals.iter().map(|b| (b.value_linear, b.value_nonlinear)).unzip())
    }

    /// Active subdomains at `x` with their linear and nonlinear weights.
    fn weights<'py>(&self, py: Python<'py>, x: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let b = self.inner.evaluate(x).map_err(value_error)?;
        b.terms
            .iter()
            .map(|term| {
                let d = PyDict::new(py);
                d.set_item("k", term.k)?;
                d.set_item("theta", term.theta)?;
                d.set_item("beta", term.beta)?;
                d.set_item("local_value", term.local_value)?;
                Ok(d)
            })
            .collect()
    }

    #[getter]
    fn indicators(&self) -> Vec<f64> {
        self.inner.subdomains().iter().map(|s| s.indicator).collect()
    }

    #[getter]
    fn fill_distance(&self) -> f64 {
        self.inner.fill_distance()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn __len__(&self) -> usize {
        self.inner.subdomains().len()
    }
}

/// MLS coefficients of every node at `x`; scale defaults to the fill distance.
#[pyfunction]
#[pyo3(signature = (x, nodes, weights, degree, scale = None))]
fn mls_coefficients(x: f64, nodes: Vec<f64>, weights: Vec<f64>, degree: usize, scale: Option<f64>) -> PyResult<Vec<f64>> {
    let scale = match scale {
        Some(s) => s,
        None => mls_core::fill_distance(&nodes).map_err(value_error)?.0,
    };
    mls::mls_coefficients_scaled(x, &nodes, &weights, degree, scale).map_err(value_error)
}

/// Same coefficients from the explicit determinant expansion (small problems only).
#[pyfunction]
fn determinant_coefficients(x: f64, nodes: Vec<f64>, weights: Vec<f64>, degree: usize) -> PyResult<Vec<f64>> {
    oracle::determinant_coefficients(x, &nodes, &weights, degree).map_err(value_error)
}

/// Error tables for sin(pi x); returns one dict per method.
#[pyfunction]
#[pyo3(signature = (kernel = "W2", degree = 2, levels = vec![7, 8, 9, 10], grid = "uniform", seed = 0, gamma = None, t = 4.0, eps = 1e-14))]
#[allow(clippy::too_many_arguments)]
fn convergence<'py>(
    py: Python<'py>,
    kernel: &str,
    degree: usize,
    levels: Vec<u32>,
    grid: &str,
    seed: u64,
    gamma: Option<f64>,
    t: f64,
    eps: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let p = params(parse_kernel(kernel, mls_core::kernels::DEFAULT_TRUNCATION)?, degree, gamma, t, eps);
    let grid = grid_kind(grid, seed)?;
    let (lin, nl) = py
        .detach(|| experiments::run_convergence_pair(&p, &levels, grid))
        .map_err(value_error)?;
    [lin, nl]
        .iter()
        .map(|report| {
            let d = PyDict::new(py);
            d.set_item("label", report.label())?;
            d.set_item("method", report.method.to_string())?;
            d.set_item("grid", report.grid)?;
            d.set_item("level", report.rows.iter().map(|r| r.level).collect::<Vec<_>>())?;
            d.set_item("n", report.rows.iter().map(|r| r.n).collect::<Vec<_>>())?;
            d.set_item("h", report.rows.iter().map(|r| r.h).collect::<Vec<_>>())?;
            d.set_item("mae", report.rows.iter().map(|r| r.mae).collect::<Vec<_>>())?;
            d.set_item("rate", report.rows.iter().map(|r| r.rate).collect::<Vec<_>>())?;
            Ok(d)
        })
        .collect()
}

/// Overshoot and away-from-jump error of both operators on `g` or `z`.
#[pyfunction]
#[pyo3(signature = (func = "g", kernel = "W2", degree = 2, level = 9, grid = "uniform", seed = 0))]
fn discontinuity<'py>(
    py: Python<'py>,
    func: &str,
    kernel: &str,
    degree: usize,
    level: u32,
    grid: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let func: TestFunction = func.parse().map_err(value_error)?;
    if !func.has_jump() {
        return Err(value_error(format!("{func} has no jump")));
    }
    let p = params(parse_kernel(kernel, mls_core::kernels::DEFAULT_TRUNCATION)?, degree, None, 4.0, 1e-14);
    let spec: GridSpec = grid_kind(grid, seed)?.at_level(level);
    let result = py
        .detach(|| experiments::run_discontinuity(func, &p, &spec, 0))
        .map_err(value_error)?;
    let d = PyDict::new(py);
    for method in [Method::Linear, Method::Nonlinear] {
        let r = result.report(method);
        let inner = PyDict::new(py);
        inner.set_item("max_overshoot", r.max_overshoot)?;
        inner.set_item("smooth_region_mae", r.smooth_region_mae)?;
        inner.set_item("exclusion_radius", r.exclusion_radius)?;
        d.set_item(method.to_string(), inner)?;
    }
    Ok(d)
}

/// Runs the consistency suites; returns `(name, passed, detail)` tuples.
#[pyfunction]
fn run_selftest(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(|| selftest::run(&selftest::SelftestOptions::default()))
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect()
}

#[pymodule]
fn adaptive_mls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add_class::<PyCover>()?;
    m.add_function(wrap_pyfunction!(mls_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(determinant_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(discontinuity, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
