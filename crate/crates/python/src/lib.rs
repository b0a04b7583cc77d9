//! Python bindings for `mcgap`.

use mcgap::cli::MATRIX_FILE_TOL;
use mcgap::report::{CoverageReport, EstimationReport};
use mcgap::simulator::{self, CoverageConfig, Start};
use mcgap::{linalg, EstimateOptions, SquareMatrix, StochasticMatrix};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn py_err(e: mcgap::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<SquareMatrix> {
    SquareMatrix::from_rows(&rows).map_err(py_err)
}

fn stochastic(rows: Vec<Vec<f64>>) -> PyResult<StochasticMatrix> {
    StochasticMatrix::with_tolerance(matrix(rows)?, MATRIX_FILE_TOL).map_err(py_err)
}

fn parse_start(start: Option<usize>) -> Start {
    start.map_or(Start::Stationary, Start::State)
}

/// JSON to Python objects. The strings "inf", "-inf" and "nan" written for
/// non-finite reals come back as floats.
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY.into_pyobject(py)?.into_any(),
            "-inf" => f64::NEG_INFINITY.into_pyobject(py)?.into_any(),
            "nan" => f64::NAN.into_pyobject(py)?.into_any(),
            _ => s.into_pyobject(py)?.into_any(),
        },
        Value::Array(xs) => {
            let items = xs
                .iter()
                .map(|x| to_py(py, x))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn report_to_py<'py, T: serde::Serialize>(
    py: Python<'py>,
    report: &T,
) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A Markov chain with its stationary distribution and spectral gap.
#[pyclass(frozen, name = "ChainModel")]
struct PyChainModel {
    inner: simulator::ChainModel,
}

#[pymethods]
impl PyChainModel {
    /// `up[i] = P(i, i+1)`, `down[i] = P(i+1, i)`.
    #[staticmethod]
    fn birth_death(d: usize, up: Vec<f64>, down: Vec<f64>) -> PyResult<Self> {
        let inner = simulator::birth_death_chain(d, &up, &down).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn weighted_graph(weights: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = simulator::random_walk_on_weighted_graph(&matrix(weights)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (p, allow_nonreversible = false))]
    fn from_matrix(p: Vec<Vec<f64>>, allow_nonreversible: bool) -> PyResult<Self> {
        let inner = simulator::ChainModel::from_matrix(
            stochastic(p)?,
            !allow_nonreversible,
            MATRIX_FILE_TOL,
        )
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn p(&self) -> Vec<Vec<f64>> {
        self.inner.p.matrix().to_rows()
    }

    #[getter]
    fn pi(&self) -> Vec<f64> {
        self.inner.pi.values().to_vec()
    }

    #[getter]
    fn pimin(&self) -> f64 {
        self.inner.pimin()
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    #[getter]
    fn reversible(&self) -> bool {
        self.inner.reversible
    }

    fn kappa(&self) -> PyResult<f64> {
        self.inner.kappa().map_err(py_err)
    }

    /// Sample a path of length `n`; `start=None` draws the first state from pi.
    #[pyo3(signature = (n, seed = 0, start = None))]
    fn sample_path(&self, n: usize, seed: u64, start: Option<usize>) -> PyResult<Vec<usize>> {
        let path =
            simulator::sample_path(&self.inner, n, seed, parse_start(start)).map_err(py_err)?;
        Ok(path.into_states())
    }

    fn __repr__(&self) -> String {
        format!("ChainModel(d={}, gap={})", self.inner.dim(), self.inner.gap)
    }
}

/// Result of `estimate`.
#[pyclass(frozen, name = "Estimate")]
struct PyEstimate {
    inner: mcgap::Estimate,
    d_inferred: bool,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn pi_hat(&self) -> Vec<f64> {
        self.inner.pi_hat.values().to_vec()
    }

    #[getter]
    fn p_hat(&self) -> Vec<Vec<f64>> {
        self.inner.p_hat.matrix().to_rows()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.values().to_vec()
    }

    #[getter]
    fn gap_hat(&self) -> f64 {
        self.inner.gap_hat
    }

    #[getter]
    fn relaxation_time_hat(&self) -> f64 {
        self.inner.relaxation_time_hat()
    }

    #[getter]
    fn tau_hat(&self) -> f64 {
        self.inner.tail.tau
    }

    #[getter]
    fn kappa_hat(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn b_hat(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn rho_hat(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn w_hat(&self) -> f64 {
        self.inner.w
    }

    #[getter]
    fn gap_interval(&self) -> (f64, f64) {
        let iv = self.inner.intervals.gap;
        (iv.lo, iv.hi)
    }

    #[getter]
    fn pi_intervals(&self) -> Vec<(f64, f64)> {
        self.inner
            .intervals
            .pi
            .iter()
            .map(|iv| (iv.lo, iv.hi))
            .collect()
    }

    /// The full report as nested dicts, the same layout as the CLI JSON.
    #[pyo3(signature = (emit_matrix = false))]
    fn to_dict<'py>(&self, py: Python<'py>, emit_matrix: bool) -> PyResult<Bound<'py, PyAny>> {
        report_to_py(
            py,
            &EstimationReport::new(&self.inner, self.d_inferred, emit_matrix, 0.0),
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(n={}, d={}, gap_hat={}, w_hat={})",
            self.inner.n, self.inner.d, self.inner.gap_hat, self.inner.w
        )
    }
}

/// Confidence intervals for pi and the spectral gap from one sample path.
#[pyfunction]
#[pyo3(signature = (path, delta, num_states = None, combined = true, err_constant = mcgap::intervals::combined::DEFAULT_ERR_CONSTANT))]
fn estimate(
    path: Vec<i64>,
    delta: f64,
    num_states: Option<usize>,
    combined: bool,
    err_constant: f64,
) -> PyResult<PyEstimate> {
    let sample = mcgap::validate_path(&path, num_states).map_err(py_err)?;
    let opts = EstimateOptions {
        combined,
        err_constant,
    };
    let inner = mcgap::estimate(&sample, delta, &opts).map_err(py_err)?;
    Ok(PyEstimate {
        inner,
        d_inferred: num_states.is_none(),
    })
}

#[pyfunction]
fn tail_threshold(n: usize, d: usize, delta: f64) -> PyResult<f64> {
    Ok(mcgap::intervals::tail_threshold(n, d, delta)
        .map_err(py_err)?
        .tau)
}

#[pyfunction]
fn stationary_distribution(p: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let pi = linalg::stationary_distribution(&stochastic(p)?).map_err(py_err)?;
    Ok(pi.values().to_vec())
}

/// Group inverse of `I - P`.
#[pyfunction]
fn group_inverse(p: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let p = stochastic(p)?;
    let pi = linalg::stationary_distribution(&p).map_err(py_err)?;
    let x = linalg::group_inverse(&p.laplacian(), &pi).map_err(py_err)?;
    Ok(x.to_rows())
}

/// Eigenvalues of a symmetric matrix, descending.
#[pyfunction]
fn symmetric_eigenvalues(s: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let eigs = linalg::symmetric_eigenvalues(&matrix(s)?).map_err(py_err)?;
    Ok(eigs.values().to_vec())
}

/// Monte-Carlo coverage of the intervals on `model`; returns the report dict.
#[pyfunction]
#[pyo3(signature = (model, n, delta, trials, seed = 0, jobs = 0, start = None, combined = true))]
#[allow(clippy::too_many_arguments)]
fn run_coverage<'py>(
    py: Python<'py>,
    model: &PyChainModel,
    n: usize,
    delta: f64,
    trials: usize,
    seed: u64,
    jobs: usize,
    start: Option<usize>,
    combined: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = CoverageConfig {
        n,
        delta,
        trials,
        master_seed: seed,
        start: parse_start(start),
        jobs,
        options: EstimateOptions {
            combined,
            ..Default::default()
        },
    };
    let summary = py
        .detach(|| simulator::run_coverage(&model.inner, &cfg))
        .map_err(py_err)?;
    report_to_py(py, &CoverageReport::new("python", &summary))
}

#[pymodule]
fn mcgap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChainModel>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(tail_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(group_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(run_coverage, m)?)?;
    Ok(())
}
