use num_complex::Complex64;
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lrtrace::asymptotics::{self, Mutation};
use lrtrace::edge_weights::{self, Preset, Sign};
use lrtrace::skein_trace::{self, CloudSource, QdlParams};
use lrtrace::special_functions::{self as sf, Hbar};
use lrtrace::verify;
use lrtrace::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow { .. } | Error::ResourceLimit(_) => PyOverflowError::new_err(e.to_string()),
        Error::QuadratureNonconvergence { .. } | Error::Residual { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn hbar(h: f64) -> PyResult<Hbar> {
    Hbar::new(h).map_err(py_err)
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

#[pyfunction]
fn lobachevsky(theta: f64) -> f64 {
    sf::lobachevsky(theta)
}

#[pyfunction]
fn dilog(z: Complex64) -> PyResult<Complex64> {
    sf::dilog(z).map_err(py_err)
}

#[pyfunction]
fn small_qdl(z: Complex64, h: f64) -> PyResult<Complex64> {
    sf::small_qdl(z, hbar(h)?).map_err(py_err)
}

#[pyfunction]
fn big_qdl(z: Complex64, h: f64) -> PyResult<Complex64> {
    sf::big_qdl(z, hbar(h)?).map_err(py_err)
}

#[pyfunction]
fn big_qdl_log(z: Complex64, h: f64) -> PyResult<Complex64> {
    sf::big_qdl_log(z, hbar(h)?).map_err(py_err)
}

#[pyfunction]
fn volume_figure_eight() -> f64 {
    asymptotics::volume_figure_eight()
}

/// Periodic `LR` edge weights together with their logarithmic lift.
#[pyclass(name = "LogLift", from_py_object)]
#[derive(Clone)]
struct PyLogLift {
    system: Option<edge_weights::PeriodicWeightSystem>,
    lift: edge_weights::LogLift,
}

#[pymethods]
impl PyLogLift {
    /// `b0` plus sign `"+"`/`"-"`, or a preset name via `LogLift.preset`.
    #[new]
    #[pyo3(signature = (b0, sign = "+", branches = (0, 0, 0)))]
    fn new(b0: Complex64, sign: &str, branches: (i64, i64, i64)) -> PyResult<Self> {
        let sign: Sign = parse(sign)?;
        let sys = edge_weights::solve_periodic(b0, sign).map_err(py_err)?;
        let theta = edge_weights::default_theta(&sys.triples[0]);
        let lift = edge_weights::lift_logarithms(&sys, theta, [branches.0, branches.1, branches.2])
            .map_err(py_err)?;
        Ok(Self { system: Some(sys), lift })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let (sys, lift) = parse::<Preset>(name)?.lr_lift().map_err(py_err)?;
        Ok(Self { system: Some(sys), lift })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let lift = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { system: None, lift })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.lift).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter(A)]
    fn a(&self) -> Vec<Complex64> {
        self.lift.a.to_vec()
    }
    #[getter(B)]
    fn b(&self) -> Vec<Complex64> {
        self.lift.b.to_vec()
    }
    #[getter(C)]
    fn c(&self) -> Vec<Complex64> {
        self.lift.c.to_vec()
    }
    #[getter(V)]
    fn v(&self) -> Vec<Complex64> {
        self.lift.v.to_vec()
    }
    #[getter]
    fn windings(&self) -> (i64, i64, i64) {
        (self.lift.l_hat, self.lift.m_hat, self.lift.n_hat)
    }
    /// Edge weights `(a, b, c)` at the three stages, if known.
    #[getter]
    fn weights(&self) -> Option<Vec<(Complex64, Complex64, Complex64)>> {
        self.system
            .as_ref()
            .map(|s| s.triples.iter().map(|t| (t.a, t.b, t.c)).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "LogLift(windings=({}, {}, {}), A0={})",
            self.lift.l_hat, self.lift.m_hat, self.lift.n_hat, self.lift.a[0]
        )
    }
}

#[pyclass(name = "TraceResult", frozen, get_all)]
struct PyTraceResult {
    n: u64,
    congruence: u64,
    modulus: Option<f64>,
    log_modulus: f64,
    log_modulus_over_n: f64,
    dq_1: f64,
    dq_2: f64,
}

#[pymethods]
impl PyTraceResult {
    fn __repr__(&self) -> String {
        format!("TraceResult(n={}, log_modulus_over_n={})", self.n, self.log_modulus_over_n)
    }
}

#[pyfunction]
fn trace_lr(lift: &PyLogLift, n: u64) -> PyResult<PyTraceResult> {
    let t = skein_trace::trace_lr(&lift.lift, n).map_err(py_err)?;
    Ok(PyTraceResult {
        n: t.n,
        congruence: t.congruence,
        modulus: t.modulus,
        log_modulus: t.log_modulus,
        log_modulus_over_n: t.log_modulus_over_n,
        dq_1: t.components.dq_1,
        dq_2: t.components.dq_2,
    })
}

#[pyfunction]
#[pyo3(signature = (lift, n, mutation = "none"))]
fn trace_ratio(lift: &PyLogLift, n: u64, mutation: &str) -> PyResult<f64> {
    asymptotics::trace_ratio(&lift.lift, n, parse::<Mutation>(mutation)?).map_err(py_err)
}

fn params(big_u: Complex64, big_v: Option<Complex64>, n: u64) -> PyResult<QdlParams> {
    match big_v {
        Some(v) => QdlParams::new(big_u, v, n),
        None => QdlParams::from_u(big_u, n),
    }
    .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (big_u, n, k_hat, big_v = None))]
fn sigma_sum(big_u: Complex64, n: u64, k_hat: i64, big_v: Option<Complex64>) -> PyResult<Complex64> {
    skein_trace::sigma_sum(&params(big_u, big_v, n)?, k_hat).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (big_u, n, k_hat, big_v = None, mutation = "none"))]
fn sigma_ratio(
    big_u: Complex64,
    n: u64,
    k_hat: i64,
    big_v: Option<Complex64>,
    mutation: &str,
) -> PyResult<f64> {
    asymptotics::sigma_ratio(&params(big_u, big_v, n)?, k_hat, parse::<Mutation>(mutation)?)
        .map_err(py_err)
}

/// `(1/n) log |D(q e^{-A/n})|`
#[pyfunction]
fn dq(a: Complex64, n: u64) -> PyResult<f64> {
    skein_trace::dq_rearranged(a, n).map_err(py_err)
}

#[pyfunction]
fn d_n_limit(a: Complex64, n_mod_4: u64) -> PyResult<f64> {
    asymptotics::d_n_limit(a, n_mod_4).map_err(py_err)
}

/// Summands of `Sigma_n` as `(indices, values)`.
#[pyfunction]
#[pyo3(signature = (big_u, n, k_hat, big_v = None))]
fn sigma_cloud(
    big_u: Complex64,
    n: u64,
    k_hat: i64,
    big_v: Option<Complex64>,
) -> PyResult<(Vec<u64>, Vec<Complex64>)> {
    let cloud = skein_trace::term_cloud(&CloudSource::Sigma { params: params(big_u, big_v, n)?, k_hat })
        .map_err(py_err)?;
    Ok((cloud.indices.iter().map(|i| i[0]).collect(), cloud.values))
}

/// Runs the acceptance criteria; returns `(id, name, passed, detail)` rows.
#[pyfunction]
#[pyo3(signature = (only = None, mutation = "none"))]
fn run_verify(only: Option<String>, mutation: &str) -> PyResult<Vec<(u32, String, bool, String)>> {
    let report = verify::run(&verify::VerifyOptions {
        only,
        mutation: parse(mutation)?,
        figure_dir: None,
    });
    Ok(report.criteria.into_iter().map(|c| (c.id, c.name, c.passed, c.detail)).collect())
}

#[pymodule]
fn lrtrace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLogLift>()?;
    m.add_class::<PyTraceResult>()?;
    m.add_function(wrap_pyfunction!(lobachevsky, m)?)?;
    m.add_function(wrap_pyfunction!(dilog, m)?)?;
    m.add_function(wrap_pyfunction!(small_qdl, m)?)?;
    m.add_function(wrap_pyfunction!(big_qdl, m)?)?;
    m.add_function(wrap_pyfunction!(big_qdl_log, m)?)?;
    m.add_function(wrap_pyfunction!(volume_figure_eight, m)?)?;
    m.add_function(wrap_pyfunction!(trace_lr, m)?)?;
    m.add_function(wrap_pyfunction!(trace_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_sum, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(dq, m)?)?;
    m.add_function(wrap_pyfunction!(d_n_limit, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_cloud, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
