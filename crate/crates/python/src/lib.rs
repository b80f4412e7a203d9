use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use netkit::boundary_layer::{self, BLEQ_COEFF};
use netkit::coarse_markov::{self, RateMatrix};
use netkit::geometry;
use netkit::harness::{self, Case, ParamValue};
use netkit::mc_engine::SimParams;
use netkit::NetError;

fn to_py(e: NetError) -> PyErr {
    match e {
        NetError::Estimation(_) | NetError::Quadrature(_) | NetError::StepSize(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[derive(FromPyObject)]
enum Param {
    Num(f64),
    List(Vec<f64>),
}

fn params(raw: BTreeMap<String, Param>) -> BTreeMap<String, ParamValue> {
    raw.into_iter()
        .map(|(k, v)| {
            let v = match v {
                Param::Num(x) => ParamValue::Num(x),
                Param::List(x) => ParamValue::List(x),
            };
            (k, v)
        })
        .collect()
}

fn case(name: &str) -> PyResult<Case> {
    name.parse().map_err(to_py)
}

/// Names accepted by predict and simulate.
#[pyfunction]
fn cases() -> Vec<&'static str> {
    Case::all().map(|c| c.name()).collect()
}

/// Asymptotic prediction for a named case: (formula_id, tau, epsilon_like).
#[pyfunction]
#[pyo3(signature = (case_name, params = BTreeMap::new()))]
fn predict(case_name: &str, params: BTreeMap<String, Param>) -> PyResult<(String, f64, Option<f64>)> {
    let p = harness::predict_case(case(case_name)?, &self::params(params)).map_err(to_py)?;
    Ok((p.formula_id, p.tau, p.epsilon_like))
}

/// Monte Carlo estimate: dict with mean, stderr, n_paths, n_censored and,
/// for multi-neck cases, exit probabilities under "p0", "p1", ...
#[pyfunction]
#[pyo3(signature = (case_name, params = BTreeMap::new(), dt = 1e-4, n_paths = 10_000, seed = 1, max_time = 1e4, adaptive = true, refine_factor = 16, workers = None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    case_name: &str,
    params: BTreeMap<String, Param>,
    dt: f64,
    n_paths: usize,
    seed: u64,
    max_time: f64,
    adaptive: bool,
    refine_factor: u32,
    workers: Option<usize>,
) -> PyResult<BTreeMap<String, f64>> {
    let c = case(case_name)?;
    let p = self::params(params);
    let sim = SimParams { dt, n_paths, seed, max_time, adaptive, refine_factor, workers };
    let out = py.detach(|| harness::simulate_case(c, &p, &sim)).map_err(to_py)?;
    let e = &out.estimate;
    let mut d = BTreeMap::from([
        ("mean".to_string(), e.mean),
        ("stderr".to_string(), e.stderr),
        ("n_paths".to_string(), e.n_paths as f64),
        ("n_censored".to_string(), e.n_censored as f64),
        ("dt".to_string(), e.dt),
    ]);
    if let Some(probs) = &out.exit_probs {
        for (i, q) in probs.probs.iter().enumerate() {
            d.insert(format!("p{i}"), *q);
        }
    }
    Ok(d)
}

/// Boundary-layer solution: (xi, Y, asymptote, wronskian_drift).
#[pyfunction]
#[pyo3(signature = (y0, dy0, xi_max, coeff = BLEQ_COEFF))]
fn solve_bleq(y0: f64, dy0: f64, xi_max: f64, coeff: f64) -> PyResult<(Vec<f64>, Vec<f64>, f64, f64)> {
    let s = boundary_layer::solve_bleq(y0, dy0, xi_max, coeff).map_err(to_py)?;
    Ok((s.grid, s.y, s.asymptote, s.wronskian_drift))
}

#[pyfunction]
fn telegraph_eigen(rate_ab: f64, rate_ba: f64) -> PyResult<f64> {
    Ok(coarse_markov::telegraph_eigen(rate_ab, rate_ba).map_err(to_py)?.eigenvalue)
}

/// Eigenvalues (descending) of a generator given as "i j rate" text.
#[pyfunction]
fn network_eigen(triplets: &str) -> PyResult<Vec<f64>> {
    let q = RateMatrix::from_triplets(triplets).map_err(to_py)?;
    Ok(coarse_markov::network_eigen(&q).map_err(to_py)?.eigenvalues)
}

#[pyfunction]
fn mobius_map(z: Complex64, alpha: Complex64) -> PyResult<Complex64> {
    geometry::mobius_map(z, alpha).map_err(to_py)
}

#[pymodule]
fn pynetkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(cases, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bleq, m)?)?;
    m.add_function(wrap_pyfunction!(telegraph_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(network_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_map, m)?)?;
    Ok(())
}
