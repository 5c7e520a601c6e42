use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use triadlab::closed_form;
use triadlab::dynamics::{self, ComplexTriad, CoupledTriads, RealTriad, System};
use triadlab::invariants;
use triadlab::lattice::{self, LatticeParams, WaveVector};
use triadlab::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(format!("{}: {e}", e.kind())),
    }
}

/// Round-trips a serializable value through JSON into native Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn params(theta: [f64; 3]) -> PyResult<LatticeParams> {
    LatticeParams::new(theta[0], theta[1], theta[2]).map_err(to_py_err)
}

#[pyfunction]
fn dispersion_ratio(v: [i64; 3], theta: [f64; 3]) -> PyResult<f64> {
    lattice::dispersion_ratio(WaveVector(v), &params(theta)?).map_err(to_py_err)
}

/// Catalog of resonant irreducible triads with components in `[-box_size, box_size]`.
#[pyfunction]
#[pyo3(signature = (theta, box_size, tol = 1e-12))]
fn search_triads(py: Python<'_>, theta: [f64; 3], box_size: i64, tol: f64) -> PyResult<Bound<'_, PyAny>> {
    let cat = py
        .detach(|| lattice::search_triads(&params(theta)?, box_size, tol).map_err(to_py_err))?;
    to_py(py, &cat)
}

#[pyfunction]
fn solve_theta3(py: Python<'_>, k: [i64; 3], m: [i64; 3], theta1: f64, theta2: f64) -> PyResult<Bound<'_, PyAny>> {
    let roots = lattice::solve_theta3(WaveVector(k), WaveVector(m), theta1, theta2).map_err(to_py_err)?;
    to_py(py, &roots)
}

#[pyfunction]
fn decompose(py: Python<'_>, k: [i64; 3], m: [i64; 3], i: usize, j: usize) -> PyResult<Bound<'_, PyAny>> {
    let pair = lattice::decompose_primitive(WaveVector(k), WaveVector(m), i, j).map_err(to_py_err)?;
    to_py(py, &pair)
}

#[pyfunction]
fn cubic_data(py: Python<'_>, lambdas: [f64; 3], p0: f64, q0: f64) -> PyResult<Bound<'_, PyAny>> {
    let [l, m, n] = lambdas;
    to_py(py, &closed_form::cubic_data(l, m, n, p0, q0).map_err(to_py_err)?)
}

#[pyfunction]
fn half_period(lambdas: [f64; 3], p0: f64, q0: f64) -> PyResult<f64> {
    let [l, m, n] = lambdas;
    let c = closed_form::cubic_data(l, m, n, p0, q0).map_err(to_py_err)?;
    closed_form::half_period(&c).map_err(to_py_err)
}

#[pyfunction]
fn classify_equilibria(py: Python<'_>, lambdas: [f64; 3], energy: f64) -> PyResult<Bound<'_, PyAny>> {
    let [l, m, n] = lambdas;
    to_py(py, &dynamics::classify_equilibria(l, m, n, energy).map_err(to_py_err)?)
}

/// `norm` is `"h3"` or `"enstrophy"`; `w0` is the initial value of that norm.
#[pyfunction]
fn burst_bounds<'py>(py: Python<'py>, lambdas: [f64; 3], norm: &str, w0: f64) -> PyResult<Bound<'py, PyAny>> {
    let [l, m, n] = lambdas;
    let b = match norm {
        "h3" => closed_form::burst_bounds_h3(l, m, n, w0),
        "enstrophy" => closed_form::burst_bounds_enstrophy(l, m, n, w0),
        other => return Err(PyValueError::new_err(format!("unknown norm {other:?}"))),
    }
    .map_err(to_py_err)?;
    to_py(py, &b)
}

/// Integrated trajectory: accepted step times and states, plus step statistics.
#[pyclass(frozen)]
struct Trajectory {
    inner: dynamics::Trajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.inner.states.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.stats)
    }

    fn energy(&self) -> Vec<f64> {
        self.inner.states.iter().map(|y| invariants::energy(&self.inner.system, y)).collect()
    }

    fn helicity(&self) -> Vec<f64> {
        self.inner.states.iter().map(|y| invariants::helicity(&self.inner.system, y)).collect()
    }

    fn enstrophy(&self) -> Vec<f64> {
        self.inner.states.iter().map(|y| invariants::enstrophy(&self.inner.system, y)).collect()
    }

    fn half_period(&self) -> PyResult<f64> {
        closed_form::measure::measured_half_period(&self.inner).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.times.len()
    }
}

fn run(py: Python<'_>, sys: System, y0: Vec<f64>, t_end: f64, rtol: f64, atol: f64) -> PyResult<Trajectory> {
    let inner = py.detach(|| dynamics::integrate(&sys, &y0, t_end, rtol, atol)).map_err(to_py_err)?;
    Ok(Trajectory { inner })
}

#[pyfunction]
#[pyo3(signature = (lambdas, y0, t_end, rtol = 1e-10, atol = 1e-12))]
fn integrate_real(py: Python<'_>, lambdas: [f64; 3], y0: Vec<f64>, t_end: f64, rtol: f64, atol: f64) -> PyResult<Trajectory> {
    let sys = RealTriad::new(lambdas[0], lambdas[1], lambdas[2]).map_err(to_py_err)?;
    run(py, System::Real(sys), y0, t_end, rtol, atol)
}

/// `y0` packs `(Re U_k, Im U_k, Re U_m, Im U_m, Re U_n, Im U_n)`.
#[pyfunction]
#[pyo3(signature = (lambdas, y0, t_end, c = 1.0, rtol = 1e-10, atol = 1e-12))]
fn integrate_complex(
    py: Python<'_>,
    lambdas: [f64; 3],
    y0: Vec<f64>,
    t_end: f64,
    c: f64,
    rtol: f64,
    atol: f64,
) -> PyResult<Trajectory> {
    let sys = ComplexTriad::new(lambdas, c).map_err(to_py_err)?;
    run(py, System::Complex(sys), y0, t_end, rtol, atol)
}

#[pyfunction]
#[pyo3(signature = (lambdas, y0, t_end, gamma = 1.0, gamma_tilde = 1.0, rtol = 1e-10, atol = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn integrate_coupled(
    py: Python<'_>,
    lambdas: [f64; 5],
    y0: Vec<f64>,
    t_end: f64,
    gamma: f64,
    gamma_tilde: f64,
    rtol: f64,
    atol: f64,
) -> PyResult<Trajectory> {
    let sys = CoupledTriads::new(lambdas, gamma, gamma_tilde).map_err(to_py_err)?;
    run(py, System::Coupled(sys), y0, t_end, rtol, atol)
}

#[pymodule]
fn triadlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(dispersion_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(search_triads, m)?)?;
    m.add_function(wrap_pyfunction!(solve_theta3, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(cubic_data, m)?)?;
    m.add_function(wrap_pyfunction!(half_period, m)?)?;
    m.add_function(wrap_pyfunction!(classify_equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(burst_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_real, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_complex, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_coupled, m)?)?;
    Ok(())
}
