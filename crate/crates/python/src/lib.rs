//! Python bindings: model parameters, presets, the cubic solver, sweeps and
//! the dense-oracle fidelity check.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cavity_entangle::algebra::manifold_coefficients;
use cavity_entangle::cubic;
use cavity_entangle::dynamics::{plan_truncation, AnalyticEvolution};
use cavity_entangle::measures::Measure;
use cavity_entangle::model::{scenario_by_name, validate};
use cavity_entangle::{oracle, pipeline, DeformationFunction, Error, ModelParams};

fn value_error(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_error(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Model parameters. Validated on construction.
#[pyclass(name = "Params", module = "cavity_entangle_py", from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: ModelParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (k=1, g=1.0, chi=0.0, delta=0.0, beta1=0.0, beta2=0.0, theta=0.0, alpha_sq=25.0, deformation="sqrt-n"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        k: usize,
        g: f64,
        chi: f64,
        delta: f64,
        beta1: f64,
        beta2: f64,
        theta: f64,
        alpha_sq: f64,
        deformation: &str,
    ) -> PyResult<Self> {
        let deformation = match deformation {
            "unity" => DeformationFunction::Unity,
            "sqrt-n" => DeformationFunction::SqrtN,
            other => return Err(PyValueError::new_err(format!("unknown deformation `{other}`"))),
        };
        if !(alpha_sq.is_finite() && alpha_sq >= 0.0) {
            return Err(PyValueError::new_err("alpha_sq must be finite and >= 0"));
        }
        let params = ModelParams {
            k,
            g,
            chi,
            delta,
            beta1,
            beta2,
            theta,
            deformation,
            ..ModelParams::default()
        }
        .with_alpha_sq(alpha_sq);
        Ok(PyParams {
            inner: validate(params).map_err(value_error)?,
        })
    }

    /// One of the preset scenarios `a`..`e`.
    #[staticmethod]
    #[pyo3(signature = (label, k=1))]
    fn scenario(label: &str, k: usize) -> PyResult<Self> {
        let params = scenario_by_name(label).map_err(value_error)?.params(k);
        Ok(PyParams {
            inner: validate(params).map_err(value_error)?,
        })
    }

    /// Copy with a different mean photon number.
    fn with_alpha_sq(&self, alpha_sq: f64) -> PyResult<Self> {
        let params = self.inner.clone().with_alpha_sq(alpha_sq);
        Ok(PyParams {
            inner: validate(params).map_err(value_error)?,
        })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }
    #[getter]
    fn chi(&self) -> f64 {
        self.inner.chi
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn beta1(&self) -> f64 {
        self.inner.beta1
    }
    #[getter]
    fn beta2(&self) -> f64 {
        self.inner.beta2
    }
    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }
    #[getter]
    fn alpha_sq(&self) -> f64 {
        self.inner.mean_photon_number()
    }
    #[getter]
    fn deformation(&self) -> &'static str {
        self.inner.deformation.name()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(k={}, g={}, chi={}, delta={}, beta1={}, beta2={}, theta={}, alpha_sq={}, deformation='{}')",
            p.k,
            p.g,
            p.chi,
            p.delta,
            p.beta1,
            p.beta2,
            p.theta,
            p.mean_photon_number(),
            p.deformation.name()
        )
    }
}

/// Real roots of `mu^3 + x1 mu^2 + x2 mu + x3`, ascending.
#[pyfunction]
fn solve_cubic(x1: f64, x2: f64, x3: f64) -> PyResult<[f64; 3]> {
    cubic::solve_cubic(x1, x2, x3).map(|r| r.mu).map_err(runtime_error)
}

/// Couplings and phases of the manifold that starts at `|ee, n>`.
#[pyfunction]
fn manifold<'py>(py: Python<'py>, params: &PyParams, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = manifold_coefficients(&params.inner, n);
    let d = PyDict::new(py);
    d.set_item("v1", c.v1)?;
    d.set_item("v2", c.v2)?;
    d.set_item("gamma", [c.gamma1, c.gamma2, c.gamma3])?;
    d.set_item("eta", c.eta)?;
    d.set_item("sigma", c.sigma_s)?;
    Ok(d)
}

fn parse_measures(names: Option<Vec<String>>) -> PyResult<Vec<Measure>> {
    match names {
        None => Ok(Measure::ALL.to_vec()),
        Some(names) => names
            .iter()
            .map(|n| Measure::parse(n).ok_or_else(|| PyValueError::new_err(format!("unknown measure `{n}`"))))
            .collect(),
    }
}

/// Time sweep of the entanglement measures. Returns a dict of equal-length
/// lists keyed by `gt`, each measure and `trace_tail`; absent values are None.
#[pyfunction]
#[pyo3(signature = (params, t_max=25.0, steps=500, tol=1e-12, measures=None))]
fn sweep<'py>(
    py: Python<'py>,
    params: &PyParams,
    t_max: f64,
    steps: usize,
    tol: f64,
    measures: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    if steps < 2 || t_max.is_nan() || t_max <= 0.0 || tol.is_nan() || tol <= 0.0 || tol > 1e-3 {
        return Err(PyValueError::new_err("need steps >= 2, t_max > 0 and tol in (0, 1e-3]"));
    }
    let measures = parse_measures(measures)?;
    let p = &params.inner;
    let plan = plan_truncation(p.alpha, tol, p.k);
    let times = pipeline::time_grid(p.g, t_max, steps);
    let outcome = py
        .detach(|| pipeline::run(p, &plan, &times, &measures))
        .map_err(runtime_error)?;
    let s = &outcome.samples;
    let d = PyDict::new(py);
    d.set_item("gt", s.iter().map(|x| p.g * x.t).collect::<Vec<_>>())?;
    d.set_item("entropy", s.iter().map(|x| x.entropy).collect::<Vec<_>>())?;
    d.set_item("tangle", s.iter().map(|x| x.tangle).collect::<Vec<_>>())?;
    d.set_item("concurrence", s.iter().map(|x| x.concurrence).collect::<Vec<_>>())?;
    d.set_item("trace_tail", s.iter().map(|x| x.trace_tail).collect::<Vec<_>>())?;
    Ok(d)
}

/// Fidelity between the closed-form state and dense Fock-space evolution at
/// each time `t` (unscaled).
#[pyfunction]
#[pyo3(signature = (params, times, tol=1e-12))]
fn oracle_fidelity(py: Python<'_>, params: &PyParams, times: Vec<f64>, tol: f64) -> PyResult<Vec<f64>> {
    let p = &params.inner;
    py.detach(|| {
        let plan = plan_truncation(p.alpha, tol, p.k);
        let evolution = AnalyticEvolution::new(p, &plan)?;
        let h = oracle::build_hamiltonian(p, plan.n_max)?;
        let propagator = oracle::Propagator::new(&h)?;
        let psi0 = oracle::initial_state(p, &plan);
        let prepared = propagator.prepare(&psi0);
        times
            .iter()
            .map(|&t| oracle::state_fidelity(&evolution.state_at(t), &prepared.at(t)))
            .collect::<Result<Vec<_>, Error>>()
    })
    .map_err(runtime_error)
}

#[pymodule]
fn cavity_entangle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(solve_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(manifold, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_fidelity, m)?)?;
    Ok(())
}
