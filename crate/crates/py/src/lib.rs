//! Python bindings for `hopx-core`.
//!
//! Vectors cross the boundary as lists of floats (any sequence of numbers is
//! accepted, including NumPy arrays) and matrices as lists of rows. Solver
//! errors surface as `ValueError`.

use hopx_core::{
    BisectionConfig, CatalogFunction, HopError, HopProblem, L1Norm, Lambda0, LinearFunction, PointIndicator,
    ProxFunction, QuadraticFunction, SolveReport, SolverConfig, Vector,
};
use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: HopError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(v: Vec<f64>) -> Vector {
    Vector::from_vec(v)
}

fn list(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix rows must all have the same length"));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

/// A convex function with a classical proximal operator.
#[pyclass(name = "Function", module = "hopx", frozen)]
pub struct PyFunction {
    inner: CatalogFunction,
}

#[pymethods]
impl PyFunction {
    /// `½xᵀAx + bᵀx` with `A` symmetric positive semidefinite.
    #[staticmethod]
    fn quadratic(a: Vec<Vec<f64>>, b: Vec<f64>) -> PyResult<Self> {
        let q = QuadraticFunction::new(matrix(a)?, vector(b)).map_err(err)?;
        Ok(Self { inner: q.into() })
    }

    #[staticmethod]
    fn l1(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("n must be >= 1"));
        }
        Ok(Self {
            inner: L1Norm::new(n).into(),
        })
    }

    /// `aᵀx`
    #[staticmethod]
    fn linear(a: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: LinearFunction::new(vector(a)).map_err(err)?.into(),
        })
    }

    /// Indicator of the single point `b`.
    #[staticmethod]
    fn point(b: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: PointIndicator::new(vector(b)).map_err(err)?.into(),
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        check_len(self.dim(), x.len())?;
        Ok(self.inner.value(&vector(x)))
    }

    fn prox(&self, t: f64, c: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(list(&self.inner.prox(t, &vector(c)).map_err(err)?))
    }

    /// Convex conjugate at `y`, or `None` when it is not available.
    fn conjugate(&self, y: Vec<f64>) -> PyResult<Option<f64>> {
        check_len(self.dim(), y.len())?;
        Ok(self.inner.conjugate(&vector(y)))
    }

    fn __repr__(&self) -> String {
        format!("Function.{}(dim={})", self.inner.kind(), self.inner.dim())
    }
}

fn check_len(expected: usize, found: usize) -> PyResult<()> {
    if expected != found {
        return Err(err(HopError::DimensionMismatch { expected, found }));
    }
    Ok(())
}

/// Result of a solve with the per-iteration trace split into columns.
#[pyclass(name = "SolveReport", module = "hopx", frozen, get_all)]
pub struct PySolveReport {
    x: Vec<f64>,
    /// Final dual vector.
    dual: Vec<f64>,
    iterations: usize,
    converged: bool,
    lambda_norms: Vec<f64>,
    t: Vec<f64>,
    objectives: Vec<f64>,
    residuals: Vec<f64>,
}

impl From<SolveReport> for PySolveReport {
    fn from(r: SolveReport) -> Self {
        Self {
            x: list(&r.x),
            dual: list(&r.lambda),
            iterations: r.iterations,
            converged: r.converged,
            lambda_norms: r.trace.iter().map(|t| t.lambda_norm).collect(),
            t: r.trace.iter().map(|t| t.t_k).collect(),
            objectives: r.trace.iter().map(|t| t.objective).collect(),
            residuals: r.trace.iter().map(|t| t.kkt_residual).collect(),
        }
    }
}

#[pymethods]
impl PySolveReport {
    fn __repr__(&self) -> String {
        format!(
            "SolveReport(iterations={}, converged={}, residual={:e})",
            self.iterations,
            self.converged,
            self.residuals.last().copied().unwrap_or(f64::NAN)
        )
    }
}

fn problem<'a>(f: &'a PyFunction, c: Vec<f64>, sigma: f64, p: f64) -> PyResult<HopProblem<'a>> {
    HopProblem::new(&f.inner, sigma, p, vector(c)).map_err(err)
}

fn lambda0(arg: Option<&Bound<'_, PyAny>>) -> PyResult<Lambda0> {
    let Some(arg) = arg else { return Ok(Lambda0::Auto) };
    if let Ok(s) = arg.extract::<String>() {
        return match s.as_str() {
            "auto" => Ok(Lambda0::Auto),
            "zero" => Ok(Lambda0::Zero),
            other => Err(PyValueError::new_err(format!(
                "lambda0 must be 'auto', 'zero' or a vector, got '{other}'"
            ))),
        };
    }
    Ok(Lambda0::Given(vector(arg.extract()?)))
}

/// Minimizes `f(x) + σ/(p+1)‖x − c‖^{p+1}` by the dual fixed-point iteration.
#[pyfunction]
#[pyo3(signature = (f, c, sigma = 1.0, p = 2.0, tol = 1e-10, max_iters = 1000, zero_tol = 0.0, lambda0 = None))]
#[allow(clippy::too_many_arguments)]
fn solve_hop(
    py: Python<'_>,
    f: &PyFunction,
    c: Vec<f64>,
    sigma: f64,
    p: f64,
    tol: f64,
    max_iters: usize,
    zero_tol: f64,
    lambda0: Option<&Bound<'_, PyAny>>,
) -> PyResult<PySolveReport> {
    let prob = problem(f, c, sigma, p)?;
    let cfg = SolverConfig {
        max_iters,
        tol,
        zero_tol,
        lambda0: self::lambda0(lambda0)?,
        keep_iterates: false,
    };
    let report = py.detach(|| hopx_core::solve_hop(&prob, &cfg)).map_err(err)?;
    Ok(report.into())
}

/// The `p = 2` problem by bisection on `t‖Prox_{tf}(c) − c‖ = 1/σ`.
#[pyfunction]
#[pyo3(signature = (f, c, sigma = 1.0, tol_t = 1e-14, max_iters = 200, tau_init = 1.0))]
fn solve_bisection_p2(
    py: Python<'_>,
    f: &PyFunction,
    c: Vec<f64>,
    sigma: f64,
    tol_t: f64,
    max_iters: usize,
    tau_init: f64,
) -> PyResult<PySolveReport> {
    let cfg = BisectionConfig {
        tol_t,
        max_iters,
        tau_init,
    };
    let c = vector(c);
    let report = py
        .detach(|| hopx_core::solve_bisection_p2(&f.inner, &c, sigma, &cfg))
        .map_err(err)?;
    Ok(report.report.into())
}

/// Outer high-order proximal point iterations; returns `x⁰ … x^K`.
#[pyfunction]
#[pyo3(signature = (f, x0, outer_iters, sigma = 1.0, p = 2.0, tol = 1e-10, max_iters = 1000))]
#[allow(clippy::too_many_arguments)]
fn run_hoppa(
    py: Python<'_>,
    f: &PyFunction,
    x0: Vec<f64>,
    outer_iters: usize,
    sigma: f64,
    p: f64,
    tol: f64,
    max_iters: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let cfg = SolverConfig {
        tol,
        max_iters,
        ..SolverConfig::default()
    };
    let x0 = vector(x0);
    let path = py
        .detach(|| hopx_core::run_hoppa(&f.inner, sigma, p, x0, outer_iters, &cfg))
        .map_err(err)?;
    Ok(path.iter().map(list).collect())
}

#[pyfunction]
#[pyo3(signature = (f, c, x, sigma = 1.0, p = 2.0))]
fn hop_objective(f: &PyFunction, c: Vec<f64>, x: Vec<f64>, sigma: f64, p: f64) -> PyResult<f64> {
    hopx_core::hop_objective(&problem(f, c, sigma, p)?, &vector(x)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, c, x, sigma = 1.0, p = 2.0))]
fn kkt_residual(f: &PyFunction, c: Vec<f64>, x: Vec<f64>, sigma: f64, p: f64) -> PyResult<f64> {
    hopx_core::kkt_residual(&problem(f, c, sigma, p)?, &vector(x)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, c, x, dual, sigma = 1.0, p = 2.0))]
fn weak_duality_gap(f: &PyFunction, c: Vec<f64>, x: Vec<f64>, dual: Vec<f64>, sigma: f64, p: f64) -> PyResult<f64> {
    hopx_core::weak_duality_gap(&problem(f, c, sigma, p)?, &vector(x), &vector(dual)).map_err(err)
}

/// `x / ‖x‖^{1−1/p}`
#[pyfunction]
fn ip_map(x: Vec<f64>, p: f64) -> Vec<f64> {
    list(&hopx_core::ip_map(&vector(x), p))
}

#[pyfunction]
fn power_norm_conjugate(dual: Vec<f64>, sigma: f64, p: f64, c: Vec<f64>) -> PyResult<f64> {
    hopx_core::power_norm_conjugate(&vector(dual), sigma, p, &vector(c)).map_err(err)
}

/// `t‖Prox_{tf}(c) − c‖`
#[pyfunction]
fn t_value(f: &PyFunction, c: Vec<f64>, t: f64) -> PyResult<f64> {
    hopx_core::t_value(&f.inner, &vector(c), t).map_err(err)
}

/// Reference solution for a quadratic `f`: `(x*, λ*, ‖x* − c‖)`.
#[pyfunction]
#[pyo3(signature = (f, c, sigma = 1.0, p = 2.0, tol = 1e-10))]
fn oracle_quadratic_hop(
    f: &PyFunction,
    c: Vec<f64>,
    sigma: f64,
    p: f64,
    tol: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let CatalogFunction::Quadratic(q) = &f.inner else {
        return Err(PyValueError::new_err("the quadratic oracle needs a quadratic function"));
    };
    let r = hopx_core::oracle_quadratic_hop(q, sigma, p, &vector(c), tol).map_err(err)?;
    Ok((list(&r.x_star), list(&r.lambda_star), r.t_star))
}

/// Quadratic model of `log Σ exp(aᵢᵀx − bᵢ)` at `c`.
#[pyfunction]
fn logsumexp_instance(a_rows: Vec<Vec<f64>>, b_shift: Vec<f64>, c: Vec<f64>) -> PyResult<PyFunction> {
    let q = hopx_core::logsumexp_instance(&matrix(a_rows)?, &vector(b_shift), &vector(c)).map_err(err)?;
    Ok(PyFunction { inner: q.into() })
}

#[pymodule]
pub fn hopx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_class::<PySolveReport>()?;
    m.add_function(wrap_pyfunction!(solve_hop, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bisection_p2, m)?)?;
    m.add_function(wrap_pyfunction!(run_hoppa, m)?)?;
    m.add_function(wrap_pyfunction!(hop_objective, m)?)?;
    m.add_function(wrap_pyfunction!(kkt_residual, m)?)?;
    m.add_function(wrap_pyfunction!(weak_duality_gap, m)?)?;
    m.add_function(wrap_pyfunction!(ip_map, m)?)?;
    m.add_function(wrap_pyfunction!(power_norm_conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(t_value, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_quadratic_hop, m)?)?;
    m.add_function(wrap_pyfunction!(logsumexp_instance, m)?)?;
    Ok(())
}
