//! Dual fixed-point iteration for the high-order proximal operator.
//!
//! Each step turns the current dual norm into a prox parameter and calls the
//! classical prox of `f` once:
//!
//! ```text
//! tᵏ = ‖λᵏ‖^{1/p − 1},  σᵏ = σ^{-1/p}·tᵏ
//! λᵏ⁺¹ = (c − Prox_{σᵏ f}(c)) / σᵏ
//! xᵏ⁺¹ = c − σ^{-1/p}·i_p(λᵏ⁺¹)
//! ```

use std::time::{Duration, Instant};

use crate::error::{check_dim, invalid, HopError, Result};
use crate::problem::{ensure_finite, hop_objective, HopProblem, ProxFunction, Vector};

/// Prox parameters at or below this are treated as a degenerate step.
const MIN_STEP: f64 = 1e-300;

/// Starting dual vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Lambda0 {
    /// `λ⁰ = c − Prox_f(c)`; zero exactly when the center is optimal.
    Auto,
    Zero,
    Given(Vector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop when `‖λᵏ⁺¹ − λᵏ‖ ≤ tol·‖λᵏ‖`.
    pub tol: f64,
    /// Dual vectors with norm at or below this are treated as zero.
    pub zero_tol: f64,
    pub lambda0: Lambda0,
    /// Store `λᵏ` and `xᵏ` in every trace record.
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-10,
            zero_tol: 0.0,
            lambda0: Lambda0::Auto,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", format!("must be > 0, got {}", self.tol)));
        }
        if !(self.zero_tol >= 0.0) {
            return Err(invalid("zero_tol", format!("must be >= 0, got {}", self.zero_tol)));
        }
        Ok(())
    }
}

/// State after iteration `iter` (iteration 0 is the starting point).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub lambda_norm: f64,
    /// `‖λ‖^{1/p−1}`, or 0 when `λ = 0`.
    pub t_k: f64,
    /// Prox parameter `σ^{-1/p}·t_k` used for the next step.
    pub sigma_k: f64,
    pub objective: f64,
    pub kkt_residual: f64,
    pub elapsed: Duration,
    pub lambda: Option<Vector>,
    pub x: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vector,
    pub lambda: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// `iterations + 1` records.
    pub trace: Vec<TraceRecord>,
}

impl SolveReport {
    pub fn final_record(&self) -> &TraceRecord {
        self.trace.last().expect("trace always holds the initial state")
    }
}

/// Optimality residual of `x`.
///
/// For differentiable `f` this is the gradient norm `‖∇f(x) + σ‖x−c‖^{p−1}(x−c)‖`;
/// otherwise the prox fixed-point residual
/// `‖Prox_f(x − σ‖x−c‖^{p−1}(x−c)) − x‖`.
pub fn kkt_residual(problem: &HopProblem<'_>, x: &Vector) -> Result<f64> {
    check_dim(problem.dim(), x.len())?;
    let power = problem.power_gradient(x);
    if let Some(g) = problem.f().gradient(x) {
        return Ok((g + power).norm());
    }
    let y = problem.f().prox(1.0, &(x - power))?;
    Ok((y - x).norm())
}

fn dual_step(lambda_norm: f64, problem: &HopProblem<'_>) -> (f64, f64) {
    if lambda_norm == 0.0 {
        return (0.0, 0.0);
    }
    let t = lambda_norm.powf(1.0 / problem.p() - 1.0);
    (t, problem.mu() * t)
}

struct Tracer<'p, 'a> {
    problem: &'p HopProblem<'a>,
    keep: bool,
    trace: Vec<TraceRecord>,
}

impl Tracer<'_, '_> {
    fn push(&mut self, iter: usize, lambda: &Vector, x: &Vector, elapsed: Duration) -> Result<()> {
        let lambda_norm = lambda.norm();
        let (t_k, sigma_k) = dual_step(lambda_norm, self.problem);
        self.trace.push(TraceRecord {
            iter,
            lambda_norm,
            t_k,
            sigma_k,
            objective: hop_objective(self.problem, x)?,
            kkt_residual: kkt_residual(self.problem, x)?,
            elapsed,
            lambda: self.keep.then(|| lambda.clone()),
            x: self.keep.then(|| x.clone()),
        });
        Ok(())
    }
}

/// Computes `argmin_x f(x) + σ/(p+1)‖x − c‖^{p+1}` by the dual fixed-point iteration.
///
/// When the dual iterate reaches zero, the center is tested for optimality
/// (`c − Prox_f(c) = 0` up to `zero_tol`); if it is optimal the solve ends with
/// `x = c`, otherwise the iteration restarts from the automatic `λ⁰`.
pub fn solve_hop(problem: &HopProblem<'_>, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let n = problem.dim();
    let c = problem.center();
    let f = problem.f();
    let start = Instant::now();

    let stationarity = || -> Result<Vector> { Ok(c - f.prox(1.0, c)?) };

    let mut lambda = match &config.lambda0 {
        Lambda0::Auto => stationarity()?,
        Lambda0::Zero => Vector::zeros(n),
        Lambda0::Given(v) => {
            check_dim(n, v.len())?;
            ensure_finite(v, "initial dual vector")?;
            v.clone()
        }
    };
    if !lambda.iter().all(|x| x.is_finite()) {
        return Err(HopError::NonFiniteIterate { iteration: 0 });
    }

    let mut tracer = Tracer {
        problem,
        keep: config.keep_iterates,
        trace: Vec::new(),
    };
    tracer.push(0, &lambda, &problem.primal_from_dual(&lambda), start.elapsed())?;

    let mut iterations = 0;
    let mut converged = false;
    let mut at_center = false;

    while iterations < config.max_iters {
        let tick = Instant::now();
        let lambda_norm = lambda.norm();

        let next = if lambda_norm <= config.zero_tol {
            let r = stationarity()?;
            if r.norm() <= config.zero_tol {
                at_center = true;
                converged = true;
                break;
            }
            r
        } else {
            let (_, step) = dual_step(lambda_norm, problem);
            if !(step > MIN_STEP) || !step.is_finite() {
                return Err(HopError::DegenerateStep {
                    iteration: iterations + 1,
                    step,
                });
            }
            (c - f.prox(step, c)?) / step
        };
        iterations += 1;
        if !next.iter().all(|x| x.is_finite()) {
            return Err(HopError::NonFiniteIterate { iteration: iterations });
        }

        let x = problem.primal_from_dual(&next);
        tracer.push(iterations, &next, &x, tick.elapsed())?;

        let moved = (&next - &lambda).norm();
        lambda = next;
        if moved <= config.tol * lambda_norm {
            converged = true;
            break;
        }
    }

    let (x, lambda) = if at_center {
        (c.clone(), Vector::zeros(n))
    } else {
        (problem.primal_from_dual(&lambda), lambda)
    };
    Ok(SolveReport {
        x,
        lambda,
        iterations,
        converged,
        trace: tracer.trace,
    })
}

/// High-order proximal point method `xᵏ⁺¹ = Prox^p_{f/σ}(xᵏ)`.
///
/// Returns `x⁰, x¹, …, x^{outer_iters}`.
pub fn run_hoppa(
    f: &dyn ProxFunction,
    sigma: f64,
    p: f64,
    x0: Vector,
    outer_iters: usize,
    inner: &SolverConfig,
) -> Result<Vec<Vector>> {
    let mut problem = HopProblem::new(f, sigma, p, x0)?;
    let mut path = Vec::with_capacity(outer_iters + 1);
    path.push(problem.center().clone());
    for _ in 0..outer_iters {
        let next = solve_hop(&problem, inner)?.x;
        path.push(next.clone());
        problem = problem.recentered(next)?;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ip_map, L1Norm, LinearFunction, PointIndicator};
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn one_dimensional_linear() {
        // f(x) = x, σ = 1, p = 2, c = 0: 1 + |x|x = 0 gives x* = −1
        let f = LinearFunction::new(v(&[1.0])).unwrap();
        let prob = HopProblem::new(&f, 1.0, 2.0, v(&[0.0])).unwrap();
        let rep = solve_hop(&prob, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.x[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(rep.lambda[0], 1.0, epsilon = 1e-14);
        assert!(kkt_residual(&prob, &rep.x).unwrap() <= 1e-12);
        assert_eq!(rep.trace.len(), rep.iterations + 1);
    }

    #[test]
    fn linear_reaches_closed_form_after_first_step() {
        let a = v(&[0.5, -2.0, 1.0]);
        let f = LinearFunction::new(a.clone()).unwrap();
        let c = v(&[1.0, 0.0, -1.0]);
        let prob = HopProblem::new(&f, 2.0, 3.0, c.clone()).unwrap();
        let cfg = SolverConfig {
            lambda0: Lambda0::Given(v(&[3.0, 1.0, 0.0])),
            keep_iterates: true,
            ..SolverConfig::default()
        };
        let rep = solve_hop(&prob, &cfg).unwrap();
        let expected = &c - ip_map(&a, 3.0) * 2f64.powf(-1.0 / 3.0);
        let lam1 = rep.trace[1].lambda.as_ref().unwrap();
        assert_relative_eq!(lam1, &a, epsilon = 1e-14);
        assert_relative_eq!(rep.trace[1].x.as_ref().unwrap(), &expected, epsilon = 1e-14);
        assert_relative_eq!(rep.x, expected, epsilon = 1e-14);
        assert_eq!(rep.iterations, 2);
    }

    #[test]
    fn l1_with_zero_center_hits_zero_in_one_step() {
        let f = L1Norm::new(4);
        let c = Vector::zeros(4);
        let prob = HopProblem::new(&f, 1.0, 2.0, c.clone()).unwrap();
        let cfg = SolverConfig {
            lambda0: Lambda0::Given(v(&[1.0, -2.0, 0.5, 3.0])),
            ..SolverConfig::default()
        };
        let rep = solve_hop(&prob, &cfg).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.trace[1].lambda_norm, 0.0);
        assert_eq!(rep.x, c);

        let auto = solve_hop(&prob, &SolverConfig::default()).unwrap();
        assert_eq!(auto.iterations, 0);
        assert_eq!(auto.x, c);
    }

    #[test]
    fn zero_start_restarts_from_auto() {
        let f = LinearFunction::new(v(&[1.0])).unwrap();
        let prob = HopProblem::new(&f, 1.0, 2.0, v(&[0.0])).unwrap();
        let cfg = SolverConfig {
            lambda0: Lambda0::Zero,
            ..SolverConfig::default()
        };
        let rep = solve_hop(&prob, &cfg).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.x[0], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn p_equal_one_is_a_single_classical_prox() {
        let f = L1Norm::new(3);
        let c = v(&[2.0, -0.3, 0.9]);
        let prob = HopProblem::new(&f, 2.0, 1.0, c.clone()).unwrap();
        let rep = solve_hop(&prob, &SolverConfig::default()).unwrap();
        assert_relative_eq!(rep.x, f.prox(0.5, &c).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_config() {
        let f = L1Norm::new(1);
        let prob = HopProblem::new(&f, 1.0, 2.0, v(&[1.0])).unwrap();
        let bad = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(solve_hop(&prob, &bad).is_err());
        let wrong_dim = SolverConfig {
            lambda0: Lambda0::Given(v(&[1.0, 2.0])),
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_hop(&prob, &wrong_dim),
            Err(HopError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let f = L1Norm::new(3);
        let prob = HopProblem::new(&f, 1.0, 4.0, v(&[3.0, -2.0, 0.5])).unwrap();
        let cfg = SolverConfig {
            max_iters: 1,
            lambda0: Lambda0::Given(v(&[100.0, 0.0, 0.0])),
            ..SolverConfig::default()
        };
        let rep = solve_hop(&prob, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.trace.len(), 2);
    }

    #[test]
    fn kkt_examples() {
        let f = L1Norm::new(2);
        let prob = HopProblem::new(&f, 1.0, 2.0, Vector::zeros(2)).unwrap();
        assert_eq!(kkt_residual(&prob, &Vector::zeros(2)).unwrap(), 0.0);
        let g = LinearFunction::new(v(&[1.0])).unwrap();
        let prob = HopProblem::new(&g, 1.0, 2.0, v(&[0.0])).unwrap();
        assert!(kkt_residual(&prob, &v(&[-1.0])).unwrap() <= 1e-15);
    }

    #[test]
    fn hoppa_point_indicator() {
        let b = v(&[1.0, 2.0]);
        let f = PointIndicator::new(b.clone()).unwrap();
        let cfg = SolverConfig {
            tol: 1e-13,
            ..SolverConfig::default()
        };
        let path = run_hoppa(&f, 1.0, 2.0, v(&[-3.0, 0.5]), 3, &cfg).unwrap();
        assert_eq!(path.len(), 4);
        for x in &path[1..] {
            assert_relative_eq!(x, &b, epsilon = 1e-10);
        }
    }
}
