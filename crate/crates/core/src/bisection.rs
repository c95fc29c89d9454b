//! The `p = 2` case as a scalar equation.
//!
//! With `T(t) = t‖Prox_{tf}(c) − c‖`, the minimizer of `f(x) + σ/3‖x − c‖³` is
//! `Prox_{t* f}(c)` where `T(t*) = 1/σ`. `T` is continuous, nondecreasing,
//! `T(0) = 0` and unbounded, so a doubling search followed by bisection finds
//! `t*` with the bracket halving every step.

use std::time::Instant;

use crate::error::{invalid, HopError, Result};
use crate::problem::{hop_objective, HopProblem, ProxFunction, Vector};
use crate::solver::{kkt_residual, SolveReport, TraceRecord};

/// `‖c − Prox_f(c)‖` at or below this is taken to mean `0 ∈ ∂f(c)`.
pub const STATIONARY_TOL: f64 = 1e-14;

const MAX_DOUBLINGS: usize = 1_000_000;

/// `T(t) = t‖Prox_{tf}(c) − c‖`, with `T(0) = 0`.
pub fn t_value(f: &dyn ProxFunction, c: &Vector, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * (f.prox(t, c)? - c).norm())
}

fn is_stationary(f: &dyn ProxFunction, c: &Vector) -> Result<bool> {
    Ok((c - f.prox(1.0, c)?).norm() <= STATIONARY_TOL)
}

/// Doubles `τ` from `tau_init` until `T(τ) ≥ 1/σ` and returns that `τ`.
///
/// Returns [`HopError::Stationary`] when the center already minimizes `f`.
pub fn find_bracket(f: &dyn ProxFunction, c: &Vector, sigma: f64, tau_init: f64) -> Result<f64> {
    if !(tau_init > 0.0) || !tau_init.is_finite() {
        return Err(invalid("tau_init", format!("must be finite and > 0, got {tau_init}")));
    }
    if !(sigma > 0.0) {
        return Err(invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    if is_stationary(f, c)? {
        return Err(HopError::Stationary);
    }
    let target = 1.0 / sigma;
    let mut tau = tau_init;
    for _ in 0..MAX_DOUBLINGS {
        if t_value(f, c, tau)? >= target {
            return Ok(tau);
        }
        tau *= 2.0;
        if !tau.is_finite() {
            break;
        }
    }
    Err(HopError::BracketCap(MAX_DOUBLINGS))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    /// Stop when the bracket width is at most `tol_t·max(1, midpoint)`.
    pub tol_t: f64,
    pub max_iters: usize,
    pub tau_init: f64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        Self {
            tol_t: 1e-14,
            max_iters: 200,
            tau_init: 1.0,
        }
    }
}

/// One bisection step: the bracket after the update, the midpoint and `T` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionStep {
    pub tau0: f64,
    pub tau1: f64,
    pub t_mid: f64,
    pub t_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionState {
    pub tau0: f64,
    pub tau1: f64,
    pub history: Vec<BisectionStep>,
}

impl BisectionState {
    pub fn width(&self) -> f64 {
        self.tau1 - self.tau0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionReport {
    /// Trace rows: `t_k` and `sigma_k` hold the midpoint (the prox parameter),
    /// `lambda_norm` holds `‖c − x_k‖/t_k`. Row 0 is the bracket top `τ`.
    pub report: SolveReport,
    pub state: BisectionState,
    /// Initial bracket `[0, τ]`; `None` when the center was already optimal.
    pub tau: Option<f64>,
}

/// Minimizes `f(x) + σ/3‖x − c‖³` by bisection on `T(t) = 1/σ`.
pub fn solve_bisection_p2(
    f: &dyn ProxFunction,
    c: &Vector,
    sigma: f64,
    config: &BisectionConfig,
) -> Result<BisectionReport> {
    if !(config.tol_t > 0.0) {
        return Err(invalid("tol_t", format!("must be > 0, got {}", config.tol_t)));
    }
    let problem = HopProblem::new(f, sigma, 2.0, c.clone())?;
    let start = Instant::now();

    let record = |iter: usize, t: f64, x: &Vector, elapsed| -> Result<TraceRecord> {
        Ok(TraceRecord {
            iter,
            lambda_norm: if t > 0.0 { (c - x).norm() / t } else { 0.0 },
            t_k: t,
            sigma_k: t,
            objective: hop_objective(&problem, x)?,
            kkt_residual: kkt_residual(&problem, x)?,
            elapsed,
            lambda: None,
            x: None,
        })
    };

    let tau = match find_bracket(f, c, sigma, config.tau_init) {
        Ok(tau) => tau,
        Err(HopError::Stationary) => {
            let trace = vec![record(0, 0.0, c, start.elapsed())?];
            return Ok(BisectionReport {
                report: SolveReport {
                    x: c.clone(),
                    lambda: Vector::zeros(c.len()),
                    iterations: 0,
                    converged: true,
                    trace,
                },
                state: BisectionState {
                    tau0: 0.0,
                    tau1: 0.0,
                    history: Vec::new(),
                },
                tau: None,
            });
        }
        Err(e) => return Err(e),
    };

    let target = 1.0 / sigma;
    let mut state = BisectionState {
        tau0: 0.0,
        tau1: tau,
        history: Vec::new(),
    };
    let mut x = f.prox(tau, c)?;
    let mut trace = vec![record(0, tau, &x, start.elapsed())?];
    let mut converged = false;

    for k in 1..=config.max_iters {
        let mid = 0.5 * (state.tau0 + state.tau1);
        if state.width() <= config.tol_t * mid.max(1.0) {
            converged = true;
            break;
        }
        let tick = Instant::now();
        x = f.prox(mid, c)?;
        let t_mid = mid * (&x - c).norm();
        if t_mid > target {
            state.tau1 = mid;
        } else {
            state.tau0 = mid;
        }
        state.history.push(BisectionStep {
            tau0: state.tau0,
            tau1: state.tau1,
            t_mid: mid,
            t_value: t_mid,
        });
        trace.push(record(k, mid, &x, tick.elapsed())?);
    }
    if !converged {
        let mid = 0.5 * (state.tau0 + state.tau1);
        converged = state.width() <= config.tol_t * mid.max(1.0);
    }

    Ok(BisectionReport {
        report: SolveReport {
            lambda: problem.dual_from_primal(&x),
            x,
            iterations: state.history.len(),
            converged,
            trace,
        },
        state,
        tau: Some(tau),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub holds: bool,
    pub violations: Vec<(f64, f64)>,
}

/// Checks `(t₂/t₁)·T(t₁) ≤ T(t₂) ≤ (t₂/t₁)²·T(t₁)` on every pair `0 < t₁ ≤ t₂`.
pub fn check_t_sandwich(f: &dyn ProxFunction, c: &Vector, pairs: &[(f64, f64)]) -> Result<SandwichReport> {
    let mut violations = Vec::new();
    for &(t1, t2) in pairs {
        if !(t1 > 0.0 && t1 <= t2) {
            return Err(invalid("pairs", format!("need 0 < t1 <= t2, got ({t1}, {t2})")));
        }
        let (v1, v2) = (t_value(f, c, t1)?, t_value(f, c, t2)?);
        let ratio = t2 / t1;
        let lower_ok = ratio * v1 <= v2 + 1e-9;
        let upper_ok = v2 <= ratio * ratio * v1 + 1e-9 * ratio * ratio;
        if !(lower_ok && upper_ok) {
            violations.push((t1, t2));
        }
    }
    Ok(SandwichReport {
        holds: violations.is_empty(),
        violations,
    })
}
