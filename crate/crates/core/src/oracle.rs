//! Reference solvers used to check the main solvers.
//!
//! Neither oracle touches the dual variable or `i_p`: the quadratic oracle
//! solves the primal stationarity condition as a scalar equation in
//! `r = ‖x − c‖`, and the generic oracle runs forward-backward splitting on the
//! primal objective.

use nalgebra::DMatrix;

use crate::error::{check_dim, invalid, HopError, Result};
use crate::functions::QuadraticFunction;
use crate::problem::{HopProblem, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub x_star: Vector,
    /// `σ‖x* − c‖^{p−1}(c − x*)`
    pub lambda_star: Vector,
    /// `‖x* − c‖`
    pub t_star: f64,
    /// Optimality residual achieved at `x_star`.
    pub residual: f64,
}

fn finish(x: Vector, c: &Vector, sigma: f64, p: f64, residual: f64) -> OracleResult {
    let d = c - &x;
    let r = d.norm();
    let lambda_star = if r == 0.0 {
        Vector::zeros(d.len())
    } else {
        d * (sigma * r.powf(p - 1.0))
    };
    OracleResult {
        x_star: x,
        lambda_star,
        t_star: r,
        residual,
    }
}

/// Exact reference for quadratic `f`.
///
/// Stationarity `Ax + b + σr^{p−1}(x − c) = 0` with `r = ‖x − c‖` gives
/// `x(r) − c = −(A + σr^{p−1}I)⁻¹(Ac + b)`; `‖x(r) − c‖ − r` is strictly
/// decreasing, so its root is bracketed by doubling and bisected to machine
/// precision. Fails if the achieved gradient norm exceeds `tol·max(1, ‖Ac + b‖)`.
pub fn oracle_quadratic_hop(q: &QuadraticFunction, sigma: f64, p: f64, c: &Vector, tol: f64) -> Result<OracleResult> {
    check_dim(q.b().len(), c.len())?;
    if !(sigma > 0.0) || !(p >= 1.0) {
        return Err(invalid(
            "sigma/p",
            format!("need sigma > 0 and p >= 1, got {sigma}, {p}"),
        ));
    }
    let a = q.a();
    let g = a * c + q.b();
    let gnorm = g.norm();
    if gnorm == 0.0 {
        return Ok(finish(c.clone(), c, sigma, p, 0.0));
    }
    let n = c.len();

    let step = |r: f64| -> Result<Vector> {
        let shift = sigma * r.powf(p - 1.0);
        let m = a + DMatrix::<f64>::identity(n, n) * shift;
        let rhs = -&g;
        match m.clone().cholesky() {
            Some(ch) => Ok(ch.solve(&rhs)),
            None => m.lu().solve(&rhs).ok_or(HopError::NumericalFailure {
                residual: f64::INFINITY,
                bound: 0.0,
            }),
        }
    };
    let phi = |r: f64| -> Result<f64> { Ok(step(r)?.norm() - r) };

    let mut hi = 1.0;
    while phi(hi)? > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(invalid("instance", "no finite root for ‖x(r) − c‖ = r"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = c + step(0.5 * (lo + hi))?;

    let d = &x - c;
    let r = d.norm();
    let residual = (a * &x + q.b() + d * (sigma * r.powf(p - 1.0))).norm();
    let bound = tol * gnorm.max(1.0);
    if !(residual <= bound) {
        return Err(HopError::NumericalFailure { residual, bound });
    }
    Ok(finish(x, c, sigma, p, residual))
}

/// Forward-backward splitting on `f + h` with `h(x) = σ/(p+1)‖x − c‖^{p+1}`.
///
/// The step size starts at `eta`, is halved until it is below `0.9/L` for the
/// local Lipschitz estimate `L = ‖∇h(z) − ∇h(x)‖/‖z − x‖` of the trial step,
/// and grows by 1.25 after each accepted step. Returns the best
/// iterate by objective along with its optimality residual; callers decide
/// whether that residual is good enough.
pub fn oracle_prox_gradient(problem: &HopProblem<'_>, x0: &Vector, steps: usize, eta: f64) -> Result<OracleResult> {
    check_dim(problem.dim(), x0.len())?;
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("must be > 0, got {eta}")));
    }
    let f = problem.f();
    let c = problem.center();
    let (sigma, p) = (problem.sigma(), problem.p());

    let h = |x: &Vector| sigma / (p + 1.0) * (x - c).norm().powf(p + 1.0);
    let grad_h = |x: &Vector| {
        let d = x - c;
        let r = d.norm();
        if r == 0.0 {
            d
        } else {
            d * (sigma * r.powf(p - 1.0))
        }
    };

    let mut x = x0.clone();
    let mut eta = eta;
    let mut best_x = x.clone();
    let mut best_obj = f.value(&x) + h(&x);

    for _ in 0..steps {
        let gx = grad_h(&x);
        let z = loop {
            let z = f.prox(eta, &(&x - &gx * eta))?;
            let step = (&z - &x).norm();
            let curvature = (grad_h(&z) - &gx).norm();
            if eta * curvature <= 0.9 * step || step == 0.0 || eta < 1e-300 {
                break z;
            }
            eta *= 0.5;
        };
        let moved = (&z - &x).norm();
        x = z;
        let obj = f.value(&x) + h(&x);
        // Later iterates win ties within round-off of the objective.
        if obj <= best_obj + 4.0 * f64::EPSILON * best_obj.abs() {
            best_obj = obj;
            best_x = x.clone();
        }
        if moved == 0.0 {
            break;
        }
        eta *= 1.25;
    }

    let residual = match f.gradient(&best_x) {
        Some(g) => (g + grad_h(&best_x)).norm(),
        None => (f.prox(1.0, &(&best_x - grad_h(&best_x)))? - &best_x).norm(),
    };
    Ok(finish(best_x, c, sigma, p, residual))
}
