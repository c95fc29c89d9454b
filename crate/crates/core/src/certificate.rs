//! Trace checker for the linear contraction of dual norms toward `‖λ*‖`.
//!
//! With `q = 1 − 1/p`, a trace started above the optimal norm must satisfy for
//! every `k ≥ 1`
//!
//! ```text
//! ‖λ*‖ ≤ ‖λᵏ‖ ≤ ‖λᵏ⁻¹‖
//! ‖λᵏ‖ ≤ ‖λᵏ⁻¹‖^q ‖λ*‖^{1/p}
//! ln(‖λᵏ‖/‖λ*‖) ≤ q^k ln(‖λ⁰‖/‖λ*‖)
//! ‖λᵏ − λ*‖ ≤ ‖λ*‖ (exp(q^{k−1} ln(‖λ⁰‖/‖λ*‖)) − 1)
//! ```
//!
//! and the mirrored set (with an extra factor `q` on the last bound) when it
//! starts below. The last bound needs the iterates themselves, so it is only
//! checked on traces recorded with `keep_iterates`.

use crate::error::{check_dim, HopError, Result};
use crate::problem::Vector;
use crate::solver::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `‖λ⁰‖ ≥ ‖λ*‖`
    Above,
    /// `‖λ⁰‖ < ‖λ*‖`
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionTolerances {
    /// Absolute slack on norm comparisons.
    pub norm: f64,
    /// Slack on log-ratios and on the per-step ratio interval `[0, 1 − 1/p]`.
    pub ratio: f64,
    /// Relative slack (times `max(1, ‖λ*‖)`) on the distance bound.
    pub distance: f64,
    /// Per-step ratios are recorded only when `|ln(‖λᵏ⁻¹‖/‖λ*‖)|` is at least this;
    /// below it the ratio is dominated by round-off.
    pub log_floor: f64,
}

impl Default for ContractionTolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            ratio: 1e-8,
            distance: 1e-8,
            log_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    pub side: Side,
    /// `1 − 1/p`
    pub factor: f64,
    /// `(k, ln(‖λᵏ‖/‖λ*‖) / ln(‖λᵏ⁻¹‖/‖λ*‖))` for every resolvable step.
    pub ratios: Vec<(usize, f64)>,
    /// Number of iterations `k ≥ 1` that were checked.
    pub checked: usize,
    pub distance_checked: bool,
}

impl ContractionCertificate {
    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().map(|&(_, r)| r).reduce(f64::max)
    }
}

pub fn check_contraction(trace: &[TraceRecord], lambda_star: &Vector, p: f64) -> Result<ContractionCertificate> {
    check_contraction_with(trace, lambda_star, p, &ContractionTolerances::default())
}

pub fn check_contraction_with(
    trace: &[TraceRecord],
    lambda_star: &Vector,
    p: f64,
    tol: &ContractionTolerances,
) -> Result<ContractionCertificate> {
    let q = 1.0 - 1.0 / p;
    let star = lambda_star.norm();
    let mut violations = Vec::new();
    let Some(first) = trace.first() else {
        return Err(HopError::ContractionViolated(vec!["empty trace".into()]));
    };
    let n0 = first.lambda_norm;
    let side = if n0 >= star { Side::Above } else { Side::Below };
    let mut cert = ContractionCertificate {
        side,
        factor: q,
        ratios: Vec::new(),
        checked: 0,
        distance_checked: trace.iter().all(|r| r.lambda.is_some()),
    };
    if let Some(l) = &first.lambda {
        check_dim(lambda_star.len(), l.len())?;
    }

    if star == 0.0 {
        // Zero optimum: one step from any nonzero start lands on it.
        if n0 > 0.0 {
            if let Some(r) = trace.get(1) {
                cert.checked = 1;
                if r.lambda_norm > tol.norm {
                    violations.push(format!("k=1: ‖λ¹‖ = {:e} but λ* = 0", r.lambda_norm));
                }
            }
        }
        return finish(cert, violations);
    }

    let log0 = (n0 / star).ln();
    for k in 1..trace.len() {
        let prev = &trace[k - 1];
        let cur = &trace[k];
        if landed(prev, lambda_star, star) {
            break;
        }
        cert.checked += 1;
        let a = prev.lambda_norm;
        let b = cur.lambda_norm;
        let one_step = a.powf(q) * star.powf(1.0 / p);
        let qk = q.powi(k as i32);
        let qk1 = q.powi(k as i32 - 1);

        match side {
            Side::Above => {
                if b > a + tol.norm {
                    violations.push(format!("k={k}: norm increased {a:e} -> {b:e}"));
                }
                if b < star - tol.norm {
                    violations.push(format!("k={k}: norm {b:e} crossed below ‖λ*‖ = {star:e}"));
                }
                if b > one_step + tol.norm {
                    violations.push(format!("k={k}: one-step bound {b:e} > {one_step:e}"));
                }
                let lhs = (b / star).ln();
                if lhs > qk * log0 + tol.ratio {
                    violations.push(format!("k={k}: log bound {lhs:e} > {:e}", qk * log0));
                }
            }
            Side::Below => {
                if b < a - tol.norm {
                    violations.push(format!("k={k}: norm decreased {a:e} -> {b:e}"));
                }
                if b > star + tol.norm {
                    violations.push(format!("k={k}: norm {b:e} crossed above ‖λ*‖ = {star:e}"));
                }
                if b < one_step - tol.norm {
                    violations.push(format!("k={k}: one-step bound {b:e} < {one_step:e}"));
                }
                let lhs = (star / b).ln();
                if lhs > qk * (-log0) + tol.ratio {
                    violations.push(format!("k={k}: log bound {lhs:e} > {:e}", -qk * log0));
                }
            }
        }

        let denom = (a / star).ln();
        if denom.abs() >= tol.log_floor {
            let r = (b / star).ln() / denom;
            cert.ratios.push((k, r));
            if r < -tol.ratio || r > q + tol.ratio {
                violations.push(format!("k={k}: ratio {r} outside [0, {q}]"));
            }
        }

        if let Some(lam) = &cur.lambda {
            let dist = (lam - lambda_star).norm();
            let bound = match side {
                Side::Above => star * ((qk1 * log0).exp() - 1.0),
                Side::Below => q * star * ((qk1 * -log0).exp() - 1.0),
            };
            if dist > bound + tol.distance * star.max(1.0) {
                violations.push(format!("k={k}: ‖λᵏ − λ*‖ = {dist:e} exceeds {bound:e}"));
            }
        }
    }
    finish(cert, violations)
}

fn landed(rec: &TraceRecord, lambda_star: &Vector, star: f64) -> bool {
    match &rec.lambda {
        Some(l) => l == lambda_star,
        None => rec.lambda_norm == star,
    }
}

fn finish(cert: ContractionCertificate, violations: Vec<String>) -> Result<ContractionCertificate> {
    if violations.is_empty() {
        Ok(cert)
    } else {
        Err(HopError::ContractionViolated(violations))
    }
}
