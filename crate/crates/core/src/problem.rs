//! The regularized problem `min f(x) + σ/(p+1)·‖x − c‖^{p+1}`, its dual,
//! and the small maps shared by every solver.
//!
//! All norms are Euclidean.

use nalgebra::DVector;

use crate::error::{check_dim, invalid, HopError, Result};

/// Dense real vector. Public entry points reject non-finite entries.
pub type Vector = DVector<f64>;

/// Optional capabilities a [`ProxFunction`] may expose beyond evaluation and prox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    /// `f` is differentiable everywhere and [`ProxFunction::gradient`] returns its gradient.
    pub has_gradient: bool,
    /// [`ProxFunction::conjugate`] returns `f*`.
    pub has_conjugate_value: bool,
}

/// A closed proper convex function with a computable classical proximal operator.
pub trait ProxFunction: Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x)`; indicator-type functions return `+∞` off their domain.
    fn value(&self, x: &Vector) -> f64;

    /// Classical prox `argmin_y f(y) + ‖y − c‖²/(2t)`. At `t = 0` this is the
    /// identity on `c` (except for indicators, see [`crate::PointIndicator`]).
    fn prox(&self, t: f64, c: &Vector) -> Result<Vector>;

    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    /// Convex conjugate `f*(y) = sup_x xᵀy − f(x)`, possibly `+∞`.
    fn conjugate(&self, _y: &Vector) -> Option<f64> {
        None
    }

    fn capabilities(&self) -> Capabilities;
}

pub(crate) fn ensure_finite(v: &Vector, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(HopError::NonFinite(what))
    }
}

pub(crate) fn check_step(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("t", format!("prox parameter must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// One instance of the high-order proximal problem: `(f, σ, p, c)`.
#[derive(Clone)]
pub struct HopProblem<'a> {
    f: &'a dyn ProxFunction,
    sigma: f64,
    p: f64,
    c: Vector,
}

impl<'a> HopProblem<'a> {
    pub fn new(f: &'a dyn ProxFunction, sigma: f64, p: f64, c: Vector) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid("p", format!("must be finite and >= 1, got {p}")));
        }
        check_dim(f.dim(), c.len())?;
        ensure_finite(&c, "center")?;
        Ok(Self { f, sigma, p, c })
    }

    pub fn f(&self) -> &'a dyn ProxFunction {
        self.f
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn center(&self) -> &Vector {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Dual weight `σ^{-1/p}`.
    pub fn mu(&self) -> f64 {
        self.sigma.powf(-1.0 / self.p)
    }

    /// Same `f`, `σ`, `p` around a new center.
    pub fn recentered(&self, c: Vector) -> Result<Self> {
        Self::new(self.f, self.sigma, self.p, c)
    }

    /// Primal point paired with a dual vector: `c − σ^{-1/p}·i_p(λ)`.
    pub fn primal_from_dual(&self, lambda: &Vector) -> Vector {
        &self.c - ip_map(lambda, self.p) * self.mu()
    }

    /// Dual vector paired with a primal point: `σ‖x − c‖^{p−1}(c − x)`.
    pub fn dual_from_primal(&self, x: &Vector) -> Vector {
        let d = &self.c - x;
        let r = d.norm();
        if r == 0.0 {
            return Vector::zeros(d.len());
        }
        d * (self.sigma * r.powf(self.p - 1.0))
    }

    /// Gradient of the power term, `σ‖x − c‖^{p−1}(x − c)`.
    pub fn power_gradient(&self, x: &Vector) -> Vector {
        -self.dual_from_primal(x)
    }
}

impl std::fmt::Debug for HopProblem<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HopProblem")
            .field("dim", &self.c.len())
            .field("sigma", &self.sigma)
            .field("p", &self.p)
            .finish()
    }
}

/// `i_p(x) = x / ‖x‖^{1−1/p}`, with `i_p(0) = 0`. The result has norm `‖x‖^{1/p}`.
pub fn ip_map(x: &Vector, p: f64) -> Vector {
    let r = x.norm();
    if r == 0.0 {
        return Vector::zeros(x.len());
    }
    x * r.powf(1.0 / p - 1.0)
}

/// `F(x) = f(x) + σ/(p+1)·‖x − c‖^{p+1}`.
pub fn hop_objective(problem: &HopProblem<'_>, x: &Vector) -> Result<f64> {
    check_dim(problem.dim(), x.len())?;
    let p = problem.p;
    let power = problem.sigma / (p + 1.0) * (x - &problem.c).norm().powf(p + 1.0);
    Ok(problem.f.value(x) + power)
}

/// Conjugate of `y ↦ σ/(p+1)‖y − c‖^{p+1}` evaluated at `λ`:
/// `λᵀc + σ^{-1/p}/(1+1/p)·‖λ‖^{1+1/p}`.
pub fn power_norm_conjugate(lambda: &Vector, sigma: f64, p: f64, c: &Vector) -> Result<f64> {
    check_dim(c.len(), lambda.len())?;
    if !(sigma > 0.0) {
        return Err(invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    if !(p >= 1.0) {
        return Err(invalid("p", format!("must be >= 1, got {p}")));
    }
    let q = 1.0 + 1.0 / p;
    Ok(lambda.dot(c) + sigma.powf(-1.0 / p) / q * lambda.norm().powf(q))
}

/// Dual objective `f*(λ) − λᵀc + σ^{-1/p}/(1+1/p)·‖λ‖^{1+1/p}`.
///
/// Its minimum is the negative of the primal optimum.
pub fn dual_objective(problem: &HopProblem<'_>, lambda: &Vector) -> Result<f64> {
    check_dim(problem.dim(), lambda.len())?;
    let fstar = problem
        .f
        .conjugate(lambda)
        .ok_or(HopError::MissingCapability("a conjugate value"))?;
    let neg = -lambda;
    Ok(fstar + power_norm_conjugate(&neg, problem.sigma, problem.p, &problem.c)?)
}

/// `F(x) + D(λ)`: nonnegative for every pair, zero at the optimal pair.
pub fn weak_duality_gap(problem: &HopProblem<'_>, x: &Vector, lambda: &Vector) -> Result<f64> {
    Ok(hop_objective(problem, x)? + dual_objective(problem, lambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn ip_map_zero_and_identity_cases() {
        assert_eq!(ip_map(&v(&[0.0, 0.0, 0.0]), 3.0), v(&[0.0, 0.0, 0.0]));
        let x = v(&[1.5, -2.0, 0.25]);
        assert_eq!(ip_map(&x, 1.0), x);
    }

    #[test]
    fn ip_map_three_four() {
        // (3,4)/sqrt(5) computed by hand: 3/2.2360679774997896, 4/2.2360679774997896
        let y = ip_map(&v(&[3.0, 4.0]), 2.0);
        assert_relative_eq!(y[0], 1.341_640_786_499_873_8, max_relative = 1e-14);
        assert_relative_eq!(y[1], 1.788_854_381_999_831_8, max_relative = 1e-14);
        assert_relative_eq!(y.norm(), 5f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn conjugate_examples() {
        let z = v(&[0.0, 0.0]);
        assert_eq!(power_norm_conjugate(&z, 2.0, 3.0, &v(&[1.0, 2.0])).unwrap(), 0.0);
        let lam = v(&[0.3, -1.2]);
        assert_relative_eq!(
            power_norm_conjugate(&lam, 1.0, 1.0, &z).unwrap(),
            lam.norm_squared() / 2.0,
            max_relative = 1e-14
        );
        let val = power_norm_conjugate(&v(&[2.0, 0.0]), 1.0, 2.0, &v(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(val, 2.0 + 2.0 / 3.0 * 2f64.powf(1.5), max_relative = 1e-14);
        assert_relative_eq!(val, 3.885_618_083_164_127, max_relative = 1e-12);
    }

    #[test]
    fn problem_validation() {
        let f = crate::L1Norm::new(2);
        assert!(HopProblem::new(&f, 0.0, 2.0, v(&[0.0, 0.0])).is_err());
        assert!(HopProblem::new(&f, 1.0, 0.5, v(&[0.0, 0.0])).is_err());
        assert!(HopProblem::new(&f, 1.0, 2.0, v(&[0.0])).is_err());
        assert!(HopProblem::new(&f, 1.0, 2.0, v(&[f64::NAN, 0.0])).is_err());
        assert!(HopProblem::new(&f, 1.0, 2.0, v(&[0.0, 0.0])).is_ok());
    }

    #[test]
    fn dual_requires_conjugate() {
        struct Opaque;
        impl ProxFunction for Opaque {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _x: &Vector) -> f64 {
                0.0
            }
            fn prox(&self, _t: f64, c: &Vector) -> Result<Vector> {
                Ok(c.clone())
            }
            fn capabilities(&self) -> Capabilities {
                Capabilities::default()
            }
        }
        let prob = HopProblem::new(&Opaque, 1.0, 2.0, v(&[0.0])).unwrap();
        assert!(matches!(
            dual_objective(&prob, &v(&[1.0])),
            Err(HopError::MissingCapability(_))
        ));
    }
}
