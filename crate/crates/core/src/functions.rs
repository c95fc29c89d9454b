//! Catalog of convex functions with closed-form classical proximal operators.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{check_dim, invalid, HopError, Result};
use crate::problem::{check_step, ensure_finite, Capabilities, ProxFunction, Vector};

/// `f(x) = ½xᵀAx + bᵀx` with `A` symmetric positive semidefinite.
///
/// The eigendecomposition `A = Q·diag(Λ)·Qᵀ` is computed once at construction;
/// each prox then costs two dense products with a diagonal scaling.
#[derive(Debug, Clone)]
pub struct QuadraticFunction {
    a: DMatrix<f64>,
    b: Vector,
    eigenvalues: Vector,
    eigenvectors: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const PROX_RESIDUAL_TOL: f64 = 1e-10;

impl QuadraticFunction {
    pub fn new(a: DMatrix<f64>, b: Vector) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(invalid("b", "dimension must be >= 1"));
        }
        check_dim(n, a.nrows())?;
        check_dim(n, a.ncols())?;
        if !a.iter().all(|x| x.is_finite()) {
            return Err(HopError::NonFinite("quadratic matrix"));
        }
        ensure_finite(&b, "quadratic linear term")?;

        let scale = a.amax().max(1.0);
        let asym = (&a - a.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(invalid("A", format!("not symmetric (max |A - Aᵀ| = {asym:e})")));
        }
        let a = (&a + a.transpose()) * 0.5;

        let eig = SymmetricEigen::new(a.clone());
        let min_eig = eig.eigenvalues.min();
        if min_eig < -PSD_TOL * scale {
            return Err(invalid(
                "A",
                format!("not positive semidefinite (min eigenvalue {min_eig:e})"),
            ));
        }
        let eigenvalues = eig.eigenvalues.map(|l| l.max(0.0));
        Ok(Self {
            a,
            b,
            eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    /// Clamped eigenvalues of `A`.
    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    /// `(I + tA)y = c − tb`, solved in the form `y = c − t(I + tA)⁻¹(Ac + b)` so that
    /// a center with `Ac + b = 0` is returned bit-for-bit.
    fn solve_prox(&self, t: f64, c: &Vector) -> Vector {
        if t == 0.0 {
            return c.clone();
        }
        let g = self.grad(c);
        let mut z = self.eigenvectors.tr_mul(&g);
        for (zi, li) in z.iter_mut().zip(self.eigenvalues.iter()) {
            *zi /= 1.0 + t * li;
        }
        c - (&self.eigenvectors * z) * t
    }

    fn grad(&self, x: &Vector) -> Vector {
        &self.a * x + &self.b
    }
}

impl ProxFunction for QuadraticFunction {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x)
    }

    fn prox(&self, t: f64, c: &Vector) -> Result<Vector> {
        check_dim(self.dim(), c.len())?;
        check_step(t)?;
        let y = self.solve_prox(t, c);

        // Backward-error check of (I + tA)y = c − tb against the size of its terms.
        let ay = &self.a * &y;
        let residual = (&y + &ay * t - (c - &self.b * t)).norm();
        let scale = y.norm() + t * ay.norm() + c.norm() + t * self.b.norm();
        let bound = PROX_RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE);
        if !(residual <= bound) {
            return Err(HopError::NumericalFailure { residual, bound });
        }
        Ok(y)
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(self.grad(x))
    }

    /// `½(y − b)ᵀA⁺(y − b)` when `y − b` lies in the range of `A` (up to round-off), else `+∞`.
    fn conjugate(&self, y: &Vector) -> Option<f64> {
        let d = y - &self.b;
        let z = self.eigenvectors.tr_mul(&d);
        let lmax = self.eigenvalues.max().max(0.0);
        let eig_floor = 1e-12 * lmax.max(1.0);
        let range_tol = 1e-9 * d.norm().max(1.0);
        let mut acc = 0.0;
        for (zi, li) in z.iter().zip(self.eigenvalues.iter()) {
            if *li > eig_floor {
                acc += zi * zi / (2.0 * li);
            } else if zi.abs() > range_tol {
                return Some(f64::INFINITY);
            }
        }
        Some(acc)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            has_conjugate_value: true,
        }
    }
}

/// `f(x) = ‖x‖₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L1Norm {
    dim: usize,
}

impl L1Norm {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

/// Coordinate-wise soft threshold `sign(cᵢ)·max(|cᵢ| − t, 0)`.
pub fn soft_threshold(t: f64, c: &Vector) -> Vector {
    c.map(|x| {
        let m = x.abs() - t;
        if m > 0.0 {
            x.signum() * m
        } else {
            0.0
        }
    })
}

impl ProxFunction for L1Norm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        x.lp_norm(1)
    }

    fn prox(&self, t: f64, c: &Vector) -> Result<Vector> {
        check_dim(self.dim, c.len())?;
        check_step(t)?;
        if t == 0.0 {
            return Ok(c.clone());
        }
        Ok(soft_threshold(t, c))
    }

    /// Indicator of the unit `ℓ∞` ball, with `1e-12` round-off allowance.
    fn conjugate(&self, y: &Vector) -> Option<f64> {
        Some(if y.amax() <= 1.0 + 1e-12 { 0.0 } else { f64::INFINITY })
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: false,
            has_conjugate_value: true,
        }
    }
}

/// `f(x) = aᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunction {
    a: Vector,
}

impl LinearFunction {
    pub fn new(a: Vector) -> Result<Self> {
        if a.is_empty() {
            return Err(invalid("a", "dimension must be >= 1"));
        }
        ensure_finite(&a, "linear coefficients")?;
        Ok(Self { a })
    }

    pub fn a(&self) -> &Vector {
        &self.a
    }
}

impl ProxFunction for LinearFunction {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.a.dot(x)
    }

    fn prox(&self, t: f64, c: &Vector) -> Result<Vector> {
        check_dim(self.dim(), c.len())?;
        check_step(t)?;
        Ok(c - &self.a * t)
    }

    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        Some(self.a.clone())
    }

    /// Indicator of `{a}`; `y` within `1e-12·max(1, ‖a‖)` of `a` counts as equal.
    fn conjugate(&self, y: &Vector) -> Option<f64> {
        let tol = 1e-12 * self.a.norm().max(1.0);
        Some(if (y - &self.a).norm() <= tol {
            0.0
        } else {
            f64::INFINITY
        })
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            has_conjugate_value: true,
        }
    }
}

/// Indicator of the single point `{b}`.
///
/// The prox returns `b` for every `t`, including `t = 0` where the operator is
/// not well-posed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointIndicator {
    b: Vector,
}

impl PointIndicator {
    pub fn new(b: Vector) -> Result<Self> {
        if b.is_empty() {
            return Err(invalid("b", "dimension must be >= 1"));
        }
        ensure_finite(&b, "point")?;
        Ok(Self { b })
    }

    pub fn point(&self) -> &Vector {
        &self.b
    }
}

impl ProxFunction for PointIndicator {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        if *x == self.b {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, t: f64, c: &Vector) -> Result<Vector> {
        check_dim(self.dim(), c.len())?;
        check_step(t)?;
        Ok(self.b.clone())
    }

    fn conjugate(&self, y: &Vector) -> Option<f64> {
        Some(self.b.dot(y))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: false,
            has_conjugate_value: true,
        }
    }
}

/// Closed set of catalog functions, convenient for serialization and bindings.
#[derive(Debug, Clone)]
pub enum CatalogFunction {
    Quadratic(QuadraticFunction),
    L1(L1Norm),
    Linear(LinearFunction),
    Point(PointIndicator),
}

impl CatalogFunction {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Quadratic(_) => "quadratic",
            Self::L1(_) => "l1",
            Self::Linear(_) => "linear",
            Self::Point(_) => "point",
        }
    }

    fn inner(&self) -> &dyn ProxFunction {
        match self {
            Self::Quadratic(f) => f,
            Self::L1(f) => f,
            Self::Linear(f) => f,
            Self::Point(f) => f,
        }
    }
}

impl ProxFunction for CatalogFunction {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.inner().value(x)
    }
    fn prox(&self, t: f64, c: &Vector) -> Result<Vector> {
        self.inner().prox(t, c)
    }
    fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.inner().gradient(x)
    }
    fn conjugate(&self, y: &Vector) -> Option<f64> {
        self.inner().conjugate(y)
    }
    fn capabilities(&self) -> Capabilities {
        self.inner().capabilities()
    }
}

impl From<QuadraticFunction> for CatalogFunction {
    fn from(f: QuadraticFunction) -> Self {
        Self::Quadratic(f)
    }
}

impl From<L1Norm> for CatalogFunction {
    fn from(f: L1Norm) -> Self {
        Self::L1(f)
    }
}

impl From<LinearFunction> for CatalogFunction {
    fn from(f: LinearFunction) -> Self {
        Self::Linear(f)
    }
}

impl From<PointIndicator> for CatalogFunction {
    fn from(f: PointIndicator) -> Self {
        Self::Point(f)
    }
}

/// Second-order model of `g(x) = log Σᵢ exp(aᵢᵀx − bᵢ)` at `c`:
/// returns the quadratic with `A = ∇²g(c)` and `b = ∇g(c)`.
///
/// `a_rows` is `m × n` with row `i` equal to `aᵢ`.
pub fn logsumexp_instance(a_rows: &DMatrix<f64>, b_shift: &Vector, c: &Vector) -> Result<QuadraticFunction> {
    let (m, n) = a_rows.shape();
    if m == 0 || n == 0 {
        return Err(invalid("a_rows", "need m >= 1 and n >= 1"));
    }
    check_dim(m, b_shift.len())?;
    check_dim(n, c.len())?;
    if !a_rows.iter().all(|x| x.is_finite()) {
        return Err(HopError::NonFinite("log-sum-exp rows"));
    }
    ensure_finite(b_shift, "log-sum-exp shifts")?;
    ensure_finite(c, "log-sum-exp center")?;

    let exponents = a_rows * c - b_shift;
    let top = exponents.max();
    let mut w = exponents.map(|s| (s - top).exp());
    let total = w.sum();
    w /= total;

    let grad = a_rows.tr_mul(&w);

    // Hessian as the weighted covariance Σ wᵢ(aᵢ − ḡ)(aᵢ − ḡ)ᵀ; rows whose weight
    // underflowed to zero contribute nothing and are skipped.
    let active: Vec<usize> = (0..m).filter(|&i| w[i] > 0.0).collect();
    let mut centered = DMatrix::zeros(active.len(), n);
    for (r, &i) in active.iter().enumerate() {
        let s = w[i].sqrt();
        for j in 0..n {
            centered[(r, j)] = s * (a_rows[(i, j)] - grad[j]);
        }
    }
    let hess = centered.tr_mul(&centered);
    QuadraticFunction::new(hess, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn quadratic_prox_examples() {
        let b = v(&[0.7, -1.1]);
        let zero = QuadraticFunction::new(DMatrix::zeros(2, 2), b.clone()).unwrap();
        let c = v(&[1.0, 2.0]);
        assert_relative_eq!(zero.prox(0.3, &c).unwrap(), &c - &b * 0.3, epsilon = 1e-15);

        let id = QuadraticFunction::new(DMatrix::identity(2, 2), v(&[0.0, 0.0])).unwrap();
        assert_relative_eq!(id.prox(1.0, &c).unwrap(), &c / 2.0, epsilon = 1e-15);

        // [[2,0],[0,1.5]] y = (0.5, 1.5)  =>  y = (0.25, 1.0)
        let q = QuadraticFunction::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]), v(&[1.0, -1.0])).unwrap();
        let y = q.prox(0.5, &v(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(y, v(&[0.25, 1.0]), epsilon = 1e-15);
        assert_eq!(q.prox(0.0, &c).unwrap(), c);
    }

    #[test]
    fn quadratic_rejects_bad_matrices() {
        let nonsym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(QuadraticFunction::new(nonsym, v(&[0.0, 0.0])).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(QuadraticFunction::new(indefinite, v(&[0.0, 0.0])).is_err());
        assert!(QuadraticFunction::new(DMatrix::zeros(3, 3), v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn l1_prox_examples() {
        let f = L1Norm::new(3);
        assert_eq!(f.prox(1.0, &v(&[2.0, -0.5, 0.0])).unwrap(), v(&[1.0, 0.0, 0.0]));
        let c = v(&[0.3, -4.0, 1e-9]);
        assert_eq!(f.prox(0.0, &c).unwrap(), c);
        let g = L1Norm::new(2);
        assert_eq!(g.prox(0.5, &v(&[1.0, -2.0])).unwrap(), v(&[0.5, -1.5]));
        assert!(g.prox(-1.0, &v(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn linear_prox_examples() {
        let f = LinearFunction::new(v(&[1.0, 2.0])).unwrap();
        let c = v(&[0.4, -0.1]);
        assert_eq!(f.prox(0.0, &c).unwrap(), c);
        assert_eq!(f.prox(2.0, &v(&[0.0, 0.0])).unwrap(), v(&[-2.0, -4.0]));
        let zero = LinearFunction::new(v(&[0.0, 0.0])).unwrap();
        assert_eq!(zero.prox(3.0, &c).unwrap(), c);
    }

    #[test]
    fn point_prox_examples() {
        let b = v(&[1.0, -3.0]);
        let f = PointIndicator::new(b.clone()).unwrap();
        assert_eq!(f.prox(1.0, &v(&[9.0, 9.0])).unwrap(), b);
        assert_eq!(f.prox(1.0, &b).unwrap(), b);
        assert_eq!(f.prox(1e-9, &v(&[0.0, 0.0])).unwrap(), b);
        assert_eq!(f.value(&b), 0.0);
        assert_eq!(f.value(&v(&[1.0, -3.0 + 1e-12])), f64::INFINITY);
    }

    #[test]
    fn conjugates() {
        let id = QuadraticFunction::new(DMatrix::identity(2, 2), v(&[0.0, 0.0])).unwrap();
        assert_relative_eq!(id.conjugate(&v(&[1.0, 0.0])).unwrap(), 0.5, epsilon = 1e-15);
        let flat = QuadraticFunction::new(DMatrix::zeros(2, 2), v(&[1.0, 1.0])).unwrap();
        assert_eq!(flat.conjugate(&v(&[1.0, 1.0])), Some(0.0));
        assert_eq!(flat.conjugate(&v(&[1.0, 2.0])), Some(f64::INFINITY));
        let lin = LinearFunction::new(v(&[2.0])).unwrap();
        assert_eq!(lin.conjugate(&v(&[2.0])), Some(0.0));
        assert_eq!(lin.conjugate(&v(&[0.0])), Some(f64::INFINITY));
        let l1 = L1Norm::new(2);
        assert_eq!(l1.conjugate(&v(&[1.0, -0.5])), Some(0.0));
        assert_eq!(l1.conjugate(&v(&[1.1, 0.0])), Some(f64::INFINITY));
    }

    #[test]
    fn logsumexp_small_cases() {
        let single = logsumexp_instance(
            &DMatrix::from_row_slice(1, 2, &[0.5, -2.0]),
            &v(&[0.3]),
            &v(&[1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(single.b(), &v(&[0.5, -2.0]));
        assert!(single.a().amax() == 0.0);

        // a = ±1, shifts 0, c = 0: w = (1/2, 1/2), gradient 0, Hessian 1
        let pair = logsumexp_instance(
            &DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            &v(&[0.0, 0.0]),
            &v(&[0.0]),
        )
        .unwrap();
        assert_relative_eq!(pair.b()[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(pair.a()[(0, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn logsumexp_survives_large_exponents() {
        let rows = DMatrix::from_row_slice(3, 1, &[1000.0, 999.0, -1000.0]);
        let q = logsumexp_instance(&rows, &v(&[0.0, 0.0, 0.0]), &v(&[1.0])).unwrap();
        assert!(q.b()[0].is_finite() && q.a()[(0, 0)].is_finite());
        assert!(q.b()[0] > 999.0 && q.b()[0] < 1000.0);
    }
}
