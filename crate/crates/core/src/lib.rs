//! High-order proximal operators from classical proximal steps.
//!
//! The central routine is [`solve_hop`], which computes
//! `argmin_x f(x) + σ/(p+1)·‖x − c‖^{p+1}` by a fixed-point iteration on the
//! dual variable; each step is a single classical prox of `f`. For `p = 2`,
//! [`solve_bisection_p2`] solves the same problem as a monotone scalar
//! equation. [`oracle`] holds independent reference solvers and
//! [`check_contraction`] verifies the linear contraction of dual norms on a
//! recorded trace.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bisection;
pub mod certificate;
pub mod error;
pub mod functions;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod solver;

pub use bisection::{
    check_t_sandwich, find_bracket, solve_bisection_p2, t_value, BisectionConfig, BisectionReport, BisectionState,
    BisectionStep, SandwichReport,
};
pub use certificate::{check_contraction, check_contraction_with, ContractionCertificate, ContractionTolerances, Side};
pub use error::{HopError, Result};
pub use functions::{
    logsumexp_instance, soft_threshold, CatalogFunction, L1Norm, LinearFunction, PointIndicator, QuadraticFunction,
};
pub use oracle::{oracle_prox_gradient, oracle_quadratic_hop, OracleResult};
pub use problem::{
    dual_objective, hop_objective, ip_map, power_norm_conjugate, weak_duality_gap, Capabilities, HopProblem,
    ProxFunction, Vector,
};
pub use rng::NormalStream;
pub use solver::{kkt_residual, run_hoppa, solve_hop, Lambda0, SolveReport, SolverConfig, TraceRecord};
