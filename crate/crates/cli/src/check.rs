//! `hopx check`: seeded property suites at desk scale.
//!
//! Case `k` uses the instance generated from seed `seed + k`. Every assertion
//! prints one `key=value` line; the first violation is written to the
//! counterexample file as an instance with the failure in a comment.

use std::path::PathBuf;

use hopx_core::{
    check_contraction, check_t_sandwich, oracle_prox_gradient, oracle_quadratic_hop, solve_hop, t_value,
    weak_duality_gap, HopProblem, Lambda0, NormalStream, SolverConfig, Vector,
};

use crate::error::CliError;
use crate::generate::{generate, GenSpec};
use crate::instance::{Instance, InstanceData, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Property {
    Contraction,
    Lemma51,
    Duality,
    OracleAgreement,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Contraction => "contraction",
            Property::Lemma51 => "lemma51",
            Property::Duality => "duality",
            Property::OracleAgreement => "oracle-agreement",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub seed: u64,
    pub n: usize,
    pub cases: usize,
    pub pairs: usize,
    pub counterexample: PathBuf,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 10,
            cases: 5,
            pairs: 100,
            counterexample: PathBuf::from("hopx-counterexample.txt"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Assertion {
    pub line: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOutcome {
    pub assertions: Vec<Assertion>,
    pub counterexample: Option<(Instance, String)>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    fn record(&mut self, property: Property, fields: String, ok: bool, inst: &Instance, why: impl FnOnce() -> String) {
        let status = if ok { "pass" } else { "fail" };
        self.assertions.push(Assertion {
            line: format!("property={} {fields} status={status}", property.name()),
            passed: ok,
        });
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some((inst.clone(), why()));
        }
    }

    /// Instance text with the failure recorded as comments after the header.
    pub fn counterexample_text(&self) -> Option<String> {
        let (inst, why) = self.counterexample.as_ref()?;
        let text = inst.to_text();
        let (head, rest) = text.split_once('\n').unwrap_or((&text, ""));
        let comments: String = why.lines().map(|l| format!("# {l}\n")).collect();
        Some(format!("{head}\n{comments}{rest}"))
    }
}

fn instance(kind: Kind, opts: &CheckOptions, case: usize, p: f64) -> Result<Instance, CliError> {
    generate(&GenSpec {
        kind,
        n: opts.n,
        m: 2 * opts.n,
        seed: opts.seed.wrapping_add(case as u64),
        p,
        sigma: 1.0,
    })
}

fn solver_config() -> SolverConfig {
    SolverConfig {
        tol: 1e-12,
        max_iters: 10_000,
        ..SolverConfig::default()
    }
}

pub fn run_check(property: Property, opts: &CheckOptions) -> Result<CheckOutcome, CliError> {
    if opts.n == 0 || opts.cases == 0 {
        return Err(CliError::Usage("--n and --cases must be >= 1".into()));
    }
    let mut out = CheckOutcome::default();
    match property {
        Property::Contraction => contraction(opts, &mut out)?,
        Property::Lemma51 => lemma51(opts, &mut out)?,
        Property::Duality => duality(opts, &mut out)?,
        Property::OracleAgreement => oracle_agreement(opts, &mut out)?,
    }
    Ok(out)
}

/// Dual-norm contraction from both sides of `‖λ*‖` on log-sum-exp quadratics.
fn contraction(opts: &CheckOptions, out: &mut CheckOutcome) -> Result<(), CliError> {
    for case in 0..opts.cases {
        for p in [2.0, 3.0, 4.0] {
            let inst = instance(Kind::Quadratic, opts, case, p)?;
            let InstanceData::Quadratic { a, b } = &inst.data else {
                unreachable!()
            };
            let q = hopx_core::QuadraticFunction::new(a.clone(), b.clone())?;
            let oracle = oracle_quadratic_hop(&q, inst.sigma, p, &inst.c, 1e-10)?;
            let star = oracle.lambda_star.norm();
            let mut rng = NormalStream::new(opts.seed.wrapping_add(case as u64) ^ 0x5eed);
            for (side, scale) in [("above", 10.0), ("below", 0.1)] {
                let dir = rng.vector(inst.n());
                let start = &dir * (scale * star / dir.norm());
                let problem = HopProblem::new(&q, inst.sigma, p, inst.c.clone())?;
                let cfg = SolverConfig {
                    lambda0: Lambda0::Given(start),
                    keep_iterates: true,
                    ..solver_config()
                };
                let rep = solve_hop(&problem, &cfg)?;
                let cert = check_contraction(&rep.trace, &oracle.lambda_star, p);
                let detail = match &cert {
                    Ok(c) => format!("max_ratio={:e}", c.max_ratio().unwrap_or(0.0)),
                    Err(e) => format!("error=\"{e}\""),
                };
                out.record(
                    Property::Contraction,
                    format!("case={case} p={p} side={side} iterations={} {detail}", rep.iterations),
                    cert.is_ok() && rep.converged,
                    &inst,
                    || format!("contraction p={p} side={side}: {cert:?}"),
                );
            }
        }
    }
    Ok(())
}

/// `T(t₂)` between linear and quadratic growth from `T(t₁)`, plus the
/// fixtures that attain each bound.
fn lemma51(opts: &CheckOptions, out: &mut CheckOutcome) -> Result<(), CliError> {
    let kinds = [Kind::Quadratic, Kind::L1, Kind::Linear, Kind::Point];
    for case in 0..opts.cases {
        let kind = kinds[case % kinds.len()];
        let inst = instance(kind, opts, case, 2.0)?;
        let f = inst.function()?;
        let mut rng = NormalStream::new(opts.seed.wrapping_add(case as u64) ^ 0x51);
        let pairs: Vec<(f64, f64)> = (0..opts.pairs)
            .map(|_| {
                let a = 10f64.powf(4.0 * rng.uniform() - 2.0);
                let b = 10f64.powf(4.0 * rng.uniform() - 2.0);
                (a.min(b), a.max(b))
            })
            .collect();
        let report = check_t_sandwich(&f, &inst.c, &pairs)?;
        out.record(
            Property::Lemma51,
            format!(
                "case={case} kind={} pairs={} violations={}",
                kind.name(),
                pairs.len(),
                report.violations.len()
            ),
            report.holds,
            &inst,
            || format!("sandwich violated at pairs {:?}", report.violations),
        );

        // Linear f attains the upper bound, the point indicator the lower one.
        let bound = match kind {
            Kind::Linear => Some(("upper", 2)),
            Kind::Point => Some(("lower", 1)),
            _ => None,
        };
        if let Some((which, power)) = bound {
            let mut worst: f64 = 0.0;
            for &(t1, t2) in &pairs {
                let predicted = (t2 / t1).powi(power) * t_value(&f, &inst.c, t1)?;
                let actual = t_value(&f, &inst.c, t2)?;
                worst = worst.max((actual - predicted).abs() / predicted.max(1.0));
            }
            out.record(
                Property::Lemma51,
                format!("case={case} kind={} bound={which} max_error={worst:e}", kind.name()),
                worst <= 1e-10,
                &inst,
                || format!("{which} bound not attained, relative error {worst:e}"),
            );
        }
    }
    Ok(())
}

/// Weak duality on random pairs and a vanishing gap at the optimum.
fn duality(opts: &CheckOptions, out: &mut CheckOutcome) -> Result<(), CliError> {
    let kinds = [Kind::Point, Kind::Quadratic, Kind::L1, Kind::Linear];
    for case in 0..opts.cases {
        let kind = kinds[case % kinds.len()];
        let p = [2.0, 3.0][case / kinds.len() % 2];
        let inst = instance(kind, opts, case, p)?;
        let f = inst.function()?;
        let problem = HopProblem::new(&f, inst.sigma, p, inst.c.clone())?;
        let n = inst.n();
        let mut rng = NormalStream::new(opts.seed.wrapping_add(case as u64) ^ 0xd0a1);

        let mut worst = f64::INFINITY;
        for _ in 0..opts.pairs {
            let x = match &inst.data {
                InstanceData::Point { b } => b.clone(),
                _ => rng.vector(n),
            };
            let lambda = match &inst.data {
                InstanceData::L1 => rng.vector(n).map(|v| v.clamp(-1.0, 1.0)),
                _ => rng.vector(n),
            };
            worst = worst.min(weak_duality_gap(&problem, &x, &lambda)?);
        }
        out.record(
            Property::Duality,
            format!(
                "case={case} kind={} p={p} pairs={} min_gap={worst:e}",
                kind.name(),
                opts.pairs
            ),
            worst >= -1e-10,
            &inst,
            || format!("negative duality gap {worst:e}"),
        );

        let x_star = match &inst.data {
            InstanceData::Quadratic { a, b } => {
                let q = hopx_core::QuadraticFunction::new(a.clone(), b.clone())?;
                oracle_quadratic_hop(&q, inst.sigma, p, &inst.c, 1e-10)?.x_star
            }
            _ => oracle_prox_gradient(&problem, &inst.c, 100_000, 1.0)?.x_star,
        };
        let lambda = solve_hop(&problem, &solver_config())?.lambda;
        let gap = weak_duality_gap(&problem, &x_star, &lambda)?;
        out.record(
            Property::Duality,
            format!("case={case} kind={} p={p} optimal_gap={gap:e}", kind.name()),
            (-1e-10..=1e-6).contains(&gap),
            &inst,
            || format!("duality gap at the optimum is {gap:e}"),
        );
    }
    Ok(())
}

/// The fixed-point solver against both oracles.
fn oracle_agreement(opts: &CheckOptions, out: &mut CheckOutcome) -> Result<(), CliError> {
    for case in 0..opts.cases {
        for p in [2.0, 3.0] {
            for kind in [Kind::Quadratic, Kind::L1] {
                let inst = instance(kind, opts, case, p)?;
                let f = inst.function()?;
                let problem = HopProblem::new(&f, inst.sigma, p, inst.c.clone())?;
                let x = solve_hop(&problem, &solver_config())?.x;
                let generic = oracle_prox_gradient(&problem, &inst.c, 100_000, 1.0)?;
                let (err, bound, extra) = match &inst.data {
                    InstanceData::Quadratic { a, b } => {
                        let q = hopx_core::QuadraticFunction::new(a.clone(), b.clone())?;
                        let exact = oracle_quadratic_hop(&q, inst.sigma, p, &inst.c, 1e-10)?;
                        let cross = dist(&generic.x_star, &exact.x_star);
                        (dist(&x, &exact.x_star), 1e-6, Some(cross))
                    }
                    _ => (dist(&x, &generic.x_star), 1e-4, None),
                };
                let cross_ok = extra.is_none_or(|d| d <= 1e-6);
                let cross_field = extra.map(|d| format!(" oracle_gap={d:e}")).unwrap_or_default();
                out.record(
                    Property::OracleAgreement,
                    format!("case={case} kind={} p={p} error={err:e}{cross_field}", kind.name()),
                    err <= bound && cross_ok,
                    &inst,
                    || format!("solver/oracle distance {err:e} (bound {bound:e}){cross_field}"),
                );
            }
        }
    }
    Ok(())
}

fn dist(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm()
}
