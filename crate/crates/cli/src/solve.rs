//! `hopx solve`: run a solver on an instance file, optionally over several `p`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use hopx_core::{
    kkt_residual, solve_bisection_p2, solve_hop, BisectionConfig, HopProblem, Lambda0, SolveReport, SolverConfig,
};
use rayon::prelude::*;

use crate::error::CliError;
use crate::instance::{num, read_vector, Instance};
use crate::trace::{write_dump, write_trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Fixedpoint,
    Bisect,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fixedpoint => "fixedpoint",
            Method::Bisect => "bisect",
        }
    }
}

/// `auto`, `zero` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lambda0Arg {
    Auto,
    Zero,
    File(PathBuf),
}

impl FromStr for Lambda0Arg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Lambda0Arg::Auto),
            "zero" => Ok(Lambda0Arg::Zero),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Lambda0Arg::File(PathBuf::from(path))),
                _ => Err(format!("expected auto, zero or file:<path>, got '{s}'")),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub lambda0: Lambda0Arg,
    pub trace: Option<PathBuf>,
    /// Values of `p` to run; empty means the instance's own `p`.
    pub ps: Vec<f64>,
    pub sigma: Option<f64>,
    pub timing: bool,
    pub dump: Option<PathBuf>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Fixedpoint,
            tol: None,
            max_iters: None,
            lambda0: Lambda0Arg::Auto,
            trace: None,
            ps: Vec::new(),
            sigma: None,
            timing: false,
            dump: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub p: f64,
    pub report: SolveReport,
    pub objective: f64,
    pub residual: f64,
    pub trace_path: Option<PathBuf>,
}

impl RunSummary {
    pub fn line(&self, method: Method) -> String {
        format!(
            "p={} method={} iterations={} converged={} objective={} residual={}",
            self.p,
            method.name(),
            self.report.iterations,
            self.report.converged,
            num(self.objective),
            num(self.residual)
        )
    }
}

/// `trace.csv` becomes `trace.p3.csv` when several `p` values share one path.
pub fn sweep_path(base: &Path, p: f64, sweep: bool) -> PathBuf {
    if !sweep {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.p{p}.{}", ext.to_string_lossy()),
        None => format!("{stem}.p{p}"),
    };
    base.with_file_name(name)
}

/// Worker count for sweeps: `HOPX_THREADS` if set to a positive integer.
pub fn sweep_threads() -> Option<usize> {
    std::env::var("HOPX_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
}

pub fn solve_instance(inst: &Instance, opts: &SolveOptions) -> Result<Vec<RunSummary>, CliError> {
    let ps = if opts.ps.is_empty() {
        vec![inst.p]
    } else {
        opts.ps.clone()
    };
    if opts.method == Method::Bisect {
        if let Some(&p) = ps.iter().find(|&&p| p != 2.0) {
            return Err(CliError::Usage(format!("--method bisect requires p = 2, got p = {p}")));
        }
    }
    if let Some(&p) = ps.iter().find(|&&p| !(p >= 1.0)) {
        return Err(CliError::Usage(format!("p must be >= 1, got {p}")));
    }
    let lambda0 = match &opts.lambda0 {
        Lambda0Arg::Auto => Lambda0::Auto,
        Lambda0Arg::Zero => Lambda0::Zero,
        Lambda0Arg::File(path) => Lambda0::Given(read_vector(path, inst.n())?),
    };
    let f = inst.function()?;
    let sigma = opts.sigma.unwrap_or(inst.sigma);
    let sweep = ps.len() > 1;

    let run = |p: f64| -> Result<RunSummary, CliError> {
        let problem = HopProblem::new(&f, sigma, p, inst.c.clone())?;
        let report = match opts.method {
            Method::Fixedpoint => {
                let mut cfg = SolverConfig {
                    lambda0: lambda0.clone(),
                    keep_iterates: opts.dump.is_some(),
                    ..SolverConfig::default()
                };
                if let Some(tol) = opts.tol {
                    cfg.tol = tol;
                }
                if let Some(k) = opts.max_iters {
                    cfg.max_iters = k;
                }
                solve_hop(&problem, &cfg)?
            }
            Method::Bisect => {
                let mut cfg = BisectionConfig::default();
                if let Some(tol) = opts.tol {
                    cfg.tol_t = tol;
                }
                if let Some(k) = opts.max_iters {
                    cfg.max_iters = k;
                }
                solve_bisection_p2(&f, &inst.c, sigma, &cfg)?.report
            }
        };
        let trace_path = opts.trace.as_ref().map(|base| sweep_path(base, p, sweep));
        if let Some(path) = &trace_path {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            write_trace(std::io::BufWriter::new(file), &report.trace, opts.timing)?;
        }
        if let Some(base) = &opts.dump {
            let path = sweep_path(base, p, sweep);
            let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            write_dump(std::io::BufWriter::new(file), &report.trace)?;
        }
        Ok(RunSummary {
            p,
            objective: hopx_core::hop_objective(&problem, &report.x)?,
            residual: kkt_residual(&problem, &report.x)?,
            report,
            trace_path,
        })
    };

    let results: Vec<Result<RunSummary, CliError>> = if sweep {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = sweep_threads() {
            builder = builder.num_threads(k);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| ps.par_iter().map(|&p| run(p)).collect())
    } else {
        ps.iter().map(|&p| run(p)).collect()
    };
    results.into_iter().collect()
}
