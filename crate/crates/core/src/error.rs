use thiserror::Error;

/// Errors produced by the solvers and the function catalog.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("non-finite iterate at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    #[error("degenerate step at iteration {iteration}: prox parameter {step:e} is too small")]
    DegenerateStep { iteration: usize, step: f64 },

    #[error("function does not provide {0}")]
    MissingCapability(&'static str),

    #[error("linear solve residual {residual:e} exceeds {bound:e}")]
    NumericalFailure { residual: f64, bound: f64 },

    #[error("0 is a subgradient at the center; the minimizer is the center itself")]
    Stationary,

    #[error("bracket search exceeded {0} doublings")]
    BracketCap(usize),

    #[error("contraction certificate violated at {} check(s): {}", .0.len(), summarize(.0))]
    ContractionViolated(Vec<String>),
}

fn summarize(items: &[String]) -> String {
    const SHOWN: usize = 3;
    let mut s = items.iter().take(SHOWN).cloned().collect::<Vec<_>>().join("; ");
    if items.len() > SHOWN {
        s.push_str("; ...");
    }
    s
}

pub type Result<T> = std::result::Result<T, HopError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(HopError::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> HopError {
    HopError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
