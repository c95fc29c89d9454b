//! Seeded random instances.
//!
//! All data is standard normal from [`NormalStream`]. Draw order per kind:
//!
//! - `quadratic`: the `m × n` matrix of rows `aᵢ` (row by row), the `m`
//!   shifts `bᵢ`, then `c`; `A` and `b` are the Hessian and gradient of
//!   `log Σ exp(aᵢᵀx − bᵢ)` at `c`.
//! - `l1`: `c`.
//! - `linear`: `a`, then `c`.
//! - `point`: `b`, then `c`.

use hopx_core::{logsumexp_instance, NormalStream};

use crate::error::CliError;
use crate::instance::{Instance, InstanceData, Kind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: Kind,
    pub n: usize,
    /// Number of log-sum-exp terms; quadratic only.
    pub m: usize,
    pub seed: u64,
    pub p: f64,
    pub sigma: f64,
}

pub fn generate(spec: &GenSpec) -> Result<Instance, CliError> {
    if spec.n == 0 {
        return Err(CliError::Usage("--n must be >= 1".into()));
    }
    if !(spec.p >= 1.0) || !(spec.sigma > 0.0) {
        return Err(CliError::Usage(format!(
            "need p >= 1 and sigma > 0, got p = {}, sigma = {}",
            spec.p, spec.sigma
        )));
    }
    let n = spec.n;
    let mut rng = NormalStream::new(spec.seed);
    let (c, data, m) = match spec.kind {
        Kind::Quadratic => {
            if spec.m == 0 {
                return Err(CliError::Usage("--m must be >= 1 for quadratic instances".into()));
            }
            let rows = rng.matrix(spec.m, n);
            let shift = rng.vector(spec.m);
            let c = rng.vector(n);
            let q = logsumexp_instance(&rows, &shift, &c)?;
            let data = InstanceData::Quadratic {
                a: q.a().clone(),
                b: q.b().clone(),
            };
            (c, data, Some(spec.m))
        }
        Kind::L1 => (rng.vector(n), InstanceData::L1, None),
        Kind::Linear => {
            let a = rng.vector(n);
            (rng.vector(n), InstanceData::Linear { a }, None)
        }
        Kind::Point => {
            let b = rng.vector(n);
            (rng.vector(n), InstanceData::Point { b }, None)
        }
    };
    Ok(Instance {
        p: spec.p,
        sigma: spec.sigma,
        c,
        seed: Some(spec.seed),
        m,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: Kind) -> GenSpec {
        GenSpec {
            kind,
            n: 6,
            m: 9,
            seed: 3,
            p: 2.0,
            sigma: 1.0,
        }
    }

    #[test]
    fn same_seed_same_text() {
        for kind in [Kind::Quadratic, Kind::L1, Kind::Linear, Kind::Point] {
            let a = generate(&spec(kind)).unwrap().to_text();
            let b = generate(&spec(kind)).unwrap().to_text();
            assert_eq!(a, b);
            let other = generate(&GenSpec { seed: 4, ..spec(kind) }).unwrap().to_text();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn quadratic_is_psd_and_builds() {
        let inst = generate(&spec(Kind::Quadratic)).unwrap();
        let f = inst.function().unwrap();
        assert_eq!(f.kind(), "quadratic");
        assert_eq!(inst.m, Some(9));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate(&GenSpec { n: 0, ..spec(Kind::L1) }).is_err());
        assert!(generate(&GenSpec {
            m: 0,
            ..spec(Kind::Quadratic)
        })
        .is_err());
    }
}
