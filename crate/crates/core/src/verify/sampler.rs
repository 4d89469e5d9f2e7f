//! Seeded sampling of scalar and simplex test inputs.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial)`, so
//! results do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{DivergenceError, Result};

/// Smallest coordinate accepted from the Dirichlet sampler.
pub const SIMPLEX_FLOOR: f64 = 1e-9;

/// Default log-uniform scalar range.
pub const DEFAULT_SCALAR_RANGE: (f64, f64) = (1e-3, 1e3);

/// Where test inputs come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SampleSpace {
    /// Positive scalars, log-uniform on `[lo, hi]`.
    Scalar { lo: f64, hi: f64 },
    /// Uniform (Dirichlet(1, ..., 1)) points of the `n`-simplex.
    Simplex { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub trials: u64,
    pub space: SampleSpace,
}

impl SamplerConfig {
    /// Scalars on the default range `[1e-3, 1e3]`.
    pub fn scalar(seed: u64, trials: u64) -> Self {
        let (lo, hi) = DEFAULT_SCALAR_RANGE;
        Self {
            seed,
            trials,
            space: SampleSpace::Scalar { lo, hi },
        }
    }

    pub fn simplex(seed: u64, trials: u64, n: usize) -> Self {
        Self {
            seed,
            trials,
            space: SampleSpace::Simplex { n },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(DivergenceError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        match self.space {
            SampleSpace::Scalar { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
                    return Err(DivergenceError::InvalidConfig(format!(
                        "scalar range needs 0 < lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            SampleSpace::Simplex { n } => {
                if n < 2 {
                    return Err(DivergenceError::InvalidConfig(format!(
                        "simplex dimension must be at least 2, got {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + rng.random::<f64>() * (b - a)).exp().clamp(lo, hi)
}

/// A uniform point of the simplex, redrawn until every coordinate is at
/// least [`SIMPLEX_FLOOR`].
pub fn dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    assert!(n >= 2, "simplex dimension must be at least 2");
    let mut raw = vec![0.0; n];
    loop {
        for x in raw.iter_mut() {
            *x = rng.sample::<f64, _>(Exp1);
        }
        let total: f64 = raw.iter().sum();
        if total > 0.0 && raw.iter().all(|x| x / total >= SIMPLEX_FLOOR) {
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            return Distribution::new(&w).expect("normalized positive sample");
        }
    }
}
