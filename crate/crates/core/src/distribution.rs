//! Strictly positive probability vectors.

use serde::{Deserialize, Serialize};

use crate::error::{DivergenceError, Result};
use crate::sum::compensated_sum;

/// Largest deviation of the raw mass total from 1 that is silently
/// renormalized away.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Totals this close to 1 are left unscaled.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A complete finite discrete distribution with every mass strictly positive.
///
/// Construction always goes through [`validate_distribution`] (or
/// [`Distribution::new`]), so a value of this type has `len() >= 2`, all
/// weights `> 0` and a total within `1e-12` of one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    weights: Vec<f64>,
}

/// How raw masses are turned into a [`Distribution`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Added to every entry before renormalizing. Lets zero masses through.
    pub smoothing: Option<f64>,
    /// Rescale totals that are further than [`NORMALIZATION_TOLERANCE`] from 1.
    pub renormalize: bool,
}

impl ValidateOptions {
    pub fn strict() -> Self {
        Self::default()
    }

    pub fn smoothed(epsilon: f64) -> Self {
        Self {
            smoothing: Some(epsilon),
            renormalize: false,
        }
    }
}

/// Checks raw masses against the simplex and returns a normalized
/// [`Distribution`].
///
/// Without smoothing every entry must be strictly positive. Totals within
/// `1e-6` of one are rescaled silently; larger deviations are an error unless
/// `opts.renormalize` is set. With smoothing `ε`, each entry becomes
/// `(x_i + ε) / Σ (x_j + ε)`; entries must then be nonnegative.
pub fn validate_distribution(raw: &[f64], opts: ValidateOptions) -> Result<Distribution> {
    if raw.len() < 2 {
        return Err(DivergenceError::TooShort { len: raw.len() });
    }
    if let Some(index) = raw.iter().position(|x| !x.is_finite()) {
        return Err(DivergenceError::NonFinite { index });
    }

    let mut weights: Vec<f64> = match opts.smoothing {
        Some(eps) => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(DivergenceError::InvalidSmoothing(eps));
            }
            if let Some(index) = raw.iter().position(|&x| x < 0.0) {
                return Err(DivergenceError::ZeroOrNegativeMass {
                    index,
                    value: raw[index],
                });
            }
            raw.iter().map(|&x| x + eps).collect()
        }
        None => {
            if let Some(index) = raw.iter().position(|&x| x <= 0.0) {
                return Err(DivergenceError::ZeroOrNegativeMass {
                    index,
                    value: raw[index],
                });
            }
            raw.to_vec()
        }
    };

    let total = compensated_sum(weights.iter().copied());
    if opts.smoothing.is_none()
        && !opts.renormalize
        && (total - 1.0).abs() > NORMALIZATION_TOLERANCE
    {
        return Err(DivergenceError::NotNormalizable { sum: total });
    }
    // Already-normalized input is kept bit-for-bit, so serialization round-trips.
    if (total - 1.0).abs() > SUM_TOLERANCE {
        for w in &mut weights {
            *w /= total;
        }
    }
    Ok(Distribution { weights })
}

impl Distribution {
    /// Strict construction: no smoothing, no rescaling beyond the `1e-6`
    /// tolerance.
    pub fn new(raw: &[f64]) -> Result<Self> {
        validate_distribution(raw, ValidateOptions::strict())
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(DivergenceError::TooShort { len: n });
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always `false`; present for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Largest coordinate-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Distribution) -> Result<f64> {
        check_lengths(self, other)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = DivergenceError;

    fn try_from(raw: Vec<f64>) -> Result<Self> {
        Distribution::new(&raw)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.weights
    }
}

pub(crate) fn check_lengths(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(DivergenceError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}
