//! Ratio of a family divergence to `χ²(P_t||Q)` along `P_t = Q + t(P₀ - Q)`.
//!
//! As `t → 0` the AG family approaches `χ²/8` and the J family approaches `χ²`.

use serde::{Deserialize, Serialize};

use crate::distribution::{check_lengths, Distribution};
use crate::divergence::{chi_squared, family_divergence};
use crate::error::{DivergenceError, Result};
use crate::param::{Family, SParam};

/// Limit of `divergence / χ²` as `P → Q`.
pub fn ratio_limit(family: Family) -> f64 {
    match family {
        Family::Ag => 0.125,
        Family::J => 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub t: f64,
    pub divergence: f64,
    pub chi2: f64,
    pub ratio: f64,
    /// `|ratio - limit| / limit`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub family: Family,
    pub s: SParam,
    pub limit: f64,
    pub rows: Vec<RatioRow>,
    /// Relative error strictly decreases along the sequence.
    pub monotone: bool,
}

impl RatioTable {
    pub fn final_rel_error(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.rel_error)
    }

    /// First `t` in the sequence whose ratio is within `rel` of the limit.
    pub fn first_t_within(&self, rel: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.rel_error <= rel).map(|r| r.t)
    }
}

/// Builds the ratio table for `t_seq`, which must be decreasing in `(0, 1]`.
pub fn asymptotic_probe(
    family: Family,
    s: SParam,
    q: &Distribution,
    p0: &Distribution,
    t_seq: &[f64],
) -> Result<RatioTable> {
    check_lengths(q, p0)?;
    if p0 == q {
        return Err(DivergenceError::DegenerateDirection);
    }
    if t_seq.is_empty()
        || t_seq.iter().any(|&t| !(t > 0.0 && t <= 1.0))
        || t_seq.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(DivergenceError::InvalidConfig(
            "t sequence must be nonempty, decreasing and inside (0, 1]".into(),
        ));
    }
    let limit = ratio_limit(family);
    let rows = t_seq
        .iter()
        .map(|&t| {
            let raw: Vec<f64> = q
                .weights()
                .iter()
                .zip(p0.weights())
                .map(|(&qi, &pi)| qi + t * (pi - qi))
                .collect();
            let pt = Distribution::new(&raw)?;
            let divergence = family_divergence(family, s, &pt, q)?;
            let chi2 = chi_squared(&pt, q)?;
            let ratio = divergence / chi2;
            Ok(RatioRow {
                t,
                divergence,
                chi2,
                ratio,
                rel_error: (ratio - limit).abs() / limit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
    Ok(RatioTable {
        family,
        s,
        limit,
        rows,
        monotone,
    })
}
