//! The seven-term inequality chain
//! `¼Δ ≤ I ≤ h ≤ 4d ≤ ⅛J ≤ T ≤ (1/16)Ψ`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{dirichlet_uniform, trial_rng};
use crate::distribution::{check_lengths, Distribution};
use crate::divergence::{named_divergence, NamedMeasure};
use crate::error::{DivergenceError, Result};

/// Pairs whose largest coordinate gap exceeds this must satisfy every link
/// strictly.
pub const STRICT_THRESHOLD: f64 = 1e-6;

/// Chain members in order: label, measure, scale factor.
pub const CHAIN: [(&str, NamedMeasure, f64); 7] = [
    ("delta/4", NamedMeasure::Triangular, 0.25),
    ("I", NamedMeasure::JensenShannon, 1.0),
    ("h", NamedMeasure::Hellinger, 1.0),
    ("4d", NamedMeasure::DDivergence, 4.0),
    ("J/8", NamedMeasure::JDivergence, 0.125),
    ("T", NamedMeasure::ArithmeticGeometric, 1.0),
    ("psi/16", NamedMeasure::SymmetricChiSquared, 0.0625),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub left: String,
    pub right: String,
    /// `right - left`.
    pub gap: f64,
    /// `gap >= -tol_abs`.
    pub holds: bool,
    /// `gap > 0`.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub values: Vec<ChainValue>,
    pub links: Vec<ChainLink>,
    pub max_abs_diff: f64,
    /// True when `max_abs_diff > STRICT_THRESHOLD`.
    pub strict_required: bool,
    pub passed: bool,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }

    pub fn strict(&self) -> bool {
        self.links.iter().all(|l| l.strict)
    }
}

/// Evaluates all seven members for `(P, Q)` and checks each adjacent link
/// with slack `tol_abs`. Passing also requires strict links when the pair is
/// more than [`STRICT_THRESHOLD`] apart.
pub fn chain_check(p: &Distribution, q: &Distribution, tol_abs: f64) -> Result<ChainReport> {
    check_lengths(p, q)?;
    let values: Vec<ChainValue> = CHAIN
        .iter()
        .map(|&(name, kind, scale)| {
            Ok(ChainValue {
                name: name.to_string(),
                value: scale * named_divergence(kind, p, q)?,
            })
        })
        .collect::<Result<_>>()?;
    let links: Vec<ChainLink> = values
        .windows(2)
        .map(|w| {
            let gap = w[1].value - w[0].value;
            ChainLink {
                left: w[0].name.clone(),
                right: w[1].name.clone(),
                gap,
                holds: gap >= -tol_abs,
                strict: gap > 0.0,
            }
        })
        .collect();
    let max_abs_diff = p.max_abs_diff(q)?;
    let strict_required = max_abs_diff > STRICT_THRESHOLD;
    let mut report = ChainReport {
        values,
        links,
        max_abs_diff,
        strict_required,
        passed: false,
    };
    report.passed = report.holds() && (!strict_required || report.strict());
    Ok(report)
}

/// A failing pair from [`chain_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFailure {
    pub trial: u64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub report: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSweep {
    pub seed: u64,
    pub pairs: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub tol_abs: f64,
    /// Pairs where some link fails even with slack.
    pub order_failures: u64,
    /// Pairs that needed strictness and had an equal link.
    pub strictness_failures: u64,
    /// Smallest link gap divided by the larger side, over all pairs.
    pub min_relative_gap: f64,
    pub first_failures: Vec<ChainFailure>,
}

impl ChainSweep {
    pub const MAX_FAILURES: usize = 16;

    pub fn passed(&self) -> bool {
        self.order_failures == 0 && self.strictness_failures == 0
    }
}

/// Runs [`chain_check`] on `pairs` random pairs of uniform simplex points,
/// each with dimension drawn uniformly from `n_min..=n_max`.
pub fn chain_sweep(
    seed: u64,
    pairs: u64,
    n_min: usize,
    n_max: usize,
    tol_abs: f64,
) -> Result<ChainSweep> {
    if pairs == 0 || n_min < 2 || n_max < n_min {
        return Err(DivergenceError::InvalidConfig(format!(
            "chain sweep needs pairs >= 1 and 2 <= n_min <= n_max, got pairs={pairs}, n={n_min}..={n_max}"
        )));
    }
    let outcomes: Vec<(u64, f64, Option<ChainFailure>)> = (0..pairs)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let n = rng.random_range(n_min..=n_max);
            let p = dirichlet_uniform(&mut rng, n);
            let q = dirichlet_uniform(&mut rng, n);
            let report = chain_check(&p, &q, tol_abs).expect("equal lengths");
            let rel_gap = report
                .links
                .iter()
                .zip(report.values.windows(2))
                .map(|(l, w)| l.gap / w[1].value.abs().max(f64::MIN_POSITIVE))
                .fold(f64::INFINITY, f64::min);
            let failure = (!report.passed).then(|| ChainFailure {
                trial,
                p: p.weights().to_vec(),
                q: q.weights().to_vec(),
                report,
            });
            (trial, rel_gap, failure)
        })
        .collect();

    let mut sweep = ChainSweep {
        seed,
        pairs,
        n_min,
        n_max,
        tol_abs,
        order_failures: 0,
        strictness_failures: 0,
        min_relative_gap: f64::INFINITY,
        first_failures: Vec::new(),
    };
    for (_, rel_gap, failure) in outcomes {
        sweep.min_relative_gap = sweep.min_relative_gap.min(rel_gap);
        if let Some(f) = failure {
            if f.report.holds() {
                sweep.strictness_failures += 1;
            } else {
                sweep.order_failures += 1;
            }
            if sweep.first_failures.len() < ChainSweep::MAX_FAILURES {
                sweep.first_failures.push(f);
            }
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_pair() {
        let p = Distribution::new(&[0.5, 0.5]).unwrap();
        let q = Distribution::new(&[0.2, 0.8]).unwrap();
        let r = chain_check(&p, &q, 1e-12).unwrap();
        assert!(r.passed && r.strict_required);
        let want = [
            0.049_450_549_450_549_45,
            0.050_671_836_985_565_86,
            0.051_316_701_949_486_2,
            0.051_793_775_968_272_64,
            0.051_986_038_541_995_9,
            0.053_300_240_098_425_93,
            0.057_656_25,
        ];
        for (v, w) in r.values.iter().zip(want) {
            assert!(
                (v.value - w).abs() <= 1e-14,
                "{}: {} vs {w}",
                v.name,
                v.value
            );
        }
    }

    #[test]
    fn identical_pair_is_all_zero() {
        let p = Distribution::uniform(5).unwrap();
        let r = chain_check(&p, &p, 1e-12).unwrap();
        assert!(r.values.iter().all(|v| v.value == 0.0));
        assert!(r.passed && !r.strict_required);
    }

    #[test]
    fn sweep_passes_and_is_reproducible() {
        let a = chain_sweep(7, 3_000, 2, 32, 1e-12).unwrap();
        assert!(a.passed(), "{:?}", a.first_failures.first());
        assert!(a.min_relative_gap > 0.0);
        assert_eq!(a, chain_sweep(7, 3_000, 2, 32, 1e-12).unwrap());
    }

    #[test]
    fn length_mismatch() {
        let p = Distribution::uniform(2).unwrap();
        let q = Distribution::uniform(3).unwrap();
        assert!(chain_check(&p, &q, 0.0).is_err());
        assert!(chain_sweep(1, 0, 2, 4, 0.0).is_err());
    }
}
