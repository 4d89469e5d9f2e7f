//! Randomized search for triangle-inequality violations.
//!
//! A triple `(a, b, c)` violates the inequality when its longest side exceeds
//! the sum of the other two by more than `tol_rel` times that longest side.
//! Witnesses are stored as `(x, y, z)` with `lhs = d(x, z)` the longest side and
//! `rhs = d(x, y) + d(y, z)`.

use astro_float::BigFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extended::{self, Extended};
use super::sampler::{dirichlet_uniform, log_uniform, trial_rng, SampleSpace, SamplerConfig};
use crate::divergence::family_point_unchecked;
use crate::error::Result;
use crate::metric::MetricSpec;

/// Witnesses kept per report (the first ones by trial index).
pub const MAX_WITNESSES: usize = 32;

const CHUNK: u64 = 4096;

/// The three sampled inputs of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Triple {
    Scalar([f64; 3]),
    Simplex([Vec<f64>; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub metric: MetricSpec,
    pub trial: u64,
    pub triple: Triple,
    pub lhs: f64,
    pub rhs: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub metric: MetricSpec,
    /// `false` when the raw divergence was used as the distance.
    pub rooted: bool,
    pub config: SamplerConfig,
    pub tol_rel: f64,
    pub violation_count: u64,
    /// Largest `excess / lhs` seen, 0 when nothing was found.
    pub max_relative_excess: f64,
    pub witnesses: Vec<Violation>,
}

impl TriangleReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Searches `cfg.trials` random triples under `√D`.
pub fn triangle_search(m: MetricSpec, cfg: &SamplerConfig, tol_rel: f64) -> Result<TriangleReport> {
    search(m, true, cfg, tol_rel)
}

/// Same search with the un-rooted divergence as the distance.
pub fn triangle_search_unrooted(
    m: MetricSpec,
    cfg: &SamplerConfig,
    tol_rel: f64,
) -> Result<TriangleReport> {
    search(m, false, cfg, tol_rel)
}

struct ChunkResult {
    count: u64,
    max_rel: f64,
    witnesses: Vec<Violation>,
}

fn search(
    m: MetricSpec,
    rooted: bool,
    cfg: &SamplerConfig,
    tol_rel: f64,
) -> Result<TriangleReport> {
    cfg.validate()?;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(cfg.trials);
            let mut out = ChunkResult {
                count: 0,
                max_rel: 0.0,
                witnesses: Vec::new(),
            };
            for trial in start..end {
                if let Some(v) = run_trial(m, rooted, cfg, tol_rel, trial) {
                    out.count += 1;
                    out.max_rel = out.max_rel.max(v.excess / v.lhs);
                    if out.witnesses.len() < MAX_WITNESSES {
                        out.witnesses.push(v);
                    }
                }
            }
            out
        })
        .collect();

    let mut report = TriangleReport {
        metric: m,
        rooted,
        config: *cfg,
        tol_rel,
        violation_count: 0,
        max_relative_excess: 0.0,
        witnesses: Vec::new(),
    };
    for r in results {
        report.violation_count += r.count;
        report.max_relative_excess = report.max_relative_excess.max(r.max_rel);
        let room = MAX_WITNESSES - report.witnesses.len();
        report.witnesses.extend(r.witnesses.into_iter().take(room));
    }
    Ok(report)
}

fn run_trial(
    m: MetricSpec,
    rooted: bool,
    cfg: &SamplerConfig,
    tol_rel: f64,
    trial: u64,
) -> Option<Violation> {
    let mut rng = trial_rng(cfg.seed, trial);
    let finish = |d: f64| if rooted { d.sqrt() } else { d };
    match cfg.space {
        SampleSpace::Scalar { lo, hi } => {
            let pts = [
                log_uniform(&mut rng, lo, hi),
                log_uniform(&mut rng, lo, hi),
                log_uniform(&mut rng, lo, hi),
            ];
            let d =
                |i: usize, j: usize| finish(family_point_unchecked(m.family, m.s, pts[i], pts[j]));
            let (order, lhs, rhs) = worst_side(d(0, 1), d(1, 2), d(0, 2))?;
            if lhs - rhs > tol_rel * lhs {
                Some(Violation {
                    metric: m,
                    trial,
                    triple: Triple::Scalar(order.map(|i| pts[i])),
                    lhs,
                    rhs,
                    excess: lhs - rhs,
                })
            } else {
                None
            }
        }
        SampleSpace::Simplex { n } => {
            let pts = [
                dirichlet_uniform(&mut rng, n),
                dirichlet_uniform(&mut rng, n),
                dirichlet_uniform(&mut rng, n),
            ];
            let d = |i: usize, j: usize| finish(m.divergence_unchecked(&pts[i], &pts[j]));
            let (order, lhs, rhs) = worst_side(d(0, 1), d(1, 2), d(0, 2))?;
            if lhs - rhs > tol_rel * lhs {
                Some(Violation {
                    metric: m,
                    trial,
                    triple: Triple::Simplex(order.map(|i| pts[i].weights().to_vec())),
                    lhs,
                    rhs,
                    excess: lhs - rhs,
                })
            } else {
                None
            }
        }
    }
}

/// Picks the longest side of the triangle with sides `d01, d12, d02` and
/// returns the vertex order `(x, y, z)` with that side as `d(x, z)`.
fn worst_side(d01: f64, d12: f64, d02: f64) -> Option<([usize; 3], f64, f64)> {
    let cands = [
        ([0, 1, 2], d02, d01 + d12),
        ([1, 0, 2], d12, d01 + d02),
        ([0, 2, 1], d01, d02 + d12),
    ];
    let best = cands
        .into_iter()
        .max_by(|a, b| (a.1 - a.2).total_cmp(&(b.1 - b.2)))?;
    (best.1 > best.2).then_some(best)
}

/// Independent 256-bit re-evaluation of a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    pub lhs: f64,
    pub rhs: f64,
    pub excess: f64,
    /// `excess > tol_rel * lhs` in extended precision.
    pub confirmed: bool,
}

/// Recomputes a witness from the textbook formulas at 256-bit precision.
pub fn confirm_violation(v: &Violation, rooted: bool, tol_rel: f64) -> Confirmation {
    let mut ext = Extended::new();
    let m = v.metric;
    let mut dist = |a: &[f64], b: &[f64]| -> BigFloat {
        let terms: Vec<BigFloat> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| ext.family_point(m.family, m.s, x, y))
            .collect();
        let total = extended::sum(&terms);
        if rooted {
            extended::sqrt(&total)
        } else {
            total
        }
    };
    let (dxz, dxy, dyz) = match &v.triple {
        Triple::Scalar([x, y, z]) => (dist(&[*x], &[*z]), dist(&[*x], &[*y]), dist(&[*y], &[*z])),
        Triple::Simplex([x, y, z]) => (dist(x, z), dist(x, y), dist(y, z)),
    };
    let lhs = extended::to_f64(&dxz);
    let rhs_big = extended::add(&dxy, &dyz);
    let excess = extended::to_f64(&extended::sub(&dxz, &rhs_big));
    Confirmation {
        lhs,
        rhs: extended::to_f64(&rhs_big),
        excess,
        confirmed: excess > tol_rel * lhs,
    }
}
