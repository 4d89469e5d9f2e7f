//! Square-root distances induced by the two families, and a generic
//! metric-axiom checker.
//!
//! Over positive scalars the distance is `√L_s(p, q)` or `√J_s(p, q)`. Over
//! distributions the pointwise terms are summed first, so
//! `sqrt_distance(P, Q) = √Σ_i D(p_i, q_i)`, which is the root-sum-of-squares of
//! the coordinatewise scalar distances. If the scalar distance is a metric the
//! aggregate is one too (product-metric argument).
//!
//! Not every `(family, s)` yields a metric. [`check_metric_axioms`] and the
//! searches in [`crate::verify`] exist to find out which ones do.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{check_lengths, Distribution};
use crate::divergence::{check_positive, family_point_unchecked, NamedMeasure};
use crate::error::Result;
use crate::param::{Family, SParam};
use crate::sum::compensated_sum;

/// A family together with its parameter; names one candidate distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub family: Family,
    pub s: SParam,
}

impl MetricSpec {
    pub fn new(family: Family, s: SParam) -> Self {
        Self { family, s }
    }

    /// Un-rooted pointwise divergence.
    pub fn divergence_point(&self, p: f64, q: f64) -> Result<f64> {
        check_positive(p, q)?;
        Ok(family_point_unchecked(self.family, self.s, p, q))
    }

    /// Un-rooted divergence between distributions.
    pub fn divergence(&self, p: &Distribution, q: &Distribution) -> Result<f64> {
        check_lengths(p, q)?;
        Ok(self.divergence_unchecked(p, q))
    }

    pub(crate) fn divergence_unchecked(&self, p: &Distribution, q: &Distribution) -> f64 {
        compensated_sum(
            p.weights()
                .iter()
                .zip(q.weights())
                .map(|(&a, &b)| family_point_unchecked(self.family, self.s, a, b)),
        )
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(s={})", self.family, self.s)
    }
}

/// `√D(p, q)` for positive scalars.
pub fn sqrt_point_distance(m: MetricSpec, p: f64, q: f64) -> Result<f64> {
    m.divergence_point(p, q).map(f64::sqrt)
}

/// `√Σ_i D(p_i, q_i)`.
pub fn sqrt_distance(m: MetricSpec, p: &Distribution, q: &Distribution) -> Result<f64> {
    m.divergence(p, q).map(f64::sqrt)
}

/// A distance between distributions, as consumed by the index.
///
/// Implementors assume equal lengths; callers check them.
pub trait DistributionDistance: Sync {
    fn distance(&self, p: &Distribution, q: &Distribution) -> f64;
}

impl DistributionDistance for MetricSpec {
    fn distance(&self, p: &Distribution, q: &Distribution) -> f64 {
        self.divergence_unchecked(p, q).sqrt()
    }
}

/// The un-rooted `¼Δ`. Not a metric; used as a negative control.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarterTriangular;

impl DistributionDistance for QuarterTriangular {
    fn distance(&self, p: &Distribution, q: &Distribution) -> f64 {
        0.25 * compensated_sum(
            p.weights()
                .iter()
                .zip(q.weights())
                .map(|(&a, &b)| NamedMeasure::Triangular.point(a, b)),
        )
    }
}

/// Which axiom a finding concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Nonnegativity,
    Identity,
    Symmetry,
    Triangle,
}

/// One axiom failure. `points` holds indices into the checked set; for the
/// triangle it is `(x, y, z)` with `lhs = d(x, z)` and `rhs = d(x, y) + d(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub points: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of [`check_metric_axioms`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points: usize,
    pub triples_checked: u64,
    /// Total failures per axiom, in [`Axiom`] declaration order.
    pub counts: [u64; 4],
    /// The first [`AxiomReport::MAX_RECORDED`] failures in scan order.
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub const MAX_RECORDED: usize = 256;

    pub fn is_metric(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn count(&self, axiom: Axiom) -> u64 {
        self.counts[axiom as usize]
    }

    fn record(&mut self, v: AxiomViolation) {
        self.counts[v.axiom as usize] += 1;
        if self.violations.len() < Self::MAX_RECORDED {
            self.violations.push(v);
        }
    }
}

/// Checks nonnegativity, identity of indiscernibles, symmetry and the triangle
/// inequality over every ordered pair and triple of `points`.
///
/// The triangle test flags `d(x,z) > d(x,y) + d(y,z) + tol · max(d(x,z), d(x,y), d(y,z))`.
/// Identity flags a nonzero self-distance above `tol`, and a zero distance
/// between unequal points. Symmetry flags `|d(x,y) - d(y,x)| > tol · max`.
/// Distances are evaluated in parallel; the report is identical to a
/// sequential scan.
pub fn check_metric_axioms<T, F>(distance: F, points: &[T], tol: f64) -> AxiomReport
where
    T: PartialEq + Sync,
    F: Fn(&T, &T) -> f64 + Sync,
{
    let n = points.len();
    let matrix: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| distance(&points[i], &points[j])).collect())
        .collect();

    let mut report = AxiomReport {
        points: n,
        triples_checked: 0,
        counts: [0; 4],
        violations: Vec::new(),
    };

    for i in 0..n {
        for j in 0..n {
            let d = matrix[i][j];
            if d.is_nan() || d < 0.0 {
                report.record(AxiomViolation {
                    axiom: Axiom::Nonnegativity,
                    points: vec![i, j],
                    lhs: d,
                    rhs: 0.0,
                });
            }
            let same = points[i] == points[j];
            if (same && d > tol) || (!same && d == 0.0) {
                report.record(AxiomViolation {
                    axiom: Axiom::Identity,
                    points: vec![i, j],
                    lhs: d,
                    rhs: 0.0,
                });
            }
            let back = matrix[j][i];
            if i < j && (d - back).abs() > tol * d.abs().max(back.abs()) {
                report.record(AxiomViolation {
                    axiom: Axiom::Symmetry,
                    points: vec![i, j],
                    lhs: d,
                    rhs: back,
                });
            }
        }
    }

    let per_x: Vec<(u64, Vec<AxiomViolation>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut count = 0;
            let mut found = Vec::new();
            for y in 0..n {
                for z in 0..n {
                    let lhs = matrix[x][z];
                    let rhs = matrix[x][y] + matrix[y][z];
                    let scale = lhs.max(matrix[x][y]).max(matrix[y][z]);
                    if lhs > rhs + tol * scale {
                        count += 1;
                        if found.len() < AxiomReport::MAX_RECORDED {
                            found.push(AxiomViolation {
                                axiom: Axiom::Triangle,
                                points: vec![x, y, z],
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
            (count, found)
        })
        .collect();

    report.triples_checked = (n as u64).pow(3);
    for (count, found) in per_x {
        report.counts[Axiom::Triangle as usize] += count;
        let room = AxiomReport::MAX_RECORDED.saturating_sub(report.violations.len());
        report.violations.extend(found.into_iter().take(room));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(family: Family, s: f64) -> MetricSpec {
        MetricSpec::new(family, SParam::new(s).unwrap())
    }

    fn fixture() -> (Distribution, Distribution) {
        (
            Distribution::new(&[0.5, 0.5]).unwrap(),
            Distribution::new(&[0.2, 0.8]).unwrap(),
        )
    }

    #[test]
    fn point_examples() {
        assert_eq!(
            sqrt_point_distance(spec(Family::Ag, 0.5), 3.0, 3.0).unwrap(),
            0.0
        );
        let d = sqrt_point_distance(spec(Family::J, 0.5), 4.0, 1.0).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        let t = sqrt_point_distance(spec(Family::Ag, 0.0), 0.7, 0.65).unwrap();
        assert!((t - 0.000_463_280_786_540_610_4_f64.sqrt()).abs() < 1e-15);
        assert!(sqrt_point_distance(spec(Family::J, 0.5), 0.0, 1.0).is_err());
    }

    #[test]
    fn distribution_examples() {
        let (p, q) = fixture();
        let j = sqrt_distance(spec(Family::J, 0.0), &p, &q).unwrap();
        assert!((j - 0.644_894_028_764_391).abs() < 1e-14);
        let i = sqrt_distance(spec(Family::Ag, 1.0), &p, &q).unwrap();
        assert!((i - 0.225_104_058_127_715_4).abs() < 1e-14);
        assert_eq!(sqrt_distance(spec(Family::Ag, 1.0), &p, &p).unwrap(), 0.0);
        let short = Distribution::uniform(3).unwrap();
        assert!(sqrt_distance(spec(Family::J, 0.5), &p, &short).is_err());
    }

    #[test]
    fn euclidean_scalars_pass() {
        let pts = [0.0, 1.0, 2.5, -3.0, 7.0];
        let r = check_metric_axioms(|a: &f64, b: &f64| (a - b).abs(), &pts, 0.0);
        assert!(r.is_metric(), "{r:?}");
        assert_eq!(r.triples_checked, 125);
    }

    #[test]
    fn squared_euclidean_fails_triangle() {
        let pts = [0.0, 1.0, 2.0];
        let r = check_metric_axioms(|a: &f64, b: &f64| (a - b).powi(2), &pts, 0.0);
        assert!(!r.is_metric());
        assert!(r.count(Axiom::Triangle) >= 1);
        let v = r
            .violations
            .iter()
            .find(|v| v.axiom == Axiom::Triangle)
            .unwrap();
        assert_eq!((v.lhs, v.rhs), (4.0, 2.0));
    }

    #[test]
    fn detects_asymmetry_and_identity_failures() {
        let pts = [1.0, 2.0, 3.0];
        let r = check_metric_axioms(|a: &f64, b: &f64| (a - b).max(0.0), &pts, 0.0);
        assert!(r.count(Axiom::Symmetry) > 0);
        assert!(r.count(Axiom::Identity) > 0);
        let r = check_metric_axioms(|_: &f64, _: &f64| -1.0, &pts, 0.0);
        assert_eq!(r.count(Axiom::Nonnegativity), 9);
    }

    #[test]
    fn hellinger_root_on_random_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Distribution> = (0..50)
            .map(|_| {
                let raw: Vec<f64> = (0..6).map(|_| rng.random_range(0.01..1.0)).collect();
                let total: f64 = raw.iter().sum();
                Distribution::new(&raw.iter().map(|x| x / total).collect::<Vec<_>>()).unwrap()
            })
            .collect();
        let m = spec(Family::J, 0.5);
        let r = check_metric_axioms(|a, b| m.distance(a, b), &pts, 1e-9);
        assert!(
            r.is_metric(),
            "{:?}",
            &r.violations[..r.violations.len().min(3)]
        );
    }

    #[test]
    fn root_sum_of_squares_of_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(family, s) in &[(Family::Ag, 0.5), (Family::Ag, 1.0), (Family::J, 2.0)] {
            let m = spec(family, s);
            for _ in 0..200 {
                let a: Vec<f64> = (0..8).map(|_| rng.random_range(0.01..1.0)).collect();
                let b: Vec<f64> = (0..8).map(|_| rng.random_range(0.01..1.0)).collect();
                let (ta, tb): (f64, f64) = (a.iter().sum(), b.iter().sum());
                let p = Distribution::new(&a.iter().map(|x| x / ta).collect::<Vec<_>>()).unwrap();
                let q = Distribution::new(&b.iter().map(|x| x / tb).collect::<Vec<_>>()).unwrap();
                let whole = sqrt_distance(m, &p, &q).unwrap();
                let parts = compensated_sum(
                    p.weights()
                        .iter()
                        .zip(q.weights())
                        .map(|(&x, &y)| sqrt_point_distance(m, x, y).unwrap().powi(2)),
                )
                .sqrt();
                assert!((whole - parts).abs() <= 1e-15 * whole, "{whole} vs {parts}");
            }
        }
    }

    #[test]
    fn quarter_triangular_is_not_rooted() {
        let (p, q) = fixture();
        let d = QuarterTriangular.distance(&p, &q);
        assert!((d - 0.049_450_549_450_549_45).abs() < 1e-15);
    }
}
