//! The two symmetric one-parameter families and their named members.
//!
//! | Family | Generic `s` | Limit |
//! |--------|-------------|-------|
//! | AG | `[s(s-1)]^{-1} [((p^s+q^s)/2)((p+q)/2)^{1-s} - (p+q)/2]` | `s=1`: Jensen-Shannon `I`, `s=0`: arithmetic-geometric `T` |
//! | J  | `[s(s-1)]^{-1} [p^s q^{1-s} + p^{1-s} q^s - (p+q)]` | `s=0,1`: J-divergence |
//!
//! Named members: AG at `s = 2, 1, 1/2, 0, -1` gives `Δ/4, I, 4d, T, Ψ/16`;
//! J at `s = -1, 2` gives `Ψ/2`, at `s = 1/2` gives `8h`.
//!
//! Pointwise values are computed in terms of the midpoint `a = (p+q)/2` and
//! the relative difference `u = (p-q)/(p+q)`, through `ln(1-u²)` and
//! `atanh(u)`, so the `O(u²)` result never comes out of a difference of
//! `O(1)` or `O(u)` terms. Both
//! families are evaluated so that swapping `p` and `q` only swaps the order of
//! two commutative additions, which makes them exactly symmetric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::{check_lengths, Distribution};
use crate::error::{DivergenceError, Result};
use crate::param::{Family, Regime, SParam};
use crate::sum::compensated_sum;

#[inline]
pub(crate) fn check_positive(p: f64, q: f64) -> Result<()> {
    if p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite() {
        Ok(())
    } else {
        Err(DivergenceError::NonPositiveInput { p, q })
    }
}

/// `(p, q)` re-expressed around the midpoint.
struct Split {
    /// `(p + q) / 2`
    mid: f64,
    /// `(p - q) / (p + q)`
    u: f64,
    /// `ln(1 + u)`
    l1: f64,
    /// `ln(1 - u)`
    l2: f64,
    /// `ln(1 - u²) = l1 + l2`
    log_prod: f64,
    /// `ln((1+u)/(1-u)) = l1 - l2 = ln(p/q)`
    log_ratio: f64,
}

impl Split {
    #[inline]
    fn new(p: f64, q: f64) -> Self {
        let sum = p + q;
        let u = (p - q) / sum;
        if u.abs() < 0.5 {
            let (l1, l2) = (u.ln_1p(), (-u).ln_1p());
            Self {
                mid: 0.5 * sum,
                u,
                l1,
                l2,
                log_prod: (-u * u).ln_1p(),
                log_ratio: 2.0 * odd_atanh(u),
            }
        } else {
            let (l1, l2) = ((2.0 * p / sum).ln(), (2.0 * q / sum).ln());
            Self {
                mid: 0.5 * sum,
                u,
                l1,
                l2,
                log_prod: l1 + l2,
                log_ratio: l1 - l2,
            }
        }
    }
}

/// `atanh` evaluated on `|u|` so that `odd_atanh(-u) == -odd_atanh(u)`
/// bit for bit; `f64::atanh` is not exactly odd.
#[inline]
fn odd_atanh(u: f64) -> f64 {
    let a = u.abs();
    (0.5 * (2.0 * a / (1.0 - a)).ln_1p()).copysign(u)
}

/// `expm1(c + d) + expm1(c - d)` as `2(expm1(c)cosh(d) + 2sinh²(d/2))`, with
/// no `O(d)` cancellation.
#[inline]
fn expm1_pair(c: f64, d: f64) -> f64 {
    let h = (0.5 * d).sinh();
    2.0 * (c.exp_m1() * d.cosh() + 2.0 * h * h)
}

/// `(1+u)ln(1+u) + (1-u)ln(1-u)`, which is `u² + u⁴/6 + u⁶/15 + ...`; the
/// series is used for small `|u|`, where the direct form loses `ε/|u|`.
#[inline]
pub(crate) fn entropy_pair(u: f64, l1: f64, l2: f64) -> f64 {
    if u.abs() >= 0.1 {
        return (1.0 + u) * l1 + (1.0 - u) * l2;
    }
    let u2 = u * u;
    let mut power = u2;
    let mut total = 0.0;
    for k in 1..=10 {
        let k = k as f64;
        total += power / (k * (2.0 * k - 1.0));
        power *= u2;
    }
    total
}

/// Pointwise AG-family term `L_s(p, q)`; `I(p, q)` near `s = 1`, `T(p, q)`
/// near `s = 0`.
pub fn ag_point(s: SParam, p: f64, q: f64) -> Result<f64> {
    check_positive(p, q)?;
    Ok(ag_point_unchecked(s, p, q))
}

#[inline]
pub(crate) fn ag_point_unchecked(s: SParam, p: f64, q: f64) -> f64 {
    let x = Split::new(p, q);
    let v = match s.regime(Family::Ag) {
        Regime::LimitAgOne => 0.5 * x.mid * entropy_pair(x.u, x.l1, x.l2),
        Regime::LimitAgZero => -0.5 * x.mid * x.log_prod,
        _ => {
            let s = s.value();
            // ((1+u)^s + (1-u)^s)/2 - 1 with (1±u)^s = exp(c ± d)
            let (c, d) = (0.5 * s * x.log_prod, 0.5 * s * x.log_ratio);
            let bracket = if s < 0.5 {
                0.5 * expm1_pair(c, d)
            } else {
                // (1±u)^s = (1±u)(1±u)^{s-1}, avoiding the 1/(s-1) blow-up
                let e = s - 1.0;
                let (ce, de) = (0.5 * e * x.log_prod, 0.5 * e * x.log_ratio);
                let diff = 2.0 * ce.exp() * de.sinh();
                0.5 * (expm1_pair(ce, de) + x.u * diff)
            };
            x.mid * bracket / (s * (s - 1.0))
        }
    };
    v.max(0.0)
}

/// Pointwise J-family term `J_s(p, q)`; `(p - q) ln(p/q)` near `s = 0, 1`.
pub fn j_point(s: SParam, p: f64, q: f64) -> Result<f64> {
    check_positive(p, q)?;
    Ok(j_point_unchecked(s, p, q))
}

#[inline]
pub(crate) fn j_point_unchecked(s: SParam, p: f64, q: f64) -> f64 {
    let x = Split::new(p, q);
    let v = match s.regime(Family::J) {
        Regime::LimitJ => (p - q) * x.log_ratio,
        _ => {
            // J_s = J_{1-s}; fold onto s <= 1/2 so that |s - 1| >= 1/2.
            let s = if s.value() > 0.5 {
                1.0 - s.value()
            } else {
                s.value()
            };
            // (1-u)expm1(y) + (1+u)expm1(-y) = 4sinh²(y/2) - 2u sinh(y)
            let y = s * x.log_ratio;
            let h = (0.5 * y).sinh();
            let bracket = 4.0 * h * h - 2.0 * x.u * y.sinh();
            x.mid * bracket / (s * (s - 1.0))
        }
    };
    v.max(0.0)
}

/// Pointwise term of `family` at `s`.
pub fn family_point(family: Family, s: SParam, p: f64, q: f64) -> Result<f64> {
    match family {
        Family::Ag => ag_point(s, p, q),
        Family::J => j_point(s, p, q),
    }
}

#[inline]
pub(crate) fn family_point_unchecked(family: Family, s: SParam, p: f64, q: f64) -> f64 {
    match family {
        Family::Ag => ag_point_unchecked(s, p, q),
        Family::J => j_point_unchecked(s, p, q),
    }
}

/// AG-family divergence between two distributions (sum of pointwise terms).
pub fn ag_divergence(s: SParam, p: &Distribution, q: &Distribution) -> Result<f64> {
    family_divergence(Family::Ag, s, p, q)
}

/// J-family divergence between two distributions (sum of pointwise terms).
pub fn j_divergence(s: SParam, p: &Distribution, q: &Distribution) -> Result<f64> {
    family_divergence(Family::J, s, p, q)
}

pub fn family_divergence(
    family: Family,
    s: SParam,
    p: &Distribution,
    q: &Distribution,
) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(compensated_sum(p.weights().iter().zip(q.weights()).map(
        |(&pi, &qi)| family_point_unchecked(family, s, pi, qi),
    )))
}

/// Closed-form measures that appear as members of the two families, plus
/// the one-sided χ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedMeasure {
    /// `Δ = Σ (p-q)² / (p+q)`
    Triangular,
    /// `I = ½ Σ [p ln(2p/(p+q)) + q ln(2q/(p+q))]`
    JensenShannon,
    /// `T = Σ ((p+q)/2) ln((p+q) / (2√(pq)))`
    ArithmeticGeometric,
    /// `h = ½ Σ (√p - √q)²`
    Hellinger,
    /// `d = 1 - Σ ((√p+√q)/2) √((p+q)/2)`
    DDivergence,
    /// `J = Σ (p-q) ln(p/q)`
    JDivergence,
    /// `Ψ = χ²(P||Q) + χ²(Q||P) = Σ (p-q)²(p+q)/(pq)`
    SymmetricChiSquared,
    /// `χ²(P||Q) = Σ (p-q)²/q` (not symmetric)
    ChiSquared,
}

impl NamedMeasure {
    pub const ALL: [NamedMeasure; 8] = [
        NamedMeasure::Triangular,
        NamedMeasure::JensenShannon,
        NamedMeasure::ArithmeticGeometric,
        NamedMeasure::Hellinger,
        NamedMeasure::DDivergence,
        NamedMeasure::JDivergence,
        NamedMeasure::SymmetricChiSquared,
        NamedMeasure::ChiSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedMeasure::Triangular => "triangular",
            NamedMeasure::JensenShannon => "jensen-shannon",
            NamedMeasure::ArithmeticGeometric => "arithmetic-geometric",
            NamedMeasure::Hellinger => "hellinger",
            NamedMeasure::DDivergence => "d-divergence",
            NamedMeasure::JDivergence => "j-divergence",
            NamedMeasure::SymmetricChiSquared => "symmetric-chi-squared",
            NamedMeasure::ChiSquared => "chi-squared",
        }
    }

    pub fn is_symmetric(self) -> bool {
        self != NamedMeasure::ChiSquared
    }

    /// Pointwise term; summing over coordinates of two distributions gives
    /// the measure. For `d` this uses the per-coordinate split
    /// `(p+q)/2 - ((√p+√q)/2)√((p+q)/2)`, which sums to `d` on the simplex.
    pub fn point(self, p: f64, q: f64) -> f64 {
        match self {
            NamedMeasure::Triangular => (p - q).powi(2) / (p + q),
            NamedMeasure::JensenShannon => {
                let x = Split::new(p, q);
                0.5 * x.mid * entropy_pair(x.u, x.l1, x.l2)
            }
            NamedMeasure::ArithmeticGeometric => {
                // (p+q)/2 ln((p+q)/(2√(pq))) = -(p+q)/4 ln(1 - u²)
                let x = Split::new(p, q);
                -0.5 * x.mid * x.log_prod
            }
            NamedMeasure::Hellinger => 0.5 * root_gap_squared(p, q),
            NamedMeasure::DDivergence => {
                let a = 0.5 * (p + q);
                let m = 0.5 * (p.sqrt() + q.sqrt());
                // a - m√a = √a (a - m²)/(√a + m), with a - m² = (√p-√q)²/4
                let ra = a.sqrt();
                ra * 0.25 * root_gap_squared(p, q) / (ra + m)
            }
            NamedMeasure::JDivergence => (p - q) * Split::new(p, q).log_ratio,
            NamedMeasure::SymmetricChiSquared => (p - q).powi(2) * (p + q) / (p * q),
            NamedMeasure::ChiSquared => (p - q).powi(2) / q,
        }
    }
}

impl fmt::Display for NamedMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMeasure {
    type Err = DivergenceError;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.to_ascii_lowercase().as_str() {
            "triangular" | "delta" => NamedMeasure::Triangular,
            "jensen-shannon" | "js" | "i" => NamedMeasure::JensenShannon,
            "arithmetic-geometric" | "ag-mean" | "t" => NamedMeasure::ArithmeticGeometric,
            "hellinger" | "h" => NamedMeasure::Hellinger,
            "d-divergence" | "d" => NamedMeasure::DDivergence,
            "j-divergence" | "jeffreys" | "j" => NamedMeasure::JDivergence,
            "symmetric-chi-squared" | "sym-chi2" | "psi" => NamedMeasure::SymmetricChiSquared,
            "chi-squared" | "chi2" => NamedMeasure::ChiSquared,
            other => {
                return Err(DivergenceError::InvalidParameter(format!(
                    "unknown measure {other:?}"
                )))
            }
        };
        Ok(m)
    }
}

/// `(√p - √q)²` without subtracting the roots.
#[inline]
fn root_gap_squared(p: f64, q: f64) -> f64 {
    let d = (p - q) / (p.sqrt() + q.sqrt());
    d * d
}

/// Direct closed-form evaluation of a named measure.
pub fn named_divergence(kind: NamedMeasure, p: &Distribution, q: &Distribution) -> Result<f64> {
    check_lengths(p, q)?;
    let v = compensated_sum(
        p.weights()
            .iter()
            .zip(q.weights())
            .map(|(&pi, &qi)| kind.point(pi, qi)),
    );
    Ok(v.max(0.0))
}

/// One-sided `χ²(P||Q) = Σ (p_i - q_i)² / q_i`.
pub fn chi_squared(p: &Distribution, q: &Distribution) -> Result<f64> {
    named_divergence(NamedMeasure::ChiSquared, p, q)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn s(v: f64) -> SParam {
        SParam::new(v).unwrap()
    }

    fn fixture() -> (Distribution, Distribution) {
        (
            Distribution::new(&[0.5, 0.5]).unwrap(),
            Distribution::new(&[0.2, 0.8]).unwrap(),
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Reference values below were computed with 50-digit arithmetic from the
    // closed forms.
    const I_FIX: f64 = 0.050671836985565864;
    const T_FIX: f64 = 0.053300240098425933;
    const H_FIX: f64 = 0.0513167019494862;
    const D_FIX: f64 = 0.012948443992068159;
    const J_FIX: f64 = 0.41588830833596719;
    const PSI_FIX: f64 = 0.9225;
    const DELTA_FIX: f64 = 0.1978021978021978;

    #[test]
    fn vanishes_on_diagonal() {
        for v in [-2.0, -1.0, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
            assert_eq!(ag_point(s(v), 3.7, 3.7).unwrap(), 0.0);
            assert_eq!(j_point(s(v), 0.3, 0.3).unwrap(), 0.0);
        }
        let u = Distribution::uniform(4).unwrap();
        for v in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            assert_eq!(ag_divergence(s(v), &u, &u).unwrap(), 0.0);
            assert_eq!(j_divergence(s(v), &u, &u).unwrap(), 0.0);
        }
    }

    #[test]
    fn t_limit_pointwise() {
        let v = ag_point(s(0.0), 0.7, 0.65).unwrap();
        assert!(rel(v, 0.00046328078654061039932) < 1e-13, "{v}");
        let t21 = 0.088337276742287590904;
        assert!(rel(ag_point(s(0.0), 2.0, 1.0).unwrap(), t21) < 1e-15);
        assert!((ag_point(s(1e-9), 2.0, 1.0).unwrap() - t21).abs() <= 1e-6 * t21);
    }

    #[test]
    fn generic_formula_approaches_limits() {
        // L_s(2,1) evaluated at 50 digits
        let cases = [
            (1e-2, 0.0882938892238727),
            (1e-3, 0.0883329289281943),
            (1e-4, 0.0883368418702102),
            (-1e-4, 0.0883377116345146),
            (1.0 + 1e-2, 0.0849249211138716),
            (1.0 + 1e-3, 0.0849470507368921),
            (1.0 + 1e-4, 0.0849492715522642),
            (1.0 - 1e-4, 0.0849497652607682),
        ];
        for (sv, want) in cases {
            let got = ag_point(s(sv), 2.0, 1.0).unwrap();
            assert!(rel(got, want) < 1e-12, "s={sv}: {got} vs {want}");
        }
    }

    #[test]
    fn j_point_examples() {
        assert!((j_point(s(0.5), 4.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((j_point(s(0.0), 2.0, 1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((j_point(s(1.0), 2.0, 1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(
            ag_point(s(0.5), 0.0, 1.0),
            Err(DivergenceError::NonPositiveInput { .. })
        ));
        assert!(j_point(s(0.5), 1.0, -1.0).is_err());
        assert!(ag_point(s(0.5), f64::NAN, 1.0).is_err());
    }

    #[test]
    fn fixture_values() {
        let (p, q) = fixture();
        assert!(rel(ag_divergence(s(1.0), &p, &q).unwrap(), I_FIX) < 1e-14);
        assert!(rel(ag_divergence(s(0.0), &p, &q).unwrap(), T_FIX) < 1e-14);
        // With the generic formula as written, s = 2 collapses to (p-q)²/(4(p+q))
        // and s = -1 to (p+q)(p-q)²/(16pq).
        assert!(rel(ag_divergence(s(2.0), &p, &q).unwrap(), DELTA_FIX / 4.0) < 1e-13);
        assert!(rel(ag_divergence(s(-1.0), &p, &q).unwrap(), PSI_FIX / 16.0) < 1e-13);
        assert!(rel(ag_divergence(s(0.5), &p, &q).unwrap(), 4.0 * D_FIX) < 1e-13);
        assert!(rel(j_divergence(s(0.0), &p, &q).unwrap(), J_FIX) < 1e-14);
        assert!(rel(j_divergence(s(0.5), &p, &q).unwrap(), 8.0 * H_FIX) < 1e-13);
        assert!(rel(j_divergence(s(2.0), &p, &q).unwrap(), PSI_FIX / 2.0) < 1e-13);
        assert!(rel(j_divergence(s(-1.0), &p, &q).unwrap(), PSI_FIX / 2.0) < 1e-13);
    }

    #[test]
    fn named_fixture_values() {
        let (p, q) = fixture();
        let cases = [
            (NamedMeasure::Triangular, DELTA_FIX),
            (NamedMeasure::JensenShannon, I_FIX),
            (NamedMeasure::ArithmeticGeometric, T_FIX),
            (NamedMeasure::Hellinger, H_FIX),
            (NamedMeasure::DDivergence, D_FIX),
            (NamedMeasure::JDivergence, J_FIX),
            (NamedMeasure::SymmetricChiSquared, PSI_FIX),
            (NamedMeasure::ChiSquared, 0.5625),
        ];
        for (kind, want) in cases {
            let got = named_divergence(kind, &p, &q).unwrap();
            assert!(rel(got, want) < 1e-14, "{kind}: {got} vs {want}");
            assert_eq!(named_divergence(kind, &p, &p).unwrap(), 0.0);
        }
        let back = chi_squared(&q, &p).unwrap();
        assert!(rel(back, PSI_FIX - 0.5625) < 1e-14);
    }

    #[test]
    fn length_mismatch() {
        let (p, _) = fixture();
        let r = Distribution::uniform(3).unwrap();
        assert!(matches!(
            ag_divergence(s(0.5), &p, &r),
            Err(DivergenceError::LengthMismatch { left: 2, right: 3 })
        ));
        assert!(j_divergence(s(0.5), &p, &r).is_err());
        assert!(named_divergence(NamedMeasure::Hellinger, &p, &r).is_err());
    }

    #[test]
    fn measure_names_round_trip() {
        for m in NamedMeasure::ALL {
            assert_eq!(m.name().parse::<NamedMeasure>().unwrap(), m);
        }
    }

    #[test]
    fn near_equal_pairs_keep_full_relative_accuracy() {
        use crate::verify::extended::{to_f64, Extended};
        let mut ext = Extended::new();
        let named = [
            (Family::Ag, 1.0, NamedMeasure::JensenShannon, 1.0),
            (Family::Ag, 0.0, NamedMeasure::ArithmeticGeometric, 1.0),
            (Family::Ag, 0.5, NamedMeasure::DDivergence, 4.0),
            (Family::Ag, 2.0, NamedMeasure::Triangular, 0.25),
            (Family::J, 0.5, NamedMeasure::Hellinger, 8.0),
            (Family::J, 0.0, NamedMeasure::JDivergence, 1.0),
            (Family::J, 2.0, NamedMeasure::SymmetricChiSquared, 0.5),
        ];
        for gap in [1e-3, 1e-5, 1e-7, 1e-9] {
            let (p, q) = (0.3 + gap, 0.3);
            for family in [Family::Ag, Family::J] {
                for v in [-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
                    let want = to_f64(&ext.family_point(family, s(v), p, q));
                    let got = family_point(family, s(v), p, q).unwrap();
                    assert!(
                        rel(got, want) < 1e-12,
                        "{family} s={v} gap={gap}: {got} vs {want}"
                    );
                }
            }
            for (family, v, m, scale) in named {
                let want = to_f64(&ext.family_point(family, s(v), p, q));
                let got = scale * m.point(p, q);
                assert!(rel(got, want) < 1e-12, "{m} gap={gap}: {got} vs {want}");
            }
        }
    }
}
