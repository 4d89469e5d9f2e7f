//! Csiszár f-divergences `C_f(P||Q) = Σ q_i f(p_i / q_i)` and the two
//! generator families that reproduce the AG and J divergences.
//!
//! | Generator | Family | `f''(1)` | Small-perturbation limit |
//! |-----------|--------|----------|--------------------------|
//! | `ψ_s`     | AG at `1 - s` | `1/4` | `C_f ≈ χ²/8` |
//! | `φ_s`     | J at `s`      | `2`   | `C_f ≈ χ²`   |
//!
//! `ψ_s` carries the exponent `1 - s` on `x` and `s` on `(x+1)/2`, so the
//! generator indexed by `s` plugs in to the AG member indexed by `1 - s`
//! (`ψ_0` gives Jensen-Shannon, `ψ_1` the arithmetic-geometric divergence).
//! [`ConvexGenerator::ag_family`] applies that shift, so callers that think in
//! AG indices do not have to.
//!
//! When `f` is convex with `f(1) = 0`, `C_f` is nonnegative and jointly convex
//! in `(P, Q)`; when additionally `f''(1) > 0`,
//! `C_f(P||Q) / χ²(P||Q) → f''(1)/2` as `P → Q`.

use std::fmt;
use std::sync::Arc;

use crate::distribution::{check_lengths, Distribution};
use crate::divergence::chi_squared;
use crate::error::{DivergenceError, Result};
use crate::param::{SParam, TAU_LIMIT};
use crate::sum::compensated_sum;

type GeneratorFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A normalized convex function `f` on `(0, ∞)` with `f(1) = 0`, together with
/// `f''(1)`.
#[derive(Clone)]
pub struct ConvexGenerator {
    name: String,
    second_at_one: f64,
    eval: Arc<GeneratorFn>,
}

impl fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexGenerator")
            .field("name", &self.name)
            .field("second_at_one", &self.second_at_one)
            .finish_non_exhaustive()
    }
}

impl ConvexGenerator {
    /// Wraps a caller-supplied generator, checking `f(1) = 0` (to `1e-12`) and
    /// `f''(1) > 0`.
    pub fn new<F>(name: impl Into<String>, eval: F, second_at_one: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let at_one = eval(1.0);
        if at_one.is_nan() || at_one.abs() > 1e-12 {
            return Err(DivergenceError::InvalidGenerator(format!(
                "f(1) must be 0, got {at_one}"
            )));
        }
        if !(second_at_one.is_finite() && second_at_one > 0.0) {
            return Err(DivergenceError::InvalidGenerator(format!(
                "f''(1) must be positive, got {second_at_one}"
            )));
        }
        Ok(Self {
            name: name.into(),
            second_at_one,
            eval: Arc::new(eval),
        })
    }

    /// `ψ_s`; `C_{ψ_s}` is the AG divergence at `1 - s`.
    pub fn psi(s: SParam) -> Self {
        Self {
            name: format!("psi[s={s}]"),
            second_at_one: 0.25,
            eval: Arc::new(move |x| psi_s_raw(s.value(), x)),
        }
    }

    /// `φ_s`; `C_{φ_s}` is the J divergence at `s`.
    pub fn phi(s: SParam) -> Self {
        Self {
            name: format!("phi[s={s}]"),
            second_at_one: 2.0,
            eval: Arc::new(move |x| phi_s_raw(s.value(), x)),
        }
    }

    /// Generator whose f-divergence is the AG divergence at `s`.
    pub fn ag_family(s: SParam) -> Self {
        let shifted = 1.0 - s.value();
        Self {
            name: format!("ag[s={s}]"),
            second_at_one: 0.25,
            eval: Arc::new(move |x| psi_s_raw(shifted, x)),
        }
    }

    /// Generator whose f-divergence is the J divergence at `s`.
    pub fn j_family(s: SParam) -> Self {
        let mut g = Self::phi(s);
        g.name = format!("j[s={s}]");
        g
    }

    /// `f(x) = (x - 1)²`, whose f-divergence is `χ²(P||Q)`.
    pub fn chi_squared() -> Self {
        Self {
            name: "chi-squared".to_string(),
            second_at_one: 2.0,
            eval: Arc::new(|x| (x - 1.0) * (x - 1.0)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn second_at_one(&self) -> f64 {
        self.second_at_one
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

/// `C_f(P||Q) = Σ q_i f(p_i / q_i)`.
pub fn csiszar_divergence(f: &ConvexGenerator, p: &Distribution, q: &Distribution) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(compensated_sum(
        p.weights()
            .iter()
            .zip(q.weights())
            .map(|(&pi, &qi)| qi * f.eval(pi / qi)),
    ))
}

/// Second-order prediction `(f''(1)/2) χ²(P||Q)` of `C_f(P||Q)`.
pub fn chi2_prediction(f: &ConvexGenerator, p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(0.5 * f.second_at_one() * chi_squared(p, q)?)
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(DivergenceError::NonPositiveInput { p: x, q: x })
    }
}

fn is_zero_limit(s: f64) -> bool {
    s.abs() < TAU_LIMIT
}

fn is_one_limit(s: f64) -> bool {
    (s - 1.0).abs() < TAU_LIMIT
}

fn psi_s_raw(s: f64, x: f64) -> f64 {
    let m = 0.5 * (x + 1.0);
    if is_zero_limit(s) {
        0.5 * x * x.ln() - m * m.ln()
    } else if is_one_limit(s) {
        m * (m / x.sqrt()).ln()
    } else {
        (0.5 * (x.powf(1.0 - s) + 1.0) * m.powf(s) - m) / (s * (s - 1.0))
    }
}

fn phi_s_raw(s: f64, x: f64) -> f64 {
    if is_zero_limit(s) || is_one_limit(s) {
        (x - 1.0) * x.ln()
    } else {
        (x.powf(s) + x.powf(1.0 - s) - (1.0 + x)) / (s * (s - 1.0))
    }
}

/// `ψ_s(x)`.
pub fn psi_s(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(psi_s_raw(s.value(), x))
}

/// `ψ_s'(x)`.
pub fn psi_s_d1(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    let s = s.value();
    let m = 0.5 * (x + 1.0);
    let v = if is_zero_limit(s) {
        -0.5 * (m / x).ln()
    } else if is_one_limit(s) {
        0.5 * (m / x.sqrt()).ln() + (x - 1.0) / (4.0 * x)
    } else {
        let a = 0.5 * (x.powf(1.0 - s) + 1.0);
        let da = 0.5 * (1.0 - s) * x.powf(-s);
        let b = m.powf(s);
        let db = 0.5 * s * m.powf(s - 1.0);
        (da * b + a * db - 0.5) / (s * (s - 1.0))
    };
    Ok(v)
}

/// `ψ_s''(x) = ((x^{-s-1} + 1)/8) ((x+1)/2)^{s-2}`, valid for every `s`.
pub fn psi_s_d2(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    let s = s.value();
    Ok((x.powf(-s - 1.0) + 1.0) / 8.0 * (0.5 * (x + 1.0)).powf(s - 2.0))
}

/// `φ_s(x)`.
pub fn phi_s(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(phi_s_raw(s.value(), x))
}

/// `φ_s'(x)`.
pub fn phi_s_d1(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    let s = s.value();
    let v = if is_zero_limit(s) || is_one_limit(s) {
        1.0 - 1.0 / x + x.ln()
    } else {
        (s * x.powf(s - 1.0) + (1.0 - s) * x.powf(-s) - 1.0) / (s * (s - 1.0))
    };
    Ok(v)
}

/// `φ_s''(x) = x^{s-2} + x^{-s-1}`.
pub fn phi_s_d2(s: SParam, x: f64) -> Result<f64> {
    check_x(x)?;
    let s = s.value();
    Ok(x.powf(s - 2.0) + x.powf(-s - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{ag_divergence, j_divergence, named_divergence, NamedMeasure};
    use crate::verify::extended::{num, to_f64, Extended};

    fn s(v: f64) -> SParam {
        SParam::new(v).unwrap()
    }

    fn fixture() -> (Distribution, Distribution) {
        (
            Distribution::new(&[0.5, 0.5]).unwrap(),
            Distribution::new(&[0.2, 0.8]).unwrap(),
        )
    }

    const GRID: [f64; 8] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

    #[test]
    fn normalized_at_one() {
        for v in GRID {
            assert_eq!(psi_s(s(v), 1.0).unwrap(), 0.0);
            assert_eq!(phi_s(s(v), 1.0).unwrap(), 0.0);
            assert_eq!(psi_s_d2(s(v), 1.0).unwrap(), 0.25);
            assert_eq!(phi_s_d2(s(v), 1.0).unwrap(), 2.0);
        }
    }

    #[test]
    fn second_derivative_examples() {
        assert_eq!(psi_s_d2(s(2.0), 2.0).unwrap(), 0.140625);
        assert_eq!(phi_s_d2(s(0.5), 4.0).unwrap(), 0.25);
    }

    #[test]
    fn limit_second_derivatives_match_closed_forms() {
        for x in [0.25, 0.5, 2.0, 4.0] {
            let d0 = 1.0 / (2.0 * x * (x + 1.0));
            let d1 = (x * x + 1.0) / (4.0 * x * x * (x + 1.0));
            assert!((psi_s_d2(s(0.0), x).unwrap() - d0).abs() < 1e-15);
            assert!((psi_s_d2(s(1.0), x).unwrap() - d1).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // Differences are taken on a 256-bit evaluation of the generators; in
        // f64 the second difference with h = 1e-4 loses ~1e-8 to rounding.
        let h = 1e-4;
        let mut ext = Extended::new();
        for v in GRID {
            for x in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let fd1 = ext.first_difference(|e, t| e.psi(v, t), x, h);
                let fd2 = ext.second_difference(|e, t| e.psi(v, t), x, h);
                let a1 = psi_s_d1(s(v), x).unwrap();
                let a2 = psi_s_d2(s(v), x).unwrap();
                assert!(
                    (fd1 - a1).abs() <= 1e-6 * a1.abs().max(1.0),
                    "psi' s={v} x={x}: {fd1} vs {a1}"
                );
                assert!(
                    (fd2 - a2).abs() <= 1e-6 * a2.abs(),
                    "psi'' s={v} x={x}: {fd2} vs {a2}"
                );

                let fd1 = ext.first_difference(|e, t| e.phi(v, t), x, h);
                let fd2 = ext.second_difference(|e, t| e.phi(v, t), x, h);
                let a1 = phi_s_d1(s(v), x).unwrap();
                let a2 = phi_s_d2(s(v), x).unwrap();
                assert!(
                    (fd1 - a1).abs() <= 1e-6 * a1.abs().max(1.0),
                    "phi' s={v} x={x}: {fd1} vs {a1}"
                );
                assert!(
                    (fd2 - a2).abs() <= 1e-6 * a2.abs(),
                    "phi'' s={v} x={x}: {fd2} vs {a2}"
                );
            }
        }
    }

    #[test]
    fn extended_generators_match_f64() {
        let mut ext = Extended::new();
        for v in GRID {
            for x in [0.25, 0.5, 2.0, 4.0] {
                let want = to_f64(&ext.psi(v, &num(x)));
                assert!((psi_s(s(v), x).unwrap() - want).abs() <= 1e-13 * want.abs());
                let want = to_f64(&ext.phi(v, &num(x)));
                assert!((phi_s(s(v), x).unwrap() - want).abs() <= 1e-13 * want.abs());
            }
        }
    }

    #[test]
    fn plug_in_reproduces_families() {
        let (p, q) = fixture();
        for v in GRID {
            let ag = ag_divergence(s(v), &p, &q).unwrap();
            let via_psi = csiszar_divergence(&ConvexGenerator::psi(s(1.0 - v)), &p, &q).unwrap();
            let via_ag = csiszar_divergence(&ConvexGenerator::ag_family(s(v)), &p, &q).unwrap();
            assert!((ag - via_psi).abs() <= 1e-12 * ag, "s={v}");
            assert!((ag - via_ag).abs() <= 1e-12 * ag, "s={v}");

            let j = j_divergence(s(v), &p, &q).unwrap();
            let via_phi = csiszar_divergence(&ConvexGenerator::phi(s(v)), &p, &q).unwrap();
            assert!((j - via_phi).abs() <= 1e-12 * j, "s={v}");
        }
    }

    #[test]
    fn psi_zero_is_jensen_shannon() {
        let (p, q) = fixture();
        let via_psi = csiszar_divergence(&ConvexGenerator::psi(s(0.0)), &p, &q).unwrap();
        let i = named_divergence(NamedMeasure::JensenShannon, &p, &q).unwrap();
        assert!((via_psi - i).abs() < 1e-15);
        let via_psi = csiszar_divergence(&ConvexGenerator::psi(s(1.0)), &p, &q).unwrap();
        let t = named_divergence(NamedMeasure::ArithmeticGeometric, &p, &q).unwrap();
        assert!((via_psi - t).abs() < 1e-15);
    }

    #[test]
    fn phi_half_is_eight_hellinger() {
        let (p, q) = fixture();
        let v = csiszar_divergence(&ConvexGenerator::phi(s(0.5)), &p, &q).unwrap();
        assert!((v - 0.4105336155958896).abs() < 1e-14);
    }

    #[test]
    fn zero_on_identical_inputs() {
        let (p, _) = fixture();
        for g in [
            ConvexGenerator::psi(s(0.3)),
            ConvexGenerator::phi(s(-1.0)),
            ConvexGenerator::chi_squared(),
        ] {
            assert_eq!(csiszar_divergence(&g, &p, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn chi2_predictions() {
        let (p, q) = fixture();
        let chi = 0.5625;
        assert_eq!(
            chi2_prediction(&ConvexGenerator::chi_squared(), &p, &q).unwrap(),
            chi
        );
        assert!(
            (chi2_prediction(&ConvexGenerator::psi(s(0.7)), &p, &q).unwrap() - chi / 8.0).abs()
                < 1e-16
        );
        assert_eq!(
            chi2_prediction(&ConvexGenerator::phi(s(0.7)), &p, &q).unwrap(),
            chi
        );
        let via_chi = csiszar_divergence(&ConvexGenerator::chi_squared(), &p, &q).unwrap();
        assert!((via_chi - chi).abs() < 1e-15);
    }

    #[test]
    fn custom_generator_validation() {
        assert!(ConvexGenerator::new("tv", |x: f64| 0.5 * (x - 1.0).abs(), 1.0).is_ok());
        assert!(matches!(
            ConvexGenerator::new("shifted", |x: f64| x * x, 2.0),
            Err(DivergenceError::InvalidGenerator(_))
        ));
        assert!(ConvexGenerator::new("flat", |x: f64| x - 1.0, 0.0).is_err());
    }

    #[test]
    fn length_and_domain_errors() {
        let (p, _) = fixture();
        let r = Distribution::uniform(3).unwrap();
        assert!(csiszar_divergence(&ConvexGenerator::chi_squared(), &p, &r).is_err());
        assert!(chi2_prediction(&ConvexGenerator::chi_squared(), &p, &r).is_err());
        assert!(psi_s(s(0.5), 0.0).is_err());
        assert!(phi_s_d2(s(0.5), -1.0).is_err());
    }

    #[test]
    fn second_derivatives_positive() {
        let mut x = 1e-3;
        while x < 1e3 {
            for v in GRID {
                assert!(psi_s_d2(s(v), x).unwrap() > 0.0);
                assert!(phi_s_d2(s(v), x).unwrap() > 0.0);
            }
            x *= 1.07;
        }
    }
}
