//! Grid probes of the auxiliary functions used in the triangle-inequality
//! arguments.
//!
//! For a family member `D`, `n(t) = ∂/∂r D(p, r)` evaluated at `p/r = t`
//! (homogeneity makes it a function of `t` alone) and
//! `h(t) = n(t) / √D(t, 1)`. The arguments rely on `n' < 0` everywhere, so
//! that `n` and `h` change sign once, at `t = 1`.
//!
//! | family, regime | `n(t)` | `n'(t)` |
//! |----------------|--------|---------|
//! | AG, generic `s` | `[(s/2)a^{1-s} + ((1-s)/4)(t^s+1)a^{-s} - 1/2] / (s(s-1))`, `a = (t+1)/2` | `-a^{-s-1}(t + t^{s-1})/8` |
//! | AG, `s = 1` (`I`) | `(1/2)ln(2/(t+1))` | `-1/(2(t+1))` |
//! | AG, `s = 0` (`T`) | `2ln((t+1)/(2√t)) + 1 - t` (4 × derivative) | `-(1+t²)/(t(t+1))` |
//! | J, generic `s` | `[(1-s)t^s + s t^{1-s} - 1] / (s(s-1))` | `-t^{s-1} - t^{-s}` |
//! | J, `s ∈ {0, 1}` | `1 - t - ln t` | `-1 - 1/t` |

use serde::{Deserialize, Serialize};

use crate::divergence::family_point_unchecked;
use crate::error::{DivergenceError, Result};
use crate::param::{Family, Regime, SParam};

/// `|n|` at or below this is treated as zero when counting sign changes.
pub const ZERO_TOL: f64 = 1e-14;

/// `n(t)` for the given family member.
pub fn n_function(family: Family, s: SParam, t: f64) -> f64 {
    let sv = s.value();
    match (family, s.regime(family)) {
        (Family::Ag, Regime::LimitAgOne) => 0.5 * (2.0 / (t + 1.0)).ln(),
        (Family::Ag, Regime::LimitAgZero) => 2.0 * ((t + 1.0) / (2.0 * t.sqrt())).ln() + 1.0 - t,
        (Family::Ag, _) => {
            let a = 0.5 * (t + 1.0);
            let bracket = 0.5 * sv * a.powf(1.0 - sv)
                + 0.25 * (1.0 - sv) * (t.powf(sv) + 1.0) * a.powf(-sv)
                - 0.5;
            bracket / (sv * (sv - 1.0))
        }
        (Family::J, Regime::Generic) => {
            ((1.0 - sv) * t.powf(sv) + sv * t.powf(1.0 - sv) - 1.0) / (sv * (sv - 1.0))
        }
        (Family::J, _) => 1.0 - t - t.ln(),
    }
}

/// Closed-form `n'(t)`.
pub fn n_derivative(family: Family, s: SParam, t: f64) -> f64 {
    let sv = s.value();
    match (family, s.regime(family)) {
        (Family::Ag, Regime::LimitAgOne) => -0.5 / (t + 1.0),
        (Family::Ag, Regime::LimitAgZero) => -(1.0 + t * t) / (t * (t + 1.0)),
        (Family::Ag, _) => {
            let a = 0.5 * (t + 1.0);
            -a.powf(-sv - 1.0) * (t + t.powf(sv - 1.0)) / 8.0
        }
        (Family::J, Regime::Generic) => -t.powf(sv - 1.0) - t.powf(-sv),
        (Family::J, _) => -1.0 - 1.0 / t,
    }
}

/// `h(t) = n(t) / √D(t, 1)`, with `h(1) = 0`.
pub fn h_function(family: Family, s: SParam, t: f64) -> f64 {
    let d = family_point_unchecked(family, s, t, 1.0);
    if d <= 0.0 {
        0.0
    } else {
        n_function(family, s, t) / d.sqrt()
    }
}

/// `n` points log-spaced on `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub family: Family,
    pub s: SParam,
    pub points: usize,
    /// `n'(t) < 0` at every grid point.
    pub derivative_negative: bool,
    pub max_derivative: f64,
    /// Largest relative gap between `n'` and a central difference of `n`.
    pub derivative_fd_max_rel_err: f64,
    pub sign_changes: usize,
    /// Grid cell `[t_i, t_j]` where the single sign change happens.
    pub bracket: Option<[f64; 2]>,
    pub bracket_contains_one: bool,
    pub n_at_one: f64,
    /// `h > 0` for `t < 1` and `h < 0` for `t > 1` on the grid.
    pub h_pattern_ok: bool,
    pub passed: bool,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(DivergenceError::InvalidConfig("empty t grid".into()));
    }
    if t_grid.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(DivergenceError::InvalidConfig(
            "t grid must be positive".into(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DivergenceError::InvalidConfig(
            "t grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Evaluates `n`, `n'` and `h` on `t_grid` and checks the sign structure.
pub fn monotonicity_probe(family: Family, s: SParam, t_grid: &[f64]) -> Result<ProbeReport> {
    check_grid(t_grid)?;
    let mut max_derivative = f64::NEG_INFINITY;
    let mut fd_err: f64 = 0.0;
    let mut h_pattern_ok = true;
    let mut signed: Vec<(f64, bool)> = Vec::with_capacity(t_grid.len());

    for &t in t_grid {
        let d = n_derivative(family, s, t);
        max_derivative = max_derivative.max(d);

        let step = 1e-5 * t;
        let fd = (n_function(family, s, t + step) - n_function(family, s, t - step)) / (2.0 * step);
        fd_err = fd_err.max((fd - d).abs() / d.abs());

        let n = n_function(family, s, t);
        if n.abs() > ZERO_TOL {
            signed.push((t, n > 0.0));
        }
        let h = h_function(family, s, t);
        if (t < 1.0 && h <= 0.0 && n.abs() > ZERO_TOL)
            || (t > 1.0 && h >= 0.0 && n.abs() > ZERO_TOL)
        {
            h_pattern_ok = false;
        }
    }

    let changes: Vec<[f64; 2]> = signed
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| [w[0].0, w[1].0])
        .collect();
    let bracket = (changes.len() == 1).then(|| changes[0]);
    let bracket_contains_one = bracket.is_some_and(|[lo, hi]| lo <= 1.0 && 1.0 <= hi);
    let n_at_one = n_function(family, s, 1.0);
    let derivative_negative = max_derivative < 0.0;
    let passed = derivative_negative
        && changes.len() == 1
        && bracket_contains_one
        && h_pattern_ok
        && n_at_one.abs() <= 1e-12;

    Ok(ProbeReport {
        family,
        s,
        points: t_grid.len(),
        derivative_negative,
        max_derivative,
        derivative_fd_max_rel_err: fd_err,
        sign_changes: changes.len(),
        bracket,
        bracket_contains_one,
        n_at_one,
        h_pattern_ok,
        passed,
    })
}

/// Probe of the step `|h(t)| > |h(βt)|` for `t ∈ (1/β, 1)`, which the
/// arguments use without proof. Report only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub family: Family,
    pub s: SParam,
    pub beta: f64,
    pub points_checked: usize,
    /// Points in `(1/β, 1)` where `|h(t)| <= |h(βt)|`.
    pub dominance_failures: usize,
    /// Sign changes of `h(t) + h(βt)` on the same points.
    pub sum_sign_changes: usize,
    pub first_failure_t: Option<f64>,
}

pub fn dominance_probe(
    family: Family,
    s: SParam,
    beta: f64,
    t_grid: &[f64],
) -> Result<DominanceReport> {
    check_grid(t_grid)?;
    if !(beta.is_finite() && beta > 1.0) {
        return Err(DivergenceError::InvalidConfig(format!(
            "beta must exceed 1, got {beta}"
        )));
    }
    let inside: Vec<f64> = t_grid
        .iter()
        .copied()
        .filter(|&t| t > 1.0 / beta && t < 1.0)
        .collect();
    let mut failures = 0;
    let mut first = None;
    let mut signs = Vec::new();
    for &t in &inside {
        let (a, b) = (h_function(family, s, t), h_function(family, s, beta * t));
        if a.abs() <= b.abs() {
            failures += 1;
            first.get_or_insert(t);
        }
        let g = a + b;
        if g != 0.0 {
            signs.push(g > 0.0);
        }
    }
    Ok(DominanceReport {
        family,
        s,
        beta,
        points_checked: inside.len(),
        dominance_failures: failures,
        sum_sign_changes: signs.windows(2).filter(|w| w[0] != w[1]).count(),
        first_failure_t: first,
    })
}
