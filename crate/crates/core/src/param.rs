//! The family selector and the real parameter `s`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DivergenceError, Result};

/// Half-width of the window around `s = 0` and `s = 1` inside which the
/// closed-form limit expressions replace the generic `[s(s-1)]^{-1}` formula.
pub const TAU_LIMIT: f64 = 1e-6;

/// Which one-parameter family is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Arithmetic-geometric type: `I` at `s = 1`, `T` at `s = 0`.
    Ag,
    /// J type: `J` at `s = 0` and `s = 1`, invariant under `s <-> 1 - s`.
    J,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Ag, Family::J];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ag => "ag",
            Family::J => "j",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = DivergenceError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ag" => Ok(Family::Ag),
            "j" => Ok(Family::J),
            other => Err(DivergenceError::InvalidParameter(format!(
                "unknown family {other:?} (expected \"ag\" or \"j\")"
            ))),
        }
    }
}

/// Evaluation regime of `s` for a given family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Generic,
    /// AG family near `s = 0`: arithmetic-geometric mean divergence `T`.
    LimitAgZero,
    /// AG family near `s = 1`: Jensen-Shannon divergence `I`.
    LimitAgOne,
    /// J family near `s = 0` or `s = 1`: J-divergence.
    LimitJ,
}

/// A finite family parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SParam(f64);

impl SParam {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(DivergenceError::InvalidParameter(format!(
                "s must be finite, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Classification of `s` for `family`, using [`TAU_LIMIT`].
    pub fn regime(self, family: Family) -> Regime {
        let s = self.0;
        match family {
            Family::Ag if (s - 1.0).abs() < TAU_LIMIT => Regime::LimitAgOne,
            Family::Ag if s.abs() < TAU_LIMIT => Regime::LimitAgZero,
            Family::J if s.abs().min((s - 1.0).abs()) < TAU_LIMIT => Regime::LimitJ,
            _ => Regime::Generic,
        }
    }

    /// True when `s` lies inside a limit window without being exactly 0 or 1.
    pub fn is_near_limit_but_not_exact(self) -> bool {
        let s = self.0;
        let near = s.abs() < TAU_LIMIT || (s - 1.0).abs() < TAU_LIMIT;
        near && s != 0.0 && s != 1.0
    }
}

impl TryFrom<f64> for SParam {
    type Error = DivergenceError;

    fn try_from(value: f64) -> Result<Self> {
        SParam::new(value)
    }
}

impl From<SParam> for f64 {
    fn from(s: SParam) -> Self {
        s.0
    }
}

impl fmt::Display for SParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
