//! 256-bit re-evaluation of the pointwise families and the two generators.
//!
//! Works straight from the textbook formulas (no midpoint rewriting), so it
//! is independent of the `f64` evaluation path in [`crate::divergence`]. Used
//! to confirm triangle-inequality witnesses and as a finite-difference oracle.

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::param::{Family, Regime, SParam, TAU_LIMIT};

const PRECISION: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

pub fn num(v: f64) -> BigFloat {
    BigFloat::from_f64(v, PRECISION)
}

pub fn add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, PRECISION, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.sub(b, PRECISION, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.mul(b, PRECISION, RM)
}

pub fn div(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.div(b, PRECISION, RM)
}

pub fn sqrt(a: &BigFloat) -> BigFloat {
    a.sqrt(PRECISION, RM)
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a BigFloat>) -> BigFloat {
    items.into_iter().fold(num(0.0), |acc, x| add(&acc, x))
}

/// Rounds to the nearest `f64`.
pub fn to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    v.to_string().parse().unwrap_or(f64::NAN)
}

/// Arbitrary-precision evaluator; holds the constants cache.
pub struct Extended {
    cc: Consts,
}

impl std::fmt::Debug for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Extended")
            .field("precision", &PRECISION)
            .finish()
    }
}

impl Default for Extended {
    fn default() -> Self {
        Self::new()
    }
}

impl Extended {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constants cache allocation"),
        }
    }

    fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(PRECISION, RM, &mut self.cc)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(PRECISION, RM, &mut self.cc)
    }

    // `exp(e ln a)`; the library `pow` stalls on some integer exponents.
    fn pow(&mut self, a: &BigFloat, e: &BigFloat) -> BigFloat {
        let l = self.ln(a);
        self.exp(&mul(e, &l))
    }

    /// Pointwise family term with the same regime split as the `f64` path.
    pub fn family_point(&mut self, family: Family, s: SParam, p: f64, q: f64) -> BigFloat {
        let (bp, bq) = (num(p), num(q));
        let two = num(2.0);
        let half = num(0.5);
        match (family, s.regime(family)) {
            (Family::Ag, Regime::LimitAgOne) => {
                // (p/2) ln(2p/(p+q)) + (q/2) ln(2q/(p+q))
                let sum = add(&bp, &bq);
                let r1 = div(&mul(&two, &bp), &sum);
                let r2 = div(&mul(&two, &bq), &sum);
                let t1 = mul(&mul(&half, &bp), &self.ln(&r1));
                let t2 = mul(&mul(&half, &bq), &self.ln(&r2));
                add(&t1, &t2)
            }
            (Family::Ag, Regime::LimitAgZero) => {
                // ((p+q)/2) ln((p+q)/(2√(pq)))
                let a = mul(&half, &add(&bp, &bq));
                let g = sqrt(&mul(&bp, &bq));
                let l = self.ln(&div(&a, &g));
                mul(&a, &l)
            }
            (Family::Ag, _) => {
                let sv = num(s.value());
                let one_minus = num(1.0 - s.value());
                let a = mul(&half, &add(&bp, &bq));
                let ps = self.pow(&bp, &sv);
                let qs = self.pow(&bq, &sv);
                let m = mul(&half, &add(&ps, &qs));
                let am = self.pow(&a, &one_minus);
                let bracket = sub(&mul(&m, &am), &a);
                let denom = mul(&sv, &num(s.value() - 1.0));
                div(&bracket, &denom)
            }
            (Family::J, Regime::LimitJ) => {
                let l = self.ln(&div(&bp, &bq));
                mul(&sub(&bp, &bq), &l)
            }
            (Family::J, _) => {
                let sv = num(s.value());
                let one_minus = num(1.0 - s.value());
                let t1 = mul(&self.pow(&bp, &sv), &self.pow(&bq, &one_minus));
                let t2 = mul(&self.pow(&bp, &one_minus), &self.pow(&bq, &sv));
                let bracket = sub(&add(&t1, &t2), &add(&bp, &bq));
                let denom = mul(&sv, &num(s.value() - 1.0));
                div(&bracket, &denom)
            }
        }
    }

    /// `ψ_s(x)`.
    pub fn psi(&mut self, s: f64, x: &BigFloat) -> BigFloat {
        let half = num(0.5);
        let one = num(1.0);
        let m = mul(&half, &add(x, &one));
        if s.abs() < TAU_LIMIT {
            let t1 = mul(&mul(&half, x), &self.ln(x));
            let t2 = mul(&m, &self.ln(&m));
            sub(&t1, &t2)
        } else if (s - 1.0).abs() < TAU_LIMIT {
            let l = self.ln(&div(&m, &sqrt(x)));
            mul(&m, &l)
        } else {
            let sv = num(s);
            let xa = self.pow(x, &num(1.0 - s));
            let a = mul(&half, &add(&xa, &one));
            let b = self.pow(&m, &sv);
            let bracket = sub(&mul(&a, &b), &m);
            div(&bracket, &num(s * (s - 1.0)))
        }
    }

    /// `φ_s(x)`.
    pub fn phi(&mut self, s: f64, x: &BigFloat) -> BigFloat {
        let one = num(1.0);
        if s.abs() < TAU_LIMIT || (s - 1.0).abs() < TAU_LIMIT {
            let l = self.ln(x);
            mul(&sub(x, &one), &l)
        } else {
            let a = self.pow(x, &num(s));
            let b = self.pow(x, &num(1.0 - s));
            let bracket = sub(&add(&a, &b), &add(&one, x));
            div(&bracket, &num(s * (s - 1.0)))
        }
    }

    /// Central second difference of `f` at `x` with step `h`, evaluated in
    /// extended precision.
    pub fn second_difference(
        &mut self,
        mut f: impl FnMut(&mut Self, &BigFloat) -> BigFloat,
        x: f64,
        h: f64,
    ) -> f64 {
        let bx = num(x);
        let bh = num(h);
        let lo = f(self, &sub(&bx, &bh));
        let mid = f(self, &bx);
        let hi = f(self, &add(&bx, &bh));
        let diff = sub(&add(&hi, &lo), &mul(&num(2.0), &mid));
        let d = div(&diff, &mul(&bh, &bh));
        to_f64(&d)
    }

    /// Central first difference of `f` at `x` with step `h`.
    pub fn first_difference(
        &mut self,
        mut f: impl FnMut(&mut Self, &BigFloat) -> BigFloat,
        x: f64,
        h: f64,
    ) -> f64 {
        let bx = num(x);
        let bh = num(h);
        let lo = f(self, &sub(&bx, &bh));
        let hi = f(self, &add(&bx, &bh));
        let d = div(&sub(&hi, &lo), &mul(&num(2.0), &bh));
        to_f64(&d)
    }
}
