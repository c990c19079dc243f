//! Scalar modes for series coefficients.
//!
//! Two coefficient types are supported: exact complex rationals
//! ([`CRat`], arbitrary precision) and IEEE double complex numbers ([`C64`]).
//! Every algorithm in the crate is generic over [`Scalar`], so the same code
//! path produces exact identities with rational data and fast approximations
//! for irrational parameters.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;
pub type CRat = Complex<BigRational>;

/// Absolute tolerance used for floating comparisons unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    /// Exact complex rationals.
    Exact,
    /// 64-bit floating complex numbers.
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }
}

impl std::fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const MODE: ScalarMode;

    fn from_i64(n: i64) -> Self;

    /// The real rational `num / den`. Panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    /// `re + i·im` from two rationals given as (numerator, denominator).
    fn complex_ratio(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::ratio(re.0, re.1) + Self::i() * Self::ratio(im.0, im.1)
    }

    fn i() -> Self;

    fn conj(&self) -> Self;

    fn to_c64(&self) -> C64;

    fn is_finite(&self) -> bool;

    /// `|z|²` as a (real) scalar of the same mode.
    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// The modulus as an exact rational, when it is one.
    ///
    /// Floating scalars never report an exact modulus.
    fn exact_abs(&self) -> Option<BigRational> {
        None
    }

    /// True when the imaginary part vanishes (exactly, for rationals).
    fn is_real(&self) -> bool;
}

impl Scalar for C64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

impl Scalar for CRat {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_c64(&self) -> C64 {
        Complex::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn exact_abs(&self) -> Option<BigRational> {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        let num = exact_isqrt(n2.numer())?;
        let den = exact_isqrt(n2.denom())?;
        Some(BigRational::new(num, den))
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Nearest double to a big rational, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both sides down to fit in f64 range.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        return if n == 0.0 {
            0.0
        } else {
            n.signum() * f64::INFINITY
        };
    }
    n / d
}

/// Parses a real rational literal: `3`, `-2/5`, or a finite decimal like `0.125`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}
