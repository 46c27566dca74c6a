//! Numeric carriers shared by every module.
//!
//! Two arithmetic modes are supported: `f64` (float mode, ties decided with an
//! absolute tolerance) and [`BigRational`] (exact mode, ties are equality).

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Default absolute tolerance for order and equality checks in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Default tie tolerance for level membership in float mode.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-9;

/// Arithmetic mode selected at the top level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    Float,
}

impl NumericMode {
    /// Tolerance used for order/equality checks.
    pub fn tolerance(self) -> f64 {
        match self {
            NumericMode::Exact => 0.0,
            NumericMode::Float => FLOAT_TOLERANCE,
        }
    }

    /// Tolerance used for level membership (degeneracies).
    pub fn tie_tolerance(self) -> f64 {
        match self {
            NumericMode::Exact => 0.0,
            NumericMode::Float => FLOAT_TIE_TOLERANCE,
        }
    }
}

impl FromStr for NumericMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(NumericMode::Exact),
            "float" => Ok(NumericMode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

/// An ordered field element usable in both arithmetic modes.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True for exact carriers.
    const EXACT: bool;

    fn from_f64(x: f64) -> Option<Self>;
    fn from_i64(x: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// `|self - other| <= tol`; exact carriers ignore `tol` and compare for equality.
    fn ties(&self, other: &Self, tol: f64) -> bool;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// Canonical text form: shortest round-trip for floats, `num/den` for rationals.
    fn render(&self) -> String;

    /// Inverse of [`Scalar::render`]; rationals also accept integers and decimals.
    fn parse(text: &str) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ties(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    /// Signed zero prints as `0`, so equal values render identically.
    fn render(&self) -> String {
        let x = if *self == 0.0 { 0.0 } else { *self };
        format!("{x:.16e}")
    }

    fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        let v: f64 = match t.split_once('/') {
            Some((n, d)) => n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?,
            None => t.parse().ok()?,
        };
        v.is_finite().then_some(v)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn ties(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn render(&self) -> String {
        render_rational(self)
    }

    fn parse(text: &str) -> Option<Self> {
        parse_rational(text)
    }
}

/// `num/den` with the denominator always written (`3/1`).
pub fn render_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den`, an integer, or a plain decimal literal (`-1.25e-3`) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Exact integer power of a rational, negative exponents allowed (base must be nonzero then).
pub fn rational_pow(base: &BigRational, exponent: i64) -> BigRational {
    let magnitude = exponent.unsigned_abs() as usize;
    let p = num_traits::pow(base.clone(), magnitude);
    if exponent < 0 {
        BigRational::one() / p
    } else {
        p
    }
}
