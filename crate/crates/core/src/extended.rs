//! Reals extended by the two sentinels `-inf` and `+inf`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use crate::scalar::Scalar;

/// A finite value or one of the two infinite sentinels.
///
/// The derived order puts `NegInf` below every finite value and `PosInf` above.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum Extended<T> {
    NegInf,
    Finite(T),
    PosInf,
}

/// Float-mode extended real.
pub type ExtendedReal = Extended<f64>;

/// Exact-mode extended rational.
pub type ExtendedRational = Extended<BigRational>;

impl<T: Scalar> Extended<T> {
    pub fn finite(value: T) -> Self {
        Extended::Finite(value)
    }

    pub fn zero() -> Self {
        Extended::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lossy projection onto `f64` (infinite sentinels map to IEEE infinities).
    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v.to_f64(),
            Extended::PosInf => f64::INFINITY,
        }
    }

    /// Equality up to `tol` on finite values; sentinels compare exactly.
    pub fn ties(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.ties(b, tol),
            (Extended::NegInf, Extended::NegInf) | (Extended::PosInf, Extended::PosInf) => true,
            _ => false,
        }
    }

    /// `self <= other` allowing a tolerance on finite values.
    pub fn le_tol(&self, other: &Self, tol: f64) -> bool {
        self.ties(other, tol) || self < other
    }

    /// Sum of two extended values; `None` for `-inf + +inf`.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        use Extended::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a.clone() + b.clone())),
            (NegInf, PosInf) | (PosInf, NegInf) => None,
            (NegInf, _) | (_, NegInf) => Some(NegInf),
            (PosInf, _) | (_, PosInf) => Some(PosInf),
        }
    }

    /// Integer multiple; `None` for `0 * inf` is avoided by returning `0`.
    pub fn scale(&self, factor: i64) -> Self {
        use Extended::*;
        match self {
            Finite(a) => Finite(a.clone() * T::from_i64(factor)),
            _ if factor == 0 => Extended::zero(),
            NegInf if factor > 0 => NegInf,
            NegInf => PosInf,
            PosInf if factor > 0 => PosInf,
            PosInf => NegInf,
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::Finite(v) => Extended::Finite(-v.clone()),
            Extended::PosInf => Extended::NegInf,
        }
    }

    /// Total order; finite values must not be NaN.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    pub fn render(&self) -> String {
        match self {
            Extended::NegInf => "-inf".to_string(),
            Extended::Finite(v) => v.render(),
            Extended::PosInf => "inf".to_string(),
        }
    }
}

impl ExtendedReal {
    /// Maps IEEE infinities onto the sentinels; `None` for NaN.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(Extended::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(Extended::NegInf)
        } else {
            Some(Extended::Finite(x))
        }
    }
}

impl<T: Scalar> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<T> From<T> for Extended<T> {
    fn from(value: T) -> Self {
        Extended::Finite(value)
    }
}
