//! Level decompositions of a finite spectrum and the nested form of its
//! partition function.

mod probe;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{rational_pow, Scalar};
use crate::subset::Subset;

pub use probe::{free_energy, free_energy_excess, taylor_probe, ProbeEntry, ProbeOptions, ProbeReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NestingError {
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("spectrum value at index {0} is not finite")]
    NonFinite(usize),
    #[error("level value {0} is not an integer; exact reconstruction needs integer exponents")]
    NonIntegerExponent(String),
    #[error("base must be a rational greater than 1")]
    InvalidBase,
    #[error("digit {digit} at position {position} is outside 0..{p}")]
    DigitRange { position: usize, digit: u64, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid k grid: {0}")]
    InvalidGrid(String),
    #[error("orders must lie in 2..=4, got {0}")]
    InvalidOrders(usize),
    #[error("extrapolated sequence for order {order} is not contracting; refine the k grid")]
    GridTooCoarse { order: usize },
    #[error("k must be strictly positive")]
    NonPositiveK,
}

/// A: levels by decreasing value (repeated max extraction). B: increasing
/// value (repeated min extraction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NestType {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub indices: Subset,
    pub mu: T,
    pub nu: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestingForm<T> {
    pub kind: NestType,
    pub levels: Vec<Level<T>>,
}

pub fn validate_spectrum<T: Scalar>(values: &[T]) -> Result<(), NestingError> {
    if values.is_empty() {
        return Err(NestingError::EmptySpectrum);
    }
    if let Some(i) = values.iter().position(|v| !v.to_f64().is_finite() && !T::EXACT) {
        return Err(NestingError::NonFinite(i));
    }
    Ok(())
}

/// Strips the extreme remaining value (largest for A, smallest for B) together
/// with every value within `tie_tol` of it, until the spectrum is exhausted.
///
/// Without near-tie chains the B levels are the A levels reversed. `tie_tol` is
/// ignored for exact scalars.
pub fn nest<T: Scalar>(values: &[T], kind: NestType, tie_tol: f64) -> Result<NestingForm<T>, NestingError> {
    validate_spectrum(values)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let by_value = values[b].partial_cmp(&values[a]).expect("finite values");
        match kind {
            NestType::A => by_value,
            NestType::B => by_value.reverse(),
        }
        .then(a.cmp(&b))
    });
    let mut levels: Vec<Level<T>> = Vec::new();
    let mut rest = order.as_slice();
    while let Some(&leader) = rest.first() {
        let lead = &values[leader];
        let size = rest.iter().take_while(|&&i| values[i].ties(lead, tie_tol)).count();
        levels.push(Level { indices: rest[..size].iter().copied().collect(), mu: lead.clone(), nu: size });
        rest = &rest[size..];
    }
    Ok(NestingForm { kind, levels })
}

impl<T: Scalar> NestingForm<T> {
    /// Levels ordered from the largest value down, whatever the type.
    fn descending(&self) -> Vec<&Level<T>> {
        let mut out: Vec<&Level<T>> = self.levels.iter().collect();
        if self.kind == NestType::B {
            out.reverse();
        }
        out
    }

    /// The level with the smallest value (the minimisers).
    pub fn bottom(&self) -> &Level<T> {
        match self.kind {
            NestType::A => self.levels.last(),
            NestType::B => self.levels.first(),
        }
        .expect("nesting forms are nonempty")
    }

    /// The level with the largest value.
    pub fn top(&self) -> &Level<T> {
        match self.kind {
            NestType::A => self.levels.first(),
            NestType::B => self.levels.last(),
        }
        .expect("nesting forms are nonempty")
    }

    pub fn total(&self) -> usize {
        self.levels.iter().map(|l| l.nu).sum()
    }
}

/// `ln Z` from the nested product `e^{μ0}(ν0 + e^{μ1-μ0}(ν1 + ...))`, evaluated inside out.
pub fn reconstruct_log<T: Scalar>(nf: &NestingForm<T>) -> f64 {
    let levels = nf.descending();
    let last = levels.last().expect("nonempty");
    let mut acc = last.nu as f64;
    for pair in levels.windows(2).rev() {
        let (outer, inner) = (pair[0], pair[1]);
        acc = outer.nu as f64 + (inner.mu.to_f64() - outer.mu.to_f64()).exp() * acc;
    }
    levels[0].mu.to_f64() + acc.ln()
}

/// `Z = Σ_α e^{f_α}` via the nested product.
pub fn reconstruct<T: Scalar>(nf: &NestingForm<T>) -> f64 {
    reconstruct_log(nf).exp()
}

/// The nested product with base `b` in place of `e`; needs integer level values.
pub fn reconstruct_exact(nf: &NestingForm<BigRational>, base: &BigRational) -> Result<BigRational, NestingError> {
    if *base <= BigRational::one() {
        return Err(NestingError::InvalidBase);
    }
    let levels = nf.descending();
    let exponent = |q: &BigRational| -> Result<i64, NestingError> {
        if !q.is_integer() {
            return Err(NestingError::NonIntegerExponent(q.render()));
        }
        i64::try_from(q.to_integer()).map_err(|_| NestingError::NonIntegerExponent(q.render()))
    };
    let last = levels.last().expect("nonempty");
    let mut acc = BigRational::from_integer(BigInt::from(last.nu));
    for pair in levels.windows(2).rev() {
        let (outer, inner) = (pair[0], pair[1]);
        let step = exponent(&inner.mu)? - exponent(&outer.mu)?;
        acc = BigRational::from_integer(BigInt::from(outer.nu)) + rational_pow(base, step) * acc;
    }
    Ok(rational_pow(base, exponent(&levels[0].mu)?) * acc)
}

/// `Σ ν_ℓ p^{-ℓ}` (A) or `Σ ν_ℓ p^{ℓ}` (B) over `ℓ = 0..=truncation`; missing digits count as 0.
pub fn padic_series(digits: &[u64], p: u64, kind: NestType, truncation: usize) -> Result<BigRational, NestingError> {
    if !crate::ultrametric::is_prime(p) {
        return Err(NestingError::NotPrime(p));
    }
    if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= p) {
        return Err(NestingError::DigitRange { position, digit, p });
    }
    let base = BigRational::from_integer(BigInt::from(p));
    let mut sum = BigRational::zero();
    for (l, &d) in digits.iter().enumerate().take(truncation + 1) {
        let power = match kind {
            NestType::A => -(l as i64),
            NestType::B => l as i64,
        };
        sum += BigRational::from_integer(BigInt::from(d)) * rational_pow(&base, power);
    }
    Ok(sum)
}
