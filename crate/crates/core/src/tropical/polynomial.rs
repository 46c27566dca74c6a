use super::{Mode, TropicalError};
use crate::extended::Extended;
use crate::scalar::Scalar;

/// `a ⊙ X^I`, i.e. `a + Σ I_j x_j` in classical notation.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T> {
    pub coefficient: Extended<T>,
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TropicalPolynomial<T> {
    pub monomials: Vec<Monomial<T>>,
    pub mode: Mode,
}

impl<T: Scalar> TropicalPolynomial<T> {
    pub fn new(mode: Mode) -> Self {
        TropicalPolynomial { monomials: Vec::new(), mode }
    }

    pub fn with_monomial(mut self, coefficient: Extended<T>, exponents: Vec<i64>) -> Self {
        self.monomials.push(Monomial { coefficient, exponents });
        self
    }

    /// Evaluates `⊕_I a_I ⊙ x^{⊙I}`; an empty polynomial evaluates to the mode's neutral.
    ///
    /// A zero exponent contributes nothing even at an infinite coordinate.
    pub fn eval(&self, x: &[Extended<T>]) -> Result<Extended<T>, TropicalError> {
        let mut acc = self.mode.neutral();
        for m in &self.monomials {
            if m.exponents.len() != x.len() {
                return Err(TropicalError::DimensionMismatch { expected: m.exponents.len(), got: x.len() });
            }
            let mut term = m.coefficient.clone();
            for (&i, xi) in m.exponents.iter().zip(x) {
                if i != 0 {
                    term = term.checked_add(&xi.scale(i)).ok_or(TropicalError::UndefinedTerm)?;
                }
            }
            let replace = match self.mode {
                Mode::Max => term > acc,
                Mode::Min => term < acc,
            };
            if replace {
                acc = term;
            }
        }
        Ok(acc)
    }
}
