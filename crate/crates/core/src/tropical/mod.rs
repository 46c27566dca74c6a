//! Idempotent monoids, their induced orders, and the maps between them.
//!
//! Finite carriers are given by an explicit addition table ([`FiniteMonoid`]);
//! infinite ones ([`SymbolicCarrier`]) carry a registry of structural facts
//! that cannot be discovered by scanning.

mod finite;
mod lattice;
mod polynomial;
mod symbolic;

use std::fmt::Debug;

use thiserror::Error;

use crate::extended::{Extended, ExtendedReal};
use crate::subset::Subset;

pub use finite::{enumerate_join_semilattices, CheckPolicy, FiniteMonoid};
pub use lattice::{
    extract_chain_hom, iota_theta_homomorphism, is_almost_complete, iota_sections_almost_complete,
    is_grounded_subposet, ChainExtraction,
};
pub use polynomial::{Monomial, TropicalPolynomial};
pub use symbolic::{Element, InducedOrder, StructuralFacts, SymbolicCarrier, TropicalMonoid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropicalError {
    #[error("addition is not idempotent at element {0}")]
    NotIdempotent(usize),
    #[error("addition is not commutative at ({0}, {1})")]
    NotCommutative(usize, usize),
    #[error("addition is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not neutral-compatible")]
    NeutralViolation(usize),
    #[error("malformed addition table: {0}")]
    InvalidTable(String),
    #[error("induced relation is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("map sends {0} outside the target carrier")]
    DomainMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tropical term is undefined (opposite infinities or division by the neutral element)")]
    UndefinedTerm,
    #[error("elements {0} and {1} are incomparable")]
    NotTotallyOrdered(usize, usize),
    #[error("map is not a monoid homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("carrier too large for exhaustive treatment ({0} elements)")]
    TooLarge(usize),
    #[error("element kind does not belong to this carrier")]
    ElementKind,
}

/// Which extremum plays the role of tropical addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    /// The neutral sentinel: `-inf` for max, `+inf` for min.
    pub fn neutral<T>(self) -> Extended<T> {
        match self {
            Mode::Max => Extended::NegInf,
            Mode::Min => Extended::PosInf,
        }
    }

    pub fn dual(self) -> Mode {
        match self {
            Mode::Max => Mode::Min,
            Mode::Min => Mode::Max,
        }
    }
}

/// Tropical addition on extended reals.
pub fn oplus(a: &ExtendedReal, b: &ExtendedReal, mode: Mode) -> ExtendedReal {
    let pick_b = match mode {
        Mode::Max => b > a,
        Mode::Min => b < a,
    };
    if pick_b {
        b.clone()
    } else {
        a.clone()
    }
}

/// `eps * ln(exp(x/eps) + exp(y/eps))`, evaluated around the larger argument.
///
/// The result exceeds `max(x, y)` by at most `eps * ln 2`.
///
/// # Panics
/// If `eps` is not strictly positive.
pub fn oplus_eps(x: f64, y: f64, eps: f64) -> f64 {
    assert!(eps > 0.0, "oplus_eps requires eps > 0");
    let hi = x.max(y);
    let lo = x.min(y);
    hi + eps * (-(hi - lo) / eps).exp().ln_1p()
}

/// An idempotent commutative monoid, seen through its operation only.
pub trait Monoid {
    type Elem: Clone + PartialEq + Debug;

    fn neutral(&self) -> Self::Elem;
    fn oplus(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Carrier membership; used to report maps that leave the target.
    fn contains(&self, _a: &Self::Elem) -> bool {
        true
    }
}

/// A monoid whose carrier can be listed.
pub trait Enumerable: Monoid {
    fn elements(&self) -> Vec<Self::Elem>;
}

/// `(P(U), ∪, ∅)` for a universe `U = {0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnionMonoid {
    pub universe: usize,
}

/// `(P(U), ∩, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectionMonoid {
    pub universe: usize,
}

/// `({A ⊆ U : bottom ∈ A}, ∪, {bottom})`, the target of chain presentations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointedUnionMonoid {
    pub universe: usize,
    pub bottom: usize,
}

impl Monoid for UnionMonoid {
    type Elem = Subset;

    fn neutral(&self) -> Subset {
        Subset::empty()
    }

    fn oplus(&self, a: &Subset, b: &Subset) -> Subset {
        a.union(b)
    }

    fn contains(&self, a: &Subset) -> bool {
        a.bound() <= self.universe
    }
}

impl Monoid for IntersectionMonoid {
    type Elem = Subset;

    fn neutral(&self) -> Subset {
        Subset::full(self.universe)
    }

    fn oplus(&self, a: &Subset, b: &Subset) -> Subset {
        a.intersection(b)
    }

    fn contains(&self, a: &Subset) -> bool {
        a.bound() <= self.universe
    }
}

impl Monoid for PointedUnionMonoid {
    type Elem = Subset;

    fn neutral(&self) -> Subset {
        Subset::singleton(self.bottom)
    }

    fn oplus(&self, a: &Subset, b: &Subset) -> Subset {
        a.union(b)
    }

    fn contains(&self, a: &Subset) -> bool {
        a.bound() <= self.universe && a.contains(self.bottom)
    }
}

/// Where a candidate homomorphism breaks.
#[derive(Debug, Clone, PartialEq)]
pub enum HomViolation<E> {
    /// The neutral element is not sent to the neutral element.
    Neutral,
    /// `map(x ⊕ y) != map(x) ⊕ map(y)`.
    Pair(E, E),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomomorphismCheck<E> {
    pub holds: bool,
    pub witness: Option<HomViolation<E>>,
}

/// Checks `map(neutral) = neutral` and `map(x ⊕ y) = map(x) ⊕ map(y)` over the whole source.
///
/// Pairs are scanned in source enumeration order and the first violation is returned.
pub fn check_homomorphism<M1, M2, F>(
    map: F,
    source: &M1,
    target: &M2,
) -> Result<HomomorphismCheck<M1::Elem>, TropicalError>
where
    M1: Enumerable,
    M2: Monoid,
    F: Fn(&M1::Elem) -> M2::Elem,
{
    let elements = source.elements();
    let images: Vec<M2::Elem> = elements.iter().map(&map).collect();
    for (x, image) in elements.iter().zip(&images) {
        if !target.contains(image) {
            return Err(TropicalError::DomainMismatch(format!("{x:?}")));
        }
    }
    if map(&source.neutral()) != target.neutral() {
        return Ok(HomomorphismCheck { holds: false, witness: Some(HomViolation::Neutral) });
    }
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate().skip(i) {
            let lhs = map(&source.oplus(x, y));
            let rhs = target.oplus(&images[i], &images[j]);
            if lhs != rhs {
                return Ok(HomomorphismCheck {
                    holds: false,
                    witness: Some(HomViolation::Pair(x.clone(), y.clone())),
                });
            }
        }
    }
    Ok(HomomorphismCheck { holds: true, witness: None })
}

/// [`check_homomorphism`] for a table-given map between finite monoids.
pub fn check_finite_homomorphism(
    map: &[usize],
    source: &FiniteMonoid,
    target: &FiniteMonoid,
) -> Result<HomomorphismCheck<usize>, TropicalError> {
    if map.len() != source.len() {
        return Err(TropicalError::DimensionMismatch { expected: source.len(), got: map.len() });
    }
    check_homomorphism(|&x| map[x], source, target)
}

/// `ι` as a homomorphism candidate into `(P(Λ), ∪, ∅)`.
pub fn iota_homomorphism(m: &FiniteMonoid) -> Result<HomomorphismCheck<usize>, TropicalError> {
    check_homomorphism(|&y| m.iota(y), m, &UnionMonoid { universe: m.len() })
}

/// `φ` as a homomorphism candidate into `(P(Λ), ∩, Λ)`.
pub fn phi_homomorphism(m: &FiniteMonoid) -> Result<HomomorphismCheck<usize>, TropicalError> {
    check_homomorphism(|&y| m.phi(y), m, &IntersectionMonoid { universe: m.len() })
}
