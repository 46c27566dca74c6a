use super::{FiniteMonoid, TropicalError};
use crate::extended::{Extended, ExtendedReal};
use crate::subset::Subset;

/// An element of any supported carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Index into a finite table.
    Index(usize),
    Real(ExtendedReal),
    Nat(u64),
    Set(Subset),
}

/// Built-in infinite (or parametric) carriers.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolicCarrier {
    /// `(ℝ ∪ {-inf}, max, -inf)`.
    MaxPlus,
    /// `(ℝ ∪ {+inf}, min, +inf)`.
    MinPlus,
    /// `(ℕ, max, 0)`.
    NatMax,
    /// `(P([n]), ∪, ∅)`.
    PowersetUnion(usize),
    /// `(P([n]), ∩, [n])`.
    PowersetIntersection(usize),
    /// Finite subsets of ℕ under union.
    FiniteSubsetsUnion,
    /// `(ℝ ∪ {-inf}) \ {0}` under max: grounded but not almost complete.
    PuncturedMaxPlus,
    /// A carrier known only by name; no facts are registered.
    Declared(String),
}

/// Facts about a carrier that cannot be found by scanning it. `None` means unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFacts {
    pub erasing: Option<Option<Element>>,
    pub totally_ordered: Option<bool>,
    pub almost_complete: Option<bool>,
}

impl SymbolicCarrier {
    pub fn facts(&self) -> StructuralFacts {
        use SymbolicCarrier::*;
        let known = |erasing: Option<Element>, total: bool, complete: bool| StructuralFacts {
            erasing: Some(erasing),
            totally_ordered: Some(total),
            almost_complete: Some(complete),
        };
        match self {
            MaxPlus | MinPlus | NatMax => known(None, true, true),
            PowersetUnion(n) => known(Some(Element::Set(Subset::full(*n))), *n <= 1, true),
            PowersetIntersection(n) => known(Some(Element::Set(Subset::empty())), *n <= 1, true),
            FiniteSubsetsUnion => known(None, false, true),
            PuncturedMaxPlus => known(None, true, false),
            Declared(_) => StructuralFacts { erasing: None, totally_ordered: None, almost_complete: None },
        }
    }

    pub fn neutral(&self) -> Result<Element, TropicalError> {
        use SymbolicCarrier::*;
        Ok(match self {
            MaxPlus | PuncturedMaxPlus => Element::Real(Extended::NegInf),
            MinPlus => Element::Real(Extended::PosInf),
            NatMax => Element::Nat(0),
            PowersetUnion(_) | FiniteSubsetsUnion => Element::Set(Subset::empty()),
            PowersetIntersection(n) => Element::Set(Subset::full(*n)),
            Declared(name) => return Err(TropicalError::Unsupported(format!("carrier `{name}` has no registered neutral"))),
        })
    }

    pub fn contains(&self, e: &Element) -> bool {
        use SymbolicCarrier::*;
        match (self, e) {
            (MaxPlus, Element::Real(x)) => *x != Extended::PosInf,
            (MinPlus, Element::Real(x)) => *x != Extended::NegInf,
            (PuncturedMaxPlus, Element::Real(x)) => *x != Extended::PosInf && *x != Extended::Finite(0.0),
            (NatMax, Element::Nat(_)) => true,
            (PowersetUnion(n) | PowersetIntersection(n), Element::Set(s)) => s.bound() <= *n,
            (FiniteSubsetsUnion, Element::Set(_)) => true,
            _ => false,
        }
    }

    pub fn oplus(&self, a: &Element, b: &Element) -> Result<Element, TropicalError> {
        use SymbolicCarrier::*;
        if !self.contains(a) || !self.contains(b) {
            return Err(TropicalError::ElementKind);
        }
        Ok(match (self, a, b) {
            (MaxPlus | PuncturedMaxPlus, Element::Real(x), Element::Real(y)) => {
                Element::Real(if y > x { y.clone() } else { x.clone() })
            }
            (MinPlus, Element::Real(x), Element::Real(y)) => Element::Real(if y < x { y.clone() } else { x.clone() }),
            (NatMax, Element::Nat(x), Element::Nat(y)) => Element::Nat(*x.max(y)),
            (PowersetUnion(_) | FiniteSubsetsUnion, Element::Set(x), Element::Set(y)) => Element::Set(x.union(y)),
            (PowersetIntersection(_), Element::Set(x), Element::Set(y)) => Element::Set(x.intersection(y)),
            _ => return Err(TropicalError::ElementKind),
        })
    }

    /// `a ⪯ b`, i.e. `a ⊕ b = b`, with real ties decided up to `tol`.
    pub fn leq(&self, a: &Element, b: &Element, tol: f64) -> Result<bool, TropicalError> {
        let sum = self.oplus(a, b)?;
        Ok(match (&sum, b) {
            (Element::Real(s), Element::Real(y)) => s.ties(y, tol),
            _ => sum == *b,
        })
    }
}

/// A carrier with its addition: either an explicit table or a built-in.
#[derive(Debug, Clone, PartialEq)]
pub enum TropicalMonoid {
    Finite(FiniteMonoid),
    Symbolic(SymbolicCarrier),
}

/// The order `x ⪯ y ⇔ x ⊕ y = y`.
#[derive(Debug, Clone, PartialEq)]
pub enum InducedOrder {
    /// All related pairs of a finite carrier.
    Pairs { size: usize, pairs: Vec<(usize, usize)> },
    /// Comparison through the carrier's addition.
    Rule { carrier: SymbolicCarrier, tolerance: f64 },
}

impl InducedOrder {
    pub fn leq(&self, a: &Element, b: &Element) -> Result<bool, TropicalError> {
        match (self, a, b) {
            (InducedOrder::Pairs { size, pairs }, Element::Index(x), Element::Index(y)) => {
                if x >= size || y >= size {
                    return Err(TropicalError::ElementKind);
                }
                Ok(pairs.binary_search(&(*x, *y)).is_ok())
            }
            (InducedOrder::Pairs { .. }, _, _) => Err(TropicalError::ElementKind),
            (InducedOrder::Rule { carrier, tolerance }, a, b) => carrier.leq(a, b, *tolerance),
        }
    }
}

impl TropicalMonoid {
    pub fn neutral(&self) -> Result<Element, TropicalError> {
        match self {
            TropicalMonoid::Finite(m) => Ok(Element::Index(m.neutral_index())),
            TropicalMonoid::Symbolic(c) => c.neutral(),
        }
    }

    pub fn oplus(&self, a: &Element, b: &Element) -> Result<Element, TropicalError> {
        match (self, a, b) {
            (TropicalMonoid::Finite(m), Element::Index(x), Element::Index(y)) if *x < m.len() && *y < m.len() => {
                Ok(Element::Index(m.add(*x, *y)))
            }
            (TropicalMonoid::Finite(_), _, _) => Err(TropicalError::ElementKind),
            (TropicalMonoid::Symbolic(c), a, b) => c.oplus(a, b),
        }
    }

    /// Finite carriers are scanned; real ties in symbolic carriers use `tolerance`.
    pub fn induced_order(&self, tolerance: f64) -> Result<InducedOrder, TropicalError> {
        match self {
            TropicalMonoid::Finite(m) => Ok(InducedOrder::Pairs { size: m.len(), pairs: m.induced_order()? }),
            TropicalMonoid::Symbolic(c) => Ok(InducedOrder::Rule { carrier: c.clone(), tolerance }),
        }
    }

    pub fn erasing_element(&self) -> Result<Option<Element>, TropicalError> {
        match self {
            TropicalMonoid::Finite(m) => Ok(m.erasing_element().map(Element::Index)),
            TropicalMonoid::Symbolic(c) => c
                .facts()
                .erasing
                .ok_or_else(|| TropicalError::Unsupported(format!("no registered erasing element for {c:?}"))),
        }
    }

    pub fn is_grounded(&self) -> Result<bool, TropicalError> {
        Ok(self.erasing_element()?.is_none())
    }

    pub fn is_totally_ordered(&self) -> Result<bool, TropicalError> {
        match self {
            TropicalMonoid::Finite(m) => Ok(m.is_total()),
            TropicalMonoid::Symbolic(c) => c
                .facts()
                .totally_ordered
                .ok_or_else(|| TropicalError::Unsupported(format!("totality of {c:?} is not registered"))),
        }
    }

    pub fn is_almost_complete(&self) -> Result<bool, TropicalError> {
        match self {
            TropicalMonoid::Finite(m) => Ok(super::is_almost_complete(m)),
            TropicalMonoid::Symbolic(c) => c
                .facts()
                .almost_complete
                .ok_or_else(|| TropicalError::Unsupported(format!("completeness of {c:?} is not registered"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Element {
        Element::Real(Extended::Finite(x))
    }

    #[test]
    fn max_plus_order() {
        let order = TropicalMonoid::Symbolic(SymbolicCarrier::MaxPlus).induced_order(1e-12).unwrap();
        assert!(order.leq(&real(3.0), &real(5.0)).unwrap());
        assert!(!order.leq(&real(5.0), &real(3.0)).unwrap());
        assert!(order.leq(&Element::Real(Extended::NegInf), &real(-1e300)).unwrap());
    }

    #[test]
    fn min_plus_order_is_reversed() {
        let order = TropicalMonoid::Symbolic(SymbolicCarrier::MinPlus).induced_order(0.0).unwrap();
        assert!(order.leq(&real(5.0), &real(3.0)).unwrap());
        assert!(order.leq(&Element::Real(Extended::PosInf), &real(3.0)).unwrap());
    }

    #[test]
    fn erasing_elements_from_registry() {
        let sym = |c| TropicalMonoid::Symbolic(c);
        assert_eq!(sym(SymbolicCarrier::MaxPlus).erasing_element(), Ok(None));
        assert_eq!(
            sym(SymbolicCarrier::PowersetUnion(3)).erasing_element(),
            Ok(Some(Element::Set(Subset::full(3))))
        );
        assert!(matches!(
            sym(SymbolicCarrier::Declared("mystery".into())).erasing_element(),
            Err(TropicalError::Unsupported(_))
        ));
        assert_eq!(sym(SymbolicCarrier::FiniteSubsetsUnion).is_grounded(), Ok(true));
        assert_eq!(sym(SymbolicCarrier::PuncturedMaxPlus).is_almost_complete(), Ok(false));
    }

    #[test]
    fn finite_chain_erasing_element() {
        let m = TropicalMonoid::Finite(FiniteMonoid::chain(&["-inf", "0", "1"]));
        assert_eq!(m.erasing_element(), Ok(Some(Element::Index(2))));
        assert_eq!(m.is_grounded(), Ok(false));
    }

    #[test]
    fn membership_is_enforced() {
        let c = SymbolicCarrier::PuncturedMaxPlus;
        assert_eq!(c.oplus(&real(0.0), &real(1.0)), Err(TropicalError::ElementKind));
        assert_eq!(SymbolicCarrier::MaxPlus.oplus(&real(1.0), &Element::Nat(2)), Err(TropicalError::ElementKind));
    }
}
