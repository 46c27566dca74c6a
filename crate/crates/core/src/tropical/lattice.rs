//! Completeness of finite join-semilattices and homomorphisms out of chains.

use super::{check_homomorphism, FiniteMonoid, HomomorphismCheck, PointedUnionMonoid, TropicalError, UnionMonoid};
use crate::subset::Subset;

/// Above this many elements subset-by-subset join checks give way to the pairwise test.
const EXHAUSTIVE_JOIN_LIMIT: usize = 12;

/// Whether every subset of `elements` with an upper bound inside `elements` has a least one.
///
/// This is join-completeness of `elements ∪ {⊤}`: subsets without an upper bound go to `⊤`.
fn join_complete_with_top(m: &FiniteMonoid, elements: &[usize]) -> bool {
    let k = elements.len();
    if k > EXHAUSTIVE_JOIN_LIMIT {
        return pairwise_joins_are_suprema(m, elements);
    }
    (0u64..1 << k).all(|mask| {
        let uppers: Vec<usize> = elements
            .iter()
            .copied()
            .filter(|&u| (0..k).filter(|i| mask >> i & 1 == 1).all(|i| m.leq(elements[i], u)))
            .collect();
        uppers.is_empty() || uppers.iter().any(|&u| uppers.iter().all(|&v| m.leq(u, v)))
    })
}

fn pairwise_joins_are_suprema(m: &FiniteMonoid, elements: &[usize]) -> bool {
    let has_min = elements.iter().any(|&u| elements.iter().all(|&v| m.leq(u, v)));
    if !has_min && !elements.is_empty() {
        return false;
    }
    elements.iter().all(|&a| {
        elements.iter().all(|&b| {
            let j = m.add(a, b);
            let uppers: Vec<usize> =
                elements.iter().copied().filter(|&u| m.leq(a, u) && m.leq(b, u)).collect();
            uppers.is_empty() || (elements.contains(&j) && uppers.iter().all(|&u| m.leq(j, u)))
        })
    })
}

/// Whether the carrier extended by a fresh top element has all joins.
///
/// Always true for a well-formed finite monoid; computed rather than assumed so the
/// equivalence with [`iota_sections_almost_complete`] can be checked.
pub fn is_almost_complete(m: &FiniteMonoid) -> bool {
    let all: Vec<usize> = (0..m.len()).collect();
    join_complete_with_top(m, &all)
}

/// Whether every strict down-set `ι(y)`, extended by a fresh top, has all joins.
pub fn iota_sections_almost_complete(m: &FiniteMonoid) -> bool {
    (0..m.len()).all(|y| {
        let section: Vec<usize> = m.iota(y).iter().collect();
        join_complete_with_top(m, &section)
    })
}

/// Whether the subposet `image` has no greatest element.
pub fn is_grounded_subposet(m: &FiniteMonoid, image: &Subset) -> bool {
    !image.iter().any(|t| image.iter().all(|x| m.leq(x, t)))
}

/// Output of [`extract_chain_hom`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainExtraction {
    /// Elements of the chain whose image has a supremum inside the target carrier.
    pub domain: Subset,
    /// `theta[a]` is the supremum of `psi[a]`, or `None` when it is the added top.
    pub theta: Vec<Option<usize>>,
    /// `psi[a] ⊆ ι(theta[a]) ∪ {theta[a]}` for every `a` in `domain`.
    pub covering: bool,
    /// `theta` restricted to `domain` preserves the neutral element and addition.
    pub theta_homomorphism: bool,
}

/// Recovers an order-preserving map `θ` from a homomorphism `ψ` of a chain into
/// `({A ⊆ Λ : ⊥ ∈ A}, ∪, {⊥})` by taking suprema in `Λ ∪ {⊤}`.
pub fn extract_chain_hom(
    psi: &[Subset],
    delta: &FiniteMonoid,
    lambda: &FiniteMonoid,
) -> Result<ChainExtraction, TropicalError> {
    if let Some((a, b)) = delta.incomparable_pair() {
        return Err(TropicalError::NotTotallyOrdered(a, b));
    }
    if psi.len() != delta.len() {
        return Err(TropicalError::DimensionMismatch { expected: delta.len(), got: psi.len() });
    }
    let target = PointedUnionMonoid { universe: lambda.len(), bottom: lambda.neutral_index() };
    let check = check_homomorphism(|&a| psi[a].clone(), delta, &target)
        .map_err(|e| TropicalError::NotHomomorphism(e.to_string()))?;
    if let Some(w) = check.witness {
        return Err(TropicalError::NotHomomorphism(format!("{w:?}")));
    }

    let theta: Vec<Option<usize>> = psi.iter().map(|set| lambda.sup(set)).collect();
    let domain: Subset = (0..delta.len()).filter(|&a| theta[a].is_some()).collect();

    let covering = domain.iter().all(|a| {
        let t = theta[a].expect("domain elements have a supremum");
        let mut cover = lambda.iota(t);
        cover.insert(t);
        psi[a].is_subset(&cover)
    });

    let neutral_ok = !domain.contains(delta.neutral_index())
        || theta[delta.neutral_index()] == Some(lambda.neutral_index());
    let additive = domain.iter().all(|a| {
        domain.iter().all(|b| {
            let s = delta.add(a, b);
            match (theta[a], theta[b], theta[s]) {
                (Some(x), Some(y), Some(z)) => lambda.add(x, y) == z,
                _ => false,
            }
        })
    });

    Ok(ChainExtraction { domain, theta, covering, theta_homomorphism: neutral_ok && additive })
}

/// `a ↦ ι(ϑ(a))` as a homomorphism candidate into `(P(Λ), ∪, ∅)`.
pub fn iota_theta_homomorphism(
    theta: &[usize],
    delta: &FiniteMonoid,
    lambda: &FiniteMonoid,
) -> Result<HomomorphismCheck<usize>, TropicalError> {
    if theta.len() != delta.len() {
        return Err(TropicalError::DimensionMismatch { expected: delta.len(), got: theta.len() });
    }
    check_homomorphism(|&a| lambda.iota(theta[a]), delta, &UnionMonoid { universe: lambda.len() })
}
