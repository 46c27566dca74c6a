//! Filters, ideals and ultrafilters on the power set of a finite ground set.
//!
//! Ground elements are indices `0..n` internally and labels `1..=n` in every
//! external form (errors, JSON).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset::Subset;

/// Above this ground size, classification relies on the principal-generator shortcut.
pub const DEFINITIONAL_LIMIT: usize = 20;

/// Families with at most this many members get the pairwise directedness test.
const PAIRWISE_LIMIT: usize = 512;

/// Largest number of free points for which closures are materialised.
pub const MATERIALIZE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("family has no members")]
    EmptyFamily,
    #[error("ground set must have at least one point")]
    InvalidGround,
    #[error("member {0:?} is not contained in the ground set")]
    OutOfGround(Vec<usize>),
    #[error("not a base: no member lies between {a:?} and {b:?}")]
    NotABase { a: Vec<usize>, b: Vec<usize> },
    #[error("not a proper filter")]
    NotAProperFilter,
    #[error("closure over {0} free points is too large to materialise")]
    TooLarge(usize),
    #[error("malformed family JSON: {0}")]
    Json(String),
}

/// A deduplicated family of subsets of `{0, .., ground-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetFamily {
    ground: usize,
    members: BTreeSet<Subset>,
}

impl SubsetFamily {
    pub fn new(ground: usize, members: impl IntoIterator<Item = Subset>) -> Result<Self, FilterError> {
        if ground == 0 {
            return Err(FilterError::InvalidGround);
        }
        let members: BTreeSet<Subset> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| m.bound() > ground) {
            return Err(FilterError::OutOfGround(bad.to_labels()));
        }
        Ok(SubsetFamily { ground, members })
    }

    /// Builds from 1-based label lists.
    pub fn from_labels(ground: usize, members: &[Vec<usize>]) -> Result<Self, FilterError> {
        let subsets = members
            .iter()
            .map(|m| Subset::from_labels(m).ok_or_else(|| FilterError::OutOfGround(m.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ground, subsets)
    }

    /// Every subset of the ground set.
    pub fn power_set(ground: usize) -> Result<Self, FilterError> {
        if ground > MATERIALIZE_LIMIT {
            return Err(FilterError::TooLarge(ground));
        }
        Self::new(ground, crate::subset::power_set(ground))
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &BTreeSet<Subset> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.members.contains(s)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.ground)
    }

    /// Intersection of all members (the full set for an empty family).
    pub fn meet(&self) -> Subset {
        self.members.iter().fold(self.full(), |acc, m| acc.intersection(m))
    }

    /// Union of all members.
    pub fn join(&self) -> Subset {
        self.members.iter().fold(Subset::empty(), |acc, m| acc.union(m))
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson { ground: self.ground, members: self.members.iter().map(Subset::to_labels).collect() }
    }

    pub fn from_json(json: &FamilyJson) -> Result<Self, FilterError> {
        Self::from_labels(json.ground, &json.members)
    }
}

/// `{"ground": n, "members": [[labels...], ...]}` with members in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub ground: usize,
    pub members: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FamilyKind {
    Filter,
    Ideal,
    Ultrafilter,
    Neither,
}

/// Result of [`classify`].
///
/// A family that is both a filter and an ideal (the full power set) is reported as a filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterCertificate {
    pub kind: FamilyKind,
    /// Filters: `∅` is not a member. Ideals: the full set is not a member.
    pub proper: bool,
    /// For (ultra)filters, the intersection of all members.
    pub principal_generator: Option<Subset>,
}

/// Which closure a family is checked or extended under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Closure {
    Filter,
    Ideal,
}

pub fn classify(family: &SubsetFamily) -> Result<FilterCertificate, FilterError> {
    if family.is_empty() {
        return Err(FilterError::EmptyFamily);
    }
    let n = family.ground;
    if is_filter(family) {
        let zeta = family.meet();
        let proper = !family.contains(&Subset::empty());
        let kind = if proper && zeta.len() == 1 { FamilyKind::Ultrafilter } else { FamilyKind::Filter };
        return Ok(FilterCertificate { kind, proper, principal_generator: Some(zeta) });
    }
    if is_ideal(family) {
        return Ok(FilterCertificate {
            kind: FamilyKind::Ideal,
            proper: !family.contains(&Subset::full(n)),
            principal_generator: None,
        });
    }
    Ok(FilterCertificate { kind: FamilyKind::Neither, proper: false, principal_generator: None })
}

/// Upward closed and downward directed.
pub fn is_filter(family: &SubsetFamily) -> bool {
    closed_and_directed(family, Closure::Filter)
}

/// Downward closed and upward directed.
pub fn is_ideal(family: &SubsetFamily) -> bool {
    closed_and_directed(family, Closure::Ideal)
}

fn closed_and_directed(family: &SubsetFamily, closure: Closure) -> bool {
    if family.is_empty() {
        return false;
    }
    let n = family.ground;
    let extreme = match closure {
        Closure::Filter => family.meet(),
        Closure::Ideal => family.join(),
    };
    if n > DEFINITIONAL_LIMIT {
        // Every member already contains the meet (resp. lies in the join), so the
        // family is the whole principal up-set (down-set) exactly when the counts agree.
        let free = match closure {
            Closure::Filter => n - extreme.len(),
            Closure::Ideal => extreme.len(),
        };
        return free < 128 && family.len() as u128 == 1u128 << free;
    }
    let closed = family.members.iter().all(|m| {
        (0..n).all(|i| {
            let mut step = m.clone();
            match closure {
                Closure::Filter if !m.contains(i) => step.insert(i),
                Closure::Ideal if m.contains(i) => step.remove(i),
                _ => return true,
            }
            family.contains(&step)
        })
    });
    if !closed {
        return false;
    }
    if family.len() <= PAIRWISE_LIMIT {
        directed(family, closure).is_none()
    } else {
        // For a closed family, directedness is equivalent to containing the meet (join).
        family.contains(&extreme)
    }
}

/// First pair with no member below both (filter) or above both (ideal).
fn directed(family: &SubsetFamily, closure: Closure) -> Option<(Subset, Subset)> {
    let members: Vec<&Subset> = family.members.iter().collect();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i..] {
            let witness = members.iter().any(|c| match closure {
                Closure::Filter => c.is_subset(&a.intersection(b)),
                Closure::Ideal => a.union(b).is_subset(c),
            });
            if !witness {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

/// Complements every member; swaps filters and ideals.
pub fn dual(family: &SubsetFamily) -> SubsetFamily {
    let n = family.ground;
    SubsetFamily { ground: n, members: family.members.iter().map(|m| m.complement(n)).collect() }
}

/// `{y : x ⊆ y}`.
pub fn principal_filter(ground: usize, x: &Subset) -> Result<SubsetFamily, FilterError> {
    let free: Vec<usize> = (0..ground).filter(|&i| !x.contains(i)).collect();
    let members = expand(x, &free, true)?;
    SubsetFamily::new(ground, members)
}

/// `{x : x ⊆ y}`.
pub fn principal_ideal(ground: usize, y: &Subset) -> Result<SubsetFamily, FilterError> {
    let free: Vec<usize> = y.iter().collect();
    let members = expand(y, &free, false)?;
    SubsetFamily::new(ground, members)
}

fn expand(base: &Subset, free: &[usize], add: bool) -> Result<Vec<Subset>, FilterError> {
    if free.len() > MATERIALIZE_LIMIT {
        return Err(FilterError::TooLarge(free.len()));
    }
    Ok((0u64..1 << free.len())
        .map(|mask| {
            let mut s = base.clone();
            for (k, &i) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    if add {
                        s.insert(i);
                    } else {
                        s.remove(i);
                    }
                }
            }
            s
        })
        .collect())
}

/// Smallest filter (ideal) containing `base`, after checking `base` is directed.
pub fn extend_base(base: &SubsetFamily, kind: Closure) -> Result<SubsetFamily, FilterError> {
    if base.is_empty() {
        return Err(FilterError::EmptyFamily);
    }
    if let Some((a, b)) = directed(base, kind) {
        return Err(FilterError::NotABase { a: a.to_labels(), b: b.to_labels() });
    }
    let n = base.ground;
    let mut members = BTreeSet::new();
    for m in base.members() {
        let generated = match kind {
            Closure::Filter => principal_filter(n, m)?,
            Closure::Ideal => principal_ideal(n, m)?,
        };
        members.extend(generated.members);
    }
    Ok(SubsetFamily { ground: n, members })
}

/// Two-valued (or undecided) measure attached to a proper filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Measure {
    Zero,
    One,
    Undefined,
}

impl Measure {
    pub fn value(self) -> Option<u8> {
        match self {
            Measure::Zero => Some(0),
            Measure::One => Some(1),
            Measure::Undefined => None,
        }
    }
}

/// 1 on members, 0 on complements of members, undefined otherwise.
pub fn filter_measure(filter: &SubsetFamily, x: &Subset) -> Result<Measure, FilterError> {
    let cert = classify(filter)?;
    let is_filter = matches!(cert.kind, FamilyKind::Filter | FamilyKind::Ultrafilter);
    if !is_filter || !cert.proper {
        return Err(FilterError::NotAProperFilter);
    }
    Ok(measure_unchecked(filter, x))
}

/// [`filter_measure`] without re-classifying; `filter` must be a proper filter.
pub fn measure_unchecked(filter: &SubsetFamily, x: &Subset) -> Measure {
    if filter.contains(x) {
        Measure::One
    } else if filter.contains(&x.complement(filter.ground)) {
        Measure::Zero
    } else {
        Measure::Undefined
    }
}
