//! Copies of microsystems, T-closed index sets and the `k_B = 1/N` limit of
//! Gibbs weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::nesting::{NestType, NestingError};
use crate::scalar::Scalar;
use crate::subset::Subset;
use crate::thermo::argext;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DequantifyError {
    #[error("copy numbers start at 1")]
    ZeroCopy,
    #[error("index {index} outside 1..={n}")]
    OutOfRange { index: usize, n: usize },
    #[error("k_B must be positive and finite")]
    InvalidBoltzmann,
    #[error("schedule must be nonempty and strictly increasing with entries >= 1")]
    InvalidSchedule,
    #[error("bad schedule `{0}`; expected pow2:M or list:a,b,c")]
    ScheduleSyntax(String),
    #[error("parts {0} and {1} overlap")]
    NotDisjoint(usize, usize),
    #[error("multiplicities must be positive and match the spectrum")]
    InvalidMultiplicities,
    #[error(transparent)]
    Nesting(#[from] NestingError),
}

/// `(α, n)`: the `n`-th copy of system `α` (0-based `α`, `n >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyIndex {
    pub alpha: usize,
    pub n: u64,
}

impl CopyIndex {
    pub fn new(alpha: usize, n: u64) -> Result<Self, DequantifyError> {
        if n == 0 {
            return Err(DequantifyError::ZeroCopy);
        }
        Ok(CopyIndex { alpha, n })
    }

    /// `T(α, n) = (α, n + 1)`.
    pub fn successor(self) -> Self {
        CopyIndex { alpha: self.alpha, n: self.n + 1 }
    }
}

/// A subset of `[N] × ℕ`: finitely many loose copies plus, per system, an
/// optional upward tail `{(α, m) : m >= start}`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CopySet {
    finite: BTreeSet<CopyIndex>,
    tails: BTreeMap<usize, u64>,
}

impl CopySet {
    pub fn new() -> Self {
        CopySet::default()
    }

    pub fn from_indices<I: IntoIterator<Item = CopyIndex>>(items: I) -> Self {
        let mut s = CopySet { finite: items.into_iter().collect(), tails: BTreeMap::new() };
        s.normalize();
        s
    }

    /// `{(α, m) : m >= start}`.
    pub fn tail(alpha: usize, start: u64) -> Self {
        CopySet { finite: BTreeSet::new(), tails: BTreeMap::from([(alpha, start.max(1))]) }
    }

    fn normalize(&mut self) {
        let tails = &self.tails;
        self.finite.retain(|c| tails.get(&c.alpha).map_or(true, |&start| c.n < start));
    }

    pub fn contains(&self, c: CopyIndex) -> bool {
        self.finite.contains(&c) || self.tails.get(&c.alpha).is_some_and(|&start| c.n >= start)
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tails.is_empty()
    }

    /// A nonempty finite part is never T-closed, so closed sets are exactly the pure tails.
    pub fn is_closed(&self) -> bool {
        self.finite.is_empty()
    }

    pub fn loose(&self) -> &BTreeSet<CopyIndex> {
        &self.finite
    }

    pub fn tails(&self) -> &BTreeMap<usize, u64> {
        &self.tails
    }

    /// Number of members, `None` when infinite.
    pub fn finite_len(&self) -> Option<usize> {
        self.tails.is_empty().then_some(self.finite.len())
    }

    /// Members with copy number at most `bound`.
    pub fn members_up_to(&self, bound: u64) -> BTreeSet<CopyIndex> {
        let mut out: BTreeSet<CopyIndex> = self.finite.iter().copied().filter(|c| c.n <= bound).collect();
        for (&alpha, &start) in &self.tails {
            out.extend((start..=bound).map(|n| CopyIndex { alpha, n }));
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut tails = self.tails.clone();
        for (&alpha, &start) in &other.tails {
            tails.entry(alpha).and_modify(|s| *s = (*s).min(start)).or_insert(start);
        }
        let mut s = CopySet { finite: self.finite.union(&other.finite).copied().collect(), tails };
        s.normalize();
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let tails = self
            .tails
            .iter()
            .filter_map(|(alpha, &a)| other.tails.get(alpha).map(|&b| (*alpha, a.max(b))))
            .collect();
        let finite = self
            .finite
            .iter()
            .filter(|c| other.contains(**c))
            .chain(other.finite.iter().filter(|c| self.contains(**c)))
            .copied()
            .collect();
        let mut s = CopySet { finite, tails };
        s.normalize();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.finite.iter().all(|c| other.contains(*c))
            && self.tails.iter().all(|(alpha, &start)| match other.tails.get(alpha) {
                Some(&s) => (start..s).all(|n| other.finite.contains(&CopyIndex { alpha: *alpha, n })),
                None => false,
            })
    }
}

impl fmt::Debug for CopySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.finite.iter().map(|c| format!("({},{})", c.alpha + 1, c.n)).collect();
        parts.extend(self.tails.iter().map(|(a, s)| format!("({},{}..)", a + 1, s)));
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `T(X) = X ∪ {T(x) : x ∈ X}`.
pub fn t_map(x: &CopySet) -> CopySet {
    let mut finite = x.finite.clone();
    finite.extend(x.finite.iter().map(|c| c.successor()));
    let mut s = CopySet { finite, tails: x.tails.clone() };
    s.normalize();
    s
}

/// Smallest T-closed superset: every member drags its whole upward chain along.
pub fn t_closure(x: &CopySet) -> CopySet {
    let mut tails = x.tails.clone();
    for c in &x.finite {
        tails.entry(c.alpha).and_modify(|s| *s = (*s).min(c.n)).or_insert(c.n);
    }
    CopySet { finite: BTreeSet::new(), tails }
}

fn check_spectrum(f: &[f64]) -> Result<f64, DequantifyError> {
    crate::nesting::validate_spectrum(f)?;
    Ok(f.iter().copied().fold(f64::INFINITY, f64::min))
}

fn check_kb(k_b: f64) -> Result<(), DequantifyError> {
    if k_b > 0.0 && k_b.is_finite() {
        Ok(())
    } else {
        Err(DequantifyError::InvalidBoltzmann)
    }
}

/// `e^{-f_α/k_B} / Σ_β e^{-f_β/k_B}`, shifted by the minimum.
pub fn gibbs_weights(f: &[f64], k_b: f64) -> Result<Vec<f64>, DequantifyError> {
    gibbs_with_multiplicities(f, &vec![1; f.len()], k_b)
}

/// Weights per base index when system `α` appears `m_α` times.
pub fn gibbs_with_multiplicities(f: &[f64], multiplicities: &[u64], k_b: f64) -> Result<Vec<f64>, DequantifyError> {
    let kappa0 = check_spectrum(f)?;
    check_kb(k_b)?;
    if multiplicities.len() != f.len() || multiplicities.contains(&0) {
        return Err(DequantifyError::InvalidMultiplicities);
    }
    let factors: Vec<f64> = f.iter().map(|v| (-(v - kappa0) / k_b).exp()).collect();
    Ok(multiplicity_weights(&factors, multiplicities))
}

/// `m_α x_α / Σ_β m_β x_β` for Boltzmann factors `x`; exact for rational factors.
pub fn multiplicity_weights<T: Scalar>(factors: &[T], multiplicities: &[u64]) -> Vec<T> {
    let scaled: Vec<T> = factors
        .iter()
        .zip(multiplicities)
        .map(|(x, &m)| x.clone() * T::from_i64(m as i64))
        .collect();
    let total = scaled.iter().fold(T::zero(), |acc, v| acc + v.clone());
    scaled.into_iter().map(|v| v / total.clone()).collect()
}

/// `N e^{-f_α/k_B} / ((N - 1) e^{-f_α/k_B} + Σ_β e^{-f_β/k_B})`: system `α`
/// carried by `N` copies, everything else once.
pub fn gibbs_with_copies_at(f: &[f64], alpha: usize, copies: u64, k_b: f64) -> Result<f64, DequantifyError> {
    let kappa0 = check_spectrum(f)?;
    check_kb(k_b)?;
    if alpha >= f.len() {
        return Err(DequantifyError::OutOfRange { index: alpha + 1, n: f.len() });
    }
    if copies == 0 {
        return Err(DequantifyError::ZeroCopy);
    }
    let x = |v: f64| (-(v - kappa0) / k_b).exp();
    let xa = x(f[alpha]);
    let n = copies as f64;
    let rest: f64 = f.iter().map(|&v| x(v)).sum();
    Ok(n * xa / ((n - 1.0) * xa + rest))
}

/// The copy weight under the prescription `k_B = 1/N`.
pub fn gibbs_with_copies(f: &[f64], alpha: usize, copies: u64) -> Result<f64, DequantifyError> {
    if copies == 0 {
        return Err(DequantifyError::ZeroCopy);
    }
    gibbs_with_copies_at(f, alpha, copies, 1.0 / copies as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KbRule {
    /// `k_B = 1/N`.
    Reciprocal,
    /// Any other fixed value; evaluated but not asserted.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopySchedule {
    copies: Vec<u64>,
    pub rule: KbRule,
}

impl CopySchedule {
    pub fn new(copies: Vec<u64>, rule: KbRule) -> Result<Self, DequantifyError> {
        if copies.is_empty() || copies[0] == 0 || copies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DequantifyError::InvalidSchedule);
        }
        Ok(CopySchedule { copies, rule })
    }

    /// `2^1, .., 2^m`.
    pub fn pow2(m: u32) -> Result<Self, DequantifyError> {
        if !(1..=62).contains(&m) {
            return Err(DequantifyError::InvalidSchedule);
        }
        Self::new((1..=m).map(|j| 1u64 << j).collect(), KbRule::Reciprocal)
    }

    /// `pow2:M` or `list:a,b,c`.
    pub fn parse(text: &str) -> Result<Self, DequantifyError> {
        let bad = || DequantifyError::ScheduleSyntax(text.to_string());
        match text.split_once(':') {
            Some(("pow2", m)) => Self::pow2(m.trim().parse().map_err(|_| bad())?),
            Some(("list", items)) => Self::new(
                items.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
                KbRule::Reciprocal,
            ),
            _ => Err(bad()),
        }
    }

    pub fn copies(&self) -> &[u64] {
        &self.copies
    }

    pub fn k_b(&self, copies: u64) -> f64 {
        match self.rule {
            KbRule::Reciprocal => 1.0 / copies as f64,
            KbRule::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub copies: u64,
    pub k_b: f64,
    pub weight: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DequantifiedReport {
    pub dominant: bool,
    pub lambda0: usize,
    /// 1 on the minimisers, 0 elsewhere.
    pub limit: f64,
    pub table: Vec<ConvergenceRow>,
    /// Smallest `C` with `gap <= C/N` at every row.
    pub rate_constant: f64,
    /// Least-squares slope of `ln gap` against `ln N` over rows with a positive gap.
    pub log_slope: Option<f64>,
    /// `None` when the schedule is not `k_B = 1/N`.
    pub converged: Option<bool>,
}

/// Tolerance on the final gap: `(λ0 - 1)/N` plus rounding for minimisers,
/// a flat `1e-30` for the exponentially decaying rest.
pub fn final_gap_bound(dominant: bool, lambda0: usize, copies: u64) -> f64 {
    if dominant {
        (lambda0 as f64 - 1.0) / copies as f64 + 1e-12
    } else {
        1e-30
    }
}

pub fn dequantified_weight(
    f: &[f64],
    alpha: usize,
    schedule: &CopySchedule,
    tie_tol: f64,
) -> Result<DequantifiedReport, DequantifyError> {
    check_spectrum(f)?;
    if alpha >= f.len() {
        return Err(DequantifyError::OutOfRange { index: alpha + 1, n: f.len() });
    }
    let (_, m0) = argext(f, NestType::B, tie_tol)?;
    let dominant = m0.contains(alpha);
    let limit = if dominant { 1.0 } else { 0.0 };
    let table = schedule
        .copies()
        .par_iter()
        .map(|&n| {
            let k_b = schedule.k_b(n);
            let weight = gibbs_with_copies_at(f, alpha, n, k_b)?;
            Ok(ConvergenceRow { copies: n, k_b, weight, gap: (weight - limit).abs() })
        })
        .collect::<Result<Vec<_>, DequantifyError>>()?;
    let rate_constant = table.iter().map(|r| r.gap * r.copies as f64).fold(0.0, f64::max);
    let points: Vec<(f64, f64)> =
        table.iter().filter(|r| r.gap > 0.0).map(|r| ((r.copies as f64).ln(), r.gap.ln())).collect();
    let log_slope = (points.len() >= 2).then(|| {
        let n = points.len() as f64;
        let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
        num / den
    });
    let converged = match schedule.rule {
        KbRule::Fixed(_) => None,
        KbRule::Reciprocal => {
            let last = table.last().expect("schedule is nonempty");
            let tail = &table[table.len().saturating_sub(3)..];
            let monotone = tail.windows(2).all(|w| w[1].gap <= w[0].gap);
            Some(monotone && last.gap <= final_gap_bound(dominant, m0.len(), last.copies))
        }
    };
    Ok(DequantifiedReport { dominant, lambda0: m0.len(), limit, table, rate_constant, log_slope, converged })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PossibilityReport {
    pub lambda0: usize,
    /// `w0(X_n)` per part.
    pub parts: Vec<bool>,
    pub union: bool,
    /// `w0(∪ X_n) = max_n w0(X_n)`.
    pub tropical_additive: bool,
    /// `w0(∪ X_n) = Σ_n w0(X_n)`.
    pub real_additive: bool,
    /// Tropical additivity holds, and real additivity fails exactly when the
    /// partition meets the minimisers in two or more parts.
    pub consistent: bool,
}

/// `w0(X) = 1` iff `X` meets the minimisers.
pub fn possibility_check(f: &[f64], partition: &[Subset], tie_tol: f64) -> Result<PossibilityReport, DequantifyError> {
    let n = f.len();
    for (i, part) in partition.iter().enumerate() {
        if let Some(bad) = part.iter().find(|&a| a >= n) {
            return Err(DequantifyError::OutOfRange { index: bad + 1, n });
        }
        if let Some(j) = partition[..i].iter().position(|p| !p.is_disjoint(part)) {
            return Err(DequantifyError::NotDisjoint(j + 1, i + 1));
        }
    }
    let (_, m0) = argext(f, NestType::B, tie_tol)?;
    let w0 = |x: &Subset| !x.is_disjoint(&m0);
    let parts: Vec<bool> = partition.iter().map(w0).collect();
    let union = w0(&partition.iter().fold(Subset::empty(), |acc, p| acc.union(p)));
    let hits = parts.iter().filter(|&&b| b).count();
    let tropical_additive = union == parts.iter().any(|&b| b);
    let real_additive = hits == usize::from(union);
    let consistent = tropical_additive && (real_additive == (hits <= 1));
    Ok(PossibilityReport { lambda0: m0.len(), parts, union, tropical_additive, real_additive, consistent })
}
