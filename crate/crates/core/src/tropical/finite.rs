use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Enumerable, Monoid, TropicalError};
use crate::subset::Subset;

/// How hard [`FiniteMonoid::new`] works to verify the monoid axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckPolicy {
    /// Carriers up to this size are checked exhaustively (associativity is cubic).
    pub exhaustive_limit: usize,
    /// Number of random triples checked above the limit.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckPolicy {
    fn default() -> Self {
        CheckPolicy { exhaustive_limit: 8, samples: 20_000, seed: 0 }
    }
}

/// An idempotent commutative monoid given by its addition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    neutral: usize,
}

impl FiniteMonoid {
    /// Validates the table with the default [`CheckPolicy`].
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>, neutral: usize) -> Result<Self, TropicalError> {
        Self::with_policy(labels, table, neutral, CheckPolicy::default())
    }

    pub fn with_policy(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        neutral: usize,
        policy: CheckPolicy,
    ) -> Result<Self, TropicalError> {
        let m = Self::from_raw(labels, table, neutral);
        m.check_shape()?;
        m.check_idempotent()?;
        m.check_commutative()?;
        m.check_neutral()?;
        m.check_associative(policy)?;
        Ok(m)
    }

    /// Builds without any validation; operations assume a well-formed table.
    pub fn from_raw(labels: Vec<String>, table: Vec<Vec<usize>>, neutral: usize) -> Self {
        FiniteMonoid { labels, table, neutral }
    }

    /// The chain `0 < 1 < .. < n-1` with `max`; element 0 is neutral.
    pub fn chain(labels: &[&str]) -> Self {
        let n = labels.len();
        let table = (0..n).map(|i| (0..n).map(|j| i.max(j)).collect()).collect();
        Self::from_raw(labels.iter().map(|s| s.to_string()).collect(), table, 0)
    }

    /// `(P([n]), ∪, ∅)` with element index equal to the subset mask.
    pub fn powerset_union(n: usize) -> Self {
        Self::powerset(n, |a, b| a | b, 0)
    }

    /// `(P([n]), ∩, [n])` with element index equal to the subset mask.
    pub fn powerset_intersection(n: usize) -> Self {
        Self::powerset(n, |a, b| a & b, (1 << n) - 1)
    }

    fn powerset(n: usize, op: fn(usize, usize) -> usize, neutral: usize) -> Self {
        assert!(n <= 12, "power-set carriers are limited to 12 points");
        let size = 1usize << n;
        let labels = (0..size).map(|m| format!("{:?}", Subset::from_mask(m as u64))).collect();
        let table = (0..size).map(|a| (0..size).map(|b| op(a, b)).collect()).collect();
        Self::from_raw(labels, table, neutral)
    }

    /// The join-semilattice of a partial order given by `leq`, which must have a least element.
    pub fn from_order(labels: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self, TropicalError> {
        let n = labels.len();
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq(b, x)))
            .ok_or_else(|| TropicalError::InvalidTable("order has no least element".into()))?;
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                table[a][b] = least_upper_bound(n, &leq, a, b).ok_or_else(|| {
                    TropicalError::InvalidTable(format!("no join for ({}, {})", labels[a], labels[b]))
                })?;
            }
        }
        Self::new(labels, table, bottom)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neutral_index(&self) -> usize {
        self.neutral
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// `a ⪯ b` in the induced order, i.e. `a ⊕ b = b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.table[a][b] == b
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All `(x, y)` with `x ⪯ y`, after checking the relation is a partial order.
    pub fn induced_order(&self) -> Result<Vec<(usize, usize)>, TropicalError> {
        self.check_idempotent()?;
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(TropicalError::NotPartialOrder(format!(
                        "{} and {} precede each other",
                        self.labels[a], self.labels[b]
                    )));
                }
                for c in 0..n {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        return Err(TropicalError::NotPartialOrder(format!(
                            "{} ⪯ {} ⪯ {} but not {} ⪯ {}",
                            self.labels[a], self.labels[b], self.labels[c], self.labels[a], self.labels[c]
                        )));
                    }
                }
            }
        }
        Ok((0..n).flat_map(|a| (0..n).filter(move |&b| self.leq(a, b)).map(move |b| (a, b))).collect())
    }

    /// First incomparable pair, if any.
    pub fn incomparable_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .find(|&(a, b)| !self.leq(a, b) && !self.leq(b, a))
    }

    pub fn is_total(&self) -> bool {
        self.incomparable_pair().is_none()
    }

    /// The element absorbing every other under addition.
    pub fn erasing_element(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|a| self.add(a, t) == t))
    }

    /// No erasing element.
    pub fn is_grounded(&self) -> bool {
        self.erasing_element().is_none()
    }

    /// Strict down-set `{x : x ≺ y}`.
    pub fn iota(&self, y: usize) -> Subset {
        (0..self.len()).filter(|&x| self.lt(x, y)).collect()
    }

    /// Up-set `{x : y ⪯ x}`, the principal filter of `y`.
    pub fn phi(&self, y: usize) -> Subset {
        (0..self.len()).filter(|&x| self.leq(y, x)).collect()
    }

    /// Down-set `{x : x ⪯ y}`, the principal ideal of `y`.
    pub fn down_set(&self, y: usize) -> Subset {
        (0..self.len()).filter(|&x| self.leq(x, y)).collect()
    }

    /// Least upper bound of `set` in the carrier; `None` if no upper bound exists.
    ///
    /// The empty set has the neutral element as supremum.
    pub fn sup(&self, set: &Subset) -> Option<usize> {
        let n = self.len();
        let uppers: Vec<usize> = (0..n).filter(|&u| set.iter().all(|x| self.leq(x, u))).collect();
        uppers.iter().copied().find(|&u| uppers.iter().all(|&v| self.leq(u, v)))
    }

    fn check_shape(&self) -> Result<(), TropicalError> {
        let n = self.len();
        if n == 0 {
            return Err(TropicalError::InvalidTable("empty carrier".into()));
        }
        if self.neutral >= n {
            return Err(TropicalError::InvalidTable(format!("neutral index {} out of range", self.neutral)));
        }
        if self.table.len() != n || self.table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(TropicalError::InvalidTable(format!("table must be {n}x{n} with entries below {n}")));
        }
        Ok(())
    }

    fn check_idempotent(&self) -> Result<(), TropicalError> {
        match (0..self.len()).find(|&a| self.add(a, a) != a) {
            Some(a) => Err(TropicalError::NotIdempotent(a)),
            None => Ok(()),
        }
    }

    fn check_commutative(&self) -> Result<(), TropicalError> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.add(a, b) != self.add(b, a) {
                    return Err(TropicalError::NotCommutative(a, b));
                }
            }
        }
        Ok(())
    }

    fn check_neutral(&self) -> Result<(), TropicalError> {
        match (0..self.len()).find(|&a| self.add(self.neutral, a) != a) {
            Some(a) => Err(TropicalError::NeutralViolation(a)),
            None => Ok(()),
        }
    }

    fn check_associative(&self, policy: CheckPolicy) -> Result<(), TropicalError> {
        let n = self.len();
        let assoc = |a: usize, b: usize, c: usize| self.add(self.add(a, b), c) == self.add(a, self.add(b, c));
        if n <= policy.exhaustive_limit {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(TropicalError::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            for _ in 0..policy.samples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(TropicalError::NotAssociative(a, b, c));
                }
            }
        }
        Ok(())
    }
}

fn least_upper_bound(n: usize, leq: &impl Fn(usize, usize) -> bool, a: usize, b: usize) -> Option<usize> {
    let uppers: Vec<usize> = (0..n).filter(|&u| leq(a, u) && leq(b, u)).collect();
    uppers.iter().copied().find(|&u| uppers.iter().all(|&v| leq(u, v)))
}

impl Monoid for FiniteMonoid {
    type Elem = usize;

    fn neutral(&self) -> usize {
        self.neutral
    }

    fn oplus(&self, a: &usize, b: &usize) -> usize {
        self.add(*a, *b)
    }

    fn contains(&self, a: &usize) -> bool {
        *a < self.len()
    }
}

impl Enumerable for FiniteMonoid {
    fn elements(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

/// Every join-semilattice on `n` labelled elements whose least element is element 0.
///
/// Distinct results are distinct orders on `{0, .., n-1}`; isomorphic copies are kept.
pub fn enumerate_join_semilattices(n: usize) -> Result<Vec<FiniteMonoid>, TropicalError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if n > 6 {
        return Err(TropicalError::TooLarge(n));
    }
    // Candidate strict relations among the non-bottom elements 1..n.
    let pairs: Vec<(usize, usize)> =
        (1..n).flat_map(|a| (1..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << pairs.len()) {
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            rel[i][i] = true;
            rel[0][i] = true;
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if bits >> k & 1 == 1 {
                rel[a][b] = true;
            }
        }
        let antisymmetric = (1..n).all(|a| (a + 1..n).all(|b| !(rel[a][b] && rel[b][a])));
        if !antisymmetric {
            continue;
        }
        let transitive =
            (0..n).all(|a| (0..n).all(|b| !rel[a][b] || (0..n).all(|c| !rel[b][c] || rel[a][c])));
        if !transitive {
            continue;
        }
        let leq = |a: usize, b: usize| rel[a][b];
        let mut table = vec![vec![0; n]; n];
        let mut complete = true;
        'outer: for a in 0..n {
            for b in 0..n {
                match least_upper_bound(n, &leq, a, b) {
                    Some(j) => table[a][b] = j,
                    None => {
                        complete = false;
                        break 'outer;
                    }
                }
            }
        }
        if complete {
            out.push(FiniteMonoid::from_raw(labels.clone(), table, 0));
        }
    }
    Ok(out)
}
