//! Characteristic-vector subsets of a finite index set `{0, .., n-1}`.
//!
//! Ground sets up to 64 elements live in a single inline word; larger ones
//! spill to the heap. Trailing zero words are always trimmed so that equality
//! is set equality regardless of how a subset was built.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Subset {
    words: SmallVec<[u64; 1]>,
}

impl Subset {
    pub fn empty() -> Self {
        Subset { words: SmallVec::new() }
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = Subset::empty();
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut s = Subset { words: smallvec::smallvec![mask] };
        s.trim();
        s
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Subset::empty();
        s.insert(i);
        s
    }

    /// Low 64 bits; exact whenever every index is below 64.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if w < self.words.len() {
            self.words[w] &= !(1 << b);
            self.trim();
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest index plus one (0 for the empty set).
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn union(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let mut words = SmallVec::with_capacity(n);
        for i in 0..n {
            words.push(self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0));
        }
        Subset { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let n = self.words.len().min(other.words.len());
        let mut s = Subset { words: (0..n).map(|i| self.words[i] & other.words[i]).collect() };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    /// Complement inside `{0, .., n-1}`.
    pub fn complement(&self, n: usize) -> Self {
        Subset::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    /// Indices shifted to 1-based labels, the external convention.
    pub fn to_labels(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Inverse of [`Subset::to_labels`]; `None` if a label is 0.
    pub fn from_labels(labels: &[usize]) -> Option<Self> {
        let mut s = Subset::empty();
        for &l in labels {
            if l == 0 {
                return None;
            }
            s.insert(l - 1);
        }
        Some(s)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Subset::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

/// Lexicographic order on the sorted index lists.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// All subsets of `{0, .., n-1}` in mask order; `n` must be below 64.
pub fn power_set(n: usize) -> impl Iterator<Item = Subset> {
    assert!(n < 64, "power_set is limited to n < 64");
    (0..1u64 << n).map(Subset::from_mask)
}

/// All `k`-element subsets of `{0, .., n-1}` as bit masks (n <= 64), Gosper order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << n;
    let mut next: Option<u128> = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some((1u128 << k) - 1)
    };
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 {
            None
        } else {
            let c = current & current.wrapping_neg();
            let r = current + c;
            let candidate = (((r ^ current) >> 2) / c) | r;
            (candidate < limit).then_some(candidate)
        };
        Some(current as u64)
    })
}

/// Binomial coefficient in `u128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}
