//! Statistical-amoeba weights `Z_k(I; x)` over tabulated grid points and the
//! families of negatively weighted `k`-subsets.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::SubsetFamily;
use crate::subset::{binomial, k_subsets, Subset};

pub const MAX_SYSTEMS: usize = 24;
pub const MAX_K: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmoebaError {
    #[error("need k >= 1 and 2k < N + 1, got N = {n}, k = {k}")]
    InvalidK { n: usize, k: usize },
    #[error("subset has {got} elements, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("grid point has {got} values, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("value at position {0} is not finite")]
    NonFinite(usize),
    #[error("enumerating C({n}, {k}) subsets exceeds the default guard (N <= 24, k <= 6)")]
    TooLarge { n: usize, k: usize },
    #[error("grid is empty")]
    EmptyGrid,
    #[error("bad input: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmoebaModel {
    n: usize,
    k: usize,
    /// Lift the enumeration guard.
    pub allow_large: bool,
}

impl AmoebaModel {
    pub fn new(n: usize, k: usize) -> Result<Self, AmoebaError> {
        if k == 0 || 2 * k >= n + 1 || n > 63 {
            return Err(AmoebaError::InvalidK { n, k });
        }
        Ok(AmoebaModel { n, k, allow_large: false })
    }

    pub fn allowing_large(mut self) -> Self {
        self.allow_large = true;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `C(N - 1, k - 1)`, the size of a principal-ultrafilter trace.
    pub fn max_cardinality(&self) -> u128 {
        binomial(self.n as u64 - 1, self.k as u64 - 1)
    }

    fn check_point(&self, f: &[f64]) -> Result<(), AmoebaError> {
        if f.len() != self.n {
            return Err(AmoebaError::WidthMismatch { expected: self.n, got: f.len() });
        }
        match f.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(AmoebaError::NonFinite(i)),
            None => Ok(()),
        }
    }

    fn check_guard(&self) -> Result<(), AmoebaError> {
        if !self.allow_large && (self.n > MAX_SYSTEMS || self.k > MAX_K) {
            return Err(AmoebaError::TooLarge { n: self.n, k: self.k });
        }
        Ok(())
    }
}

/// `Z = sign · e^{ln_abs}`; `ln_abs` is `-inf` when `Z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmoebaWeight {
    pub sign: Ordering,
    pub ln_abs: f64,
}

impl AmoebaWeight {
    pub fn value(&self) -> f64 {
        match self.sign {
            Ordering::Less => -self.ln_abs.exp(),
            Ordering::Equal => 0.0,
            Ordering::Greater => self.ln_abs.exp(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Ordering::Less
    }
}

/// `e^{f - max f}` per system, and `max f`.
fn shifted_factors(f: &[f64]) -> (Vec<f64>, f64) {
    let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (f.iter().map(|v| (v - m).exp()).collect(), m)
}

/// `(Σ_{α ∈ I} x_α, Σ_{β ∉ I} x_β)`.
fn split_sums(x: &[f64], mask: u64) -> (f64, f64) {
    x.iter().enumerate().fold((0.0, 0.0), |(inside, outside), (i, v)| {
        if mask >> i & 1 == 1 {
            (inside + v, outside)
        } else {
            (inside, outside + v)
        }
    })
}

fn weight_from_sums(inside: f64, outside: f64, shift: f64) -> AmoebaWeight {
    let sign = outside.partial_cmp(&inside).expect("finite sums");
    AmoebaWeight { sign, ln_abs: (outside - inside).abs().ln() + shift }
}

/// `Z_k(I; x) = -Σ_{α ∈ I} e^{f_α} + Σ_{β ∉ I} e^{f_β}`, evaluated after
/// factoring out `e^{max f}`.
pub fn amoeba_weight(model: &AmoebaModel, subset: &Subset, f: &[f64]) -> Result<AmoebaWeight, AmoebaError> {
    model.check_point(f)?;
    if subset.len() != model.k || subset.bound() > model.n {
        return Err(AmoebaError::SizeMismatch { expected: model.k, got: subset.len() });
    }
    let (x, shift) = shifted_factors(f);
    let (inside, outside) = split_sums(&x, subset.mask());
    Ok(weight_from_sums(inside, outside, shift))
}

/// `Z_k(I)` for exact Boltzmann factors `e^{f_α}`.
pub fn amoeba_weight_exact(factors: &[BigRational], subset: &Subset) -> BigRational {
    factors.iter().enumerate().fold(BigRational::zero(), |acc, (i, x)| {
        if subset.contains(i) {
            acc - x
        } else {
            acc + x
        }
    })
}

/// `Σ_α x_α = Z_k(I) + 2 Σ_{α ∈ I} x_α`, in exact arithmetic.
pub fn trace_identity_holds(factors: &[BigRational], subset: &Subset) -> bool {
    let total = factors.iter().fold(BigRational::zero(), |acc, x| acc + x);
    let inside = subset.iter().fold(BigRational::zero(), |acc, i| acc + &factors[i]);
    total == amoeba_weight_exact(factors, subset) + inside * BigRational::from_integer(2.into())
}

fn negative_masks(model: &AmoebaModel, f: &[f64]) -> Result<Vec<u64>, AmoebaError> {
    model.check_point(f)?;
    model.check_guard()?;
    let (x, _) = shifted_factors(f);
    Ok(k_subsets(model.n, model.k)
        .filter(|&mask| {
            let (inside, outside) = split_sums(&x, mask);
            inside > outside
        })
        .collect())
}

/// `N_k(x)`: the `k`-subsets with `Z_k < 0`.
pub fn negative_family(model: &AmoebaModel, f: &[f64]) -> Result<SubsetFamily, AmoebaError> {
    let masks = negative_masks(model, f)?;
    SubsetFamily::new(model.n, masks.into_iter().map(Subset::from_mask))
        .map_err(|e| AmoebaError::Parse(e.to_string()))
}

/// The unique index with strictly the largest value.
pub fn strict_maximizer(f: &[f64]) -> Option<usize> {
    let (best, _) = f.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))?;
    f.iter().enumerate().all(|(i, v)| i == best || *v < f[best]).then_some(best)
}

/// The `k`-subsets containing `alpha`: the trace of the principal ultrafilter at `alpha`.
pub fn ultrafilter_trace(model: &AmoebaModel, alpha: usize) -> Result<SubsetFamily, AmoebaError> {
    let star = k_subsets(model.n, model.k).filter(|m| m >> alpha & 1 == 1).map(Subset::from_mask);
    SubsetFamily::new(model.n, star).map_err(|e| AmoebaError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: String,
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub label: String,
    pub count: usize,
    pub flagged: bool,
    /// Strict maximiser of `f`, when unique.
    pub alpha: Option<usize>,
    /// On flagged points: `N_k` equals the trace of the principal ultrafilter at `alpha`.
    pub trace_holds: Option<bool>,
    /// The exact identity `Σ e^f = Z_k(I) + 2 Σ_I e^f` held for every member.
    pub identity_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub max_cardinality: u128,
    pub rows: Vec<ScanRow>,
    /// Flagged points where the trace identity failed.
    pub trace_failures: Vec<usize>,
    /// Points with `#N_k > C(N - 1, k - 1)`.
    pub bound_exceeded: Vec<usize>,
}

impl ScanResult {
    pub fn clean(&self) -> bool {
        self.trace_failures.is_empty() && self.bound_exceeded.is_empty() && self.rows.iter().all(|r| r.identity_holds)
    }
}

fn scan_point(model: &AmoebaModel, point: &GridPoint) -> Result<ScanRow, AmoebaError> {
    let masks = negative_masks(model, &point.f)?;
    let count = masks.len();
    let flagged = count as u128 == model.max_cardinality();
    let alpha = strict_maximizer(&point.f);
    // Same size as the star at `alpha`, so containment in it is equality.
    let trace_holds = flagged.then(|| alpha.is_some_and(|a| masks.iter().all(|m| m >> a & 1 == 1)));
    let (x, _) = shifted_factors(&point.f);
    let exact: Vec<BigRational> = x.iter().map(|&v| BigRational::from_float(v).expect("finite factor")).collect();
    let identity_holds = masks.iter().all(|&m| {
        let s = Subset::from_mask(m);
        trace_identity_holds(&exact, &s) && amoeba_weight_exact(&exact, &s).is_negative()
    });
    Ok(ScanRow { label: point.label.clone(), count, flagged, alpha, trace_holds, identity_holds })
}

/// Evaluates every grid point in parallel; rows keep grid order.
pub fn instability_scan(model: &AmoebaModel, grid: &[GridPoint]) -> Result<ScanResult, AmoebaError> {
    if grid.is_empty() {
        return Err(AmoebaError::EmptyGrid);
    }
    let rows = grid.par_iter().map(|p| scan_point(model, p)).collect::<Result<Vec<_>, _>>()?;
    let max_cardinality = model.max_cardinality();
    let trace_failures = rows.iter().enumerate().filter(|(_, r)| r.trace_holds == Some(false)).map(|(i, _)| i).collect();
    let bound_exceeded =
        rows.iter().enumerate().filter(|(_, r)| r.count as u128 > max_cardinality).map(|(i, _)| i).collect();
    Ok(ScanResult { max_cardinality, rows, trace_failures, bound_exceeded })
}

/// `{"version": 1, "N": 5, "k": 2, "allow_large": false}`; `k` may come from the command line instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(default = "crate::schema::version_one")]
    pub version: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub allow_large: bool,
}

impl ModelJson {
    pub fn model(&self, k_override: Option<usize>) -> Result<AmoebaModel, AmoebaError> {
        crate::schema::check_version(self.version).map_err(AmoebaError::Parse)?;
        let k = k_override.or(self.k).ok_or_else(|| AmoebaError::Parse("k is required".into()))?;
        let model = AmoebaModel::new(self.n, k)?;
        Ok(if self.allow_large { model.allowing_large() } else { model })
    }
}

/// Header `point,f1,..,fN`, then one labelled row of values per grid point.
pub fn read_grid(text: &str, n: usize) -> Result<Vec<GridPoint>, AmoebaError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or(AmoebaError::EmptyGrid)?;
    let width = header.split(',').count();
    if width != n + 1 {
        return Err(AmoebaError::WidthMismatch { expected: n, got: width.saturating_sub(1) });
    }
    lines
        .map(|line| {
            let mut cells = line.split(',').map(str::trim);
            let label = cells.next().unwrap_or_default().to_string();
            let f = cells
                .map(|c| c.parse::<f64>().map_err(|_| AmoebaError::Parse(format!("bad value `{c}` in row `{label}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if f.len() != n {
                return Err(AmoebaError::WidthMismatch { expected: n, got: f.len() });
            }
            Ok(GridPoint { label, f })
        })
        .collect()
}
