//! Microsystems `(E, S, T)` with local temperatures, the B-type tropical free
//! energy, its A-type dual and tropical/usual probability weights.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nesting::{nest, NestType, NestingError};
use crate::scalar::Scalar;
use crate::schema::Number;
use crate::subset::Subset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("system {0} has zero temperature")]
    ZeroTemperature(usize),
    #[error("evaluation temperature must be positive")]
    NonpositiveTemperature,
    #[error("systems do not share a common temperature")]
    NonEquilibrium,
    #[error("index {0} is not a minimiser")]
    NotAMinimizer(usize),
    #[error("index {index} outside 1..={n}")]
    OutOfRange { index: usize, n: usize },
    #[error("k_B must be nonnegative and finite")]
    InvalidBoltzmann,
    #[error("entropies and free energies differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("bad model: {0}")]
    Model(String),
    #[error(transparent)]
    Nesting(#[from] NestingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroSystem<T> {
    pub energy: T,
    pub entropy: T,
    pub temperature: T,
}

impl<T: Scalar> MicroSystem<T> {
    pub fn new(energy: T, entropy: T, temperature: T) -> Self {
        MicroSystem { energy, entropy, temperature }
    }

    /// `F = E - T S`.
    pub fn free_energy(&self) -> T {
        self.energy.clone() - self.temperature.clone() * self.entropy.clone()
    }

    /// `(E - T S) / T`, the B-type objective.
    pub fn reduced_free_energy(&self) -> T {
        self.free_energy() / self.temperature.clone()
    }
}

pub fn micro_free_energy<T: Scalar>(m: &MicroSystem<T>) -> T {
    m.free_energy()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    pub labels: Vec<String>,
    pub systems: Vec<MicroSystem<T>>,
}

impl<T: Scalar> Ensemble<T> {
    pub fn new(systems: Vec<MicroSystem<T>>) -> Result<Self, ThermoError> {
        let labels = (1..=systems.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, systems)
    }

    pub fn with_labels(labels: Vec<String>, systems: Vec<MicroSystem<T>>) -> Result<Self, ThermoError> {
        if systems.is_empty() {
            return Err(ThermoError::EmptyEnsemble);
        }
        if labels.len() != systems.len() {
            return Err(ThermoError::Model(format!("{} labels for {} systems", labels.len(), systems.len())));
        }
        Ok(Ensemble { labels, systems })
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    fn check_temperatures(&self) -> Result<(), ThermoError> {
        match self.systems.iter().position(|m| m.temperature.is_zero()) {
            Some(i) => Err(ThermoError::ZeroTemperature(i)),
            None => Ok(()),
        }
    }

    /// The shared temperature, if every system has the same one.
    pub fn common_temperature(&self) -> Option<&T> {
        let t = &self.systems[0].temperature;
        self.systems.iter().all(|m| m.temperature == *t).then_some(t)
    }

    pub fn reduced_free_energies(&self) -> Result<Vec<T>, ThermoError> {
        self.check_temperatures()?;
        Ok(self.systems.iter().map(MicroSystem::reduced_free_energy).collect())
    }

    /// `E -> E + shift` for every system.
    pub fn shifted(&self, shift: &T) -> Self {
        let systems = self
            .systems
            .iter()
            .map(|m| MicroSystem::new(m.energy.clone() + shift.clone(), m.entropy.clone(), m.temperature.clone()))
            .collect();
        Ensemble { labels: self.labels.clone(), systems }
    }
}

/// Extreme value and the indices within `tol` of it.
pub fn argext<T: Scalar>(values: &[T], kind: NestType, tol: f64) -> Result<(T, Subset), NestingError> {
    let nf = nest(values, kind, tol)?;
    let level = nf.levels.into_iter().next().expect("nonempty");
    Ok((level.mu, level.indices))
}

/// `min_α (E_α - T_α S_α) / T_α` with its tie set.
pub fn tropical_free_energy_b<T: Scalar>(e: &Ensemble<T>, tie_tol: f64) -> Result<(T, Subset), ThermoError> {
    Ok(argext(&e.reduced_free_energies()?, NestType::B, tie_tol)?)
}

/// `(E, S, T) -> (S, E, 1/T)`.
pub fn ab_dual<T: Scalar>(e: &Ensemble<T>) -> Result<Ensemble<T>, ThermoError> {
    e.check_temperatures()?;
    let systems = e
        .systems
        .iter()
        .map(|m| MicroSystem::new(m.entropy.clone(), m.energy.clone(), T::one() / m.temperature.clone()))
        .collect();
    Ok(Ensemble { labels: e.labels.clone(), systems })
}

/// `Ẽ - S̃ T̃` per system of a dual ensemble, the A-type objective.
fn a_objective<T: Scalar>(dual: &Ensemble<T>) -> Vec<T> {
    dual.systems.iter().map(|m| m.energy.clone() - m.entropy.clone() * m.temperature.clone()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport<T> {
    /// `min_α (E_α - T_α S_α) / T_α`.
    pub b_value: T,
    pub b_argmin: Subset,
    /// `-max_α (Ẽ_α - S̃_α T̃_α)`.
    pub a_value: T,
    pub a_argmax: Subset,
    /// `min_α -(Ẽ_α - S̃_α T̃_α)`, the inverted presentation.
    pub inverted_value: T,
    pub inverted_argmin: Subset,
    pub holds: bool,
}

fn agree<T: Scalar>(a: &T, b: &T, rel: f64) -> bool {
    if T::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64(), b.to_f64());
        (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0)
    }
}

/// Evaluates the B form, the negated A form of the dual and its inverted
/// presentation, and checks they coincide along with their extremal sets.
pub fn duality_identity<T: Scalar>(e: &Ensemble<T>, tie_tol: f64) -> Result<DualityReport<T>, ThermoError> {
    let (b_value, b_argmin) = tropical_free_energy_b(e, tie_tol)?;
    let a = a_objective(&ab_dual(e)?);
    let (a_max, a_argmax) = argext(&a, NestType::A, tie_tol)?;
    let inverted: Vec<T> = a.iter().map(|v| -v.clone()).collect();
    let (inverted_value, inverted_argmin) = argext(&inverted, NestType::B, tie_tol)?;
    let a_value = -a_max;
    let rel = crate::scalar::FLOAT_TOLERANCE;
    let holds = agree(&b_value, &a_value, rel)
        && agree(&b_value, &inverted_value, rel)
        && b_argmin == a_argmax
        && b_argmin == inverted_argmin;
    Ok(DualityReport { b_value, b_argmin, a_value, a_argmax, inverted_value, inverted_argmin, holds })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOptions {
    pub witness_min: f64,
    pub witness_max: f64,
    pub witness_points: usize,
    pub tie_tol: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions { witness_min: -10.0, witness_max: 10.0, witness_points: 101, tie_tol: crate::scalar::FLOAT_TIE_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOutcome<T> {
    pub shift: T,
    pub argmin_before: Subset,
    pub argmin_after: Subset,
    pub argmin_preserved: bool,
    /// Some pairwise comparison of the B objective changed.
    pub order_changed: bool,
    /// Pairwise differences of the dual A objective are unchanged by the same shift.
    pub dual_differences_preserved: bool,
}

/// A shift that changes the comparison of one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub shift: T,
    pub pair: (usize, usize),
    pub before: Ordering,
    pub after: Ordering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport<T> {
    pub equilibrium: bool,
    pub outcomes: Vec<ShiftOutcome<T>>,
    /// Searched only when temperatures differ.
    pub witness: Option<Witness<T>>,
}

impl<T> ShiftReport<T> {
    /// In equilibrium every shift must keep the argmin set.
    pub fn equilibrium_invariance_holds(&self) -> bool {
        !self.equilibrium || self.outcomes.iter().all(|o| o.argmin_preserved)
    }
}

fn compare<T: Scalar>(a: &T, b: &T, tol: f64) -> Ordering {
    if a.ties(b, tol) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn first_changed_pair<T: Scalar>(before: &[T], after: &[T], tol: f64) -> Option<(usize, usize, Ordering, Ordering)> {
    let n = before.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find_map(|(i, j)| {
        let (x, y) = (compare(&before[i], &before[j], tol), compare(&after[i], &after[j], tol));
        (x != y).then_some((i, j, x, y))
    })
}

pub fn shift_diagnostics<T: Scalar>(
    e: &Ensemble<T>,
    shifts: &[T],
    opts: &ShiftOptions,
) -> Result<ShiftReport<T>, ThermoError> {
    let tol = opts.tie_tol;
    let base = e.reduced_free_energies()?;
    let (_, argmin_before) = argext(&base, NestType::B, tol)?;
    let dual_base = a_objective(&ab_dual(e)?);
    let outcomes = shifts
        .iter()
        .map(|s| {
            let after = e.shifted(s).reduced_free_energies()?;
            let (_, argmin_after) = argext(&after, NestType::B, tol)?;
            let dual_after: Vec<T> = dual_base.iter().map(|v| v.clone() + s.clone()).collect();
            let n = base.len();
            let dual_differences_preserved = (0..n).all(|i| {
                (0..n).all(|j| {
                    let d0 = dual_base[i].clone() - dual_base[j].clone();
                    let d1 = dual_after[i].clone() - dual_after[j].clone();
                    d0.ties(&d1, tol)
                })
            });
            Ok(ShiftOutcome {
                shift: s.clone(),
                argmin_preserved: argmin_after == argmin_before,
                order_changed: first_changed_pair(&base, &after, tol).is_some(),
                argmin_before: argmin_before.clone(),
                argmin_after,
                dual_differences_preserved,
            })
        })
        .collect::<Result<Vec<_>, ThermoError>>()?;
    let equilibrium = e.common_temperature().is_some();
    let witness = if equilibrium {
        None
    } else {
        witness_grid(opts).into_iter().find_map(|s| {
            let after = e.shifted(&s).reduced_free_energies().ok()?;
            first_changed_pair(&base, &after, tol).map(|(i, j, before, after)| Witness { shift: s, pair: (i, j), before, after })
        })
    };
    Ok(ShiftReport { equilibrium, outcomes, witness })
}

fn witness_grid<T: Scalar>(opts: &ShiftOptions) -> Vec<T> {
    let n = opts.witness_points.max(2);
    (0..n)
        .filter_map(|i| {
            let x = opts.witness_min + (opts.witness_max - opts.witness_min) * i as f64 / (n - 1) as f64;
            T::from_f64(x)
        })
        .collect()
}

/// `#(X ∩ m0) / #m0` where `m0` is the set of minimisers of `f`.
pub fn usual_probability<T: Scalar>(f: &[T], x: &Subset, tie_tol: f64) -> Result<BigRational, ThermoError> {
    let n = f.len();
    if let Some(bad) = x.iter().find(|&i| i >= n) {
        return Err(ThermoError::OutOfRange { index: bad + 1, n });
    }
    let (_, m0) = argext(f, NestType::B, tie_tol)?;
    Ok(BigRational::new(BigInt::from(x.intersection(&m0).len()), BigInt::from(m0.len())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TropicalWeights<T> {
    /// Per state.
    pub w: Vec<T>,
    /// Per level, `w + S`.
    pub big_w: Vec<T>,
    pub k_b: f64,
    pub m0: Subset,
}

/// `w_α = -S_α + (F_tr - F_α)/T - k_B ln #m0`, `W_α = w_α + S_α` at temperature `T > 0`.
///
/// Members of `m0` take `F_tr` as their free energy, so at `k_B = 0` their
/// `W` is exactly zero.
pub fn tropical_weights<T: Scalar>(
    free: &[T],
    entropy: &[T],
    temperature: &T,
    k_b: f64,
    tie_tol: f64,
) -> Result<TropicalWeights<T>, ThermoError> {
    if *temperature <= T::zero() {
        return Err(ThermoError::NonpositiveTemperature);
    }
    if free.len() != entropy.len() {
        return Err(ThermoError::LengthMismatch(free.len(), entropy.len()));
    }
    if !(k_b >= 0.0 && k_b.is_finite()) {
        return Err(ThermoError::InvalidBoltzmann);
    }
    let (f_tr, m0) = argext(free, NestType::B, tie_tol)?;
    let degeneracy = if k_b == 0.0 {
        T::zero()
    } else {
        T::from_f64(k_b * (m0.len() as f64).ln()).ok_or(ThermoError::InvalidBoltzmann)?
    };
    let big_w: Vec<T> = free
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let gap = if m0.contains(i) { T::zero() } else { f_tr.clone() - f.clone() };
            gap / temperature.clone() - degeneracy.clone()
        })
        .collect();
    let w = big_w.iter().zip(entropy).map(|(big, s)| big.clone() - s.clone()).collect();
    Ok(TropicalWeights { w, big_w, k_b, m0 })
}

impl<T: Scalar> Ensemble<T> {
    /// Tropical weights at the common temperature of an equilibrium ensemble.
    pub fn tropical_weights(&self, k_b: f64, tie_tol: f64) -> Result<TropicalWeights<T>, ThermoError> {
        let t = self.common_temperature().ok_or(ThermoError::NonEquilibrium)?.clone();
        let free: Vec<T> = self.systems.iter().map(MicroSystem::free_energy).collect();
        let entropy: Vec<T> = self.systems.iter().map(|m| m.entropy.clone()).collect();
        tropical_weights(&free, &entropy, &t, k_b, tie_tol)
    }
}

/// Usual-probability weight of a minimiser before and after appending a copy of it:
/// `(1/λ0, 2/(λ0 + 1))`.
pub fn copy_effect<T: Scalar>(f: &[T], alpha0: usize, tie_tol: f64) -> Result<(BigRational, BigRational), ThermoError> {
    let (_, m0) = argext(f, NestType::B, tie_tol)?;
    if !m0.contains(alpha0) {
        return Err(ThermoError::NotAMinimizer(alpha0 + 1));
    }
    let lambda0 = BigInt::from(m0.len());
    Ok((
        BigRational::new(BigInt::from(1), lambda0.clone()),
        BigRational::new(BigInt::from(2), lambda0 + BigInt::from(1)),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub temperature: T,
    pub free_energy: T,
    pub argmin: Subset,
    pub weights: Vec<T>,
}

/// Equilibrium sweep: every system at `T = t_min + i (t_max - t_min)/(steps - 1)`.
pub fn temperature_sweep<T: Scalar>(
    e: &Ensemble<T>,
    t_min: &T,
    t_max: &T,
    steps: usize,
    k_b: f64,
    tie_tol: f64,
) -> Result<Vec<SweepRow<T>>, ThermoError> {
    if steps < 2 {
        return Err(ThermoError::Model("a sweep needs at least 2 steps".into()));
    }
    let span = (t_max.clone() - t_min.clone()) / T::from_i64(steps as i64 - 1);
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = t_min.clone() + span.clone() * T::from_i64(i as i64);
            let free: Vec<T> = e.systems.iter().map(|m| m.energy.clone() - t.clone() * m.entropy.clone()).collect();
            let entropy: Vec<T> = e.systems.iter().map(|m| m.entropy.clone()).collect();
            let tw = tropical_weights(&free, &entropy, &t, k_b, tie_tol)?;
            let (free_energy, argmin) = argext(&free, NestType::B, tie_tol)?;
            Ok(SweepRow { temperature: t, free_energy, argmin, weights: tw.big_w })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub label: String,
    #[serde(rename = "E")]
    pub energy: Number,
    #[serde(rename = "S")]
    pub entropy: Number,
    #[serde(rename = "T")]
    pub temperature: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(default = "crate::schema::version_one")]
    pub version: u32,
    pub systems: Vec<SystemJson>,
    #[serde(rename = "kB", default)]
    pub k_b: Option<f64>,
    #[serde(default)]
    pub tie_tol: Option<f64>,
    /// `[T_min, T_max, steps]`.
    #[serde(default)]
    pub sweep: Option<(Number, Number, usize)>,
}

impl ModelJson {
    pub fn ensemble<T: Scalar>(&self) -> Result<Ensemble<T>, ThermoError> {
        crate::schema::check_version(self.version).map_err(ThermoError::Model)?;
        let systems = self
            .systems
            .iter()
            .map(|s| {
                let parse = |n: &Number| n.parse::<T>().map_err(ThermoError::Model);
                Ok(MicroSystem::new(parse(&s.energy)?, parse(&s.entropy)?, parse(&s.temperature)?))
            })
            .collect::<Result<Vec<_>, ThermoError>>()?;
        Ensemble::with_labels(self.systems.iter().map(|s| s.label.clone()).collect(), systems)
    }
}
