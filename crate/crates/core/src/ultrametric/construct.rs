use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ball, default_labels, verify_ultrametric, Form, UltrametricError, UltrametricMatrix};
use crate::extended::Extended;
use crate::filters::{classify, dual, extend_base, Closure, FamilyKind, SubsetFamily};
use crate::scalar::Scalar;
use crate::subset::Subset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unspecified,
}

/// A positive (possibly infinite) value on every member of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct DiameterFunction<T> {
    values: BTreeMap<Subset, Extended<T>>,
    monotonicity: Monotonicity,
}

impl<T: Scalar> DiameterFunction<T> {
    pub fn new(domain: &SubsetFamily, monotonicity: Monotonicity, f: impl Fn(&Subset) -> Extended<T>) -> Self {
        let values = domain.members().iter().map(|m| (m.clone(), f(m))).collect();
        DiameterFunction { values, monotonicity }
    }

    pub fn from_values(values: BTreeMap<Subset, Extended<T>>, monotonicity: Monotonicity) -> Self {
        DiameterFunction { values, monotonicity }
    }

    /// `F ↦ sup{d(x,y) : x, y ∉ F}` on every member of `domain`, with `sup ∅ = 0`.
    pub fn ultradiameter(seed: &UltrametricMatrix<T>, domain: &SubsetFamily) -> Self {
        Self::new(domain, Monotonicity::Decreasing, |g| ultradiameter(seed, g))
    }

    pub fn get(&self, member: &Subset) -> Option<&Extended<T>> {
        self.values.get(member)
    }

    pub fn values(&self) -> &BTreeMap<Subset, Extended<T>> {
        &self.values
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// Checks `expected` monotonicity against inclusion between every pair of members.
    pub fn check_monotonicity(&self, expected: Monotonicity) -> Result<(), UltrametricError> {
        if expected == Monotonicity::Unspecified {
            return Ok(());
        }
        let entries: Vec<(&Subset, &Extended<T>)> = self.values.iter().collect();
        for (a, va) in &entries {
            for (b, vb) in &entries {
                if a != b && a.is_subset(b) {
                    let ok = match expected {
                        Monotonicity::Increasing => va <= vb,
                        Monotonicity::Decreasing => va >= vb,
                        Monotonicity::Unspecified => true,
                    };
                    if !ok {
                        return Err(UltrametricError::MonotonicityError {
                            expected,
                            smaller: a.to_labels(),
                            larger: b.to_labels(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_positive(&self) -> Result<(), UltrametricError> {
        match self.values.iter().find(|(_, v)| **v <= Extended::zero()) {
            Some((m, _)) => Err(UltrametricError::NonPositiveDiameter(m.to_labels())),
            None => Ok(()),
        }
    }

    fn value(&self, member: &Subset) -> Result<&Extended<T>, UltrametricError> {
        self.values.get(member).ok_or_else(|| UltrametricError::MissingDiameter(member.to_labels()))
    }
}

/// Which sufficient conditions the constructions enforce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionOptions {
    /// Verify the diameter function has the monotonicity the construction needs.
    pub check_monotonicity: bool,
    /// Reject zero or negative diameter values. When relaxed, zero distances are
    /// still reported as [`UltrametricError::DegenerateDistance`].
    pub require_positive_infimum: bool,
    /// Map every off-diagonal distance through `x ↦ x / (1 + x)` (with `inf ↦ 1`).
    pub deinfinitate: bool,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions { check_monotonicity: true, require_positive_infimum: true, deinfinitate: false }
    }
}

impl ConstructionOptions {
    pub fn relaxed() -> Self {
        ConstructionOptions { check_monotonicity: false, require_positive_infimum: false, deinfinitate: false }
    }
}

/// The family of closed balls with attained radii and the ideal it generates.
#[derive(Debug, Clone, PartialEq)]
pub struct BallIdealBase {
    pub base: SubsetFamily,
    pub ideal: SubsetFamily,
    /// The ideal misses the full point set. Never true for finitely many points.
    pub proper: bool,
}

/// Balls `S(x0, r)` with `r` ranging over `d(x0, ·)`, and their downward closure.
pub fn ball_ideal_base<T: Scalar>(m: &UltrametricMatrix<T>, tol: f64) -> Result<BallIdealBase, UltrametricError> {
    let report = verify_ultrametric(&m.clone().with_form(Form::MaxForm), tol)?;
    if let Some(w) = report.worst {
        return Err(UltrametricError::NotUltrametric(w.x, w.y, w.z));
    }
    let n = m.len();
    let mut balls = Vec::new();
    for x0 in 0..n {
        for r in m.rows()[x0].iter() {
            balls.push(ball(m, x0, r)?);
        }
    }
    let base = SubsetFamily::new(n, balls)?;
    let ideal = extend_base(&base, Closure::Ideal)?;
    let proper = !ideal.contains(&Subset::full(n));
    Ok(BallIdealBase { base, ideal, proper })
}

/// `sup{d(x,y) : x, y ∉ g}`, with `sup ∅ = 0`.
pub fn ultradiameter<T: Scalar>(seed: &UltrametricMatrix<T>, g: &Subset) -> Extended<T> {
    let outside: Vec<usize> = (0..seed.len()).filter(|&i| !g.contains(i)).collect();
    let mut best = Extended::zero();
    for (k, &x) in outside.iter().enumerate() {
        for &y in &outside[k + 1..] {
            let v = seed.get(x, y);
            if *v > best {
                best = v.clone();
            }
        }
    }
    best
}

/// `g(x) = x / (1 + x)`, `g(inf) = 1`.
pub fn deinfinitate<T: Scalar>(x: &Extended<T>) -> Result<T, UltrametricError> {
    match x {
        Extended::PosInf => Ok(T::one()),
        Extended::Finite(v) if *v > T::zero() => Ok(v.clone() / (T::one() + v.clone())),
        _ => Err(UltrametricError::NonPositiveInput),
    }
}

/// Off-diagonal values become the matrix; a zero distance is an error.
fn assemble<T: Scalar>(
    n: usize,
    form: Form,
    opts: &ConstructionOptions,
    mut pair: impl FnMut(usize, usize) -> Extended<T>,
) -> Result<UltrametricMatrix<T>, UltrametricError> {
    let mut d = vec![vec![Extended::zero(); n]; n];
    for x in 0..n {
        for y in x + 1..n {
            let mut v = pair(x, y);
            if v <= Extended::zero() {
                return Err(UltrametricError::DegenerateDistance(x, y));
            }
            if opts.deinfinitate {
                v = Extended::Finite(deinfinitate(&v)?);
            }
            d[y][x] = v.clone();
            d[x][y] = v;
        }
    }
    UltrametricMatrix::new(default_labels(n), d, form)
}

pub(crate) fn degenerate_check<T: Scalar>(
    n: usize,
    form: Form,
    pair: impl FnMut(usize, usize) -> Extended<T>,
) -> Result<UltrametricMatrix<T>, UltrametricError> {
    assemble(n, form, &ConstructionOptions::relaxed(), pair)
}

/// `d(x,y) = inf{𝔡(A) : {x,y} ⊆ A ∈ I}` (max form, 𝔡 decreasing) or the
/// corresponding `sup` (min form, 𝔡 increasing).
pub fn ideal_to_ultrametric<T: Scalar>(
    ideal: &SubsetFamily,
    diam: &DiameterFunction<T>,
    form: Form,
    opts: &ConstructionOptions,
) -> Result<UltrametricMatrix<T>, UltrametricError> {
    if classify(ideal)?.kind != FamilyKind::Ideal && !is_full_power_set(ideal) {
        return Err(UltrametricError::NotAnIdeal);
    }
    let n = ideal.ground();
    let uncovered = ideal.join().complement(n);
    if !uncovered.is_empty() {
        return Err(UltrametricError::CoverageError(uncovered.to_labels()));
    }
    if opts.check_monotonicity {
        diam.check_monotonicity(match form {
            Form::MaxForm => Monotonicity::Decreasing,
            Form::MinForm => Monotonicity::Increasing,
        })?;
    }
    if opts.require_positive_infimum {
        diam.check_positive()?;
    }
    let members: Vec<(&Subset, &Extended<T>)> =
        ideal.members().iter().map(|a| diam.value(a).map(|v| (a, v))).collect::<Result<_, _>>()?;
    assemble(n, form, opts, |x, y| {
        let candidates = members.iter().filter(|(a, _)| a.contains(x) && a.contains(y)).map(|(_, v)| *v);
        match form {
            Form::MaxForm => candidates.fold(Extended::PosInf, |acc, v| if *v < acc { v.clone() } else { acc }),
            Form::MinForm => candidates.fold(Extended::zero(), |acc, v| if *v > acc { v.clone() } else { acc }),
        }
    })
}

/// The full power set classifies as a filter; it is also the trivial ideal.
fn is_full_power_set(family: &SubsetFamily) -> bool {
    let n = family.ground();
    n < 64 && family.len() as u128 == 1u128 << n
}

/// `D(x,y) = inf{𝔡(G) : G ∈ F, G ∩ {x,y} = ∅}` with `inf ∅ = inf`; max form.
pub fn filter_to_ultrametric<T: Scalar>(
    filter: &SubsetFamily,
    diam: &DiameterFunction<T>,
    opts: &ConstructionOptions,
) -> Result<UltrametricMatrix<T>, UltrametricError> {
    if !matches!(classify(filter)?.kind, FamilyKind::Filter | FamilyKind::Ultrafilter) {
        return Err(UltrametricError::NotAFilter);
    }
    if opts.check_monotonicity {
        diam.check_monotonicity(Monotonicity::Increasing)?;
    }
    if opts.require_positive_infimum {
        diam.check_positive()?;
    }
    let members: Vec<(&Subset, &Extended<T>)> =
        filter.members().iter().map(|g| diam.value(g).map(|v| (g, v))).collect::<Result<_, _>>()?;
    assemble(filter.ground(), Form::MaxForm, opts, |x, y| {
        members
            .iter()
            .filter(|(g, _)| !g.contains(x) && !g.contains(y))
            .fold(Extended::PosInf, |acc, (_, v)| if **v < acc { (*v).clone() } else { acc })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport<T> {
    /// Reconstruction equals the seed (exactly for rationals, within `tol` for floats).
    pub equal: bool,
    pub max_deviation: f64,
    pub reconstructed: UltrametricMatrix<T>,
}

/// Seed → ball ideal → dual filter → ultrametric with the ultradiameter.
pub fn roundtrip_check<T: Scalar>(seed: &UltrametricMatrix<T>, tol: f64) -> Result<RoundtripReport<T>, UltrametricError> {
    let balls = ball_ideal_base(seed, tol)?;
    let filter = dual(&balls.ideal);
    let diam = DiameterFunction::ultradiameter(seed, &filter);
    let reconstructed = filter_to_ultrametric(&filter, &diam, &ConstructionOptions::relaxed())?;
    let n = seed.len();
    let mut equal = true;
    let mut max_deviation = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let (a, b) = (seed.get(x, y), reconstructed.get(x, y));
            if !a.ties(b, tol) {
                equal = false;
            }
            let dev = match (a, b) {
                (Extended::Finite(u), Extended::Finite(v)) => (u.clone() - v.clone()).abs_value().to_f64(),
                _ if a == b => 0.0,
                _ => f64::INFINITY,
            };
            max_deviation = max_deviation.max(dev);
        }
    }
    Ok(RoundtripReport { equal, max_deviation, reconstructed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::principal_filter;
    use crate::scalar::parse_rational;
    use num_rational::BigRational;

    fn q(text: &str) -> Extended<BigRational> {
        Extended::Finite(parse_rational(text).unwrap())
    }

    #[test]
    fn power_set_ideal_with_cardinality_diameter() {
        let ideal = SubsetFamily::power_set(3).unwrap();
        let diam = DiameterFunction::new(&ideal, Monotonicity::Decreasing, |a| q(&(4 - a.len()).to_string()));
        let m = ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default()).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(*m.get(x, y), if x == y { q("0") } else { q("1") });
            }
        }
        assert!(verify_ultrametric(&m, 0.0).unwrap().valid);
    }

    #[test]
    fn min_form_with_increasing_diameter() {
        let ideal = SubsetFamily::power_set(3).unwrap();
        let diam = DiameterFunction::new(&ideal, Monotonicity::Increasing, |a| q(&(1 + a.len()).to_string()));
        let m = ideal_to_ultrametric(&ideal, &diam, Form::MinForm, &ConstructionOptions::default()).unwrap();
        assert_eq!(m.form(), Form::MinForm);
        assert!(verify_ultrametric(&m, 0.0).unwrap().valid);
        assert_eq!(*m.get(0, 1), q("4"));
    }

    #[test]
    fn wrong_monotonicity_and_coverage() {
        let ideal = SubsetFamily::power_set(3).unwrap();
        let diam = DiameterFunction::new(&ideal, Monotonicity::Increasing, |a| q(&(1 + a.len()).to_string()));
        assert!(matches!(
            ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default()),
            Err(UltrametricError::MonotonicityError { .. })
        ));
        let partial = crate::filters::principal_ideal(3, &Subset::from_mask(0b011)).unwrap();
        let diam = DiameterFunction::new(&partial, Monotonicity::Decreasing, |_| q("1"));
        assert_eq!(
            ideal_to_ultrametric(&partial, &diam, Form::MaxForm, &ConstructionOptions::default()),
            Err(UltrametricError::CoverageError(vec![3]))
        );
    }

    #[test]
    fn ultrafilter_gives_infinite_distances_at_generator() {
        let uf = principal_filter(3, &Subset::singleton(0)).unwrap();
        let diam = DiameterFunction::new(&uf, Monotonicity::Increasing, |g| q(&(1 + g.len()).to_string()));
        let m = filter_to_ultrametric(&uf, &diam, &ConstructionOptions::default()).unwrap();
        assert_eq!(*m.get(0, 1), Extended::PosInf);
        assert_eq!(*m.get(1, 2), q("2"));
        let opts = ConstructionOptions { deinfinitate: true, ..Default::default() };
        let g = filter_to_ultrametric(&uf, &diam, &opts).unwrap();
        assert_eq!(*g.get(0, 2), q("1"));
        assert_eq!(*g.get(1, 2), q("2/3"));
    }

    #[test]
    fn two_point_roundtrip_uses_diameter_of_empty_set() {
        let seed = UltrametricMatrix::from_fn(2, Form::MaxForm, |_, _| q("5"));
        let report = roundtrip_check(&seed, 0.0).unwrap();
        assert!(report.equal);
        assert_eq!(*report.reconstructed.get(0, 1), q("5"));
    }

    #[test]
    fn ultradiameter_conventions() {
        let seed = UltrametricMatrix::from_fn(3, Form::MaxForm, |i, j| q(&(i + j).to_string()));
        assert_eq!(ultradiameter(&seed, &Subset::full(3)), q("0"));
        assert_eq!(ultradiameter(&seed, &Subset::empty()), q("3"));
        assert_eq!(ultradiameter(&seed, &Subset::singleton(2)), q("1"));
    }

    #[test]
    fn deinfinitation() {
        assert_eq!(deinfinitate(&Extended::Finite(1.0)), Ok(0.5));
        assert_eq!(deinfinitate::<f64>(&Extended::PosInf), Ok(1.0));
        assert_eq!(deinfinitate(&Extended::Finite(0.0)), Err(UltrametricError::NonPositiveInput));
        let mut last = 0.0;
        for k in 1..1000 {
            let v = deinfinitate(&Extended::Finite(k as f64 * 0.01)).unwrap();
            assert!(v > last && v < 1.0);
            last = v;
        }
    }

    #[test]
    fn finite_ball_ideal_is_trivial() {
        let seed = UltrametricMatrix::from_fn(4, Form::MaxForm, |i, j| {
            if i / 2 == j / 2 {
                Extended::Finite(1.0)
            } else {
                Extended::Finite(3.0)
            }
        });
        let b = ball_ideal_base(&seed, 0.0).unwrap();
        assert!(!b.proper);
        assert_eq!(b.ideal, SubsetFamily::power_set(4).unwrap());
    }
}
