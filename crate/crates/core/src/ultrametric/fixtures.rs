//! Finite stand-ins for the infinite counterexamples around the ideal/filter
//! constructions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::construct::degenerate_check;
use super::{
    filter_to_ultrametric, ideal_to_ultrametric, verify_ultrametric, ConstructionOptions, DiameterFunction, Form,
    Monotonicity, UltrametricError, UltrametricMatrix, VerifyReport,
};
use crate::extended::Extended;
use crate::filters::SubsetFamily;
use crate::scalar::rational_pow;
use crate::subset::Subset;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Aitken's Δ² extrapolation of the last three terms (the last term if the
/// second difference vanishes).
pub fn aitken_limit(seq: &[BigRational]) -> Option<BigRational> {
    let [x0, x1, x2] = seq.get(seq.len().checked_sub(3)?..)? else {
        return None;
    };
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let dd = &d2 - &d1;
    if dd.is_zero() {
        return Some(x2.clone());
    }
    Some(x2 - &d2 * &d2 / dd)
}

/// Distances on the first three points of truncated ideals, and their extrapolated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateFixture {
    /// `(K, d_K(1, 2))` for the ideal of subsets of `{1, .., K}`.
    pub truncations: Vec<(usize, BigRational)>,
    pub limit: BigRational,
    pub result: Result<UltrametricMatrix<BigRational>, UltrametricError>,
}

/// `𝔡(A) = 1 - Σ_{α ∈ A} 2^{-α}` on subsets of `{1, .., K}` for `K = 3..=k_max`.
///
/// Every truncation is a valid construction with `d_K(1, 2) = 2^{-K}`; the
/// limit over `K` is zero, which the assembly step rejects.
pub fn degenerate_fixture(k_max: usize) -> DegenerateFixture {
    assert!((5..=16).contains(&k_max), "k_max must lie in 5..=16");
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut per_pair: Vec<Vec<BigRational>> = vec![Vec::new(); 3];
    let mut truncations = Vec::new();
    for k in 3..=k_max {
        let ideal = SubsetFamily::power_set(k).expect("small ground set");
        let diam = DiameterFunction::new(&ideal, Monotonicity::Decreasing, |a| {
            Extended::Finite(a.iter().fold(BigRational::one(), |acc, i| acc - rational_pow(&half, i as i64 + 1)))
        });
        let m = ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default())
            .expect("each truncation satisfies the preconditions");
        for (slot, (x, y)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            per_pair[slot].push(m.get(x, y).as_finite().expect("finite").clone());
        }
        truncations.push((k, m.get(0, 1).as_finite().expect("finite").clone()));
    }
    let limits: Vec<BigRational> = per_pair.iter().map(|s| aitken_limit(s).expect("three terms")).collect();
    let result = degenerate_check(3, Form::MaxForm, |x, y| {
        let slot = match (x, y) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        };
        Extended::Finite(limits[slot].clone())
    });
    DegenerateFixture { truncations, limit: limits[0].clone(), result }
}

/// A diameter function that jumps across the split at `{1, 2}` on the trivial filter of `{1, 2, 3}`.
pub fn non_monotone_fixture() -> (UltrametricMatrix<BigRational>, VerifyReport<BigRational>) {
    let filter = SubsetFamily::power_set(3).expect("small ground set");
    let split = Subset::from_mask(0b011);
    let diam = DiameterFunction::new(&filter, Monotonicity::Unspecified, |g| {
        Extended::Finite(if g.is_disjoint(&split) { int(3) } else { int(1) })
    });
    let m = filter_to_ultrametric(&filter, &diam, &ConstructionOptions::relaxed()).expect("positive values");
    let report = verify_ultrametric(&m, 0.0).expect("well-formed matrix");
    (m, report)
}

/// Window of `{1/n} ∪ {3 - 1/m}` with `n, m ≤ 2k`, probing balls centred in the `k`-window.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanWindow {
    pub points: Vec<BigRational>,
    /// `S(1, 1) ∪ S(2, 1)` is the whole window.
    pub union_is_everything: bool,
    pub candidate_balls: usize,
    /// Every candidate ball misses some window point.
    pub every_ball_misses_a_point: bool,
}

/// Candidate balls have centres and attained radii taken from the `k`-window;
/// containment is tested against the `2k`-window.
pub fn euclidean_window(k: usize) -> EuclideanWindow {
    assert!(k >= 1);
    let three = int(3);
    let inner = |n: usize| BigRational::new(BigInt::from(1), BigInt::from(n as u64));
    let mut points = Vec::new();
    let mut small = Vec::new();
    for n in 1..=2 * k {
        points.push(inner(n));
        if n <= k {
            small.push(points.len() - 1);
        }
    }
    for m in 1..=2 * k {
        points.push(&three - inner(m));
        if m <= k {
            small.push(points.len() - 1);
        }
    }
    let dist = |a: &BigRational, b: &BigRational| if a > b { a - b } else { b - a };
    let in_ball = |c: &BigRational, r: &BigRational, x: &BigRational| dist(c, x) <= *r;

    let one = int(1);
    let two = int(2);
    let union_is_everything = points.iter().all(|x| in_ball(&one, &one, x) || in_ball(&two, &one, x));

    let mut candidate_balls = 0;
    let mut every_ball_misses_a_point = true;
    for &c in &small {
        for &y in &small {
            candidate_balls += 1;
            let r = dist(&points[c], &points[y]);
            if points.iter().all(|x| in_ball(&points[c], &r, x)) {
                every_ball_misses_a_point = false;
            }
        }
    }
    EuclideanWindow { points, union_is_everything, candidate_balls, every_ball_misses_a_point }
}
