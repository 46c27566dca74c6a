use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropica_core::filters::{classify, dual, extend_base, principal_filter, Closure, FamilyKind, SubsetFamily};
use tropica_core::scalar::parse_rational;
use tropica_core::ultrametric::fixtures::{degenerate_fixture, euclidean_window, non_monotone_fixture};
use tropica_core::ultrametric::io::{read_csv, write_csv};
use tropica_core::ultrametric::{
    ball, ball_ideal_base, deinfinitate, filter_to_ultrametric, ideal_to_ultrametric, padic_norm, padic_sample,
    random_tree_ultrametric, roundtrip_check, ultradiameter, verify_ultrametric, ConstructionOptions,
    DiameterFunction, Form, Monotonicity, TreeShape, UltrametricError, UltrametricMatrix,
};
use tropica_core::{BigRational, Extended, Subset};

fn q(text: &str) -> BigRational {
    parse_rational(text).unwrap()
}

fn fin(x: f64) -> Extended<f64> {
    Extended::Finite(x)
}

fn triple(a: f64, b: f64, c: f64) -> UltrametricMatrix<f64> {
    // d(1,2) = a, d(1,3) = b, d(2,3) = c.
    UltrametricMatrix::from_fn(3, Form::MaxForm, |i, j| fin(match (i, j) {
        (0, 1) => a,
        (0, 2) => b,
        _ => c,
    }))
}

/// Independent oracle: in every triple the two largest distances agree.
fn isoceles(m: &UltrametricMatrix<BigRational>) -> bool {
    let n = m.len();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let mut v = [m.get(x, y).clone(), m.get(x, z).clone(), m.get(y, z).clone()];
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if v[1] != v[2] {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn triangle_examples() {
    let eq = triple(1.0, 1.0, 1.0);
    assert!(verify_ultrametric(&eq, 1e-12).unwrap().valid);
    assert!(verify_ultrametric(&eq.clone().with_form(Form::MinForm), 1e-12).unwrap().valid);
    assert!(verify_ultrametric(&triple(1.0, 2.0, 2.0), 1e-12).unwrap().valid);
    let bad = verify_ultrametric(&triple(1.0, 2.0, 4.0), 1e-12).unwrap();
    assert!(!bad.valid && !bad.algebraic_valid && bad.forms_agree);
    let w = bad.worst.unwrap();
    let mut pts = [w.x, w.y, w.z];
    pts.sort();
    assert_eq!(pts, [0, 1, 2]);
}

#[test]
fn balls_and_their_centres() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(2..=9);
        let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
        assert_eq!(ball(&m, 0, &Extended::zero()).unwrap(), Subset::singleton(0));
        assert_eq!(ball(&m, 0, &m.max_distance()).unwrap(), Subset::full(n));
        for c in 0..n {
            for r in 0..n {
                let radius = m.get(c, r).clone();
                let s = ball(&m, c, &radius).unwrap();
                for y in s.iter() {
                    assert_eq!(ball(&m, y, &radius).unwrap(), s);
                }
            }
        }
    }
    assert_eq!(ball(&triple(1.0, 1.0, 1.0), 5, &fin(1.0)), Err(UltrametricError::UnknownPoint(5)));
}

#[test]
fn ball_ideal_is_trivial_for_finite_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(2..=7);
        let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
        let balls = ball_ideal_base(&m, 0.0).unwrap();
        assert!(!balls.proper);
        assert!(balls.ideal.contains(&Subset::full(n)));
        // Any two balls sit inside a common ball.
        for a in balls.base.members() {
            for b in balls.base.members() {
                let u = a.union(b);
                assert!(balls.base.members().iter().any(|c| u.is_subset(c)));
            }
        }
    }
}

#[test]
fn euclidean_balls_do_not_form_a_base() {
    let w = euclidean_window(6);
    assert!(w.union_is_everything);
    assert!(w.candidate_balls > 0);
    assert!(w.every_ball_misses_a_point);
}

#[test]
fn decreasing_diameter_on_power_set() {
    let ideal = SubsetFamily::power_set(3).unwrap();
    let diam = DiameterFunction::new(&ideal, Monotonicity::Decreasing, |a| fin(4.0 - a.len() as f64));
    let m = ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default()).unwrap();
    for x in 0..3 {
        for y in 0..3 {
            assert_eq!(*m.get(x, y), fin(if x == y { 0.0 } else { 1.0 }));
        }
    }
    let inc = DiameterFunction::new(&ideal, Monotonicity::Increasing, |a| fin(1.0 + a.len() as f64));
    let m = ideal_to_ultrametric(&ideal, &inc, Form::MinForm, &ConstructionOptions::default()).unwrap();
    assert_eq!(m.form(), Form::MinForm);
    assert!(verify_ultrametric(&m, 1e-12).unwrap().valid);
    // Wrong monotonicity for the max form.
    let err = ideal_to_ultrametric(&ideal, &inc, Form::MaxForm, &ConstructionOptions::default());
    assert!(err.is_err());
}

#[test]
fn uncovered_ideal_is_rejected() {
    let ideal = extend_base(&SubsetFamily::from_labels(3, &[vec![1, 2]]).unwrap(), Closure::Ideal).unwrap();
    let diam = DiameterFunction::new(&ideal, Monotonicity::Decreasing, |a| fin(4.0 - a.len() as f64));
    let err = ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default()).unwrap_err();
    assert_eq!(err, UltrametricError::CoverageError(vec![3]));
}

#[test]
fn degenerate_truncations_approach_zero() {
    let fx = degenerate_fixture(10);
    for (k, d) in &fx.truncations {
        let expected = BigRational::one() / BigRational::from_integer((1u64 << k).into());
        assert_eq!(*d, expected, "K = {k}");
    }
    assert_eq!(fx.limit, BigRational::from_integer(0.into()));
    assert!(matches!(fx.result, Err(UltrametricError::DegenerateDistance(..))));
}

#[test]
fn non_monotone_diameter_breaks_the_triangle() {
    let (_, report) = non_monotone_fixture();
    assert!(!report.valid);
    assert!(report.forms_agree);
}

#[test]
fn ultrafilter_distances_deinfinitate_to_one() {
    let u = principal_filter(3, &Subset::singleton(0)).unwrap();
    assert_eq!(classify(&u).unwrap().kind, FamilyKind::Ultrafilter);
    let diam = DiameterFunction::new(&u, Monotonicity::Increasing, |g| fin(1.0 + g.len() as f64));
    let m = filter_to_ultrametric(&u, &diam, &ConstructionOptions::default()).unwrap();
    for y in 1..3 {
        assert_eq!(*m.get(0, y), Extended::PosInf);
        assert_eq!(deinfinitate(m.get(0, y)).unwrap(), 1.0);
    }
    let opts = ConstructionOptions { deinfinitate: true, ..ConstructionOptions::default() };
    let g = filter_to_ultrametric(&u, &diam, &opts).unwrap();
    assert_eq!(*g.get(0, 1), fin(1.0));
}

#[test]
fn two_point_trivial_filter() {
    let seed = UltrametricMatrix::from_fn(2, Form::MaxForm, |_, _| fin(5.0));
    let filter = SubsetFamily::power_set(2).unwrap();
    let diam = DiameterFunction::ultradiameter(&seed, &filter);
    let m = filter_to_ultrametric(&filter, &diam, &ConstructionOptions::relaxed()).unwrap();
    assert_eq!(*m.get(0, 1), fin(5.0));
}

#[test]
fn ultradiameter_conventions() {
    let m = triple(1.0, 2.0, 2.0);
    assert_eq!(ultradiameter(&m, &Subset::full(3)), Extended::zero());
    assert_eq!(ultradiameter(&m, &Subset::empty()), fin(2.0));
    assert_eq!(ultradiameter(&m, &Subset::singleton(2)), fin(1.0));
}

#[test]
fn deinfinitation() {
    assert_eq!(deinfinitate(&fin(1.0)).unwrap(), 0.5);
    assert_eq!(deinfinitate::<f64>(&Extended::PosInf).unwrap(), 1.0);
    assert!(deinfinitate(&fin(0.0)).is_err());
    let mut last = 0.0;
    for i in 1..200 {
        let g = deinfinitate(&fin(i as f64 * 0.05)).unwrap();
        assert!(g > last && g < 1.0);
        last = g;
    }
}

#[test]
fn padic_norms() {
    assert_eq!(padic_norm(&q("1/8"), 2).unwrap(), q("8"));
    assert_eq!(padic_norm(&q("1/125"), 5).unwrap(), q("125"));
    assert_eq!(padic_norm(&q("0"), 3).unwrap(), q("0"));
    assert_eq!(padic_norm(&q("12"), 2).unwrap(), q("1/4"));
    assert!(padic_norm(&q("3"), 4).is_err());
}

#[test]
fn padic_sample_roundtrips() {
    for p in [2u64, 3, 5, 7] {
        let pts: Vec<BigRational> = ["0", "1", &p.to_string(), &(p * p).to_string(), &format!("1/{p}")]
            .iter()
            .map(|s| q(s))
            .collect();
        let m = padic_sample(&pts, p).unwrap();
        assert!(verify_ultrametric(&m, 0.0).unwrap().valid);
        assert!(roundtrip_check(&m, 0.0).unwrap().equal);
    }
}

#[test]
fn tree_seeds_roundtrip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 2..=12 {
        for _ in 0..3 {
            let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
            let v = verify_ultrametric(&m, 0.0).unwrap();
            assert!(v.valid && v.algebraic_valid && v.positive);
            assert!(isoceles(&m));
            let rt = roundtrip_check(&m, 0.0).unwrap();
            assert!(rt.equal);
            assert_eq!(rt.max_deviation, 0.0);
        }
    }
}

#[test]
fn csv_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = random_tree_ultrametric(5, TreeShape::default(), &mut rng);
    let text = write_csv(&m);
    let back = read_csv::<BigRational>(&text, Form::MaxForm).unwrap();
    assert_eq!(back, m);
    let with_inf = read_csv::<f64>("a,b\n0,inf\ninf,0\n", Form::MaxForm).unwrap();
    assert_eq!(*with_inf.get(0, 1), Extended::PosInf);
}

#[test]
fn dual_of_ball_ideal_is_a_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = random_tree_ultrametric(6, TreeShape::default(), &mut rng);
    let filter = dual(&ball_ideal_base(&m, 0.0).unwrap().ideal);
    assert!(matches!(classify(&filter).unwrap().kind, FamilyKind::Filter | FamilyKind::Ultrafilter));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triangle_and_algebraic_checks_agree(seed in any::<u64>(), n in 3usize..7, perturb in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
        let m = if perturb {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let bump = q(&format!("{}/4", rng.gen_range(1..8)));
            UltrametricMatrix::from_fn(n, Form::MaxForm, |x, y| {
                let d = m.get(x, y).clone();
                if (x, y) == (i.min(j), i.max(j)) { d.as_finite().map(|v| Extended::Finite(v + &bump)).unwrap() } else { d }
            })
        } else {
            m
        };
        let report = verify_ultrametric(&m, 0.0).unwrap();
        prop_assert!(report.forms_agree);
        prop_assert_eq!(report.valid, isoceles(&m));
    }

    #[test]
    fn ideal_construction_is_ultrametric(n in 2usize..5, weights in proptest::collection::vec(1u32..5, 4)) {
        // 𝔡(A) = c - Σ w_i over A, decreasing and positive.
        let ideal = SubsetFamily::power_set(n).unwrap();
        let total: u32 = weights.iter().take(n).sum();
        let diam = DiameterFunction::new(&ideal, Monotonicity::Decreasing, |a| {
            Extended::Finite(BigRational::from_integer((1 + total - a.iter().map(|i| weights[i]).sum::<u32>()).into()))
        });
        let m = ideal_to_ultrametric(&ideal, &diam, Form::MaxForm, &ConstructionOptions::default()).unwrap();
        prop_assert!(verify_ultrametric(&m, 0.0).unwrap().valid);
    }
}
