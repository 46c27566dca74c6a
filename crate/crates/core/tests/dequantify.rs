use proptest::prelude::*;
use tropica_core::dequantify::{
    dequantified_weight, gibbs_weights, gibbs_with_copies, gibbs_with_multiplicities, multiplicity_weights,
    possibility_check, t_closure, t_map, CopyIndex, CopySchedule, CopySet, DequantifyError, KbRule,
};
use tropica_core::{BigRational, Subset};

fn c(alpha: usize, n: u64) -> CopyIndex {
    CopyIndex::new(alpha, n).unwrap()
}

fn copy_set() -> impl Strategy<Value = CopySet> {
    (
        proptest::collection::vec((0usize..4, 1u64..8), 0..8),
        proptest::collection::vec((0usize..4, 1u64..8), 0..2),
    )
        .prop_map(|(loose, tails)| {
            let base = CopySet::from_indices(loose.into_iter().map(|(a, n)| c(a, n)));
            tails.into_iter().fold(base, |acc, (a, s)| acc.union(&CopySet::tail(a, s)))
        })
}

#[test]
fn copy_maps() {
    let x = CopySet::from_indices([c(0, 1)]);
    assert_eq!(t_map(&x), CopySet::from_indices([c(0, 1), c(0, 2)]));
    assert!(t_map(&CopySet::new()).is_empty());
    assert_eq!(t_closure(&x), CopySet::tail(0, 1));
    let from3 = t_closure(&CopySet::from_indices([c(2, 3)]));
    assert!(!from3.contains(c(2, 2)) && from3.contains(c(2, 3)) && from3.contains(c(2, 1000)));
    assert!(t_closure(&CopySet::new()).is_empty());
    assert_eq!(format!("{:?}", CopySet::from_indices([c(0, 2)])), "{(1,2)}");
}

#[test]
fn gibbs_examples() {
    assert_eq!(gibbs_weights(&[0.0, 0.0], 0.3).unwrap(), vec![0.5, 0.5]);
    let k = 0.7;
    let w = gibbs_weights(&[0.0, k * 2f64.ln()], k).unwrap();
    assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
    let w = gibbs_weights(&[0.0, 10.0], 0.01).unwrap();
    assert_eq!(w[0], 1.0);
    assert!(w[1] <= (-1000f64).exp().max(f64::MIN_POSITIVE));
    assert_eq!(gibbs_weights(&[0.0], 0.0), Err(DequantifyError::InvalidBoltzmann));
}

#[test]
fn copy_weight_examples() {
    assert!((gibbs_with_copies(&[0.0, 0.0], 0, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let f = [0.2, -0.4, 1.3];
    let plain = gibbs_weights(&f, 1.0).unwrap();
    for (a, w) in plain.iter().enumerate() {
        assert!((gibbs_with_copies(&f, a, 1).unwrap() - w).abs() < 1e-15);
    }
    // Unique minimum: the copy weight is 1 up to e^{-N}.
    let w = gibbs_with_copies(&[0.0, 1.0], 0, 100).unwrap();
    assert!((w - 1.0).abs() <= 1e-12);
    // With a doubled minimum the finite-N value is N/(N+1).
    let w = gibbs_with_copies(&[0.0, 0.0, 1.0], 0, 100).unwrap();
    assert!((w - 100.0 / 101.0).abs() <= 1e-12);
    assert_eq!(gibbs_with_copies(&[0.0], 0, 0), Err(DequantifyError::ZeroCopy));
}

#[test]
fn dequantified_limits() {
    let f = [0.0, 0.0, 1.0];
    let sched = CopySchedule::pow2(12).unwrap();
    let dom = dequantified_weight(&f, 0, &sched, 1e-9).unwrap();
    assert!(dom.dominant && dom.converged == Some(true));
    for row in &dom.table {
        assert!(row.gap <= 1.0 / row.copies as f64 + 1e-12);
    }
    assert!(dom.table.last().unwrap().gap <= 1e-3);

    let rest = dequantified_weight(&f, 2, &CopySchedule::pow2(7).unwrap(), 1e-9).unwrap();
    assert!(!rest.dominant && rest.converged == Some(true));
    let last = rest.table.last().unwrap();
    assert!(last.gap <= 1e-30);
    for row in &rest.table {
        let n = row.copies as f64;
        assert!(row.gap <= n * (-n).exp() + 1e-300);
    }

    let flat = [0.5; 4];
    for a in 0..4 {
        let r = dequantified_weight(&flat, a, &sched, 1e-9).unwrap();
        assert_eq!(r.lambda0, 4);
        assert_eq!(r.converged, Some(true));
    }
}

#[test]
fn fixed_schedules_are_not_asserted() {
    let sched = CopySchedule::new(vec![1, 2, 4], KbRule::Fixed(0.5)).unwrap();
    let r = dequantified_weight(&[0.0, 1.0], 0, &sched, 1e-9).unwrap();
    assert_eq!(r.converged, None);
    assert!(r.table.iter().all(|row| row.k_b == 0.5));
}

#[test]
fn schedule_parsing() {
    assert_eq!(CopySchedule::parse("pow2:3").unwrap().copies(), &[2, 4, 8]);
    assert_eq!(CopySchedule::parse("list:1, 5,9").unwrap().copies(), &[1, 5, 9]);
    assert!(matches!(CopySchedule::parse("geom:3"), Err(DequantifyError::ScheduleSyntax(_))));
    assert_eq!(CopySchedule::parse("list:4,2"), Err(DequantifyError::InvalidSchedule));
}

#[test]
fn possibility_examples() {
    let f = [0.0, 0.0, 1.0, 2.0];
    let r = possibility_check(&f, &[Subset::singleton(0), Subset::singleton(1)], 1e-9).unwrap();
    assert_eq!(r.parts, vec![true, true]);
    assert!(r.union && r.tropical_additive && !r.real_additive && r.consistent);

    let r = possibility_check(&f, &[Subset::singleton(2), Subset::singleton(3)], 1e-9).unwrap();
    assert_eq!(r.parts, vec![false, false]);
    assert!(!r.union && r.tropical_additive && r.real_additive);

    let unique = [0.0, 1.0, 2.0];
    let r = possibility_check(&unique, &[Subset::from_mask(0b011), Subset::singleton(2)], 1e-9).unwrap();
    assert!(r.tropical_additive && r.real_additive && r.consistent);

    let overlap = possibility_check(&f, &[Subset::from_mask(0b011), Subset::from_mask(0b110)], 1e-9);
    assert_eq!(overlap.unwrap_err(), DequantifyError::NotDisjoint(1, 2));
}

#[test]
fn global_copies_leave_rational_weights_unchanged() {
    let factors: Vec<BigRational> = [(1, 1), (1, 3), (2, 7), (5, 11)]
        .iter()
        .map(|&(a, b)| BigRational::new(a.into(), b.into()))
        .collect();
    let once = multiplicity_weights(&factors, &[1; 4]);
    for n in [2u64, 7, 1000] {
        assert_eq!(multiplicity_weights(&factors, &[n; 4]), once);
    }
}

proptest! {
    #[test]
    fn closure_is_extensive_monotone_idempotent(x in copy_set(), y in copy_set()) {
        let cx = t_closure(&x);
        prop_assert!(x.is_subset(&cx));
        prop_assert!(cx.is_closed());
        prop_assert_eq!(t_closure(&cx), cx.clone());
        let xy = x.union(&y);
        prop_assert!(cx.is_subset(&t_closure(&xy)));
        prop_assert!(x.is_subset(&t_map(&x)));
        prop_assert_eq!(t_map(&cx), cx);
    }

    #[test]
    fn closed_sets_are_closed_under_intersection(x in copy_set(), y in copy_set()) {
        let meet = t_closure(&x).intersection(&t_closure(&y));
        prop_assert_eq!(t_closure(&meet), meet);
    }

    #[test]
    fn t_map_at_most_doubles(x in copy_set()) {
        if let Some(n) = x.finite_len() {
            prop_assert!(t_map(&x).finite_len().unwrap() <= 2 * n);
        }
    }

    #[test]
    fn gibbs_weights_sum_to_one(f in proptest::collection::vec(-1e3f64..1e3, 1..40), k in 1e-4f64..1e3) {
        let total: f64 = gibbs_weights(&f, k).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn global_float_copies_match_to_rounding(f in proptest::collection::vec(-3.0f64..3.0, 1..10), n in 1u64..50, k in 0.1f64..5.0) {
        let once = gibbs_weights(&f, k).unwrap();
        let copied = gibbs_with_multiplicities(&f, &vec![n; f.len()], k).unwrap();
        for (a, b) in once.iter().zip(&copied) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn limits_form_the_minimiser_indicator(
        lambda0 in 1usize..4,
        gaps in proptest::collection::vec(0.1f64..2.0, 0..5),
    ) {
        let mut f = vec![0.0; lambda0];
        let mut level = 0.0;
        for g in &gaps {
            level += g;
            f.push(level);
        }
        let sched = CopySchedule::pow2(12).unwrap();
        for a in 0..f.len() {
            let r = dequantified_weight(&f, a, &sched, 1e-9).unwrap();
            prop_assert_eq!(r.dominant, a < lambda0);
            prop_assert_eq!(r.converged, Some(true));
            if r.dominant {
                let c = r.table.iter().filter(|row| row.copies >= 64).map(|row| row.gap * row.copies as f64).fold(0.0, f64::max);
                prop_assert!(c <= lambda0 as f64);
            }
        }
    }
}
