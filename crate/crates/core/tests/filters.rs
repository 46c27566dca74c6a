use proptest::prelude::*;
use tropica_core::filters::{
    classify, dual, extend_base, filter_measure, is_filter, principal_filter, principal_ideal, Closure, FamilyKind,
    FilterError, Measure, SubsetFamily,
};
use tropica_core::subset::power_set;
use tropica_core::Subset;

fn labels(l: &[usize]) -> Subset {
    Subset::from_labels(l).unwrap()
}

fn family_from_mask(ground: usize, mask: u64) -> SubsetFamily {
    let members = (0..1u64 << ground).filter(|s| mask >> s & 1 == 1).map(Subset::from_mask);
    SubsetFamily::new(ground, members).unwrap()
}

#[test]
fn classification_examples() {
    let ultra = principal_filter(3, &labels(&[1])).unwrap();
    let cert = classify(&ultra).unwrap();
    assert_eq!(cert.kind, FamilyKind::Ultrafilter);
    assert_eq!(cert.principal_generator, Some(labels(&[1])));

    let f12 = principal_filter(3, &labels(&[1, 2])).unwrap();
    assert_eq!(f12.len(), 2);
    let cert = classify(&f12).unwrap();
    assert_eq!(cert.kind, FamilyKind::Filter);
    assert!(cert.proper);
    assert_eq!(cert.principal_generator, Some(labels(&[1, 2])));

    let cert = classify(&SubsetFamily::power_set(2).unwrap()).unwrap();
    assert_eq!(cert.kind, FamilyKind::Filter);
    assert!(!cert.proper);

    assert_eq!(SubsetFamily::new(3, Vec::new()).map(|f| classify(&f)), Ok(Err(FilterError::EmptyFamily)));
}

#[test]
fn dual_of_small_ideal() {
    let ideal = SubsetFamily::from_labels(2, &[vec![], vec![1]]).unwrap();
    assert_eq!(classify(&ideal).unwrap().kind, FamilyKind::Ideal);
    let filter = dual(&ideal);
    assert_eq!(filter, SubsetFamily::from_labels(2, &[vec![1, 2], vec![2]]).unwrap());
    assert!(matches!(classify(&filter).unwrap().kind, FamilyKind::Filter | FamilyKind::Ultrafilter));
}

#[test]
fn duals_of_ultrafilters_are_maximal_ideals() {
    for i in 1..=3 {
        let ideal = dual(&principal_filter(3, &labels(&[i])).unwrap());
        let cert = classify(&ideal).unwrap();
        assert_eq!(cert.kind, FamilyKind::Ideal);
        assert!(cert.proper);
        // Maximal: adding any missing set reaches the full set under closure.
        for s in power_set(3) {
            if !ideal.contains(&s) {
                let grown = SubsetFamily::new(3, ideal.members().iter().cloned().chain([s])).unwrap();
                assert!(extend_base(&grown, Closure::Ideal).map_or(true, |f| f.contains(&Subset::full(3))));
            }
        }
    }
}

#[test]
fn principal_families() {
    let f = principal_filter(2, &labels(&[1])).unwrap();
    assert_eq!(f, SubsetFamily::from_labels(2, &[vec![1], vec![1, 2]]).unwrap());
    assert_eq!(principal_ideal(3, &Subset::full(3)).unwrap(), SubsetFamily::power_set(3).unwrap());
    assert_eq!(principal_filter(3, &Subset::empty()).unwrap(), SubsetFamily::power_set(3).unwrap());
    assert_eq!(classify(&principal_ideal(3, &labels(&[2, 3])).unwrap()).unwrap().kind, FamilyKind::Ideal);
}

#[test]
fn base_extension() {
    let base = SubsetFamily::from_labels(3, &[vec![1], vec![1, 2]]).unwrap();
    let filter = extend_base(&base, Closure::Filter).unwrap();
    let expected = SubsetFamily::from_labels(3, &[vec![1], vec![1, 2], vec![1, 3], vec![1, 2, 3]]).unwrap();
    assert_eq!(filter, expected);

    let omega = SubsetFamily::new(3, [Subset::full(3)]).unwrap();
    assert_eq!(extend_base(&omega, Closure::Filter).unwrap(), omega);

    let split = SubsetFamily::from_labels(3, &[vec![1], vec![2]]).unwrap();
    assert!(matches!(extend_base(&split, Closure::Filter), Err(FilterError::NotABase { .. })));
}

#[test]
fn measure_examples() {
    let ultra = principal_filter(3, &labels(&[1])).unwrap();
    assert_eq!(filter_measure(&ultra, &labels(&[1, 2])).unwrap(), Measure::One);
    assert_eq!(filter_measure(&ultra, &labels(&[3])).unwrap(), Measure::Zero);
    let f12 = principal_filter(3, &labels(&[1, 2])).unwrap();
    assert_eq!(filter_measure(&f12, &labels(&[2])).unwrap(), Measure::Undefined);
    assert_eq!(filter_measure(&f12, &Subset::empty()).unwrap(), Measure::Zero);
    let improper = SubsetFamily::power_set(3).unwrap();
    assert_eq!(filter_measure(&improper, &Subset::empty()), Err(FilterError::NotAProperFilter));
}

#[test]
fn every_filter_on_small_ground_sets_is_principal() {
    for n in 1..=4usize {
        let mut filters = 0;
        for mask in 1..1u64 << (1 << n) {
            let family = family_from_mask(n, mask);
            if is_filter(&family) {
                filters += 1;
                let zeta = family.meet();
                assert_eq!(family, principal_filter(n, &zeta).unwrap());
            }
        }
        // One filter per generator.
        assert_eq!(filters, 1 << n);
    }
}

#[test]
fn ultrafilter_measure_is_total_and_additive() {
    let n = 4;
    for i in 0..n {
        let u = principal_filter(n, &Subset::singleton(i)).unwrap();
        for x in power_set(n) {
            let a = filter_measure(&u, &x).unwrap().value().unwrap();
            let b = filter_measure(&u, &x.complement(n)).unwrap().value().unwrap();
            assert_eq!(a + b, 1);
        }
        // Disjoint triples partitioning subsets of the ground set.
        for x in power_set(n) {
            for y in power_set(n) {
                if !x.is_disjoint(&y) {
                    continue;
                }
                let z = x.union(&y).complement(n);
                let sum: u8 = [&x, &y, &z].iter().map(|s| filter_measure(&u, s).unwrap().value().unwrap()).sum();
                assert_eq!(sum, 1);
            }
        }
    }
}

#[test]
fn defined_values_are_additive_for_general_filters() {
    let n = 4;
    let f = principal_filter(n, &labels(&[1, 2])).unwrap();
    for x in power_set(n) {
        for y in power_set(n) {
            if !x.is_disjoint(&y) {
                continue;
            }
            let parts = [filter_measure(&f, &x).unwrap(), filter_measure(&f, &y).unwrap()];
            let whole = filter_measure(&f, &x.union(&y)).unwrap();
            if let (Some(a), Some(b), Some(c)) = (parts[0].value(), parts[1].value(), whole.value()) {
                assert_eq!(a + b, c);
                assert!(a + b <= 1);
            }
        }
    }
}

fn arb_family() -> impl Strategy<Value = SubsetFamily> {
    (1usize..=5).prop_flat_map(|n| {
        proptest::collection::btree_set(0u64..1 << n, 1..12)
            .prop_map(move |ms| SubsetFamily::new(n, ms.into_iter().map(Subset::from_mask)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_is_an_involution(f in arb_family()) {
        prop_assert_eq!(dual(&dual(&f)), f);
    }

    #[test]
    fn dual_swaps_filters_and_ideals(f in arb_family()) {
        let kind = classify(&f).unwrap().kind;
        let flipped = classify(&dual(&f)).unwrap().kind;
        match kind {
            FamilyKind::Ideal => prop_assert!(matches!(flipped, FamilyKind::Filter | FamilyKind::Ultrafilter)),
            FamilyKind::Filter | FamilyKind::Ultrafilter if f.len() < (1 << f.ground()) => {
                prop_assert_eq!(flipped, FamilyKind::Ideal)
            }
            _ => {}
        }
    }

    #[test]
    fn extended_bases_classify_as_their_kind(f in arb_family()) {
        if let Ok(filter) = extend_base(&f, Closure::Filter) {
            prop_assert!(matches!(classify(&filter).unwrap().kind, FamilyKind::Filter | FamilyKind::Ultrafilter));
        }
        if let Ok(ideal) = extend_base(&f, Closure::Ideal) {
            let kind = classify(&ideal).unwrap().kind;
            // The full power set reports as a filter.
            prop_assert!(kind == FamilyKind::Ideal || ideal.len() == 1 << f.ground());
        }
    }
}
