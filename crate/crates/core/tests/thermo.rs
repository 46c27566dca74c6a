use proptest::prelude::*;
use tropica_core::scalar::parse_rational;
use tropica_core::subset::power_set;
use tropica_core::thermo::{
    ab_dual, copy_effect, duality_identity, micro_free_energy, shift_diagnostics, tropical_free_energy_b,
    tropical_weights, usual_probability, Ensemble, MicroSystem, ModelJson, ShiftOptions, ThermoError,
};
use tropica_core::{BigRational, Subset};

fn sys(e: f64, s: f64, t: f64) -> MicroSystem<f64> {
    MicroSystem::new(e, s, t)
}

fn q(text: &str) -> BigRational {
    parse_rational(text).unwrap()
}

#[test]
fn micro_free_energies() {
    assert_eq!(micro_free_energy(&sys(1.0, 0.0, 2.0)), 1.0);
    assert_eq!(micro_free_energy(&sys(1.0, 1.0, 1.0)), 0.0);
    assert_eq!(micro_free_energy(&sys(3.0, 2.0, 0.5)), 2.0);
}

#[test]
fn b_type_free_energy() {
    let e = Ensemble::new(vec![sys(0.0, 0.0, 1.0), sys(1.0, 0.0, 1.0)]).unwrap();
    assert_eq!(tropical_free_energy_b(&e, 1e-9).unwrap(), (0.0, Subset::singleton(0)));
    let e = Ensemble::new(vec![sys(1.0, 0.0, 1.0), sys(1.0, 0.0, -1.0)]).unwrap();
    assert_eq!(tropical_free_energy_b(&e, 1e-9).unwrap(), (-1.0, Subset::singleton(1)));
    let e = Ensemble::new(vec![sys(3.0, 1.0, 2.0)]).unwrap();
    assert_eq!(tropical_free_energy_b(&e, 1e-9).unwrap().0, 0.5);
    let e = Ensemble::new(vec![sys(3.0, 1.0, 0.0)]).unwrap();
    assert_eq!(tropical_free_energy_b(&e, 1e-9), Err(ThermoError::ZeroTemperature(0)));
}

#[test]
fn dual_swaps_and_inverts() {
    let e = Ensemble::new(vec![sys(2.0, 3.0, 4.0)]).unwrap();
    let d = ab_dual(&e).unwrap();
    assert_eq!(d.systems[0], sys(3.0, 2.0, 0.25));
    let fixed = Ensemble::new(vec![sys(1.5, 1.5, 1.0), sys(-2.0, -2.0, -1.0)]).unwrap();
    assert_eq!(ab_dual(&fixed).unwrap(), fixed);
}

#[test]
fn duality_on_single_and_equilibrium_ensembles() {
    let one = Ensemble::new(vec![sys(2.0, 0.5, 3.0)]).unwrap();
    assert!(duality_identity(&one, 1e-9).unwrap().holds);
    let eq = Ensemble::new(vec![sys(1.0, 0.5, 2.0), sys(0.0, -1.0, 2.0), sys(3.0, 1.0, 2.0)]).unwrap();
    let r = duality_identity(&eq, 1e-9).unwrap();
    assert!(r.holds);
    assert_eq!(r.b_value, r.a_value);
    assert_eq!(r.b_argmin, r.a_argmax);
}

#[test]
fn exact_duality() {
    let systems = vec![
        MicroSystem::new(q("1/3"), q("2"), q("-5/7")),
        MicroSystem::new(q("4"), q("-1/2"), q("3")),
        MicroSystem::new(q("0"), q("1"), q("1/9")),
    ];
    let e = Ensemble::new(systems).unwrap();
    let r = duality_identity(&e, 0.0).unwrap();
    assert!(r.holds);
    assert_eq!(r.b_value, r.inverted_value);
    assert_eq!(ab_dual(&ab_dual(&e).unwrap()).unwrap(), e);
}

#[test]
fn shifts_at_equilibrium_keep_the_argmin() {
    let e = Ensemble::new(vec![sys(1.0, 0.5, 2.0), sys(0.0, -1.0, 2.0), sys(0.5, 0.0, 2.0)]).unwrap();
    let shifts: Vec<f64> = (-5..=5).map(|s| s as f64).collect();
    let r = shift_diagnostics(&e, &shifts, &ShiftOptions::default()).unwrap();
    assert!(r.equilibrium);
    assert!(r.equilibrium_invariance_holds());
    assert!(r.outcomes.iter().all(|o| o.dual_differences_preserved));
    assert!(r.witness.is_none());
}

#[test]
fn unequal_temperatures_flip_a_tie() {
    let e = Ensemble::new(vec![sys(0.0, 0.0, 1.0), sys(0.0, 0.0, 2.0)]).unwrap();
    let r = shift_diagnostics(&e, &[2.0], &ShiftOptions::default()).unwrap();
    assert!(!r.equilibrium);
    let o = &r.outcomes[0];
    assert!(o.order_changed);
    assert_eq!(o.argmin_before, Subset::full(2));
    assert_eq!(o.argmin_after, Subset::singleton(1));
    assert!(o.dual_differences_preserved);
    let w = r.witness.expect("a flipping shift exists on the grid");
    assert_eq!(w.pair, (0, 1));
    assert_ne!(w.before, w.after);
}

#[test]
fn usual_probability_examples() {
    let f = [0.0, 1.0, 2.0];
    assert_eq!(usual_probability(&f, &Subset::from_mask(0b001), 1e-9).unwrap(), q("1"));
    assert_eq!(usual_probability(&f, &Subset::from_mask(0b110), 1e-9).unwrap(), q("0"));
    let f = [0.0, 0.0, 2.0];
    assert_eq!(usual_probability(&f, &Subset::singleton(0), 1e-9).unwrap(), q("1/2"));
    assert_eq!(usual_probability(&f, &Subset::full(3), 1e-9).unwrap(), q("1"));
    assert!(matches!(usual_probability(&f, &Subset::singleton(5), 1e-9), Err(ThermoError::OutOfRange { .. })));
}

#[test]
fn usual_probability_is_a_measure() {
    for n in 1..=5usize {
        for pattern in 0..1u32 << n {
            // Levels 0/1 give every possible minimiser set.
            let f: Vec<f64> = (0..n).map(|i| (pattern >> i & 1) as f64).collect();
            assert_eq!(usual_probability(&f, &Subset::full(n), 0.0).unwrap(), q("1"));
            for x in power_set(n) {
                for y in power_set(n) {
                    if x.is_disjoint(&y) {
                        let sum = usual_probability(&f, &x, 0.0).unwrap() + usual_probability(&f, &y, 0.0).unwrap();
                        assert_eq!(usual_probability(&f, &x.union(&y), 0.0).unwrap(), sum);
                    }
                }
            }
        }
    }
}

#[test]
fn weight_examples() {
    let free = [0.0, 1.0, 3.0];
    let entropy = [0.5, 0.0, -1.0];
    let tw = tropical_weights(&free, &entropy, &1.0, 0.0, 1e-9).unwrap();
    assert_eq!(tw.big_w[0], 0.0);
    assert!(tw.big_w[1] < 0.0 && tw.big_w[2] < 0.0);
    assert_eq!(tw.w[0], -0.5);

    let tw = tropical_weights(&[0.0, 0.0, 1.0], &[0.0; 3], &2.0, 0.25, 1e-9).unwrap();
    let top = -0.25 * 2f64.ln();
    assert!((tw.big_w[0] - top).abs() < 1e-15 && (tw.big_w[1] - top).abs() < 1e-15);
    assert_eq!(tropical_weights(&free, &entropy, &0.0, 0.0, 1e-9), Err(ThermoError::NonpositiveTemperature));
}

#[test]
fn copy_effect_examples() {
    let one = BigRational::from_integer(1.into());
    assert_eq!(copy_effect(&[0.0, 1.0], 0, 1e-9).unwrap(), (one.clone(), one));
    assert_eq!(copy_effect(&[0.0, 0.0, 1.0], 1, 1e-9).unwrap(), (q("1/2"), q("2/3")));
    assert_eq!(copy_effect(&[0.0, 0.0, 0.0], 2, 1e-9).unwrap(), (q("1/3"), q("1/2")));
    assert_eq!(copy_effect(&[0.0, 1.0], 1, 1e-9), Err(ThermoError::NotAMinimizer(2)));
}

#[test]
fn model_json_roundtrip() {
    let text = r#"{"systems": [{"label": "a", "E": 1, "S": "1/4", "T": 2}, {"label": "b", "E": 0, "S": 0, "T": 2}], "kB": 0.0}"#;
    let model: ModelJson = serde_json::from_str(text).unwrap();
    let e = model.ensemble::<BigRational>().unwrap();
    assert_eq!(e.labels, vec!["a".to_string(), "b".to_string()]);
    assert_eq!(e.systems[0].entropy, q("1/4"));
    let tw = e.tropical_weights(0.0, 0.0).unwrap();
    assert_eq!(tw.m0, Subset::singleton(1));
    assert!(serde_json::from_str::<ModelJson>(r#"{"systems": [], "bogus": 1}"#).is_err());
}

fn ensemble() -> impl Strategy<Value = Ensemble<f64>> {
    proptest::collection::vec(
        (-10.0f64..10.0, -10.0f64..10.0, prop_oneof![0.1f64..5.0, -5.0f64..-0.1]),
        1..=20,
    )
    .prop_map(|v| Ensemble::new(v.into_iter().map(|(e, s, t)| sys(e, s, t)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn duality_holds_on_random_ensembles(e in ensemble()) {
        let r = duality_identity(&e, 1e-9).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        let scale = r.b_value.abs().max(1.0);
        prop_assert!((r.b_value - r.a_value).abs() <= 1e-12 * scale);
        prop_assert!((r.b_value - r.inverted_value).abs() <= 1e-12 * scale);
    }

    #[test]
    fn dual_is_an_involution(e in ensemble()) {
        let back = ab_dual(&ab_dual(&e).unwrap()).unwrap();
        for (a, b) in e.systems.iter().zip(&back.systems) {
            prop_assert_eq!(a.energy, b.energy);
            prop_assert_eq!(a.entropy, b.entropy);
            prop_assert!((a.temperature - b.temperature).abs() <= 1e-15 * a.temperature.abs());
        }
    }

    #[test]
    fn zero_boltzmann_weights_are_max_normalised(free in proptest::collection::vec(-5.0f64..5.0, 1..15), t in 0.1f64..4.0) {
        let entropy = vec![0.0; free.len()];
        let tw = tropical_weights(&free, &entropy, &t, 0.0, 1e-9).unwrap();
        for (i, w) in tw.big_w.iter().enumerate() {
            prop_assert!(*w <= 0.0);
            prop_assert_eq!(*w == 0.0, tw.m0.contains(i));
        }
    }

    #[test]
    fn equilibrium_shifts_preserve_argmin(e in ensemble(), t in 0.1f64..5.0, shift in -10.0f64..10.0) {
        let systems = e.systems.iter().map(|m| sys(m.energy, m.entropy, t)).collect();
        let eq = Ensemble::new(systems).unwrap();
        let exact: Vec<MicroSystem<BigRational>> = eq.systems.iter().map(|m| MicroSystem::new(
            BigRational::from_float(m.energy).unwrap(),
            BigRational::from_float(m.entropy).unwrap(),
            BigRational::from_float(m.temperature).unwrap(),
        )).collect();
        let exact = Ensemble::new(exact).unwrap();
        let r = shift_diagnostics(&exact, &[BigRational::from_float(shift).unwrap()], &ShiftOptions { tie_tol: 0.0, ..ShiftOptions::default() }).unwrap();
        prop_assert!(r.equilibrium_invariance_holds());
    }
}
