//! Built-in fixture suite: every worked example with a known answer, replayed
//! deterministically.

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tropica_core::dequantify::possibility_check;
use tropica_core::filters::{classify, principal_filter, FamilyKind, SubsetFamily};
use tropica_core::nesting::{free_energy, nest, taylor_probe, NestType, ProbeOptions};
use tropica_core::scalar::{parse_rational, rational_pow};
use tropica_core::thermo::{
    copy_effect, shift_diagnostics, tropical_weights, usual_probability, Ensemble, MicroSystem, ShiftOptions,
};
use tropica_core::tropical::{
    check_finite_homomorphism, enumerate_join_semilattices, iota_homomorphism, iota_sections_almost_complete,
    is_almost_complete, is_grounded_subposet, phi_homomorphism, FiniteMonoid, HomViolation, SymbolicCarrier,
    TropicalMonoid, TropicalPolynomial,
};
use tropica_core::ultrametric::fixtures::{degenerate_fixture, euclidean_window};
use tropica_core::ultrametric::{
    ball_ideal_base, deinfinitate, filter_to_ultrametric, ideal_to_ultrametric, padic_norm, random_tree_ultrametric,
    roundtrip_check, verify_ultrametric, ConstructionOptions, DiameterFunction, Form, Monotonicity, TreeShape,
    UltrametricError, UltrametricMatrix,
};
use tropica_core::{BigRational, Extended, Mode, Subset};

use crate::report::{Cell, Inputs, RunReport, Table};
use crate::Global;

type Outcome = Result<(bool, String)>;

fn q(text: &str) -> BigRational {
    parse_rational(text).expect("fixture literal")
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn powerset_union_top() -> Outcome {
    let top = FiniteMonoid::powerset_union(3).erasing_element();
    Ok((top == Some(7), format!("{top:?}")))
}

fn max_plus_grounded() -> Outcome {
    let top = TropicalMonoid::Symbolic(SymbolicCarrier::MaxPlus).erasing_element()?;
    Ok((top.is_none(), format!("{top:?}")))
}

fn phi_always_homomorphism() -> Outcome {
    let mut count = 0;
    for n in 1..=5 {
        for m in enumerate_join_semilattices(n)? {
            if !phi_homomorphism(&m)?.holds {
                return Ok((false, format!("fails on {:?}", m.table())));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} monoids")))
}

fn iota_fails_on_diamond() -> Outcome {
    let labels = ["bot", "a", "b", "top"].iter().map(|s| s.to_string()).collect();
    let m = FiniteMonoid::from_order(labels, |x, y| x == y || x == 0 || y == 3)?;
    let check = iota_homomorphism(&m)?;
    let incomparable = matches!(check.witness, Some(HomViolation::Pair(x, y)) if !m.leq(x, y) && !m.leq(y, x));
    Ok((!check.holds && incomparable, format!("{:?}", check.witness)))
}

fn duplicate_monomial() -> Outcome {
    let r = |x: f64| Extended::Finite(x);
    let p = TropicalPolynomial::new(Mode::Max)
        .with_monomial(r(-1.0), vec![2, 0])
        .with_monomial(r(0.5), vec![1, 1])
        .with_monomial(r(2.0), vec![0, 0]);
    let dup = p.clone().with_monomial(r(0.5), vec![1, 1]);
    for i in 0..100 {
        let pt = [r(-5.0 + 0.1 * i as f64), r(3.0 - 0.07 * i as f64)];
        if p.eval(&pt)? != dup.eval(&pt)? {
            return Ok((false, format!("differs at grid point {i}")));
        }
    }
    Ok((true, "100 grid points".into()))
}

fn almost_complete_equivalence() -> Outcome {
    for n in 1..=5 {
        for m in enumerate_join_semilattices(n)? {
            if is_almost_complete(&m) != iota_sections_almost_complete(&m) {
                return Ok((false, format!("{:?}", m.table())));
            }
        }
    }
    Ok((true, "all monoids with at most 5 elements".into()))
}

/// Every map between semilattices of at most 3 elements that is a homomorphism
/// with a grounded image has a grounded source.
fn grounded_image() -> Outcome {
    let monoids: Vec<FiniteMonoid> =
        (1..=3).map(enumerate_join_semilattices).collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    let mut homs = 0;
    for src in &monoids {
        for tgt in &monoids {
            let total = tgt.len().pow(src.len() as u32);
            for code in 0..total {
                let map: Vec<usize> = (0..src.len()).map(|i| code / tgt.len().pow(i as u32) % tgt.len()).collect();
                if !check_finite_homomorphism(&map, src, tgt)?.holds {
                    continue;
                }
                homs += 1;
                let image = map.iter().fold(Subset::empty(), |s, &y| s.union(&Subset::singleton(y)));
                if is_grounded_subposet(tgt, &image) && !src.is_grounded() {
                    return Ok((false, format!("map {map:?}")));
                }
            }
        }
    }
    Ok((true, format!("{homs} homomorphisms")))
}

fn ultrafilter_at_one() -> Outcome {
    let family = SubsetFamily::new(3, (0..8u64).filter(|m| m & 1 == 1).map(Subset::from_mask))?;
    let c = classify(&family)?;
    Ok((c.kind == FamilyKind::Ultrafilter && c.principal_generator == Some(Subset::singleton(0)), format!("{:?}", c.kind)))
}

fn four_point_ball_ideal() -> Outcome {
    let d = [[0, 1, 3, 3], [1, 0, 3, 3], [3, 3, 0, 2], [3, 3, 2, 0]];
    let m = UltrametricMatrix::<BigRational>::from_fn(4, Form::MaxForm, |i, j| Extended::Finite(int(d[i][j])));
    let b = ball_ideal_base(&m, 0.0)?;
    Ok((b.ideal == SubsetFamily::power_set(4)? && !b.proper, format!("{} balls", b.base.len())))
}

fn euclidean_fails() -> Outcome {
    let w = euclidean_window(4);
    Ok((w.union_is_everything && w.every_ball_misses_a_point, format!("{} candidate balls", w.candidate_balls)))
}

fn degenerate_raised() -> Outcome {
    let fx = degenerate_fixture(12);
    let raised = matches!(fx.result, Err(UltrametricError::DegenerateDistance(0, 1)));
    Ok((raised && fx.limit == int(0), format!("limit {}", fx.limit)))
}

fn min_form_increasing() -> Outcome {
    let ideal = SubsetFamily::power_set(3)?;
    let diam = DiameterFunction::new(&ideal, Monotonicity::Increasing, |a| Extended::Finite(int(1 + a.len() as i64)));
    let m = ideal_to_ultrametric(&ideal, &diam, Form::MinForm, &ConstructionOptions::default())?;
    let v = verify_ultrametric(&m, 0.0)?;
    Ok((v.valid, format!("d(1,2) = {}", m.get(0, 1).render())))
}

fn ultrafilter_distances() -> Outcome {
    let filter = principal_filter(3, &Subset::singleton(0))?;
    let diam = DiameterFunction::new(&filter, Monotonicity::Increasing, |g| Extended::Finite(int(1 + g.len() as i64)));
    let raw = filter_to_ultrametric(&filter, &diam, &ConstructionOptions::default())?;
    let bounded = filter_to_ultrametric(&filter, &diam, &ConstructionOptions { deinfinitate: true, ..Default::default() })?;
    let ok = (1..3).all(|y| raw.get(0, y) == &Extended::PosInf && bounded.get(0, y) == &Extended::Finite(int(1)));
    Ok((ok, format!("D(1,2) = {}, g(D(1,2)) = {}", raw.get(0, 1).render(), bounded.get(0, 1).render())))
}

fn tree_roundtrips(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=12 {
        let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
        if !roundtrip_check(&m, 0.0)?.equal {
            return Ok((false, format!("{n} points")));
        }
    }
    Ok((true, "2..=12 points".into()))
}

fn deinfinitate_bound() -> Outcome {
    let g = deinfinitate::<BigRational>(&Extended::PosInf)?;
    Ok((g == int(1), g.to_string()))
}

fn padic_inverse_powers() -> Outcome {
    for p in [2u64, 3, 5, 7] {
        for n in -10i64..=10 {
            let x = rational_pow(&int(p as i64), -n);
            if padic_norm(&x, p)? != rational_pow(&int(p as i64), n) {
                return Ok((false, format!("p = {p}, n = {n}")));
            }
        }
    }
    Ok((true, "p in {2,3,5,7}, n in -10..=10".into()))
}

fn padic_zero() -> Outcome {
    let z = padic_norm(&int(0), 5)?;
    Ok((z == int(0), z.to_string()))
}

fn nesting_reversal() -> Outcome {
    let s = [3.0, 1.0, 3.0, 0.0];
    let a = nest(&s, NestType::A, 1e-9)?;
    let b = nest(&s, NestType::B, 1e-9)?;
    let mut rev = a.levels.clone();
    rev.reverse();
    Ok((rev == b.levels && a.levels.len() == 3, format!("{} levels", a.levels.len())))
}

fn free_energy_limit() -> Outcome {
    let s = [0.3, -0.2, 1.0, -0.2];
    for k in [0.1, 0.01, 0.001] {
        let f = free_energy(&s, k)?;
        if !(f <= -0.2 && f >= -0.2 - k * (s.len() as f64).ln()) {
            return Ok((false, format!("k = {k}: {f}")));
        }
    }
    Ok((true, "k in {0.1, 0.01, 0.001}".into()))
}

fn first_order_correction() -> Outcome {
    let r = taylor_probe(&[0.0, 0.0, 1.0], 2, &ProbeOptions::default())?;
    let first = r.entries[1].estimate;
    Ok((r.pass() && (first + 2f64.ln()).abs() <= 1e-6, format!("order 1 = {first:.9}")))
}

fn dual_shift_differences() -> Outcome {
    let sys = |e: i64, s: i64, t: i64| MicroSystem::new(int(e), int(s), int(t));
    let e = Ensemble::new(vec![sys(1, 2, 1), sys(0, -1, 3), sys(2, 1, -2)])?;
    let shifts: Vec<BigRational> = (-4..=4).map(int).collect();
    let r = shift_diagnostics(&e, &shifts, &ShiftOptions { tie_tol: 0.0, ..ShiftOptions::default() })?;
    Ok((r.outcomes.iter().all(|o| o.dual_differences_preserved), format!("{} shifts", r.outcomes.len())))
}

fn unique_minimiser_probability() -> Outcome {
    let f = [0.0, 1.0, 2.0];
    let inside = usual_probability(&f, &Subset::from_mask(0b011), 0.0)?;
    let outside = usual_probability(&f, &Subset::from_mask(0b110), 0.0)?;
    Ok((inside == int(1) && outside == int(0), format!("{inside}, {outside}")))
}

fn weights_normalised() -> Outcome {
    let tw = tropical_weights(&[q("1/2"), q("-3"), q("7/4")], &[q("1"), q("0"), q("-2")], &q("3/2"), 0.0, 0.0)?;
    let top = tw.big_w.iter().max().expect("nonempty").clone();
    Ok((top == int(0), format!("max W = {top}")))
}

fn copy_effect_two() -> Outcome {
    let (before, after) = copy_effect(&[0.0, 0.0, 1.0], 0, 0.0)?;
    Ok((before == q("1/2") && after == q("2/3"), format!("{before} -> {after}")))
}

fn possibility_two_minimisers() -> Outcome {
    let r = possibility_check(&[0.0, 0.0, 1.0], &[Subset::singleton(0), Subset::singleton(1)], 0.0)?;
    Ok((r.parts == [true, true] && r.union && r.tropical_additive && !r.real_additive, format!("{:?}", r.parts)))
}

fn possibility_unique_minimiser() -> Outcome {
    let r = possibility_check(&[0.0, 1.0, 2.0], &[Subset::from_mask(0b011), Subset::singleton(2)], 0.0)?;
    Ok((r.tropical_additive && r.real_additive, format!("{:?}", r.parts)))
}

pub fn run(g: &Global) -> Result<RunReport> {
    let seed = g.seed;
    let fixtures: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("powerset_union_top_is_full_set", Box::new(powerset_union_top)),
        ("max_plus_has_no_erasing_element", Box::new(max_plus_grounded)),
        ("phi_is_always_a_homomorphism", Box::new(phi_always_homomorphism)),
        ("iota_fails_on_diamond", Box::new(iota_fails_on_diamond)),
        ("duplicate_monomial_is_redundant", Box::new(duplicate_monomial)),
        ("almost_complete_iff_iota_sections", Box::new(almost_complete_equivalence)),
        ("grounded_image_grounded_source", Box::new(grounded_image)),
        ("ultrafilter_has_singleton_generator", Box::new(ultrafilter_at_one)),
        ("finite_ball_ideal_is_trivial", Box::new(four_point_ball_ideal)),
        ("euclidean_balls_are_no_base", Box::new(euclidean_fails)),
        ("degenerate_diameter_collapses", Box::new(degenerate_raised)),
        ("min_form_from_increasing_diameter", Box::new(min_form_increasing)),
        ("ultrafilter_distances_deinfinitate_to_one", Box::new(ultrafilter_distances)),
        ("tree_ultrametric_roundtrip", Box::new(move || tree_roundtrips(seed))),
        ("deinfinitation_bounded_by_one", Box::new(deinfinitate_bound)),
        ("padic_norm_of_inverse_powers", Box::new(padic_inverse_powers)),
        ("padic_norm_of_zero", Box::new(padic_zero)),
        ("nesting_b_reverses_a", Box::new(nesting_reversal)),
        ("free_energy_tends_to_minimum", Box::new(free_energy_limit)),
        ("first_order_is_minus_ln_lambda0", Box::new(first_order_correction)),
        ("dual_shift_keeps_differences", Box::new(dual_shift_differences)),
        ("unique_minimiser_probability", Box::new(unique_minimiser_probability)),
        ("tropical_weights_max_normalised", Box::new(weights_normalised)),
        ("copy_effect_half_to_two_thirds", Box::new(copy_effect_two)),
        ("possibility_two_minimisers", Box::new(possibility_two_minimisers)),
        ("possibility_unique_minimiser", Box::new(possibility_unique_minimiser)),
    ];
    let mut inputs = Inputs::default();
    inputs.add("seed", seed);
    inputs.add("fixtures", fixtures.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(","));
    let mut report = RunReport::new("selftest", &inputs);
    let mut t = Table::new(&["fixture", "pass", "detail"]);
    for (name, f) in &fixtures {
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e:#}")));
        t.push(vec![Cell::text(*name), pass.into(), Cell::text(&detail)]);
        report.check(*name, pass, detail);
    }
    report.table("fixtures", t);
    Ok(report)
}
