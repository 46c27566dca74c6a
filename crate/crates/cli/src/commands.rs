//! One function per pipeline subcommand; each returns a report with its assertions.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tropica_core::amoeba::{self, instability_scan, read_grid};
use tropica_core::dequantify::{dequantified_weight, possibility_check, CopySchedule};
use tropica_core::filters::{
    classify, dual, extend_base, measure_unchecked, principal_filter, Closure, FamilyJson, FamilyKind, SubsetFamily,
};
use tropica_core::nesting::{
    nest as nest_form, reconstruct_exact, reconstruct_log, taylor_probe, NestType, NestingForm, ProbeOptions,
};
use tropica_core::scalar::{parse_rational, rational_pow};
use tropica_core::subset::power_set;
use tropica_core::thermo::{self, duality_identity, shift_diagnostics, temperature_sweep, ShiftOptions};
use tropica_core::ultrametric::fixtures::{degenerate_fixture, euclidean_window, non_monotone_fixture};
use tropica_core::ultrametric::io::read_csv;
use tropica_core::ultrametric::{
    ball_ideal_base, padic_norm, padic_sample, random_tree_ultrametric, roundtrip_check, verify_ultrametric, Form,
    TreeShape, UltrametricError, UltrametricMatrix,
};
use tropica_core::{BigRational, NumericMode, Scalar, Subset};

use crate::input::{self, inline_or_file, read_file};
use crate::report::{set_text, Cell, Inputs, RunReport, Table};
use crate::Global;

fn mode_name(mode: NumericMode) -> &'static str {
    match mode {
        NumericMode::Exact => "exact",
        NumericMode::Float => "float",
    }
}

fn base_inputs(g: &Global) -> Inputs {
    let mut inputs = Inputs::default();
    inputs.add("mode", mode_name(g.mode));
    inputs.add("tie_tol", g.tie_tol().render());
    inputs
}

fn parse_nest_type(s: &str) -> Result<NestType, String> {
    match s {
        "A" | "a" => Ok(NestType::A),
        "B" | "b" => Ok(NestType::B),
        _ => Err(format!("unknown nesting type `{s}` (expected A|B)")),
    }
}

fn other(kind: NestType) -> NestType {
    match kind {
        NestType::A => NestType::B,
        NestType::B => NestType::A,
    }
}

fn kv_table(rows: Vec<(&str, Cell)>) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in rows {
        t.push(vec![Cell::text(k), v]);
    }
    t
}

#[derive(Debug, Args)]
pub struct NestArgs {
    /// Inline JSON or a file path.
    #[arg(long)]
    spectrum: String,
    #[arg(long = "type", default_value = "A", value_parser = parse_nest_type)]
    kind: NestType,
    /// Rational base for an exact reconstruction of an integer spectrum (exact mode).
    #[arg(long)]
    base: Option<String>,
}

pub fn nest(a: &NestArgs, g: &Global) -> Result<RunReport> {
    match g.mode {
        NumericMode::Exact => nest_with::<BigRational>(a, g),
        NumericMode::Float => {
            if a.base.is_some() {
                bail!("--base needs --mode exact");
            }
            nest_with::<f64>(a, g)
        }
    }
}

fn level_summary<T: Scalar>(nf: &NestingForm<T>) -> Vec<(Subset, String, usize)> {
    nf.levels.iter().map(|l| (l.indices.clone(), l.mu.render(), l.nu)).collect()
}

fn nest_with<T: Scalar>(a: &NestArgs, g: &Global) -> Result<RunReport> {
    let mut inputs = base_inputs(g);
    inputs.add("type", format!("{:?}", a.kind));
    if let Some(b) = &a.base {
        inputs.add("base", b);
    }
    let values: Vec<T> = input::spectrum(&a.spectrum, &mut inputs)?;
    let tie = g.tie_tol();
    let nf = nest_form(&values, a.kind, tie)?;
    let mut report = RunReport::new("nest", &inputs);

    let mut levels = Table::new(&["level", "indices", "mu", "nu"]);
    for (i, l) in nf.levels.iter().enumerate() {
        levels.push(vec![i.into(), Cell::set(&l.indices), Cell::num(&l.mu), l.nu.into()]);
    }
    report.table("levels", levels);

    let mut seen = Subset::empty();
    let mut disjoint = true;
    for l in &nf.levels {
        disjoint &= seen.is_disjoint(&l.indices) && l.nu == l.indices.len();
        seen = seen.union(&l.indices);
    }
    report.check(
        "levels_partition_spectrum",
        disjoint && seen == Subset::full(values.len()),
        format!("{} levels over {} values", nf.levels.len(), values.len()),
    );
    let monotone = nf.levels.windows(2).all(|w| match a.kind {
        NestType::A => w[0].mu > w[1].mu,
        NestType::B => w[0].mu < w[1].mu,
    });
    report.check("levels_strictly_monotone", monotone, "");
    let mut reversed = level_summary(&nest_form(&values, other(a.kind), tie)?);
    reversed.reverse();
    report.check("opposite_type_is_reversal", reversed == level_summary(&nf), "");

    // Compare in log space so large spectra do not overflow.
    let ln_nested = reconstruct_log(&nf);
    let top = values.iter().map(Scalar::to_f64).fold(f64::NEG_INFINITY, f64::max);
    let ln_direct = top + values.iter().map(|v| (v.to_f64() - top).exp()).sum::<f64>().ln();
    let rel = (ln_nested - ln_direct).exp_m1().abs();
    let mut rows = vec![
        ("ln_nested", Cell::float(ln_nested)),
        ("ln_direct", Cell::float(ln_direct)),
        ("relative_error", Cell::float(rel)),
    ];
    report.check("reconstruction_matches_direct_sum", rel <= 1e-12, format!("relative error {rel:.3e}"));

    if let Some(text) = &a.base {
        let base = parse_rational(text).ok_or_else(|| anyhow!("bad base `{text}`"))?;
        let exact: Vec<BigRational> =
            values.iter().map(|v| parse_rational(&v.render()).expect("exact scalars render as n/d")).collect();
        let exact_nf = nest_form(&exact, a.kind, 0.0)?;
        let nested = reconstruct_exact(&exact_nf, &base)?;
        let direct: BigRational = exact
            .iter()
            .map(|v| rational_pow(&base, v.to_integer().try_into().expect("checked integral above")))
            .sum();
        report.check("exact_reconstruction", nested == direct, "bit-exact equality with the direct sum");
        rows.push(("base_nested", Cell::num(&nested)));
        rows.push(("base_direct", Cell::num(&direct)));
    }
    report.table("reconstruction", kv_table(rows));
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    spectrum: String,
    /// Highest derivative order (2..=4).
    #[arg(long, default_value_t = 3)]
    orders: usize,
}

pub fn probe(a: &ProbeArgs, g: &Global) -> Result<RunReport> {
    let mut inputs = Inputs::default();
    inputs.add("orders", a.orders);
    inputs.add("tie_tol", g.float_tie_tol().render());
    let values: Vec<f64> = input::spectrum(&a.spectrum, &mut inputs)?;
    let opts = ProbeOptions { tie_tol: g.float_tie_tol(), ..ProbeOptions::default() };
    let r = taylor_probe(&values, a.orders, &opts)?;
    let mut report = RunReport::new("probe", &inputs);
    let mut t = Table::new(&["order", "estimate", "expected", "residual", "spread", "pass"]);
    for e in &r.entries {
        t.push(vec![
            e.order.into(),
            Cell::float(e.estimate),
            Cell::float(e.expected),
            Cell::float(e.residual),
            Cell::float(e.spread),
            e.pass.into(),
        ]);
        report.check(format!("probe_order_{}", e.order), e.pass, format!("residual {:.3e}", e.residual));
    }
    report.table("probe", t);
    report.table("levels", kv_table(vec![("kappa0", Cell::float(r.kappa0)), ("lambda0", r.lambda0.into())]));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Max,
    Min,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Form {
        match f {
            FormArg::Max => Form::MaxForm,
            FormArg::Min => Form::MinForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Degenerate,
    NonMonotone,
    Euclidean,
}

#[derive(Debug, Args)]
pub struct UltraArgs {
    /// Distance matrix CSV.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "max")]
    form: FormArg,
    /// Prime for a p-adic sample over `--points`.
    #[arg(long)]
    padic: Option<u64>,
    /// JSON list of rationals for `--padic`.
    #[arg(long)]
    points: Option<String>,
    /// Number of leaves of a seeded random tree ultrametric.
    #[arg(long)]
    tree: Option<usize>,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

pub fn ultra(a: &UltraArgs, g: &Global) -> Result<RunReport> {
    let sources = [a.matrix.is_some(), a.padic.is_some(), a.tree.is_some(), a.fixture.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        bail!("give exactly one of --matrix, --padic, --tree, --fixture");
    }
    let mut inputs = base_inputs(g);
    inputs.add("form", format!("{:?}", a.form));
    if let Some(f) = a.fixture {
        inputs.add("fixture", format!("{f:?}"));
        return ultra_fixture(f, &inputs);
    }
    if let Some(path) = &a.matrix {
        let text = read_file(path)?;
        inputs.add("matrix", &text);
        return match g.mode {
            NumericMode::Exact => ultra_matrix(read_csv::<BigRational>(&text, a.form.into())?, g, inputs, None),
            NumericMode::Float => ultra_matrix(read_csv::<f64>(&text, a.form.into())?, g, inputs, None),
        };
    }
    let (m, extra) = if let Some(p) = a.padic {
        let text = a.points.as_deref().ok_or_else(|| anyhow!("--padic needs --points"))?;
        inputs.add("padic", p);
        inputs.add("points", text);
        let numbers: Vec<tropica_core::schema::Number> = serde_json::from_str(text)?;
        let pts = numbers.iter().map(|n| n.parse::<BigRational>()).collect::<Result<Vec<_>, _>>().map_err(|e| anyhow!(e))?;
        let mut norms = Table::new(&["point", "value", "norm"]);
        for (i, q) in pts.iter().enumerate() {
            norms.push(vec![(i + 1).into(), Cell::num(q), Cell::num(&padic_norm(q, p)?)]);
        }
        (padic_sample(&pts, p)?, Some(("norms", norms)))
    } else {
        let n = a.tree.expect("one source is present");
        inputs.add("tree", n);
        inputs.add("seed", g.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        (random_tree_ultrametric(n, TreeShape::default(), &mut rng).with_form(a.form.into()), None)
    };
    match g.mode {
        NumericMode::Exact => ultra_matrix(m, g, inputs, extra),
        NumericMode::Float => ultra_matrix(m.to_f64(), g, inputs, extra),
    }
}

fn matrix_table<T: Scalar>(m: &UltrametricMatrix<T>) -> Table {
    let mut columns = vec!["point".to_string()];
    columns.extend(m.points().iter().cloned());
    let mut t = Table::with_columns(columns);
    for (label, row) in m.points().iter().zip(m.rows()) {
        let mut cells = vec![Cell::text(label)];
        cells.extend(row.iter().map(Cell::ext));
        t.push(cells);
    }
    t
}

fn ultra_matrix<T: Scalar>(
    m: UltrametricMatrix<T>,
    g: &Global,
    inputs: Inputs,
    extra: Option<(&str, Table)>,
) -> Result<RunReport> {
    let tol = g.tie_tol();
    let mut report = RunReport::new("ultra", &inputs);
    report.table("matrix", matrix_table(&m));
    if let Some((name, t)) = extra {
        report.table(name, t);
    }
    let v = verify_ultrametric(&m, tol)?;
    let worst = v.worst.as_ref().map(|w| format!("{} {} {} excess {}", w.x + 1, w.y + 1, w.z + 1, w.excess.render()));
    report.table(
        "verify",
        kv_table(vec![
            ("form", Cell::text(format!("{:?}", m.form()))),
            ("valid", v.valid.into()),
            ("algebraic_valid", v.algebraic_valid.into()),
            ("forms_agree", v.forms_agree.into()),
            ("positive", v.positive.into()),
            ("worst", worst.clone().map(Cell::Text).into()),
        ]),
    );
    report.check("triangle_inequality", v.valid, worst.unwrap_or_default());
    report.check("algebraic_reduction_agrees", v.forms_agree, "");
    if v.valid && m.form() == Form::MaxForm {
        let b = ball_ideal_base(&m, tol)?;
        let mut balls = Table::new(&["ball"]);
        for s in b.base.members() {
            balls.push(vec![Cell::set(s)]);
        }
        report.table("balls", balls);
        let trivial = b.ideal == SubsetFamily::power_set(m.len())? && !b.proper;
        report.check("ball_ideal_is_trivial", trivial, format!("{} balls", b.base.len()));
    }
    Ok(report)
}

fn ultra_fixture(f: Fixture, inputs: &Inputs) -> Result<RunReport> {
    let mut report = RunReport::new("ultra", inputs);
    match f {
        Fixture::Degenerate => {
            let fx = degenerate_fixture(12);
            let mut t = Table::new(&["k", "d12"]);
            for (k, d) in &fx.truncations {
                t.push(vec![(*k).into(), Cell::num(d)]);
            }
            report.table("truncations", t);
            report.table("limit", kv_table(vec![("d12", Cell::num(&fx.limit))]));
            let raised = matches!(fx.result, Err(UltrametricError::DegenerateDistance(0, 1)));
            report.check("degenerate_distance_raised", raised, format!("{:?}", fx.result.as_ref().err()));
        }
        Fixture::NonMonotone => {
            let (m, v) = non_monotone_fixture();
            report.table("matrix", matrix_table(&m));
            report.check("non_monotone_fails_max_form", !v.valid, format!("worst {:?}", v.worst.map(|w| (w.x + 1, w.y + 1, w.z + 1))));
        }
        Fixture::Euclidean => {
            let w = euclidean_window(4);
            report.table(
                "window",
                kv_table(vec![
                    ("points", w.points.len().into()),
                    ("union_is_everything", w.union_is_everything.into()),
                    ("candidate_balls", w.candidate_balls.into()),
                    ("every_ball_misses_a_point", w.every_ball_misses_a_point.into()),
                ]),
            );
            report.check("euclidean_ball_base_fails", w.union_is_everything && w.every_ball_misses_a_point, "");
        }
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Seed matrix CSV (max form); otherwise seeded random trees.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long = "max-points", default_value_t = 12)]
    max_points: usize,
}

/// Seeded tree ultrametrics; case `i` uses its own stream so results do not
/// depend on scheduling.
pub fn tree_cases(seed: u64, cases: usize, max_points: usize) -> Vec<UltrametricMatrix<BigRational>> {
    (0..cases)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let n = rng.gen_range(2..=max_points.max(2));
            random_tree_ultrametric(n, TreeShape::default(), &mut rng)
        })
        .collect()
}

pub fn roundtrip(a: &RoundtripArgs, g: &Global) -> Result<RunReport> {
    let mut inputs = base_inputs(g);
    let seeds: Vec<UltrametricMatrix<BigRational>> = match &a.matrix {
        Some(path) => {
            let text = read_file(path)?;
            inputs.add("matrix", &text);
            vec![read_csv::<BigRational>(&text, Form::MaxForm)?]
        }
        None => {
            if a.max_points < 2 {
                bail!("--max-points must be at least 2");
            }
            inputs.add("cases", a.cases);
            inputs.add("max_points", a.max_points);
            inputs.add("seed", g.seed);
            tree_cases(g.seed, a.cases, a.max_points)
        }
    };
    let tol = g.tie_tol();
    let rows: Vec<(usize, bool, f64)> = match g.mode {
        NumericMode::Exact => seeds
            .par_iter()
            .map(|m| roundtrip_check(m, tol).map(|r| (m.len(), r.equal, r.max_deviation)))
            .collect::<Result<_, _>>()?,
        NumericMode::Float => seeds
            .par_iter()
            .map(|m| roundtrip_check(&m.to_f64(), tol).map(|r| (m.len(), r.equal, r.max_deviation)))
            .collect::<Result<_, _>>()?,
    };
    let mut report = RunReport::new("roundtrip", &inputs);
    let mut t = Table::new(&["case", "points", "equal", "max_deviation"]);
    for (i, (n, eq, dev)) in rows.iter().enumerate() {
        t.push(vec![(i + 1).into(), (*n).into(), (*eq).into(), Cell::float(*dev)]);
    }
    report.table("cases", t);
    let failed = rows.iter().filter(|r| !r.1).count();
    report.check("roundtrip_reproduces_seed", failed == 0, format!("{failed} of {} cases differ", rows.len()));
    Ok(report)
}

#[derive(Debug, Args)]
pub struct FiltersArgs {
    /// `{"ground": n, "members": [[..], ..]}` inline or a file path.
    #[arg(long)]
    family: String,
    /// Treat the family as a base and close it first.
    #[arg(long, value_enum)]
    extend: Option<ClosureArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClosureArg {
    Filter,
    Ideal,
}

/// Measures are tabulated over the whole power set only up to this ground size.
const MEASURE_TABLE_LIMIT: usize = 10;

fn family_table(f: &SubsetFamily) -> Table {
    let mut t = Table::new(&["member"]);
    for s in f.members() {
        t.push(vec![Cell::set(s)]);
    }
    t
}

pub fn filters(a: &FiltersArgs, _g: &Global) -> Result<RunReport> {
    let mut inputs = Inputs::default();
    let text = inline_or_file(&a.family, "family", &mut inputs)?;
    let json: FamilyJson = serde_json::from_str(&text)?;
    let mut family = SubsetFamily::from_json(&json)?;
    if let Some(c) = a.extend {
        inputs.add("extend", format!("{c:?}"));
        family = extend_base(&family, match c {
            ClosureArg::Filter => Closure::Filter,
            ClosureArg::Ideal => Closure::Ideal,
        })?;
    }
    let n = family.ground();
    let cert = classify(&family)?;
    let mut report = RunReport::new("filters", &inputs);
    report.table("members", family_table(&family));
    report.table(
        "classification",
        kv_table(vec![
            ("kind", Cell::text(format!("{:?}", cert.kind).to_uppercase())),
            ("proper", cert.proper.into()),
            ("generator", cert.principal_generator.as_ref().map(|z| Cell::Text(set_text(z))).into()),
        ]),
    );
    let d = dual(&family);
    report.table("dual", family_table(&d));
    report.check("dual_is_involution", dual(&d) == family, "");

    if let (FamilyKind::Filter | FamilyKind::Ultrafilter, Some(zeta)) = (cert.kind, &cert.principal_generator) {
        report.check("filter_is_principal", principal_filter(n, zeta)? == family, format!("generator {}", set_text(zeta)));
        if cert.proper && n <= MEASURE_TABLE_LIMIT {
            let subsets: Vec<Subset> = power_set(n).collect();
            let measures: Vec<Option<u8>> = subsets.iter().map(|x| measure_unchecked(&family, x).value()).collect();
            let mut t = Table::new(&["subset", "measure"]);
            for (x, m) in subsets.iter().zip(&measures) {
                t.push(vec![Cell::set(x), m.map(|v| Cell::int(v)).into()]);
            }
            report.table("measure", t);
            let total = measures.iter().all(Option::is_some);
            if cert.kind == FamilyKind::Ultrafilter {
                report.check("ultrafilter_measure_is_total", total, "");
            }
            // Finite additivity on disjoint pairs where all three values are defined.
            let additive = subsets.iter().enumerate().all(|(i, x)| {
                subsets.iter().enumerate().all(|(j, y)| {
                    if !x.is_disjoint(y) {
                        return true;
                    }
                    let u = x.union(y).mask() as usize;
                    match (measures[i], measures[j], measures[u]) {
                        (Some(p), Some(q), Some(r)) => p + q == r,
                        _ => true,
                    }
                })
            });
            report.check("measure_finitely_additive", additive, "");
        }
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    /// Thermo model JSON inline or a file path.
    #[arg(long)]
    model: String,
    /// Comma-separated energy shifts for the shift diagnostics.
    #[arg(long, allow_hyphen_values = true)]
    shifts: Option<String>,
}

pub fn thermo(a: &ThermoArgs, g: &Global) -> Result<RunReport> {
    match g.mode {
        NumericMode::Exact => thermo_with::<BigRational>(a, g),
        NumericMode::Float => thermo_with::<f64>(a, g),
    }
}

fn thermo_with<T: Scalar>(a: &ThermoArgs, g: &Global) -> Result<RunReport> {
    let mut inputs = base_inputs(g);
    let text = inline_or_file(&a.model, "model", &mut inputs)?;
    if let Some(list) = &a.shifts {
        inputs.add("shifts", list);
    }
    let model: thermo::ModelJson = serde_json::from_str(&text)?;
    let e = model.ensemble::<T>()?;
    let tie = g.tie_tol.or(model.tie_tol).unwrap_or(g.mode.tie_tolerance());
    let k_b = model.k_b.unwrap_or(0.0);
    let mut report = RunReport::new("thermo", &inputs);

    let mut systems = Table::new(&["label", "E", "S", "T", "F"]);
    for (label, m) in e.labels.iter().zip(&e.systems) {
        systems.push(vec![
            Cell::text(label),
            Cell::num(&m.energy),
            Cell::num(&m.entropy),
            Cell::num(&m.temperature),
            Cell::num(&m.free_energy()),
        ]);
    }
    report.table("systems", systems);

    let d = duality_identity(&e, tie)?;
    let mut duality = Table::new(&["form", "value", "extremal_set"]);
    duality.push(vec![Cell::text("b_min"), Cell::num(&d.b_value), Cell::set(&d.b_argmin)]);
    duality.push(vec![Cell::text("a_max_negated"), Cell::num(&d.a_value), Cell::set(&d.a_argmax)]);
    duality.push(vec![Cell::text("inverted_min"), Cell::num(&d.inverted_value), Cell::set(&d.inverted_argmin)]);
    report.table("duality", duality);
    report.check("duality_identity", d.holds, format!("b = {}", d.b_value.render()));

    if e.common_temperature().is_some() {
        let tw = e.tropical_weights(k_b, tie)?;
        let mut t = Table::new(&["label", "w", "W"]);
        for (i, label) in e.labels.iter().enumerate() {
            t.push(vec![Cell::text(label), Cell::num(&tw.w[i]), Cell::num(&tw.big_w[i])]);
        }
        report.table("weights", t);
        if k_b == 0.0 {
            let top = tw.big_w.iter().map(Scalar::to_f64).fold(f64::NEG_INFINITY, f64::max);
            report.check("weights_max_normalised", top == 0.0, format!("max W = {}", top.render()));
        }
    }
    if let Some((lo, hi, steps)) = &model.sweep {
        let lo: T = lo.parse().map_err(|e| anyhow!(e))?;
        let hi: T = hi.parse().map_err(|e| anyhow!(e))?;
        let mut t = Table::new(&["T", "F", "argmin", "W"]);
        for row in temperature_sweep(&e, &lo, &hi, *steps, k_b, tie)? {
            let w: Vec<String> = row.weights.iter().map(Scalar::render).collect();
            t.push(vec![Cell::num(&row.temperature), Cell::num(&row.free_energy), Cell::set(&row.argmin), Cell::text(w.join(" "))]);
        }
        report.table("sweep", t);
    }
    if let Some(list) = &a.shifts {
        let shifts = list
            .split(',')
            .map(|s| T::parse(s).ok_or_else(|| anyhow!("bad shift `{s}`")))
            .collect::<Result<Vec<T>>>()?;
        let r = shift_diagnostics(&e, &shifts, &ShiftOptions { tie_tol: tie, ..ShiftOptions::default() })?;
        let mut t = Table::new(&[
            "shift",
            "argmin_before",
            "argmin_after",
            "argmin_preserved",
            "order_changed",
            "dual_differences_preserved",
        ]);
        for o in &r.outcomes {
            t.push(vec![
                Cell::num(&o.shift),
                Cell::set(&o.argmin_before),
                Cell::set(&o.argmin_after),
                o.argmin_preserved.into(),
                o.order_changed.into(),
                o.dual_differences_preserved.into(),
            ]);
        }
        report.table("shifts", t);
        if let Some(w) = &r.witness {
            report.table(
                "witness",
                kv_table(vec![
                    ("shift", Cell::num(&w.shift)),
                    ("pair", Cell::text(format!("{} {}", w.pair.0 + 1, w.pair.1 + 1))),
                    ("before", Cell::text(format!("{:?}", w.before))),
                    ("after", Cell::text(format!("{:?}", w.after))),
                ]),
            );
        }
        if r.equilibrium {
            report.check("equilibrium_argmin_invariance", r.equilibrium_invariance_holds(), "");
        }
        report.check(
            "dual_differences_preserved",
            r.outcomes.iter().all(|o| o.dual_differences_preserved),
            "",
        );
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct DequantifyArgs {
    #[arg(long)]
    spectrum: String,
    /// 1-based index of the system whose weight is followed.
    #[arg(long)]
    alpha: usize,
    #[arg(long, default_value = "pow2:12")]
    schedule: String,
    /// Optional partition `[[1],[2]]` for the possibility check.
    #[arg(long)]
    partition: Option<String>,
}

pub fn dequantify(a: &DequantifyArgs, g: &Global) -> Result<RunReport> {
    let mut inputs = Inputs::default();
    inputs.add("alpha", a.alpha);
    inputs.add("schedule", &a.schedule);
    let tie = g.float_tie_tol();
    inputs.add("tie_tol", tie.render());
    let f: Vec<f64> = input::spectrum(&a.spectrum, &mut inputs)?;
    let alpha = input::label(a.alpha, f.len(), "--alpha")?;
    let schedule = CopySchedule::parse(&a.schedule)?;
    if let Some(p) = &a.partition {
        inputs.add("partition", p);
    }
    let r = dequantified_weight(&f, alpha, &schedule, tie)?;
    let mut report = RunReport::new("dequantify", &inputs);
    let mut t = Table::new(&["N", "kB", "w", "gap"]);
    for row in &r.table {
        t.push(vec![Cell::int(row.copies), Cell::float(row.k_b), Cell::float(row.weight), Cell::float(row.gap)]);
    }
    report.table("convergence", t);
    report.table(
        "summary",
        kv_table(vec![
            ("dominant", r.dominant.into()),
            ("lambda0", r.lambda0.into()),
            ("limit", Cell::float(r.limit)),
            ("rate_constant", Cell::float(r.rate_constant)),
            ("log_slope", r.log_slope.map(Cell::float).into()),
        ]),
    );
    if let Some(ok) = r.converged {
        let last = r.table.last().expect("schedule is nonempty");
        report.check("dequantified_limit", ok, format!("final gap {:.3e} at N = {}", last.gap, last.copies));
    }
    if let Some(p) = &a.partition {
        let parts = input::subsets(p)?;
        let pr = possibility_check(&f, &parts, tie)?;
        let mut t = Table::new(&["part", "w0"]);
        for (s, w) in parts.iter().zip(&pr.parts) {
            t.push(vec![Cell::set(s), Cell::int(*w as u8)]);
        }
        report.table("possibility", t);
        report.table(
            "additivity",
            kv_table(vec![
                ("union", Cell::int(pr.union as u8)),
                ("tropical_additive", pr.tropical_additive.into()),
                ("real_additive", pr.real_additive.into()),
            ]),
        );
        report.check("possibility_max_additive", pr.tropical_additive, "");
        report.check("possibility_consistent", pr.consistent, format!("lambda0 = {}", pr.lambda0));
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct AmoebaArgs {
    /// Amoeba model JSON inline or a file path.
    #[arg(long)]
    model: String,
    /// Overrides `k` from the model.
    #[arg(long)]
    k: Option<usize>,
    /// Grid CSV with header `point,f1,..,fN`.
    #[arg(long)]
    grid: PathBuf,
}

pub fn amoeba(a: &AmoebaArgs, _g: &Global) -> Result<RunReport> {
    let mut inputs = Inputs::default();
    let text = inline_or_file(&a.model, "model", &mut inputs)?;
    let model_json: amoeba::ModelJson = serde_json::from_str(&text)?;
    let model = model_json.model(a.k)?;
    inputs.add("k", model.k());
    let grid_text = read_file(&a.grid)?;
    inputs.add("grid", &grid_text);
    let grid = read_grid(&grid_text, model.n())?;
    let scan = instability_scan(&model, &grid)?;
    let mut report = RunReport::new("amoeba", &inputs);
    let mut t = Table::new(&["point", "count", "flagged", "alpha", "trace_holds", "identity_holds"]);
    for r in &scan.rows {
        t.push(vec![
            Cell::text(&r.label),
            r.count.into(),
            r.flagged.into(),
            r.alpha.map(|x| x + 1).into(),
            r.trace_holds.into(),
            r.identity_holds.into(),
        ]);
    }
    report.table("scan", t);
    let flagged = scan.rows.iter().filter(|r| r.flagged).count();
    report.table(
        "summary",
        kv_table(vec![
            ("N", model.n().into()),
            ("k", model.k().into()),
            ("max_cardinality", Cell::int(scan.max_cardinality as i128)),
            ("flagged", flagged.into()),
            ("trace_failures", Cell::text(labels(&scan.trace_failures, &scan))),
        ]),
    );
    report.check("weight_identity", scan.rows.iter().all(|r| r.identity_holds), "");
    report.check("intersecting_family_bound", scan.bound_exceeded.is_empty(), labels(&scan.bound_exceeded, &scan));
    // At 2k = N maximal intersecting families need not be stars; failures there are findings.
    if 2 * model.k() < model.n() {
        report.check("ultrafilter_trace_at_flagged_points", scan.trace_failures.is_empty(), labels(&scan.trace_failures, &scan));
    }
    Ok(report)
}

fn labels(rows: &[usize], scan: &amoeba::ScanResult) -> String {
    rows.iter().map(|&i| scan.rows[i].label.as_str()).collect::<Vec<_>>().join(" ")
}
