//! `tropica`: runs spectra, models and fixtures through the tropical-limit pipelines.
//!
//! Exit status: 0 on success, 1 on input or usage errors, 2 when an asserted
//! invariant fails (the failing invariants are named on stderr).

mod commands;
mod input;
mod report;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tropica_core::NumericMode;

use report::{Format, RunReport};

const SCHEMA_HELP: &str = "\
Input schemas (all JSON schemas accept \"version\": 1; unknown fields are rejected):
  spectrum   [3, 1, \"1/2\"]  or  {\"version\": 1, \"spectrum\": [...]}, inline or a file path
  family     {\"ground\": n, \"members\": [[1, 2], [1]]} with 1-based labels
  matrix     CSV: header row of point labels, then one row of distances per point (`inf` allowed)
  thermo     {\"version\": 1, \"systems\": [{\"label\": \"a\", \"E\": 1, \"S\": \"1/2\", \"T\": 2}],
              \"kB\": 0, \"tie_tol\": 1e-9, \"sweep\": [T_min, T_max, steps]}
  amoeba     {\"version\": 1, \"N\": 5, \"k\": 2, \"allow_large\": false}
  grid       CSV with header point,f1,..,fN
  schedule   pow2:M (N = 2..2^M, kB = 1/N) or list:a,b,c";

#[derive(Debug, Parser)]
#[command(name = "tropica", version, about = "Tropical-limit toolkit", after_help = SCHEMA_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Arithmetic: exact rationals or floats.
    #[arg(long, global = true, default_value = "float", value_parser = parse_mode)]
    pub mode: NumericMode,
    /// Seed for every random generator.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Tie tolerance for level grouping (default: 1e-9 in float mode, 0 in exact mode).
    #[arg(long = "tie-tol", global = true)]
    pub tie_tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

impl Global {
    pub fn tie_tol(&self) -> f64 {
        self.tie_tol.unwrap_or(self.mode.tie_tolerance())
    }

    /// For pipelines that always run in floating point.
    pub fn float_tie_tol(&self) -> f64 {
        self.tie_tol.unwrap_or(tropica_core::scalar::FLOAT_TIE_TOLERANCE)
    }
}

fn parse_mode(s: &str) -> Result<NumericMode, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nesting form of a spectrum and its reconstruction.
    Nest(commands::NestArgs),
    /// Extrapolated Taylor coefficients of the free energy at k = 0.
    Probe(commands::ProbeArgs),
    /// Verify an ultrametric (file, p-adic sample, random tree or fixture).
    Ultra(commands::UltraArgs),
    /// Ultrametric -> ball ideal -> dual filter -> ultrametric.
    Roundtrip(commands::RoundtripArgs),
    /// Classify a subset family; duals, measures and closures.
    Filters(commands::FiltersArgs),
    /// Tropical free energies, A/B duality and shift diagnostics.
    Thermo(commands::ThermoArgs),
    /// Gibbs weights with copies along a kB = 1/N schedule.
    Dequantify(commands::DequantifyArgs),
    /// Negative-weight families and the ultrafilter trace over a grid.
    Amoeba(commands::AmoebaArgs),
    /// Replay the built-in fixture suite.
    Selftest,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TROPICA_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("TROPICA_THREADS=`{v}` is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<RunReport> {
    configure_threads()?;
    let g = &cli.global;
    match &cli.command {
        Command::Nest(a) => commands::nest(a, g),
        Command::Probe(a) => commands::probe(a, g),
        Command::Ultra(a) => commands::ultra(a, g),
        Command::Roundtrip(a) => commands::roundtrip(a, g),
        Command::Filters(a) => commands::filters(a, g),
        Command::Thermo(a) => commands::thermo(a, g),
        Command::Dequantify(a) => commands::dequantify(a, g),
        Command::Amoeba(a) => commands::amoeba(a, g),
        Command::Selftest => selftest::run(g),
    }
}

fn emit(report: &RunReport, g: &Global) -> Result<()> {
    match &g.out {
        Some(path) => {
            for p in report.emit(g.format, path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            let body = match g.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv_stream(),
            };
            std::io::stdout().lock().write_all(body.as_bytes()).context("writing stdout")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{SCHEMA_HELP}");
            return ExitCode::from(1);
        }
    };
    let report = match run(&cli).and_then(|r| emit(&r, &cli.global).map(|()| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let failures: Vec<_> = report.failures().collect();
    if failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    for a in failures {
        eprintln!("assertion failed: {} ({})", a.name, a.detail);
    }
    ExitCode::from(2)
}
