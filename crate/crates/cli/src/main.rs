//! `oscibo`: exact harmonic ground states and Born-Oppenheimer comparisons.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error,
//! 3 solver non-convergence, 4 I/O error.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oscibo_core::harmonic::NewtonOptions;
use oscibo_core::verify::VerifyOptions;

use commands::{Axis, Quantity, Spacing, SweepSpec};
use config::{FileConfig, Overrides};
use error::CliError;
use output::{emit, json_bytes, report_csv};

#[derive(Parser, Debug)]
#[command(name = "oscibo", version, about = "Exact n-body harmonic ground states and Born-Oppenheimer error analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact ground state of a configured system.
    Solve(Common),
    /// Exact versus Born-Oppenheimer energies and overlap.
    Compare(Common),
    /// Tabulate a quantity over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the built-in check suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Particle counts to check (comma separated).
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        /// Relative perturbation of exact exponents (testing hook).
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for Monte Carlo estimates; without it no sampling is done.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Masses (comma separated) for a generic system.
    #[arg(long, value_delimiter = ',')]
    masses: Option<Vec<f64>>,
    #[arg(long)]
    omega: Option<f64>,
    /// Light mass of the two-heavy family.
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Newton iteration cap for generic systems.
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// delta_e, overlap_t, energy_exact, energy_bo or phase_gap.
    #[arg(long)]
    quantity: Option<String>,
    /// k (K1 = K2 = k), k1, k2 or m.
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// linear or log.
    #[arg(long)]
    spacing: Option<String>,
    /// Dimensions (comma separated); several give one column group each.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
}

impl Common {
    fn load(&self) -> Result<FileConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(file.apply(&Overrides {
            n: self.n,
            d: self.d,
            masses: self.masses.clone(),
            omega: self.omega,
            m: self.m,
            k1: self.k1,
            k2: self.k2,
            max_iterations: self.max_iterations,
        }))
    }

    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

const DEFAULT_MC_SAMPLES: usize = 1_000_000;

fn write_report(common: &Common, report: &serde_json::Value) -> Result<(), CliError> {
    let bytes = match common.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(report)?,
        Format::Csv => report_csv(report)?,
    };
    emit(common.out(), &bytes)
}

fn sweep_spec(file: &FileConfig, args: &SweepArgs, default_d: usize) -> Result<SweepSpec, CliError> {
    let f = file.sweep.clone().unwrap_or_default();
    let missing = |what: &str| CliError::Config(format!("sweep needs {what}"));
    let quantity = args.quantity.clone().or(f.quantity).ok_or_else(|| missing("a quantity"))?;
    let axis = args.axis.clone().or(f.axis).ok_or_else(|| missing("an axis"))?;
    let spacing = match args.spacing.clone().or(f.spacing).as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => return Err(CliError::Config(format!("unknown spacing {other:?}"))),
    };
    Ok(SweepSpec {
        quantity: Quantity::parse(&quantity)?,
        axis: Axis::parse(&axis)?,
        from: args.from.or(f.from).ok_or_else(|| missing("a range start (from)"))?,
        to: args.to.or(f.to).ok_or_else(|| missing("a range end (to)"))?,
        points: args.points.or(f.points).ok_or_else(|| missing("a point count"))?,
        spacing,
        dims: args.dims.clone().or(f.dims).unwrap_or_else(|| vec![default_d]),
    })
}

/// Fills in the swept parameter so the base point validates.
fn sweep_base(file: &FileConfig, spec: &SweepSpec) -> FileConfig {
    let mut f = file.clone();
    let x = Some(spec.to);
    match spec.axis {
        Axis::M => f.m = f.m.or(x),
        Axis::K => {
            f.k2 = f.k2.or(x);
            f.k1 = f.k1.or(x);
        }
        Axis::K1 => f.k1 = f.k1.or(x),
        Axis::K2 => f.k2 = f.k2.or(x),
    }
    f
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(common) => {
            let file = common.load()?;
            let mut newton = NewtonOptions::default();
            if let Some(cap) = file.max_iterations {
                newton.max_iterations = cap;
            }
            write_report(&common, &commands::solve(&file.system()?, &newton)?)
        }
        Command::Compare(common) => {
            let params = common.load()?.two_heavy()?;
            let mc = common.seed.map(|s| (s, common.samples.unwrap_or(DEFAULT_MC_SAMPLES)));
            write_report(&common, &commands::compare(&params, mc)?)
        }
        Command::Sweep { common, sweep } => {
            let file = common.load()?;
            let default_d = file.d.unwrap_or_else(|| file.n.map_or(3, |n| n.saturating_sub(1).max(3)));
            let spec = sweep_spec(&file, &sweep, default_d)?;
            let base = sweep_base(&file, &spec).two_heavy()?;
            let table = commands::sweep(&base, &spec)?;
            let bytes = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv()?,
                Format::Json => table.to_json()?,
            };
            emit(common.out(), &bytes)
        }
        Command::Verify { common, ns, perturb } => {
            let mut options = VerifyOptions {
                seed: common.seed,
                perturbation: perturb,
                ..Default::default()
            };
            if let Some(ns) = ns.or(common.n.map(|n| vec![n])) {
                if let Some(&bad) = ns.iter().find(|&&n| n < 3) {
                    return Err(CliError::Config(format!("n = {bad} is below 3")));
                }
                options.ns = ns;
            }
            if let Some(s) = common.samples {
                options.mc_samples = s;
            }
            let report = commands::verify(&options);
            let bytes = match common.format.unwrap_or(Format::Json) {
                Format::Json => json_bytes(&commands::verify_json(&report))?,
                Format::Csv => commands::verify_table_csv(&report)?,
            };
            emit(common.out(), &bytes)?;
            let failed = report.failures().count();
            if failed > 0 {
                return Err(CliError::VerifyFailed(failed));
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var("OSCIBO_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Config(format!("OSCIBO_THREADS = {value:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oscibo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
