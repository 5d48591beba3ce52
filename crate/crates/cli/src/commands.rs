//! Subcommand implementations. Each returns a JSON report or a table; the
//! caller chooses the encoding.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use oscibo_core::born_oppenheimer::{bo_assemble, bo_energy, energy_gap, relative_error};
use oscibo_core::gaussian_analysis::{closed_form_t, mc_overlap, overlap_squared};
use oscibo_core::geometry::sample_configurations;
use oscibo_core::harmonic::{ground_energy, inverse_map_with, two_heavy_exact, HarmonicPotential, NewtonOptions, PairClass, TwoHeavyFamily};
use oscibo_core::operators::RadialOperator;
use oscibo_core::state::min_dimension;
use oscibo_core::verify::{run_checks, CheckStatus, VerifyOptions, VerifyReport};
use oscibo_core::{SymmetricPairMap, SystemSpec};

use crate::config::{pair_key, System, TwoHeavyParams};
use crate::error::CliError;
use crate::output::{number, Table};

const RESIDUAL_SAMPLES: usize = 20;
const RESIDUAL_SEED: u64 = 0;

fn pair_object(map: &SymmetricPairMap) -> Value {
    let obj: Map<String, Value> = map.iter().map(|((i, j), v)| (pair_key(i, j), number(v))).collect();
    Value::Object(obj)
}

/// `max |(-Δψ + Vψ - Eψ)/ψ| / (|E| + 1)` from the operator symbol; valid
/// for the zero state as well.
fn symbolic_residual(spec: &SystemSpec, phase: &SymmetricPairMap, potential: &HarmonicPotential, energy: f64) -> f64 {
    let symbol = RadialOperator::new(spec).symbol(phase);
    let configs = sample_configurations(spec.n(), min_dimension(spec.n()), RESIDUAL_SAMPLES, RESIDUAL_SEED, 0.05);
    configs
        .iter()
        .map(|rho| ((symbol.evaluate(rho) + potential.value(rho) - energy) / (energy.abs() + 1.0)).abs())
        .fold(0.0, f64::max)
}

pub fn solve(system: &System, newton: &NewtonOptions) -> Result<Value, CliError> {
    match system {
        System::TwoHeavy(p) => {
            let (family, state) = two_heavy_exact(p.n, p.d, p.m, p.k1, p.k2)?;
            let potential = family.potential()?;
            let residual = symbolic_residual(state.spec(), state.phase(), &potential, family.energy);
            Ok(json!({
                "system": "two_heavy",
                "n": p.n, "d": p.d, "m": number(p.m), "K1": number(p.k1), "K2": number(p.k2),
                "alpha": number(family.alpha),
                "beta": number(family.beta),
                "gamma": number(family.gamma),
                "energy": number(family.energy),
                "exponents": pair_object(state.phase()),
                "reduced_exponents": pair_object(&state.reduced()),
                "residual": number(residual),
            }))
        }
        System::Generic(potential) => {
            let spec = potential.spec();
            let solution = inverse_map_with(potential, None, newton)?;
            let phase = SymmetricPairMap::from_fn(spec.n(), |i, j| {
                spec.omega() * spec.reduced_mass(i, j) * solution.reduced.get(i, j)
            });
            let energy = ground_energy(spec, &solution.reduced);
            let residual = symbolic_residual(spec, &phase, potential, energy);
            Ok(json!({
                "system": "generic",
                "n": spec.n(), "d": spec.d(),
                "masses": spec.masses(),
                "omega": number(spec.omega()),
                "energy": number(energy),
                "exponents": pair_object(&phase),
                "reduced_exponents": pair_object(&solution.reduced),
                "iterations": solution.iterations,
                "map_residual": number(solution.residual),
                "residual": number(residual),
            }))
        }
    }
}

pub fn compare(p: &TwoHeavyParams, mc: Option<(u64, usize)>) -> Result<Value, CliError> {
    let family = TwoHeavyFamily::new(p.n, p.d, p.m, p.k1, p.k2)?;
    let bo = bo_assemble(p.n, p.d, p.m, p.k1, p.k2)?;
    let (_, exact) = two_heavy_exact(p.n, p.d, p.m, p.k1, p.k2)?;
    let bo_state = bo.state()?;
    let overlap = overlap_squared(&exact, &bo_state)?;
    let mut report = json!({
        "n": p.n, "d": p.d, "m": number(p.m), "K1": number(p.k1), "K2": number(p.k2),
        "energy_exact": number(family.energy),
        "energy_bo": number(bo.energy),
        "energy_gap": number(energy_gap(p.n, p.d, p.m, p.k1, p.k2)?),
        "delta_e": number(relative_error(p.n, p.d, p.m, p.k1, p.k2)?),
        "overlap_t": number(overlap),
        "nuclear_frequency": number(bo.nuclear.frequency),
        "curve_slope": number(bo.electronic.curve_slope),
        "curve_offset": number(bo.electronic.curve_offset),
        "exact_exponents": pair_object(exact.phase()),
        "bo_exponents": pair_object(&bo.bo_exponents),
    });
    let obj = report.as_object_mut().expect("object literal");
    if p.n == 3 {
        obj.insert("overlap_t_closed_form".into(), number(closed_form_t(p.m, p.d)));
    }
    if let Some((seed, samples)) = mc {
        let est = mc_overlap(&exact, &bo_state, samples, seed)?;
        obj.insert("mc_overlap_t".into(), number(est.estimate));
        obj.insert("mc_std_error".into(), number(est.std_error));
        obj.insert("mc_samples".into(), json!(samples));
        obj.insert("mc_seed".into(), json!(seed));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    DeltaE,
    OverlapT,
    EnergyExact,
    EnergyBo,
    PhaseGap,
}

impl Quantity {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "delta_e" => Self::DeltaE,
            "overlap_t" => Self::OverlapT,
            "energy_exact" => Self::EnergyExact,
            "energy_bo" => Self::EnergyBo,
            "phase_gap" => Self::PhaseGap,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown quantity {s:?}; expected delta_e, overlap_t, energy_exact, energy_bo or phase_gap"
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::DeltaE => "delta_e",
            Self::OverlapT => "overlap_t",
            Self::EnergyExact => "energy_exact",
            Self::EnergyBo => "energy_bo",
            Self::PhaseGap => "phase_gap",
        }
    }

    fn columns(self) -> Vec<String> {
        match self {
            Self::PhaseGap => PairClass::ALL.iter().map(|c| format!("phase_gap_{}", c.name())).collect(),
            q => vec![q.name().to_string()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    K,
    K1,
    K2,
    M,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "k" | "K" => Self::K,
            "k1" | "K1" => Self::K1,
            "k2" | "K2" => Self::K2,
            "m" => Self::M,
            _ => return Err(CliError::Config(format!("unknown axis {s:?}; expected k, k1, k2 or m"))),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::K => "k",
            Self::K1 => "k1",
            Self::K2 => "k2",
            Self::M => "m",
        }
    }

    fn apply(self, base: &TwoHeavyParams, x: f64) -> TwoHeavyParams {
        let mut p = *base;
        match self {
            Self::K => {
                p.k2 = x;
                if p.n > 3 {
                    p.k1 = x;
                }
            }
            Self::K1 => p.k1 = x,
            Self::K2 => p.k2 = x,
            Self::M => p.m = x,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Dimensions to tabulate; one column group per entry.
    pub dims: Vec<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.points == 0 {
            return Err(CliError::Config("sweep needs at least one point".into()));
        }
        if !(self.from.is_finite() && self.to.is_finite()) || self.from < 0.0 || self.to < self.from {
            return Err(CliError::Config(format!("invalid sweep range [{}, {}]", self.from, self.to)));
        }
        if self.points > 1 && self.to == self.from {
            return Err(CliError::Config("a multi-point sweep needs from < to".into()));
        }
        if self.spacing == Spacing::Log && self.from <= 0.0 {
            return Err(CliError::Config("log spacing needs a positive lower end".into()));
        }
        if self.dims.is_empty() {
            return Err(CliError::Config("no dimensions to sweep".into()));
        }
        if matches!(self.axis, Axis::K | Axis::K2) && self.from == 0.0 {
            return Err(CliError::Config("K2 must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let s = i as f64 / last;
                if i == 0 {
                    return self.from;
                }
                if i + 1 == self.points {
                    return self.to;
                }
                match self.spacing {
                    Spacing::Linear => self.from + s * (self.to - self.from),
                    Spacing::Log => (self.from.ln() + s * (self.to.ln() - self.from.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Values of `q` at one parameter point. `m = 0` yields the heavy-mass limit
/// for the quantities that have one.
fn evaluate(q: Quantity, p: &TwoHeavyParams) -> Result<Vec<f64>, CliError> {
    if p.m == 0.0 {
        return match q {
            Quantity::DeltaE => Ok(vec![0.0]),
            Quantity::OverlapT => Ok(vec![1.0]),
            Quantity::PhaseGap => Ok(vec![0.0; 3]),
            _ => Err(CliError::Config("energies diverge at m = 0".into())),
        };
    }
    Ok(match q {
        Quantity::DeltaE => vec![relative_error(p.n, p.d, p.m, p.k1, p.k2)?],
        Quantity::EnergyExact => vec![TwoHeavyFamily::new(p.n, p.d, p.m, p.k1, p.k2)?.energy],
        Quantity::EnergyBo => vec![bo_energy(p.n, p.d, p.m, p.k1, p.k2)?],
        Quantity::OverlapT => {
            let (_, exact) = two_heavy_exact(p.n, p.d, p.m, p.k1, p.k2)?;
            let bo = bo_assemble(p.n, p.d, p.m, p.k1, p.k2)?.state()?;
            vec![overlap_squared(&exact, &bo)?]
        }
        Quantity::PhaseGap => {
            let exact = TwoHeavyFamily::new(p.n, p.d, p.m, p.k1, p.k2)?.class_phase();
            let bo = bo_assemble(p.n, p.d, p.m, p.k1, p.k2)?;
            PairClass::ALL
                .iter()
                .map(|&c| match bo.class_exponent(c) {
                    // log-amplitude convention: ln ψ_exact - ln ψ_BO per unit ρ
                    Some(b) => b - exact.get(c),
                    None => 0.0,
                })
                .collect()
        }
    })
}

pub fn sweep(base: &TwoHeavyParams, spec: &SweepSpec) -> Result<Table, CliError> {
    spec.validate()?;
    let grid = spec.grid();
    let wide = spec.dims.len() > 1;
    let mut header = vec![spec.axis.name().to_string()];
    for &d in &spec.dims {
        for col in spec.quantity.columns() {
            header.push(if wide { format!("{col}_d{d}") } else { col });
        }
    }
    // auxiliary energy columns, unless the grid reaches m = 0 where they diverge
    let with_energies = !wide && spec.quantity == Quantity::DeltaE && (spec.axis != Axis::M || spec.from > 0.0);
    if with_energies {
        header.push("energy_exact".into());
        header.push("energy_bo".into());
    }
    let rows: Vec<Result<Vec<f64>, CliError>> = grid
        .par_iter()
        .map(|&x| {
            let mut row = vec![x];
            for &d in &spec.dims {
                let p = spec.axis.apply(&TwoHeavyParams { d, ..*base }, x);
                row.extend(evaluate(spec.quantity, &p)?);
            }
            if with_energies {
                let p = spec.axis.apply(&TwoHeavyParams { d: spec.dims[0], ..*base }, x);
                row.extend(evaluate(Quantity::EnergyExact, &p)?);
                row.extend(evaluate(Quantity::EnergyBo, &p)?);
            }
            Ok(row)
        })
        .collect();
    Ok(Table {
        header,
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    })
}

pub fn verify(options: &VerifyOptions) -> VerifyReport {
    run_checks(options)
}

pub fn verify_json(report: &VerifyReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "status": status_name(c.status),
                "measured": number(c.measured),
                "tolerance": number(c.tolerance),
                "detail": c.detail,
            })
        })
        .collect();
    json!({ "passed": report.all_passed(), "checks": checks })
}

pub fn verify_table_csv(report: &VerifyReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["check", "status", "measured", "tolerance", "detail"]).map_err(io)?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            status_name(c.status).to_string(),
            crate::output::fmt_float(c.measured),
            crate::output::fmt_float(c.tolerance),
            c.detail.clone(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn status_name(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Passed => "pass",
        CheckStatus::Failed => "fail",
        CheckStatus::Skipped => "skipped",
    }
}
