//! Exact ground states of pairwise harmonic potentials.
//!
//! A Gaussian `exp(-Σ c_ij ρ_ij)` is an eigenfunction of `-Δ_rad + V` exactly
//! when `V = 2ω² Σ ν_ij ρ_ij` with `2ω² ν = L(c)`, the linear part of the
//! operator symbol; the eigenvalue is the symbol's constant
//! `C = ω d Σ a_ij`. [`forward_map`] evaluates this relation and
//! [`inverse_map`] solves it for the exponents by damped Newton iteration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian_analysis::quadratic_form_matrix;
use crate::geometry::RhoConfiguration;
use crate::operators::RadialOperator;
use crate::pairs::SymmetricPairMap;
use crate::state::{phase_to_reduced, reduced_to_phase, GaussianState, SystemSpec};

/// `V = 2ω² Σ_{i<j} ν_ij ρ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPotential {
    spec: SystemSpec,
    nu: SymmetricPairMap,
}

impl HarmonicPotential {
    pub fn new(spec: SystemSpec, nu: SymmetricPairMap) -> Result<Self> {
        if nu.n() != spec.n() {
            return Err(Error::InvalidSystem(format!(
                "potential over {} particles for a {}-particle system",
                nu.n(),
                spec.n()
            )));
        }
        if nu.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("potential coefficients must be finite".into()));
        }
        Ok(Self { spec, nu })
    }

    /// Builds `ν` from the coefficients `k_ij` of `V = Σ k_ij ρ_ij`.
    pub fn from_spring_coefficients(spec: SystemSpec, springs: &SymmetricPairMap) -> Result<Self> {
        let w2 = 2.0 * spec.omega() * spec.omega();
        let nu = springs.scaled(1.0 / w2);
        Self::new(spec, nu)
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn nu(&self) -> &SymmetricPairMap {
        &self.nu
    }

    /// Coefficient of `ρ_ij` in `V`, i.e. `2ω² ν_ij`.
    pub fn spring_coefficient(&self, i: usize, j: usize) -> f64 {
        2.0 * self.spec.omega().powi(2) * self.nu.get(i, j)
    }

    pub fn spring_coefficients(&self) -> SymmetricPairMap {
        self.nu.scaled(2.0 * self.spec.omega().powi(2))
    }

    pub fn value(&self, rho: &RhoConfiguration) -> f64 {
        2.0 * self.spec.omega().powi(2) * self.nu.dot(rho.rho())
    }

    /// True when `Σ ν_ij |r_i - r_j|²` is positive definite on relative
    /// coordinates.
    pub fn is_confining(&self) -> bool {
        quadratic_form_matrix(&self.nu).is_positive_definite()
    }
}

/// Potential for which the reduced exponents `a` give the exact ground state.
///
/// The identically zero exponent map is accepted and yields the zero
/// potential; any other map must be normalizable.
pub fn forward_map(spec: &SystemSpec, reduced: &SymmetricPairMap) -> Result<HarmonicPotential> {
    let phase = reduced_to_phase(spec, reduced);
    if !phase.is_zero() && !quadratic_form_matrix(&phase).is_positive_definite() {
        return Err(Error::NonNormalizable);
    }
    Ok(HarmonicPotential {
        spec: spec.clone(),
        nu: nu_from_phase(spec, &RadialOperator::new(spec), &phase),
    })
}

fn nu_from_phase(spec: &SystemSpec, op: &RadialOperator, phase: &SymmetricPairMap) -> SymmetricPairMap {
    op.symbol(phase).linear.scaled(0.5 / spec.omega().powi(2))
}

/// `E₀ = ω d Σ_{i<j} a_ij`.
pub fn ground_energy(spec: &SystemSpec, reduced: &SymmetricPairMap) -> f64 {
    spec.omega() * spec.d() as f64 * reduced.values().iter().sum::<f64>()
}

/// Controls for [`inverse_map_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Convergence when `‖forward_map(a) - ν‖∞ ≤ tolerance·‖ν‖∞`.
    pub tolerance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            max_halvings: 30,
            tolerance: 1e-12,
        }
    }
}

/// Converged output of [`inverse_map_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub reduced: SymmetricPairMap,
    pub iterations: usize,
    /// Final `‖forward_map(a) - ν‖∞`.
    pub residual: f64,
}

/// Reduced exponents whose Gaussian is the ground state of `potential`.
pub fn inverse_map(potential: &HarmonicPotential, guess: Option<&SymmetricPairMap>) -> Result<SymmetricPairMap> {
    inverse_map_with(potential, guess, &NewtonOptions::default()).map(|s| s.reduced)
}

/// Damped Newton solve of `L(c)/(2ω²) = ν` in the absolute exponents.
///
/// Default guess `a_ij = √(ν_ij/μ_ij)` (negative `ν` clipped to zero). A trial
/// step is halved while it leaves the normalizable region or fails to lower
/// the residual norm.
pub fn inverse_map_with(
    potential: &HarmonicPotential,
    guess: Option<&SymmetricPairMap>,
    options: &NewtonOptions,
) -> Result<InverseSolution> {
    let spec = potential.spec();
    let target = potential.nu();
    let size = target.len();
    if target.is_zero() {
        return Ok(InverseSolution {
            reduced: SymmetricPairMap::zeros(spec.n()),
            iterations: 0,
            residual: 0.0,
        });
    }
    if !potential.is_confining() {
        return Err(Error::NonConfining);
    }
    let op = RadialOperator::new(spec);
    let normalizable = |c: &SymmetricPairMap| quadratic_form_matrix(c).is_positive_definite();
    let mut phase = match guess {
        Some(a) => reduced_to_phase(spec, a),
        None => default_guess(spec, target),
    };
    if !normalizable(&phase) {
        return Err(Error::NonNormalizable);
    }
    let residual_of = |c: &SymmetricPairMap| -> DVector<f64> {
        let nu = nu_from_phase(spec, &op, c);
        DVector::from_iterator(size, nu.values().iter().zip(target.values()).map(|(a, b)| a - b))
    };
    let tolerance = options.tolerance * target.max_abs();
    let jac_scale = 0.5 / spec.omega().powi(2);

    let mut f = residual_of(&phase);
    for iteration in 0..=options.max_iterations {
        let f_inf = f.amax();
        if f_inf <= tolerance {
            let (phase, f_inf) = polish(&op, phase, f, &residual_of, jac_scale, &normalizable);
            return Ok(InverseSolution {
                reduced: phase_to_reduced(spec, &phase),
                iterations: iteration,
                residual: f_inf,
            });
        }
        if iteration == options.max_iterations {
            break;
        }
        let jac = DMatrix::from_row_slice(size, size, &op.symbol_jacobian(&phase)) * jac_scale;
        let Some(step) = jac.lu().solve(&(-&f)) else {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: f_inf,
            });
        };
        let norm = f.norm();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial = SymmetricPairMap::from_values(
                spec.n(),
                phase.values().iter().zip(step.iter()).map(|(c, s)| c + lambda * s).collect(),
            );
            if normalizable(&trial) {
                let f_trial = residual_of(&trial);
                if f_trial.norm() < norm {
                    accepted = Some((trial, f_trial));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, f_trial)) => {
                phase = trial;
                f = f_trial;
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual: f_inf,
                })
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual: f.amax(),
    })
}

/// A few undamped Newton steps past the tolerance, kept while they still
/// reduce the residual, so the result sits at machine precision.
fn polish(
    op: &RadialOperator,
    mut phase: SymmetricPairMap,
    mut f: DVector<f64>,
    residual_of: &impl Fn(&SymmetricPairMap) -> DVector<f64>,
    jac_scale: f64,
    normalizable: &impl Fn(&SymmetricPairMap) -> bool,
) -> (SymmetricPairMap, f64) {
    let size = f.len();
    for _ in 0..3 {
        let jac = DMatrix::from_row_slice(size, size, &op.symbol_jacobian(&phase)) * jac_scale;
        let Some(step) = jac.lu().solve(&(-&f)) else { break };
        let trial = SymmetricPairMap::from_values(
            phase.n(),
            phase.values().iter().zip(step.iter()).map(|(c, s)| c + s).collect(),
        );
        if !normalizable(&trial) {
            break;
        }
        let f_trial = residual_of(&trial);
        if f_trial.amax() >= f.amax() {
            break;
        }
        phase = trial;
        f = f_trial;
    }
    let f_inf = f.amax();
    (phase, f_inf)
}

fn default_guess(spec: &SystemSpec, nu: &SymmetricPairMap) -> SymmetricPairMap {
    let w = spec.omega();
    let guess = SymmetricPairMap::from_fn(spec.n(), |i, j| w * (nu.get(i, j).max(0.0) * spec.reduced_mass(i, j)).sqrt());
    if quadratic_form_matrix(&guess).is_positive_definite() {
        return guess;
    }
    let scale = nu.max_abs();
    SymmetricPairMap::from_fn(spec.n(), |i, j| w * (scale * spec.reduced_mass(i, j)).sqrt())
}

/// Class of a pair in the two-heavy configuration (heavy labels 0 and 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    HeavyHeavy,
    HeavyLight,
    LightLight,
}

impl PairClass {
    pub fn of(i: usize, j: usize) -> Self {
        match (i < 2, j < 2) {
            (true, true) => Self::HeavyHeavy,
            (false, false) => Self::LightLight,
            _ => Self::HeavyLight,
        }
    }

    pub const ALL: [PairClass; 3] = [Self::HeavyHeavy, Self::HeavyLight, Self::LightLight];

    pub fn name(self) -> &'static str {
        match self {
            Self::HeavyHeavy => "heavy_heavy",
            Self::HeavyLight => "heavy_light",
            Self::LightLight => "light_light",
        }
    }

    /// Number of pairs of this class among `n` particles.
    pub fn count(self, n: usize) -> usize {
        match self {
            Self::HeavyHeavy => 1,
            Self::HeavyLight => 2 * (n - 2),
            Self::LightLight => (n - 2) * (n - 3) / 2,
        }
    }
}

/// A value per pair class, expanded to a pair map on request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassValues {
    pub heavy_heavy: f64,
    pub heavy_light: f64,
    pub light_light: f64,
}

impl ClassValues {
    pub fn get(&self, class: PairClass) -> f64 {
        match class {
            PairClass::HeavyHeavy => self.heavy_heavy,
            PairClass::HeavyLight => self.heavy_light,
            PairClass::LightLight => self.light_light,
        }
    }

    pub fn to_pair_map(&self, n: usize) -> SymmetricPairMap {
        SymmetricPairMap::from_fn(n, |i, j| self.get(PairClass::of(i, j)))
    }
}

/// Closed-form ground state of two unit-mass heavy particles and `n - 2`
/// light particles of mass `m` with
/// `V = ¼ρ₁₂ + (K₂/2) Σ_{heavy-light} ρ + (K₁/2) Σ_{light-light} ρ`, `ω = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHeavyFamily {
    pub n: usize,
    pub d: usize,
    pub m: f64,
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub energy: f64,
}

impl TwoHeavyFamily {
    /// Evaluates `α_n`, `β_n`, `γ_n` and the ground energy. Only the energy
    /// scales with `d`, so any `d ≥ 1` is accepted here; building the
    /// ρ-space state requires the usual dimension bound.
    pub fn new(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<Self> {
        validate_two_heavy(n, d, m, k1, k2)?;
        let nl = (n - 2) as f64;
        let denom = 2.0 + nl * m;
        let s = (k2 * m / denom).sqrt();
        let alpha = 0.5 * ((1.0 + nl * k2).sqrt() - nl * s);
        if !(alpha > 0.0) {
            return Err(Error::InvalidRegime(format!(
                "alpha_n = {alpha} must be positive (light mass too large for n = {n}, K2 = {k2})"
            )));
        }
        let beta = 0.5 * (m + 1.0) / m * s;
        let gamma = ((nl * k1 + 2.0 * k2).sqrt() - (4.0 * k2 / denom).sqrt()) / (nl * m.sqrt());
        let light_pairs = 0.5 * (n * n + 6 - 5 * n) as f64;
        let energy = d as f64 * (alpha + 2.0 * nl * beta + light_pairs * gamma);
        Ok(Self {
            n,
            d,
            m,
            k1,
            k2,
            alpha,
            beta,
            gamma,
            energy,
        })
    }

    /// Absolute exponents per pair class: `α/2`, `β m/(m+1)`, `γ m/2`.
    pub fn class_phase(&self) -> ClassValues {
        ClassValues {
            heavy_heavy: 0.5 * self.alpha,
            heavy_light: self.beta * self.m / (self.m + 1.0),
            light_light: 0.5 * self.gamma * self.m,
        }
    }

    pub fn phase(&self) -> SymmetricPairMap {
        self.class_phase().to_pair_map(self.n)
    }

    pub fn spec(&self) -> Result<SystemSpec> {
        SystemSpec::two_heavy(self.n, self.d, self.m)
    }

    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::from_phase(self.spec()?, self.phase())
    }

    pub fn potential(&self) -> Result<HarmonicPotential> {
        two_heavy_potential(self.n, self.d, self.m, self.k1, self.k2)
    }
}

pub(crate) fn validate_two_heavy(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::UnsupportedN(n));
    }
    if d < 1 {
        return Err(Error::InvalidSystem("dimension must be at least 1".into()));
    }
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidSystem(format!("light mass m = {m} must be positive")));
    }
    if !(k2.is_finite() && k2 > 0.0) {
        return Err(Error::InvalidSystem(format!("K2 = {k2} must be positive")));
    }
    if !(k1.is_finite() && k1 >= 0.0) {
        return Err(Error::InvalidSystem(format!("K1 = {k1} must be non-negative")));
    }
    Ok(())
}

/// Exact two-heavy family and its normalizable ρ-space state.
pub fn two_heavy_exact(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<(TwoHeavyFamily, GaussianState)> {
    let family = TwoHeavyFamily::new(n, d, m, k1, k2)?;
    let state = family.state()?;
    Ok((family, state))
}

/// The two-heavy potential as a [`HarmonicPotential`] at `ω = 1`.
pub fn two_heavy_potential(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<HarmonicPotential> {
    validate_two_heavy(n, d, m, k1, k2)?;
    let spec = SystemSpec::two_heavy(n, d, m)?;
    let springs = ClassValues {
        heavy_heavy: 0.25,
        heavy_light: 0.5 * k2,
        light_light: 0.5 * k1,
    }
    .to_pair_map(n);
    HarmonicPotential::from_spring_coefficients(spec, &springs)
}

/// Equal-mass potential in closed form.
///
/// The coefficient of `ρ_ij` is
/// `½mω² [2a_ij² + a_ij Σ_{k≠i,j}(a_ik + a_jk) - Σ_{k≠i,j} a_ik a_jk]`.
pub fn equal_mass_potential(d: usize, reduced: &SymmetricPairMap, m: f64, omega: f64) -> Result<HarmonicPotential> {
    let n = reduced.n();
    let spec = SystemSpec::new(d, vec![m; n], omega)?;
    let springs = SymmetricPairMap::from_fn(n, |i, j| {
        let a = reduced.get(i, j);
        let (mut sum, mut products) = (0.0, 0.0);
        for k in (0..n).filter(|&k| k != i && k != j) {
            sum += reduced.get(i, k) + reduced.get(j, k);
            products += reduced.get(i, k) * reduced.get(j, k);
        }
        0.5 * m * omega * omega * (2.0 * a * a + a * sum - products)
    });
    HarmonicPotential::from_spring_coefficients(spec, &springs)
}
