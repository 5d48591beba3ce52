//! System parameters and Gaussian ground-state ansätze.

use crate::error::{Error, Result};
use crate::gaussian_analysis::quadratic_form_matrix;
use crate::geometry::RhoConfiguration;
use crate::pairs::SymmetricPairMap;

/// Particle count, spatial dimension, masses and oscillator frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n: usize,
    d: usize,
    masses: Vec<f64>,
    omega: f64,
}

impl SystemSpec {
    /// Validates `n ≥ 3`, `d ≥ 2` for three particles and `d ≥ n - 1`
    /// otherwise, positive finite masses and `ω > 0`.
    pub fn new(d: usize, masses: Vec<f64>, omega: f64) -> Result<Self> {
        let n = masses.len();
        if n < 3 {
            return Err(Error::InvalidSystem(format!("need at least 3 particles, got {n}")));
        }
        let min_d = min_dimension(n);
        if d < min_d {
            return Err(Error::InvalidSystem(format!(
                "dimension d = {d} below the minimum {min_d} for n = {n}"
            )));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidSystem(format!("mass m{} = {m} must be positive", i + 1)));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidSystem(format!("frequency omega = {omega} must be positive")));
        }
        Ok(Self { n, d, masses, omega })
    }

    /// Two unit-mass heavy particles (labels 0, 1) and `n - 2` light ones of
    /// mass `m`, at `ω = 1`.
    pub fn two_heavy(n: usize, d: usize, m: f64) -> Result<Self> {
        let mut masses = vec![1.0, 1.0];
        masses.resize(n.max(2), m);
        Self::new(d, masses, 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `μ_ij = m_i m_j / (m_i + m_j)`.
    pub fn reduced_mass(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.masses[i], self.masses[j]);
        a * b / (a + b)
    }

    pub fn reduced_masses(&self) -> SymmetricPairMap {
        SymmetricPairMap::from_fn(self.n, |i, j| self.reduced_mass(i, j))
    }

    /// Same system with particles relabelled: new particle `perm[i]` is old
    /// particle `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut masses = vec![0.0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            masses[p] = self.masses[i];
        }
        Self { masses, ..self.clone() }
    }
}

/// Smallest spatial dimension for which the `ρ_ij` are independent.
pub fn min_dimension(n: usize) -> usize {
    if n <= 3 {
        2
    } else {
        n - 1
    }
}

/// A Gaussian `ψ ∝ exp(-Σ c_ij ρ_ij)` in ρ-space.
///
/// The absolute exponents `c_ij` are stored; the reduced exponents
/// `a_ij = c_ij / (ω μ_ij)` are derived on request.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    spec: SystemSpec,
    phase: SymmetricPairMap,
}

impl GaussianState {
    /// Builds a state from absolute exponents; fails unless normalizable.
    pub fn from_phase(spec: SystemSpec, phase: SymmetricPairMap) -> Result<Self> {
        if phase.n() != spec.n() {
            return Err(Error::InvalidSystem(format!(
                "exponent map over {} particles for a {}-particle system",
                phase.n(),
                spec.n()
            )));
        }
        if !quadratic_form_matrix(&phase).is_positive_definite() {
            return Err(Error::NonNormalizable);
        }
        Ok(Self { spec, phase })
    }

    /// Builds a state from reduced exponents `a_ij`.
    pub fn from_reduced(spec: SystemSpec, reduced: &SymmetricPairMap) -> Result<Self> {
        let phase = reduced_to_phase(&spec, reduced);
        Self::from_phase(spec, phase)
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    /// Absolute exponents `c_ij`.
    pub fn phase(&self) -> &SymmetricPairMap {
        &self.phase
    }

    /// Reduced exponents `a_ij = c_ij / (ω μ_ij)`.
    pub fn reduced(&self) -> SymmetricPairMap {
        phase_to_reduced(&self.spec, &self.phase)
    }

    /// `ln ψ = -Σ c_ij ρ_ij` (unnormalized).
    pub fn log_amplitude(&self, rho: &RhoConfiguration) -> f64 {
        -self.phase.dot(rho.rho())
    }

    pub fn with_phase(&self, phase: SymmetricPairMap) -> Result<Self> {
        Self::from_phase(self.spec.clone(), phase)
    }
}

pub(crate) fn reduced_to_phase(spec: &SystemSpec, reduced: &SymmetricPairMap) -> SymmetricPairMap {
    let w = spec.omega();
    SymmetricPairMap::from_fn(spec.n(), |i, j| w * spec.reduced_mass(i, j) * reduced.get(i, j))
}

pub(crate) fn phase_to_reduced(spec: &SystemSpec, phase: &SymmetricPairMap) -> SymmetricPairMap {
    let w = spec.omega();
    SymmetricPairMap::from_fn(spec.n(), |i, j| phase.get(i, j) / (w * spec.reduced_mass(i, j)))
}
