//! The radial kinetic operator in ρ-space.
//!
//! For `n` particles in `d` dimensions
//!
//! ```text
//! Δ_rad = Σ_{i<j} (2/μ_ij) ρ_ij ∂²_ij
//!       + Σ_i Σ_{j<k; j,k≠i} (2/m_i)(ρ_ij + ρ_ik - ρ_jk) ∂_ij ∂_ik
//!       + d Σ_{i<j} (1/μ_ij) ∂_ij
//! ```
//!
//! One cross term is generated per particle `i` and unordered pair `{j, k}`
//! of the other particles. The three- and four-body operators are the `n = 3`
//! and `n = 4` cases of this single form.
//!
//! Two modes are offered: the exact action on a Gaussian `exp(-Σ c_ij ρ_ij)`
//! ([`RadialOperator::symbol`]) and a central-difference evaluation on an
//! arbitrary scalar field ([`RadialOperator::apply_finite_difference`]).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::RhoConfiguration;
use crate::harmonic::HarmonicPotential;
use crate::pairs::{pair_count, pair_index, SymmetricPairMap};
use crate::state::{GaussianState, SystemSpec};

/// Default relative finite-difference step: `h = 1e-3·(1 + ρ)`.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Mixed-derivative term `(2/m_i)(ρ_ij + ρ_ik - ρ_jk) ∂_ij ∂_ik`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerm {
    pub vertex: usize,
    /// Pair index of `{i, j}`.
    pub first: usize,
    /// Pair index of `{i, k}`.
    pub second: usize,
    /// Pair index of `{j, k}`.
    pub opposite: usize,
    /// `2 / m_i`.
    pub weight: f64,
}

/// Exact action on a Gaussian: `-Δ_rad e^{-Φ} = (C - Σ L_ij ρ_ij) e^{-Φ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSymbol {
    pub linear: SymmetricPairMap,
    pub constant: f64,
}

impl OperatorSymbol {
    /// `(-Δ_rad ψ)/ψ` at `rho`.
    pub fn evaluate(&self, rho: &RhoConfiguration) -> f64 {
        self.constant - self.linear.dot(rho.rho())
    }
}

/// The radial operator for a fixed set of inverse masses.
///
/// A zero inverse mass removes every term carrying that particle's mass,
/// which is the clamped (infinitely heavy) limit.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    n: usize,
    d: usize,
    inverse_masses: Vec<f64>,
    /// `1/μ_ij = 1/m_i + 1/m_j`, per pair.
    inverse_reduced: SymmetricPairMap,
    cross: Vec<CrossTerm>,
}

impl RadialOperator {
    pub fn new(spec: &SystemSpec) -> Self {
        Self::from_inverse_masses(spec.d(), spec.masses().iter().map(|m| 1.0 / m).collect())
    }

    /// Operator with the listed particles clamped (their kinetic terms
    /// removed).
    pub fn clamped(spec: &SystemSpec, clamped: &[usize]) -> Self {
        let inverse = spec
            .masses()
            .iter()
            .enumerate()
            .map(|(i, m)| if clamped.contains(&i) { 0.0 } else { 1.0 / m })
            .collect();
        Self::from_inverse_masses(spec.d(), inverse)
    }

    /// Builds the operator from `1/m_i` directly; zeros are allowed.
    pub fn from_inverse_masses(d: usize, inverse_masses: Vec<f64>) -> Self {
        let n = inverse_masses.len();
        let inverse_reduced =
            SymmetricPairMap::from_fn(n, |i, j| inverse_masses[i] + inverse_masses[j]);
        let mut cross = Vec::with_capacity(n * pair_count(n.saturating_sub(1)));
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if j == i || k == i {
                        continue;
                    }
                    cross.push(CrossTerm {
                        vertex: i,
                        first: pair_index(n, i, j),
                        second: pair_index(n, i, k),
                        opposite: pair_index(n, j, k),
                        weight: 2.0 * inverse_masses[i],
                    });
                }
            }
        }
        Self {
            n,
            d,
            inverse_masses,
            inverse_reduced,
            cross,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn inverse_masses(&self) -> &[f64] {
        &self.inverse_masses
    }

    pub fn cross_terms(&self) -> &[CrossTerm] {
        &self.cross
    }

    /// Exact action on `exp(-Σ c_ij ρ_ij)`.
    ///
    /// `C = d Σ c_ij/μ_ij`, and `L_ij` collects `2c_ij²/μ_ij` plus, for every
    /// cross term, `(2/m_i) c_ij c_ik` added to `ρ_ij`, `ρ_ik` and subtracted
    /// from `ρ_jk`.
    pub fn symbol(&self, phase: &SymmetricPairMap) -> OperatorSymbol {
        assert_eq!(phase.n(), self.n, "exponent map over the wrong particle count");
        let c = phase.values();
        let inv = self.inverse_reduced.values();
        let mut linear: Vec<f64> = c.iter().zip(inv).map(|(c, w)| 2.0 * w * c * c).collect();
        for t in &self.cross {
            let w = t.weight * c[t.first] * c[t.second];
            linear[t.first] += w;
            linear[t.second] += w;
            linear[t.opposite] -= w;
        }
        let constant = self.d as f64 * c.iter().zip(inv).map(|(c, w)| c * w).sum::<f64>();
        OperatorSymbol {
            linear: SymmetricPairMap::from_values(self.n, linear),
            constant,
        }
    }

    /// Jacobian `∂L_p/∂c_q` of the linear part of [`Self::symbol`], row-major.
    pub fn symbol_jacobian(&self, phase: &SymmetricPairMap) -> Vec<f64> {
        let size = pair_count(self.n);
        let c = phase.values();
        let mut jac = vec![0.0; size * size];
        for (p, &w) in self.inverse_reduced.values().iter().enumerate() {
            jac[p * size + p] += 4.0 * w * c[p];
        }
        for t in &self.cross {
            let d_first = t.weight * c[t.second];
            let d_second = t.weight * c[t.first];
            for (row, sign) in [(t.first, 1.0), (t.second, 1.0), (t.opposite, -1.0)] {
                jac[row * size + t.first] += sign * d_first;
                jac[row * size + t.second] += sign * d_second;
            }
        }
        jac
    }

    /// Central-difference evaluation of `-Δ_rad f` at `rho`.
    ///
    /// `step = None` uses `h_p = 1e-3·(1 + ρ_p)` per coordinate; `Some(h)` a
    /// uniform step. Second-order accurate in `h`.
    pub fn apply_finite_difference<F>(&self, f: F, rho: &RhoConfiguration, step: Option<f64>) -> Result<f64>
    where
        F: Fn(&SymmetricPairMap) -> f64,
    {
        let steps = self.steps(rho, step)?;
        Ok(self.central_difference(&f, rho, &steps))
    }

    /// Richardson extrapolation of [`Self::apply_finite_difference`] over
    /// steps `h` and `h/2`; fourth-order accurate.
    pub fn apply_finite_difference_richardson<F>(
        &self,
        f: F,
        rho: &RhoConfiguration,
        step: Option<f64>,
    ) -> Result<f64>
    where
        F: Fn(&SymmetricPairMap) -> f64,
    {
        let steps = self.steps(rho, step)?;
        Ok(self.richardson(&f, rho, &steps))
    }

    /// As [`Self::apply_finite_difference_richardson`] with the default
    /// steps, each capped at `cap`.
    pub(crate) fn richardson_capped<F>(&self, f: F, rho: &RhoConfiguration, cap: f64) -> Result<f64>
    where
        F: Fn(&SymmetricPairMap) -> f64,
    {
        let steps: Vec<f64> = self.steps(rho, None)?.into_iter().map(|h| h.min(cap)).collect();
        Ok(self.richardson(&f, rho, &steps))
    }

    fn richardson<F>(&self, f: &F, rho: &RhoConfiguration, steps: &[f64]) -> f64
    where
        F: Fn(&SymmetricPairMap) -> f64,
    {
        let half: Vec<f64> = steps.iter().map(|h| 0.5 * h).collect();
        let coarse = self.central_difference(f, rho, steps);
        let fine = self.central_difference(f, rho, &half);
        (4.0 * fine - coarse) / 3.0
    }

    fn steps(&self, rho: &RhoConfiguration, step: Option<f64>) -> Result<Vec<f64>> {
        assert_eq!(rho.n(), self.n, "configuration over the wrong particle count");
        let mut steps = Vec::with_capacity(rho.rho().len());
        for ((i, j), value) in rho.rho().iter() {
            let h = match step {
                Some(h) => h,
                None => DEFAULT_FD_STEP * (1.0 + value),
            };
            if !(h > 0.0) {
                return Err(Error::InvalidSystem(format!("finite-difference step {h} must be positive")));
            }
            if value < 2.0 * h {
                return Err(Error::DegenerateConfiguration {
                    pair: (i, j),
                    value,
                    limit: 2.0 * h,
                });
            }
            steps.push(h);
        }
        Ok(steps)
    }

    fn central_difference<F>(&self, f: &F, rho: &RhoConfiguration, steps: &[f64]) -> f64
    where
        F: Fn(&SymmetricPairMap) -> f64,
    {
        let base = rho.rho().clone();
        let at = |shifts: &[(usize, f64)]| {
            let mut x = base.clone();
            for &(p, dx) in shifts {
                x.values_mut()[p] += dx;
            }
            f(&x)
        };
        let f0 = f(&base);
        let rho_v = base.values();
        let inv = self.inverse_reduced.values();
        let mut laplacian = 0.0;
        for p in 0..rho_v.len() {
            let h = steps[p];
            let plus = at(&[(p, h)]);
            let minus = at(&[(p, -h)]);
            let first = (plus - minus) / (2.0 * h);
            let second = (plus - 2.0 * f0 + minus) / (h * h);
            laplacian += 2.0 * inv[p] * rho_v[p] * second + self.d as f64 * inv[p] * first;
        }
        for t in &self.cross {
            if t.weight == 0.0 {
                continue;
            }
            let (p, q) = (t.first, t.second);
            let (hp, hq) = (steps[p], steps[q]);
            let mixed = (at(&[(p, hp), (q, hq)]) - at(&[(p, hp), (q, -hq)]) - at(&[(p, -hp), (q, hq)])
                + at(&[(p, -hp), (q, -hq)]))
                / (4.0 * hp * hq);
            let coeff = rho_v[p] + rho_v[q] - rho_v[t.opposite];
            laplacian += t.weight * coeff * mixed;
        }
        -laplacian
    }
}

/// Exact action of the system's radial operator on `exp(-Σ c_ij ρ_ij)`.
pub fn apply_to_gaussian(spec: &SystemSpec, phase: &SymmetricPairMap) -> OperatorSymbol {
    RadialOperator::new(spec).symbol(phase)
}

/// Which evaluation of `-Δ_rad ψ` a residual uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualRoute {
    Symbolic,
    /// Richardson-extrapolated central differences at the default step,
    /// capped at 5% of the state's shortest decay length.
    FiniteDifference,
}

/// `max_s |(-Δ_rad ψ + Vψ - Eψ)/ψ| / (|E| + 1)` over `samples`.
pub fn residual(
    state: &GaussianState,
    potential: &HarmonicPotential,
    energy: f64,
    samples: &[RhoConfiguration],
    route: ResidualRoute,
) -> Result<f64> {
    let spec = state.spec();
    if potential.n() != spec.n() {
        return Err(Error::InvalidSystem("potential and state over different particle counts".into()));
    }
    let op = RadialOperator::new(spec);
    let scale = energy.abs() + 1.0;
    let symbol = op.symbol(state.phase());
    // steps stay a small fraction of the decay length 1/max|c|
    let c_max = state.phase().values().iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let cap = if c_max > 0.0 { 0.05 / c_max } else { f64::INFINITY };
    let per_sample = |rho: &RhoConfiguration| -> Result<f64> {
        let kinetic = match route {
            ResidualRoute::Symbolic => symbol.evaluate(rho),
            ResidualRoute::FiniteDifference => {
                // ψ normalised to 1 at the sample point keeps values O(1)
                let shift = state.log_amplitude(rho);
                let psi = |x: &SymmetricPairMap| (-state.phase().dot(x) - shift).exp();
                op.richardson_capped(psi, rho, cap)?
            }
        };
        Ok(((kinetic + potential.value(rho) - energy) / scale).abs())
    };
    let values: Vec<Result<f64>> = samples.par_iter().map(per_sample).collect();
    values
        .into_iter()
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn equal_mass_three() -> SystemSpec {
        SystemSpec::new(3, vec![1.0; 3], 1.0).unwrap()
    }

    #[test]
    fn equal_mass_three_body_symbol() {
        let spec = equal_mass_three();
        let c = SymmetricPairMap::constant(3, 0.5);
        let s = apply_to_gaussian(&spec, &c);
        assert_relative_eq!(s.constant, 9.0, max_relative = 1e-15);
        for &l in s.linear.values() {
            assert_relative_eq!(l, 1.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn constant_function_has_zero_symbol() {
        let spec = SystemSpec::new(4, vec![1.0, 2.0, 3.0, 0.5], 1.0).unwrap();
        let s = apply_to_gaussian(&spec, &SymmetricPairMap::zeros(4));
        assert_eq!(s.constant, 0.0);
        assert!(s.linear.is_zero());
    }

    #[test]
    fn cross_term_count() {
        for n in 3..8 {
            let op = RadialOperator::from_inverse_masses(n, vec![1.0; n]);
            assert_eq!(op.cross_terms().len(), n * (n - 1) * (n - 2) / 2);
        }
    }

    #[test]
    fn finite_difference_of_constant_and_linear() {
        let spec = equal_mass_three();
        let op = RadialOperator::new(&spec);
        let rho = RhoConfiguration::uniform(3, 1.0).unwrap();
        let one = op.apply_finite_difference(|_| 1.0, &rho, Some(1e-3)).unwrap();
        assert!(one.abs() < 1e-12);
        let lin = op.apply_finite_difference(|x| x.get(0, 1), &rho, Some(1e-3)).unwrap();
        assert_relative_eq!(lin, -3.0 / spec.reduced_mass(0, 1), max_relative = 1e-9);
    }

    #[test]
    fn finite_difference_matches_symbol() {
        let spec = SystemSpec::new(3, vec![1.0, 1.3, 0.4], 1.0).unwrap();
        let op = RadialOperator::new(&spec);
        let c = SymmetricPairMap::from_values(3, vec![0.3, 0.45, 0.2]);
        let rho = RhoConfiguration::new(SymmetricPairMap::from_values(3, vec![1.2, 0.8, 1.1])).unwrap();
        let psi = |x: &SymmetricPairMap| (-c.dot(x)).exp();
        let exact = op.symbol(&c).evaluate(&rho) * psi(rho.rho());
        let fd = op.apply_finite_difference_richardson(psi, &rho, None).unwrap();
        assert_relative_eq!(fd, exact, max_relative = 1e-7);
    }

    #[test]
    fn finite_difference_is_second_order() {
        let spec = SystemSpec::new(3, vec![1.0, 1.3, 0.4], 1.0).unwrap();
        let op = RadialOperator::new(&spec);
        let c = SymmetricPairMap::from_values(3, vec![0.3, 0.45, 0.2]);
        let rho = RhoConfiguration::new(SymmetricPairMap::from_values(3, vec![1.2, 0.8, 1.1])).unwrap();
        let psi = |x: &SymmetricPairMap| (-c.dot(x)).exp();
        let exact = op.symbol(&c).evaluate(&rho) * psi(rho.rho());
        let e1 = (op.apply_finite_difference(psi, &rho, Some(2e-2)).unwrap() - exact).abs();
        let e2 = (op.apply_finite_difference(psi, &rho, Some(1e-2)).unwrap() - exact).abs();
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }

    #[test]
    fn boundary_configuration_rejected() {
        let spec = equal_mass_three();
        let op = RadialOperator::new(&spec);
        let rho = RhoConfiguration::new(SymmetricPairMap::from_values(3, vec![1.0, 1e-5, 1.0])).unwrap();
        assert!(matches!(
            op.apply_finite_difference(|_| 1.0, &rho, Some(1e-4)),
            Err(Error::DegenerateConfiguration { pair: (0, 2), .. })
        ));
    }

    #[test]
    fn jacobian_matches_differences() {
        let spec = SystemSpec::new(4, vec![1.0, 2.0, 0.3, 0.7], 1.0).unwrap();
        let op = RadialOperator::new(&spec);
        let c = SymmetricPairMap::from_values(4, vec![0.3, 0.2, 0.5, 0.1, 0.8, 0.4]);
        let jac = op.symbol_jacobian(&c);
        let h = 1e-6;
        for q in 0..6 {
            let mut up = c.clone();
            up.values_mut()[q] += h;
            let mut down = c.clone();
            down.values_mut()[q] -= h;
            let lu = op.symbol(&up).linear;
            let ld = op.symbol(&down).linear;
            for p in 0..6 {
                let fd = (lu.values()[p] - ld.values()[p]) / (2.0 * h);
                assert!((fd - jac[p * 6 + q]).abs() < 1e-8);
            }
        }
    }
}
