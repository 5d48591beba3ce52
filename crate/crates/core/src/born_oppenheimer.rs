//! Born-Oppenheimer treatment of the two-heavy family.
//!
//! The heavy particles (labels 0 and 1) are clamped and the light particles
//! solved in the resulting potential; the electronic energy is an affine
//! curve in `ρ₁₂` on which the heavy pair then oscillates. For `n ≥ 5` the
//! electronic exponents are taken from the `t⁰, t¹` truncation of the exact
//! ones; that state is checked against the clamped operator like the others.

use crate::error::{Error, Result};
use crate::harmonic::{validate_two_heavy, ClassValues, PairClass, TwoHeavyFamily};
use crate::operators::{OperatorSymbol, RadialOperator};
use crate::pairs::SymmetricPairMap;
use crate::state::{GaussianState, SystemSpec};

/// Heavy-pair potential coefficient not seen by the electrons.
pub const HEAVY_PAIR_BASE: f64 = 0.25;

/// Light-particle ground state at clamped heavy positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicSolution {
    pub exponents: SymmetricPairMap,
    /// Coefficient of `ρ₁₂` in the electronic energy.
    pub curve_slope: f64,
    /// `ρ₁₂`-independent part of the electronic energy.
    pub curve_offset: f64,
}

impl ElectronicSolution {
    /// Electronic energy at heavy separation `ρ₁₂`.
    pub fn energy_at(&self, rho12: f64) -> f64 {
        self.curve_offset + self.curve_slope * rho12
    }
}

/// Explicit electronic solutions for three and four particles.
pub fn electronic_solve(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<ElectronicSolution> {
    validate_two_heavy(n, d, m, k1, k2)?;
    let df = d as f64;
    match n {
        3 => {
            let s = (k2 * m / 2.0).sqrt();
            Ok(ElectronicSolution {
                exponents: SymmetricPairMap::from_values(3, vec![-0.25 * s, 0.5 * s, 0.5 * s]),
                curve_slope: 0.25 * k2,
                curve_offset: df * (k2 / (2.0 * m)).sqrt(),
            })
        }
        4 => {
            let s = 0.5 * (m / 2.0).sqrt();
            let (r2, r12) = (k2.sqrt(), (k1 + k2).sqrt());
            let mut c = SymmetricPairMap::constant(4, s * r2);
            c.set(0, 1, -s * r2);
            c.set(2, 3, s * (r12 - r2));
            Ok(ElectronicSolution {
                exponents: c,
                curve_slope: 0.5 * k2,
                curve_offset: df / (2.0 * m).sqrt() * (r2 + r12),
            })
        }
        _ => Err(Error::UnsupportedN(n)),
    }
}

/// Electronic solution from the leading truncation of the exact state, any
/// `n ≥ 3`.
pub fn electronic_truncated(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<ElectronicSolution> {
    validate_two_heavy(n, d, m, k1, k2)?;
    let nl = (n - 2) as f64;
    let t = m.sqrt();
    let h = (k2 / 2.0).sqrt();
    let light = (nl * k1 + 2.0 * k2).sqrt();
    let exponents = ClassValues {
        heavy_heavy: -0.25 * nl * h * t,
        heavy_light: 0.5 * h * t,
        light_light: t * (light - (2.0 * k2).sqrt()) / (2.0 * nl),
    }
    .to_pair_map(n);
    Ok(ElectronicSolution {
        exponents,
        curve_slope: 0.25 * nl * k2,
        curve_offset: 0.5 * d as f64 * ((n as f64 - 3.0) * light / t + (2.0 * k2 / m).sqrt()),
    })
}

/// Clamped-heavy operator: every term carrying a heavy inverse mass removed.
pub fn clamped_operator(n: usize, d: usize, m: f64) -> RadialOperator {
    let mut inverse = vec![0.0; n];
    for v in inverse.iter_mut().skip(2) {
        *v = 1.0 / m;
    }
    RadialOperator::from_inverse_masses(d, inverse)
}

/// Potential seen by the light particles: the two-heavy potential without the
/// heavy-pair term.
pub fn electronic_potential(n: usize, k1: f64, k2: f64) -> SymmetricPairMap {
    ClassValues {
        heavy_heavy: 0.0,
        heavy_light: 0.5 * k2,
        light_light: 0.5 * k1,
    }
    .to_pair_map(n)
}

/// Largest relative deviation of `solution` from being an eigenfunction of the
/// clamped electronic Hamiltonian with the stated affine energy curve.
pub fn electronic_residual(solution: &ElectronicSolution, d: usize, m: f64, k1: f64, k2: f64) -> f64 {
    let n = solution.exponents.n();
    let op = clamped_operator(n, d, m);
    let OperatorSymbol { linear, constant } = op.symbol(&solution.exponents);
    let v = electronic_potential(n, k1, k2);
    let scale = v.max_abs().max(solution.curve_slope.abs()).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for ((i, j), l) in linear.iter() {
        let dev = if (i, j) == (0, 1) {
            // (V₁₂ - L₁₂) must equal the curve slope
            v.get(0, 1) - l - solution.curve_slope
        } else {
            v.get(i, j) - l
        };
        worst = worst.max(dev.abs() / scale);
    }
    let offset_scale = solution.curve_offset.abs().max(f64::MIN_POSITIVE);
    worst.max((constant - solution.curve_offset).abs() / offset_scale)
}

/// Ground state of the heavy pair on an affine potential curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuclearSolution {
    pub frequency: f64,
    /// Exponent on `ρ₁₂`.
    pub exponent: f64,
    pub zero_point_energy: f64,
}

/// Heavy pair (unit masses) in `(base + slope) ρ₁₂`.
pub fn nuclear_solve(d: usize, curve_slope: f64, heavy_pair_base: f64) -> Result<NuclearSolution> {
    let total = heavy_pair_base + curve_slope;
    if !(total > 0.0) {
        return Err(Error::NonConfining);
    }
    let frequency = 2.0 * total.sqrt();
    Ok(NuclearSolution {
        frequency,
        exponent: 0.25 * frequency,
        zero_point_energy: 0.5 * d as f64 * frequency,
    })
}

/// Assembled Born-Oppenheimer state and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct BODecomposition {
    pub n: usize,
    pub d: usize,
    pub m: f64,
    pub electronic: ElectronicSolution,
    pub nuclear: NuclearSolution,
    pub bo_exponents: SymmetricPairMap,
    pub energy: f64,
}

impl BODecomposition {
    /// The Born-Oppenheimer state; needs `d` large enough for a ρ-space state.
    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::from_phase(SystemSpec::two_heavy(self.n, self.d, self.m)?, self.bo_exponents.clone())
    }

    /// Exponent of one representative pair of `class`.
    pub fn class_exponent(&self, class: PairClass) -> Option<f64> {
        crate::pairs::pairs(self.n)
            .find(|&(i, j)| PairClass::of(i, j) == class)
            .map(|(i, j)| self.bo_exponents.get(i, j))
    }
}

/// Electronic solve, nuclear solve and assembly. Any `d ≥ 1` is accepted.
pub fn bo_assemble(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<BODecomposition> {
    let electronic = match n {
        3 | 4 => electronic_solve(n, d, m, k1, k2)?,
        _ => electronic_truncated(n, d, m, k1, k2)?,
    };
    let nuclear = nuclear_solve(d, electronic.curve_slope, HEAVY_PAIR_BASE)?;
    let mut bo_exponents = electronic.exponents.clone();
    bo_exponents[(0, 1)] += nuclear.exponent;
    let energy = electronic.curve_offset + nuclear.zero_point_energy;
    Ok(BODecomposition {
        n,
        d,
        m,
        electronic,
        nuclear,
        bo_exponents,
        energy,
    })
}

/// `½d[√(1+(n-2)K₂) + (n-3)√((2K₂+(n-2)K₁)/m) + √(2K₂/m)]`.
pub fn bo_energy(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<f64> {
    validate_two_heavy(n, d, m, k1, k2)?;
    let nl = (n - 2) as f64;
    Ok(0.5
        * d as f64
        * ((1.0 + nl * k2).sqrt() + (n as f64 - 3.0) * ((2.0 * k2 + nl * k1) / m).sqrt() + (2.0 * k2 / m).sqrt()))
}

/// `E_exact - E_BO = ½d√(K₂/m)(n-2)m/(√(2+(n-2)m) + √2)`.
pub fn energy_gap(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<f64> {
    validate_two_heavy(n, d, m, k1, k2)?;
    let nl = (n - 2) as f64;
    let denom = (2.0 + nl * m).sqrt() + std::f64::consts::SQRT_2;
    Ok(0.5 * d as f64 * (k2 / m).sqrt() * nl * m / denom)
}

/// `ΔE = (E_exact - E_BO)/E_exact`.
pub fn relative_error(n: usize, d: usize, m: f64, k1: f64, k2: f64) -> Result<f64> {
    let exact = TwoHeavyFamily::new(n, d, m, k1, k2)?.energy;
    Ok(energy_gap(n, d, m, k1, k2)? / exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_body_curve() {
        let e = electronic_solve(3, 3, 0.5, 0.0, 2.0).unwrap();
        assert_relative_eq!(e.energy_at(1.0), 3.0 * 2f64.sqrt() + 0.5, max_relative = 1e-15);
    }

    #[test]
    fn four_body_free_light_pair() {
        let (d, m, k2) = (3, 0.2, 1.5);
        let e = electronic_solve(4, d, m, 0.0, k2).unwrap();
        assert_relative_eq!(e.curve_offset, 3.0 / (2.0 * m).sqrt() * 2.0 * k2.sqrt(), max_relative = 1e-15);
        assert_eq!(e.exponents.get(2, 3), 0.0);
    }

    #[test]
    fn unsupported_explicit_n() {
        assert_eq!(electronic_solve(5, 4, 0.1, 1.0, 1.0), Err(Error::UnsupportedN(5)));
    }

    #[test]
    fn nuclear_frequencies() {
        let k = 3.0;
        assert_relative_eq!(nuclear_solve(3, k / 4.0, 0.25).unwrap().frequency, (k + 1.0).sqrt(), max_relative = 1e-15);
        let bare = nuclear_solve(3, 0.0, 0.25).unwrap();
        assert_eq!(bare.frequency, 1.0);
        assert_eq!(bare.exponent, 0.25);
        assert_relative_eq!(nuclear_solve(3, k / 2.0, 0.25).unwrap().frequency, (1.0 + 2.0 * k).sqrt(), max_relative = 1e-15);
        assert_eq!(nuclear_solve(3, -0.25, 0.25), Err(Error::NonConfining));
    }

    #[test]
    fn three_body_bo_energy() {
        let bo = bo_assemble(3, 3, 0.1, 0.0, 2.0).unwrap();
        assert_relative_eq!(bo.energy, 1.5 * (40f64.sqrt() + 3f64.sqrt()), max_relative = 1e-14);
    }

    #[test]
    fn explicit_and_truncated_agree() {
        for n in [3, 4] {
            let a = electronic_solve(n, 3, 0.07, 0.6, 1.9).unwrap();
            let b = electronic_truncated(n, 3, 0.07, 0.6, 1.9).unwrap();
            for (x, y) in a.exponents.values().iter().zip(b.exponents.values()) {
                assert_relative_eq!(x, y, max_relative = 1e-14, epsilon = 1e-16);
            }
            assert_relative_eq!(a.curve_slope, b.curve_slope, max_relative = 1e-15);
            assert_relative_eq!(a.curve_offset, b.curve_offset, max_relative = 1e-14);
        }
    }

    #[test]
    fn electronic_states_are_clamped_eigenfunctions() {
        for n in 3..=8 {
            let e = bo_assemble(n, 3, 0.03, 0.8, 1.4).unwrap().electronic;
            assert!(electronic_residual(&e, 3, 0.03, 0.8, 1.4) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn gap_positive_and_matches_difference() {
        let (n, d, m, k1, k2) = (4, 3, 0.3, 1.0, 2.0);
        let exact = TwoHeavyFamily::new(n, d, m, k1, k2).unwrap().energy;
        let bo = bo_energy(n, d, m, k1, k2).unwrap();
        assert_relative_eq!(energy_gap(n, d, m, k1, k2).unwrap(), exact - bo, max_relative = 1e-12);
        assert!(exact > bo);
    }
}
