//! Expansions of the two-heavy closed forms in `t = √m`.
//!
//! The exact energy, phase and overlap are rebuilt from their closed forms
//! with series arithmetic. Intermediate series carry a few extra orders and
//! results are truncated to the requested order.

use super::PuiseuxSeries;
use crate::error::{Error, Result};
use crate::harmonic::PairClass;

/// Default truncation in `t`: through `m^{7/2}`.
pub const DEFAULT_ORDER: i32 = 7;

const GUARD: i32 = 4;

fn validate(n: usize, k1: f64, k2: f64) -> Result<()> {
    crate::harmonic::validate_two_heavy(n, 1, 1.0, k1, k2)
}

fn check_order(order: i32) -> Result<()> {
    if order < 0 {
        return Err(Error::InvalidSystem(format!("series order t^{order} must be non-negative")));
    }
    Ok(())
}

struct Building {
    order: i32,
    nl: f64,
    k1: f64,
    k2: f64,
    /// `(2 + (n-2)m)^{-½}`
    inv_sqrt_d: PuiseuxSeries,
}

impl Building {
    fn new(n: usize, k1: f64, k2: f64, order: i32) -> Result<Self> {
        validate(n, k1, k2)?;
        check_order(order)?;
        let work = order + GUARD;
        let nl = (n - 2) as f64;
        let d = PuiseuxSeries::new(0, vec![2.0, 0.0, nl], work);
        Ok(Self {
            order: work,
            nl,
            k1,
            k2,
            inv_sqrt_d: d.powf(-0.5)?,
        })
    }

    fn constant(&self, c: f64) -> PuiseuxSeries {
        PuiseuxSeries::constant(c, self.order)
    }

    /// `√(K₂ m / D) = √K₂ t D^{-½}`
    fn root(&self) -> PuiseuxSeries {
        self.inv_sqrt_d.shift(1).scale(self.k2.sqrt())
    }

    fn alpha(&self) -> PuiseuxSeries {
        let head = self.constant((1.0 + self.nl * self.k2).sqrt());
        (head - self.root().scale(self.nl)).scale(0.5)
    }

    fn beta(&self) -> PuiseuxSeries {
        // ½ (m+1)/m √(K₂m/D)
        let one_plus_m = PuiseuxSeries::new(0, vec![1.0, 0.0, 1.0], self.order);
        (&one_plus_m * &self.root()).shift(-2).scale(0.5)
    }

    fn gamma(&self) -> PuiseuxSeries {
        // (√((n-2)K₁ + 2K₂) - √(4K₂/D)) / ((n-2)√m)
        let head = self.constant((self.nl * self.k1 + 2.0 * self.k2).sqrt());
        let tail = self.inv_sqrt_d.scale(2.0 * self.k2.sqrt());
        (head - tail).shift(-1).scale(1.0 / self.nl)
    }

    fn energy(&self, d: usize) -> PuiseuxSeries {
        let nl = self.nl;
        let light_pairs = 0.5 * nl * (nl - 1.0);
        let total = self.alpha() + self.beta().scale(2.0 * nl) + self.gamma().scale(light_pairs);
        total.scale(d as f64)
    }

    fn phase(&self) -> PhaseSeries {
        let m = PuiseuxSeries::monomial(1.0, 2, self.order);
        let one_plus_m = PuiseuxSeries::new(0, vec![1.0, 0.0, 1.0], self.order);
        let ratio = &m * &one_plus_m.invert().expect("unit leading coefficient");
        PhaseSeries {
            heavy_heavy: self.alpha().scale(0.5),
            heavy_light: &self.beta() * &ratio,
            light_light: (&self.gamma() * &m).scale(0.5),
        }
    }

    /// `E - E_BO = ½d√(K₂/m)(n-2)m / (√D + √2)`, without cancellation.
    fn gap(&self, d: usize) -> Result<PuiseuxSeries> {
        let sqrt_d = self.inv_sqrt_d.invert()?;
        let denom = sqrt_d + self.constant(std::f64::consts::SQRT_2);
        let front = PuiseuxSeries::monomial(0.5 * d as f64 * self.k2.sqrt() * self.nl, 1, self.order);
        Ok(&front * &denom.invert()?)
    }
}

/// Exponent series per pair class.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub heavy_heavy: PuiseuxSeries,
    pub heavy_light: PuiseuxSeries,
    /// Zero when `n = 3`; there are no light-light pairs.
    pub light_light: PuiseuxSeries,
}

impl PhaseSeries {
    pub fn get(&self, class: PairClass) -> &PuiseuxSeries {
        match class {
            PairClass::HeavyHeavy => &self.heavy_heavy,
            PairClass::HeavyLight => &self.heavy_light,
            PairClass::LightLight => &self.light_light,
        }
    }

    fn map(&self, f: impl Fn(&PuiseuxSeries) -> PuiseuxSeries) -> Self {
        Self {
            heavy_heavy: f(&self.heavy_heavy),
            heavy_light: f(&self.heavy_light),
            light_light: f(&self.light_light),
        }
    }

    pub fn truncate(&self, order: i32) -> Self {
        self.map(|s| s.truncate(order))
    }
}

/// Exact two-heavy ground energy as a series in `t = √m`, through `t^order`.
pub fn expand_exact_energy(n: usize, d: usize, k1: f64, k2: f64, order: i32) -> Result<PuiseuxSeries> {
    let b = Building::new(n, k1, k2, order)?;
    Ok(b.energy(d).truncate(order))
}

/// `E_exact - E_BO`, which starts at `m^{1/2}`.
pub fn expand_energy_gap(n: usize, d: usize, k1: f64, k2: f64, order: i32) -> Result<PuiseuxSeries> {
    let b = Building::new(n, k1, k2, order)?;
    Ok(b.gap(d)?.truncate(order))
}

/// Relative error `(E_exact - E_BO)/E_exact`. The dimension cancels.
pub fn expand_delta_e(n: usize, k1: f64, k2: f64, order: i32) -> Result<PuiseuxSeries> {
    expand_delta_e_with_dimension(n, 1, k1, k2, order)
}

/// Same ratio with both numerator and denominator built at dimension `d`.
pub fn expand_delta_e_with_dimension(n: usize, d: usize, k1: f64, k2: f64, order: i32) -> Result<PuiseuxSeries> {
    let b = Building::new(n, k1, k2, order)?;
    let ratio = &b.gap(d)? * &b.energy(d).invert()?;
    Ok(ratio.truncate(order))
}

/// Exact exponents `c_ij` per pair class.
pub fn expand_exact_phase(n: usize, k1: f64, k2: f64, order: i32) -> Result<PhaseSeries> {
    let b = Building::new(n, k1, k2, order)?;
    let mut phase = b.phase().truncate(order);
    if n == 3 {
        phase.light_light = PuiseuxSeries::zero(order);
    }
    Ok(phase)
}

/// Log-amplitude difference `ln ψ_exact - ln ψ_BO` per unit `ρ`, per class.
///
/// The Born-Oppenheimer exponents are the `t⁰, t¹` part of the exact ones,
/// so every class gap starts at `m^{3/2}`.
pub fn expand_phase_gap(n: usize, k1: f64, k2: f64, order: i32) -> Result<PhaseSeries> {
    let exact = expand_exact_phase(n, k1, k2, order)?;
    Ok(exact.map(|s| &s.head(1) - s))
}

/// Overlap `T` of the three-body exact and Born-Oppenheimer states.
pub fn expand_overlap(d: usize, order: i32) -> Result<PuiseuxSeries> {
    check_order(order)?;
    if d < 2 {
        return Err(Error::InvalidSystem("overlap series requires d >= 2".into()));
    }
    let work = order + GUARD;
    let df = d as f64;
    // T = 2^d (1+u)^{d/4} (1 + √(1+u))^{-d},  u = m/2
    let one_plus_u = PuiseuxSeries::new(0, vec![1.0, 0.0, 0.5], work);
    let head = one_plus_u.powf(0.25 * df)?;
    let tail = (PuiseuxSeries::constant(1.0, work) + one_plus_u.sqrt()?).powf(-df)?;
    Ok((&head * &tail).scale(2f64.powi(d as i32)).truncate(order))
}

/// The two leading coefficients of the relative error, at `m` and `m^{3/2}`:
///
/// ```text
/// first  =  √K₂(n-2) / (2√2 Den)
/// second = -√K₂(n-2)√(K₂(n-2)+1) / (2√2 Den²)
/// Den    = (n-3)√(K₁(n-2) + 2K₂) + √(2K₂)
/// ```
pub fn ratio_leading_coefficients(n: usize, k1: f64, k2: f64) -> Result<[f64; 2]> {
    validate(n, k1, k2)?;
    Ok(ratio_coefficients_unchecked(n as f64, k1, k2))
}

fn ratio_coefficients_unchecked(n: f64, k1: f64, k2: f64) -> [f64; 2] {
    let nl = n - 2.0;
    let den = (n - 3.0) * (k1 * nl + 2.0 * k2).sqrt() + (2.0 * k2).sqrt();
    let s = 2.0 * std::f64::consts::SQRT_2;
    let first = k2.sqrt() * nl / (s * den);
    let second = -k2.sqrt() * nl * (k2 * nl + 1.0).sqrt() / (s * den * den);
    [first, second]
}

/// Large-`n` behaviour of the two leading relative-error coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticNLimit {
    pub k1: f64,
    pub k2: f64,
}

impl AsymptoticNLimit {
    /// Coefficient of `m` at finite `n`.
    pub fn first(&self, n: f64) -> f64 {
        ratio_coefficients_unchecked(n, self.k1, self.k2)[0]
    }

    /// Coefficient of `m^{3/2}` at finite `n`.
    pub fn second(&self, n: f64) -> f64 {
        ratio_coefficients_unchecked(n, self.k1, self.k2)[1]
    }

    /// `½√(K₂/(2K₁n))`.
    pub fn first_leading(&self, n: f64) -> f64 {
        0.5 * (self.k2 / (2.0 * self.k1 * n)).sqrt()
    }

    /// `-K₂/(2√2 K₁) n^{-3/2}`.
    pub fn second_leading(&self, n: f64) -> f64 {
        -self.k2 / (2.0 * std::f64::consts::SQRT_2 * self.k1) * n.powf(-1.5)
    }

    pub const FIRST_EXPONENT: f64 = -0.5;
    pub const SECOND_EXPONENT: f64 = -1.5;
}

/// Leading large-`n` scaling of the relative-error coefficients.
pub fn asymptotic_n_limit(k1: f64, k2: f64) -> Result<AsymptoticNLimit> {
    if !(k1.is_finite() && k1 > 0.0) {
        return Err(Error::InvalidSystem(format!("K1 = {k1} must be positive")));
    }
    if !(k2.is_finite() && k2 >= 0.0) {
        return Err(Error::InvalidSystem(format!("K2 = {k2} must be non-negative")));
    }
    Ok(AsymptoticNLimit { k1, k2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_body_energy_gap() {
        let (d, k) = (3, 2.0);
        let s = expand_energy_gap(3, d, 0.0, k, DEFAULT_ORDER).unwrap();
        let c = d as f64 * k.sqrt() / (4.0 * 2f64.sqrt());
        assert_relative_eq!(s.coeff_m(0.5), c, max_relative = 1e-13);
        assert_relative_eq!(s.coeff_m(1.5), -c / 8.0, max_relative = 1e-13);
        assert_relative_eq!(s.coeff_m(2.5), c / 32.0, max_relative = 1e-13);
    }

    #[test]
    fn exact_energy_matches_gap() {
        let e = expand_exact_energy(5, 3, 0.7, 1.3, DEFAULT_ORDER).unwrap();
        let g = expand_energy_gap(5, 3, 0.7, 1.3, DEFAULT_ORDER).unwrap();
        for k in 1..=DEFAULT_ORDER {
            assert_relative_eq!(e.coeff_t(k), g.coeff_t(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn delta_e_three_body() {
        let k = 1.7;
        let s = expand_delta_e(3, 0.0, k, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(s.coeff_m(1.0), 0.25, max_relative = 1e-13);
        assert_relative_eq!(s.coeff_m(1.5), -0.25 * ((k + 1.0) / (2.0 * k)).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(s.coeff_m(2.0), (k + 4.0) / (32.0 * k), max_relative = 1e-13);
    }

    #[test]
    fn overlap_series() {
        for d in [2, 3, 4, 7] {
            let s = expand_overlap(d, DEFAULT_ORDER).unwrap();
            let df = d as f64;
            assert_relative_eq!(s.coeff_m(0.0), 1.0, max_relative = 1e-14);
            assert!(s.coeff_m(1.0).abs() < 1e-15);
            assert_relative_eq!(s.coeff_m(2.0), -df / 128.0, max_relative = 1e-12);
            assert_relative_eq!(s.coeff_m(3.0), df / 256.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn phase_gap_starts_at_three_halves() {
        let g = expand_phase_gap(4, 1.0, 1.0, DEFAULT_ORDER).unwrap();
        for class in PairClass::ALL {
            let s = g.get(class);
            for k in 0..3 {
                assert!(s.coeff_t(k).abs() < 1e-14, "{class:?} t^{k}");
            }
        }
        let q = 0.25 * (0.5f64).sqrt();
        assert_relative_eq!(g.heavy_light.coeff_m(1.5), q, max_relative = 1e-12);
        assert_relative_eq!(g.heavy_heavy.coeff_m(1.5), -q, max_relative = 1e-12);
        assert_relative_eq!(g.light_light.coeff_m(1.5), -q, max_relative = 1e-12);
    }

    #[test]
    fn asymptotic_limits() {
        let a = asymptotic_n_limit(1.0, 2.0).unwrap();
        let n = 1e8;
        assert_relative_eq!(a.first(n) / a.first_leading(n), 1.0, max_relative = 1e-3);
        assert_relative_eq!(a.second(n) / a.second_leading(n), 1.0, max_relative = 1e-3);
        let zero = asymptotic_n_limit(1.0, 0.0).unwrap();
        assert_eq!(zero.first(100.0), 0.0);
        assert_eq!(zero.second(100.0), 0.0);
        assert!(asymptotic_n_limit(0.0, 1.0).is_err());
    }
}
