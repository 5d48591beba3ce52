//! Truncated Puiseux series in the mass ratio.
//!
//! A series is stored in powers of `t = √m`: `Σ_{k=low}^{order} c_k t^k`,
//! where `order` is the highest exponent whose coefficient is known. Every
//! operation tracks how far its result is still exact, so truncation error
//! never leaks into reported coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub mod expansions;

pub use expansions::{
    asymptotic_n_limit, expand_delta_e, expand_delta_e_with_dimension, expand_energy_gap, expand_exact_energy,
    expand_exact_phase, expand_overlap, expand_phase_gap, ratio_leading_coefficients, AsymptoticNLimit, PhaseSeries,
    DEFAULT_ORDER,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxSeries {
    low: i32,
    coeffs: Vec<f64>,
    order: i32,
}

impl PuiseuxSeries {
    /// `Σ_k coeffs[k] t^{low+k}`, known through `t^order`. Coefficients past
    /// `order` are dropped.
    pub fn new(low: i32, mut coeffs: Vec<f64>, order: i32) -> Self {
        let keep = (order - low + 1).max(0) as usize;
        coeffs.truncate(keep);
        let mut s = Self { low, coeffs, order };
        s.normalize();
        s
    }

    /// The zero series, known through `t^order`.
    pub fn zero(order: i32) -> Self {
        Self {
            low: order + 1,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn constant(value: f64, order: i32) -> Self {
        Self::monomial(value, 0, order)
    }

    /// `value·t^k`.
    pub fn monomial(value: f64, k: i32, order: i32) -> Self {
        Self::new(k, vec![value], order)
    }

    /// `t` itself, i.e. `√m`.
    pub fn t(order: i32) -> Self {
        Self::monomial(1.0, 1, order)
    }

    /// `c·m^q` with `q` a multiple of ½.
    pub fn m_power(value: f64, q: f64, order: i32) -> Self {
        Self::monomial(value, half_integer(q), order)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|&c| c != 0.0);
        match lead {
            Some(p) => {
                self.coeffs.drain(..p);
                self.low += p as i32;
                while self.coeffs.last() == Some(&0.0) {
                    self.coeffs.pop();
                }
            }
            None => {
                self.coeffs.clear();
                self.low = self.order + 1;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent in `t` with a nonzero coefficient (`order + 1` for the
    /// zero series).
    pub fn low_t(&self) -> i32 {
        self.low
    }

    /// Highest exponent in `t` whose coefficient is known.
    pub fn order_t(&self) -> i32 {
        self.order
    }

    /// Truncation order in `m`.
    pub fn order_m(&self) -> f64 {
        0.5 * self.order as f64
    }

    /// Coefficient of `t^k`.
    ///
    /// # Panics
    /// If `k` exceeds the known order.
    pub fn coeff_t(&self, k: i32) -> f64 {
        assert!(k <= self.order, "coefficient t^{k} beyond known order t^{}", self.order);
        if k < self.low {
            return 0.0;
        }
        self.coeffs.get((k - self.low) as usize).copied().unwrap_or(0.0)
    }

    /// Coefficient of `m^q`.
    pub fn coeff_m(&self, q: f64) -> f64 {
        self.coeff_t(half_integer(q))
    }

    /// Nonzero terms as `(exponent in m, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(move |(k, &c)| (0.5 * (self.low + k as i32) as f64, c))
    }

    /// Leading `(exponent in t, coefficient)`.
    pub fn leading(&self) -> Option<(i32, f64)> {
        self.coeffs.first().map(|&c| (self.low, c))
    }

    /// Drops every term above `t^order`.
    pub fn truncate(&self, order: i32) -> Self {
        Self::new(self.low, self.coeffs.clone(), order.min(self.order))
    }

    /// The terms up to `t^k` as an exact polynomial, i.e. with every higher
    /// coefficient known to be zero through the original order.
    pub fn head(&self, k: i32) -> Self {
        let keep = (k - self.low + 1).clamp(0, self.coeffs.len() as i32) as usize;
        Self::new(self.low, self.coeffs[..keep].to_vec(), self.order)
    }

    /// Truncation in powers of `m`.
    pub fn truncate_m(&self, q: f64) -> Self {
        self.truncate(half_integer(q))
    }

    /// Sum of the known terms at `m`.
    pub fn evaluate(&self, m: f64) -> f64 {
        let t = m.sqrt();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc * t.powi(self.low)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            low: self.low + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut s = Self {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            order: self.order,
        };
        s.normalize();
        s
    }

    /// Relative coefficients `c_{low+k}/…` for `k = 0..=order-low`.
    fn relative(&self) -> Result<(i32, Vec<f64>)> {
        let (low, lead) = self.leading().ok_or(Error::ZeroLeadingCoefficient)?;
        if lead == 0.0 {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let len = (self.order - low + 1) as usize;
        let mut c = self.coeffs.clone();
        c.resize(len, 0.0);
        Ok((low, c))
    }

    /// `1/s`, accurate to the order implied by the input.
    pub fn invert(&self) -> Result<Self> {
        let (low, c) = self.relative()?;
        let r = c.len();
        let mut b = vec![0.0; r];
        b[0] = 1.0 / c[0];
        for k in 1..r {
            let s: f64 = (1..=k).map(|j| c[j] * b[k - j]).sum();
            b[k] = -s / c[0];
        }
        Ok(Self::new(-low, b, self.order - 2 * low))
    }

    /// `√s`. The leading exponent must be even in `t` (an integer power of
    /// `m`) and the leading coefficient positive.
    pub fn sqrt(&self) -> Result<Self> {
        let (low, c) = self.relative()?;
        if low % 2 != 0 {
            return Err(Error::OffLattice(format!("square root of a series starting at t^{low}")));
        }
        if c[0] < 0.0 {
            return Err(Error::OffLattice("square root of a series with negative leading coefficient".into()));
        }
        let r = c.len();
        let mut s = vec![0.0; r];
        s[0] = c[0].sqrt();
        for k in 1..r {
            let cross: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (c[k] - cross) / (2.0 * s[0]);
        }
        let half = low / 2;
        Ok(Self::new(half, s, half + self.order - low))
    }

    /// `s^p` for real `p`; `p·low` must be an integer.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let (low, a) = self.relative()?;
        let shifted = p * low as f64;
        if (shifted - shifted.round()).abs() > 1e-12 {
            return Err(Error::OffLattice(format!("power {p} of a series starting at t^{low}")));
        }
        if a[0] < 0.0 && p.fract() != 0.0 {
            return Err(Error::OffLattice("fractional power of a negative leading coefficient".into()));
        }
        let r = a.len();
        let mut g = vec![0.0; r];
        g[0] = a[0].powf(p);
        for k in 1..r {
            let s: f64 = (1..=k).map(|j| ((p + 1.0) * j as f64 - k as f64) * a[j] * g[k - j]).sum();
            g[k] = s / (k as f64 * a[0]);
        }
        let new_low = shifted.round() as i32;
        Ok(Self::new(new_low, g, new_low + self.order - low))
    }

    fn add_impl(&self, other: &Self, sign: f64) -> Self {
        let order = self.order.min(other.order);
        let low = self.low.min(other.low);
        if low > order {
            return Self::zero(order);
        }
        let coeffs = (low..=order).map(|k| self.coeff_or_zero(k) + sign * other.coeff_or_zero(k)).collect();
        Self::new(low, coeffs, order)
    }

    fn coeff_or_zero(&self, k: i32) -> f64 {
        if k < self.low {
            0.0
        } else {
            self.coeffs.get((k - self.low) as usize).copied().unwrap_or(0.0)
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let order = (self.order + other.low).min(other.order + self.low);
        let low = self.low + other.low;
        if self.is_zero() || other.is_zero() || low > order {
            return Self::zero(order);
        }
        let coeffs = (low..=order)
            .map(|k| {
                (self.low..=k - other.low)
                    .map(|i| self.coeff_or_zero(i) * other.coeff_or_zero(k - i))
                    .sum()
            })
            .collect();
        Self::new(low, coeffs, order)
    }
}

fn half_integer(q: f64) -> i32 {
    let k = (2.0 * q).round();
    assert!((2.0 * q - k).abs() < 1e-9, "exponent {q} is not a multiple of 1/2");
    k as i32
}

impl Add<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.add_impl(rhs, 1.0)
    }
}

impl Sub<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.add_impl(rhs, -1.0)
    }
}

impl Mul<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.mul_impl(rhs)
    }
}

impl Add for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
        &self + &rhs
    }
}

impl Sub for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
        &self - &rhs
    }
}

impl Mul for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
        &self * &rhs
    }
}

impl Mul<f64> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: f64) -> PuiseuxSeries {
        self.scale(rhs)
    }
}

impl Mul<f64> for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: f64) -> PuiseuxSeries {
        self.scale(rhs)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        self.scale(-1.0)
    }
}

impl Neg for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(coeffs: &[f64], order: i32) -> PuiseuxSeries {
        PuiseuxSeries::new(0, coeffs.to_vec(), order)
    }

    #[test]
    fn binomial_square_root() {
        let s = poly(&[1.0, 0.0, 1.0], 8).sqrt().unwrap();
        let expected = [1.0, 0.0, 0.5, 0.0, -0.125, 0.0, 0.0625, 0.0, -0.0390625];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(s.coeff_t(k as i32), *e, epsilon = 1e-15);
        }
        assert_eq!(s.order_t(), 8);
    }

    #[test]
    fn geometric_inverse() {
        let s = poly(&[1.0, -1.0], 6).invert().unwrap();
        for k in 0..=6 {
            assert_eq!(s.coeff_t(k), 1.0);
        }
    }

    #[test]
    fn singular_square_root() {
        // √(K(m+2)/m) = √(2K) t⁻¹ (1 + t²/4 - t⁴/32 + …)
        let k = 3.0;
        let inner = PuiseuxSeries::new(-2, vec![2.0 * k, 0.0, k], 6);
        let s = inner.sqrt().unwrap();
        let lead = (2.0 * k).sqrt();
        assert_eq!(s.low_t(), -1);
        assert_relative_eq!(s.coeff_t(-1), lead, max_relative = 1e-15);
        assert_relative_eq!(s.coeff_t(1), lead / 4.0, max_relative = 1e-15);
        assert_relative_eq!(s.coeff_t(3), -lead / 32.0, max_relative = 1e-15);
        assert_eq!(s.order_t(), 7);
    }

    #[test]
    fn order_tracking() {
        let a = PuiseuxSeries::new(-1, vec![1.0, 2.0, 3.0], 4);
        let b = PuiseuxSeries::new(1, vec![1.0], 7);
        assert_eq!((&a * &b).order_t(), 5);
        assert_eq!((&a + &b).order_t(), 4);
        assert_eq!(a.invert().unwrap().order_t(), 6);
        assert_eq!(a.shift(3).order_t(), 7);
        assert_eq!(a.truncate(2).order_t(), 2);
    }

    #[test]
    fn errors() {
        assert_eq!(PuiseuxSeries::zero(4).invert(), Err(Error::ZeroLeadingCoefficient));
        assert!(matches!(PuiseuxSeries::t(4).sqrt(), Err(Error::OffLattice(_))));
        assert!(matches!(poly(&[-1.0, 1.0], 4).sqrt(), Err(Error::OffLattice(_))));
    }

    #[test]
    fn powf_matches_sqrt_and_inverse() {
        let s = poly(&[2.0, 0.3, -0.7, 1.1], 7);
        let a = s.powf(0.5).unwrap();
        let b = s.sqrt().unwrap();
        let c = s.powf(-1.0).unwrap();
        let d = s.invert().unwrap();
        for k in 0..=7 {
            assert_relative_eq!(a.coeff_t(k), b.coeff_t(k), epsilon = 1e-14);
            assert_relative_eq!(c.coeff_t(k), d.coeff_t(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn m_exponents() {
        let s = PuiseuxSeries::m_power(2.0, 1.5, 7) + PuiseuxSeries::m_power(-1.0, -0.5, 7);
        assert_eq!(s.coeff_m(1.5), 2.0);
        assert_eq!(s.coeff_m(-0.5), -1.0);
        let terms: Vec<_> = s.terms().collect();
        assert_eq!(terms, vec![(-0.5, -1.0), (1.5, 2.0)]);
        assert_relative_eq!(s.evaluate(0.25), 2.0 * 0.125 - 2.0, max_relative = 1e-15);
    }
}
