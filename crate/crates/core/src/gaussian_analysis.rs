//! Gaussian integrals over relative Cartesian coordinates.
//!
//! `Σ c_ij |r_i - r_j|²` is written as `Σ_comp xᵀ A x` with the relative basis
//! `x_k = r_{k+1} - r_1`. Overlaps are normalized ratios, so basis Jacobians
//! and the angular constants of the ρ-space measure cancel.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::pairs::SymmetricPairMap;
use crate::state::GaussianState;

pub mod monte_carlo;

pub use monte_carlo::{mc_overlap, mc_rho_normalization_3body, MonteCarloEstimate};

/// Symmetric `(n-1)×(n-1)` matrix of a pair form in the relative basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square(), "quadratic form matrix must be square");
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn cholesky(&self) -> Option<Cholesky<f64, Dyn>> {
        if self.matrix.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let chol = self.matrix.clone().cholesky()?;
        let diag = chol.l_dirty().diagonal();
        let max = self.matrix.diagonal().amax();
        // reject numerically singular factors
        if diag.iter().all(|&l| l * l > 1e-14 * max) {
            Some(chol)
        } else {
            None
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.dim() > 0 && self.cholesky().is_some()
    }

    /// `ln det A`, when positive definite.
    pub fn log_det(&self) -> Option<f64> {
        self.cholesky()
            .map(|c| 2.0 * c.l_dirty().diagonal().iter().map(|l| l.ln()).sum::<f64>())
    }

    /// `Σ_jk A_jk (x_j · x_k)` for relative vectors `x_k`.
    pub fn evaluate<P: AsRef<[f64]>>(&self, relative: &[P]) -> f64 {
        let k = self.dim();
        assert_eq!(relative.len(), k, "expected {k} relative vectors");
        let mut total = 0.0;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = relative[a].as_ref().iter().zip(relative[b].as_ref()).map(|(x, y)| x * y).sum();
                total += self.matrix[(a, b)] * dot;
            }
        }
        total
    }

    /// `Pᵀ A P`, the same form in the basis `x = P x'`.
    pub fn transformed(&self, basis: &DMatrix<f64>) -> Self {
        Self::from_matrix(basis.transpose() * &self.matrix * basis)
    }
}

/// Relative-basis matrix of `Σ c_ij ρ_ij`.
pub fn quadratic_form_matrix(phase: &SymmetricPairMap) -> QuadraticForm {
    let k = phase.n() - 1;
    let mut a = DMatrix::zeros(k, k);
    for ((i, j), c) in phase.iter() {
        if i == 0 {
            a[(j - 1, j - 1)] += c;
        } else {
            let (p, q) = (i - 1, j - 1);
            a[(p, p)] += c;
            a[(q, q)] += c;
            a[(p, q)] -= c;
            a[(q, p)] -= c;
        }
    }
    QuadraticForm::from_matrix(a)
}

impl GaussianState {
    pub fn quadratic_form(&self) -> QuadraticForm {
        quadratic_form_matrix(self.phase())
    }
}

/// Squared normalized overlap of two Gaussian states in `d` dimensions.
pub fn overlap_squared(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.spec().n() != s2.spec().n() || s1.spec().d() != s2.spec().d() {
        return Err(Error::InvalidSystem("overlap of states with different n or d".into()));
    }
    overlap_squared_forms(&s1.quadratic_form(), &s2.quadratic_form(), s1.spec().d())
}

/// `T = [det(2A₁) det(2A₂)]^{d/2} / det(A₁ + A₂)^d`.
pub fn overlap_squared_forms(a1: &QuadraticForm, a2: &QuadraticForm, d: usize) -> Result<f64> {
    Ok(log_overlap_squared(a1, a2, d)?.exp())
}

/// `ln T`; accurate when `T` is within rounding of 1.
pub fn log_overlap_squared(a1: &QuadraticForm, a2: &QuadraticForm, d: usize) -> Result<f64> {
    let k = a1.dim();
    if a2.dim() != k {
        return Err(Error::InvalidSystem("overlap of forms with different sizes".into()));
    }
    let ld1 = a1.log_det().ok_or(Error::NonNormalizable)?;
    let ld2 = a2.log_det().ok_or(Error::NonNormalizable)?;
    let sum = QuadraticForm::from_matrix(a1.matrix() + a2.matrix());
    let ld12 = sum.log_det().ok_or(Error::NonNormalizable)?;
    let d = d as f64;
    let ln2 = std::f64::consts::LN_2 * k as f64;
    Ok(0.5 * d * (ld1 + ld2 + 2.0 * ln2) - d * ld12)
}

/// Overlap of the exact and Born-Oppenheimer three-body states,
/// `2^{7d/4} (m+2)^{d/4} (√(2(m+2)) + 2)^{-d}`.
pub fn closed_form_t(m: f64, d: usize) -> f64 {
    let d = d as f64;
    (1.75 * d * std::f64::consts::LN_2 + 0.25 * d * (m + 2.0).ln() - d * ((2.0 * (m + 2.0)).sqrt() + 2.0).ln()).exp()
}

/// Normalization prefactor of the exact two-heavy three-body state with
/// respect to the ρ-space measure `S^{d-3} dρ₁₂ dρ₁₃ dρ₂₃`:
/// `(√π Γ(d/2) Γ((d-1)/2) / 2^{d-4})^{-½} (Km(1+K)/(m+2))^{d/8}`.
pub fn norm_constant_3body(k: f64, m: f64, d: usize) -> f64 {
    let df = d as f64;
    let angular = std::f64::consts::PI.sqrt() * libm::tgamma(0.5 * df) * libm::tgamma(0.5 * (df - 1.0)) / 2f64.powf(df - 4.0);
    angular.powf(-0.5) * (k * m * (1.0 + k) / (m + 2.0)).powf(df / 8.0)
}

/// `ln ∫ exp(-2Φ) dy` over the non-clamped particles' coordinates, with the
/// `clamped` particles held at `positions` (one `d`-vector each).
///
/// Used to normalize electronic states, whose phase is a function of the
/// light coordinates at fixed heavy ones.
pub fn partial_log_integral<P: AsRef<[f64]>>(phase: &SymmetricPairMap, clamped: &[usize], positions: &[P]) -> Result<f64> {
    let n = phase.n();
    if clamped.len() != positions.len() || clamped.iter().any(|&i| i >= n) {
        return Err(Error::InvalidSystem("one position per clamped particle is required".into()));
    }
    let d = positions.first().map_or(0, |p| p.as_ref().len());
    if positions.iter().any(|p| p.as_ref().len() != d) || d == 0 {
        return Err(Error::InvalidSystem("clamped positions must share a positive dimension".into()));
    }
    let free: Vec<usize> = (0..n).filter(|i| !clamped.contains(i)).collect();
    // weighted graph Laplacian: Φ = Σ_comp rᵀ G r
    let mut g = DMatrix::zeros(n, n);
    for ((i, j), c) in phase.iter() {
        g[(i, i)] += c;
        g[(j, j)] += c;
        g[(i, j)] -= c;
        g[(j, i)] -= c;
    }
    let a = DMatrix::from_fn(free.len(), free.len(), |p, q| g[(free[p], free[q])]);
    let form = QuadraticForm::from_matrix(a.clone());
    let log_det = form.log_det().ok_or(Error::NonNormalizable)?;
    let chol = form.cholesky().ok_or(Error::NonNormalizable)?;
    let mut exponent = 0.0;
    for comp in 0..d {
        let h = DVector::from_iterator(clamped.len(), positions.iter().map(|p| p.as_ref()[comp]));
        let b = DVector::from_fn(free.len(), |p, _| {
            clamped.iter().enumerate().map(|(q, &hq)| g[(free[p], hq)] * h[q]).sum::<f64>()
        });
        let c: f64 = (0..clamped.len())
            .flat_map(|p| (0..clamped.len()).map(move |q| (p, q)))
            .map(|(p, q)| g[(clamped[p], clamped[q])] * h[p] * h[q])
            .sum();
        let ainv_b = chol.solve(&b);
        exponent += -2.0 * (c - b.dot(&ainv_b));
    }
    let l = free.len() as f64;
    let per_comp = 0.5 * l * std::f64::consts::PI.ln() - 0.5 * (log_det + l * std::f64::consts::LN_2);
    Ok(d as f64 * per_comp + exponent)
}
