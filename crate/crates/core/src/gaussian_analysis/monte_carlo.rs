//! Seeded Monte Carlo estimators used as independent checks.
//!
//! Samples are drawn in fixed-size chunks; chunk `k` uses a ChaCha stream
//! selected by `k`, so every sample is reproducible regardless of how chunks
//! are scheduled across threads. Chunk sums are combined in chunk order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;

use super::QuadraticForm;
use crate::error::{Error, Result};
use crate::geometry::{triangle_area, RhoConfiguration};
use crate::pairs::SymmetricPairMap;
use crate::state::GaussianState;

const CHUNK: usize = 8192;

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `|estimate - reference| ≤ k·std_error`.
    pub fn agrees_with(&self, reference: f64, k: f64) -> bool {
        (self.estimate - reference).abs() <= k * self.std_error
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

fn chunked<F>(samples: usize, seed: u64, chunk_fn: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, usize) -> Moments + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(samples - k * CHUNK);
            chunk_fn(&mut rng, len)
        })
        .collect();
    parts.iter().fold(Moments::default(), |acc, m| Moments {
        sum: acc.sum + m.sum,
        sum_sq: acc.sum_sq + m.sum_sq,
    })
}

fn mean_and_error(m: Moments, samples: usize) -> (f64, f64) {
    let n = samples as f64;
    let mean = m.sum / n;
    let var = ((m.sum_sq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// Importance-sampled overlap `T` of two states.
///
/// The proposal is the equal mixture of both normalized densities `|ψ_i|²`,
/// which makes every weight `sech(½ ln(p₁/p₂)) ∈ (0, 1]`. The weight mean
/// estimates `√T`; the reported standard error is propagated to `T`.
pub fn mc_overlap(s1: &GaussianState, s2: &GaussianState, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if s1.spec().n() != s2.spec().n() || s1.spec().d() != s2.spec().d() {
        return Err(Error::InvalidSystem("overlap of states with different n or d".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidSystem("at least two samples are required".into()));
    }
    let d = s1.spec().d();
    let a1 = s1.quadratic_form();
    let a2 = s2.quadratic_form();
    let k = a1.dim();
    let ld1 = a1.log_det().ok_or(Error::NonNormalizable)?;
    let ld2 = a2.log_det().ok_or(Error::NonNormalizable)?;
    // x = (2L)^{-T} z has covariance (4A)^{-1}, the density of |ψ|² per component
    let samplers = [inverse_sqrt_factor(&a1)?, inverse_sqrt_factor(&a2)?];
    let diff = a1.matrix() - a2.matrix();
    let offset = 0.5 * d as f64 * (ld1 - ld2);

    let moments = chunked(samples, seed, |rng, len| {
        let mut m = Moments::default();
        let mut z = DVector::zeros(k);
        for _ in 0..len {
            let factor = &samplers[usize::from(rng.random::<bool>())];
            let mut log_ratio = offset;
            for _ in 0..d {
                for v in z.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                let x = factor * &z;
                log_ratio -= 2.0 * x.dot(&(&diff * &x));
            }
            let w = 1.0 / (0.5 * log_ratio).cosh();
            m.sum += w;
            m.sum_sq += w * w;
        }
        m
    });
    let (root, root_error) = mean_and_error(moments, samples);
    Ok(MonteCarloEstimate {
        estimate: root * root,
        std_error: 2.0 * root * root_error,
        samples,
    })
}

fn inverse_sqrt_factor(form: &QuadraticForm) -> Result<DMatrix<f64>> {
    let chol = form.matrix().clone().cholesky().ok_or(Error::NonNormalizable)?;
    let l2 = chol.l() * 2.0;
    let inv = l2.try_inverse().ok_or(Error::NonNormalizable)?;
    Ok(inv.transpose())
}

/// `∫ exp(-2Σ c_p ρ_p) S^{d-3} dρ` over valid triangles, for three particles.
///
/// Each `ρ_p` is drawn from `Exp(2c_p)`; the weight is the measure factor on
/// the triangle-inequality region divided by the proposal normalization.
/// Requires every exponent positive.
pub fn mc_rho_normalization_3body(phase: &SymmetricPairMap, d: usize, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if phase.n() != 3 {
        return Err(Error::UnsupportedN(phase.n()));
    }
    if d < 2 {
        return Err(Error::InvalidSystem("three-body measure requires d >= 2".into()));
    }
    if phase.values().iter().any(|&c| !(c > 0.0)) {
        return Err(Error::NonNormalizable);
    }
    if samples < 2 {
        return Err(Error::InvalidSystem("at least two samples are required".into()));
    }
    let rates: Vec<f64> = phase.values().iter().map(|c| 2.0 * c).collect();
    let dists: Vec<Exp<f64>> = rates.iter().map(|&r| Exp::new(r).expect("positive rate")).collect();
    let scale = 1.0 / rates.iter().product::<f64>();
    let power = d as i32 - 3;

    let moments = chunked(samples, seed, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            let rho: Vec<f64> = dists.iter().map(|e| rng.sample(e)).collect();
            let config = RhoConfiguration::new(SymmetricPairMap::from_values(3, rho)).expect("positive samples");
            let w = match triangle_area(&config) {
                Ok(area) if !area.degenerate || power >= 0 => scale * area.value.powi(power),
                _ => 0.0,
            };
            m.sum += w;
            m.sum_sq += w * w;
        }
        m
    });
    let (estimate, std_error) = mean_and_error(moments, samples);
    Ok(MonteCarloEstimate {
        estimate,
        std_error,
        samples,
    })
}
