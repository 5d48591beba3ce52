//! Configuration geometry in relative-distance-squared space.
//!
//! A configuration of `n` particles is described by the `n(n-1)/2` squared
//! distances `ρ_ij = |r_i - r_j|²`. The content of the simplex spanned by the
//! particles bounds the configuration space and enters the radial measure
//! `(content)^(d-n) Π dρ_ij`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pairs::SymmetricPairMap;

/// Relative clamp applied to Cayley-Menger radicands.
const RADICAND_EPS: f64 = 1e-12;

/// Relative eigenvalue tolerance for the Gram-matrix embedding test.
const GRAM_EPS: f64 = 1e-10;

/// Squared interparticle distances of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoConfiguration {
    rho: SymmetricPairMap,
}

impl RhoConfiguration {
    /// Wraps a pair map of squared distances. Entries must be finite and
    /// non-negative.
    pub fn new(rho: SymmetricPairMap) -> Result<Self> {
        if let Some(((i, j), v)) = rho.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSystem(format!(
                "squared distance rho[{}-{}] = {v} must be finite and non-negative",
                i + 1,
                j + 1
            )));
        }
        Ok(Self { rho })
    }

    /// Configuration with every squared distance equal to `value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(SymmetricPairMap::constant(n, value))
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rho.get(i, j)
    }

    pub fn rho(&self) -> &SymmetricPairMap {
        &self.rho
    }

    pub fn into_rho(self) -> SymmetricPairMap {
        self.rho
    }

    /// Largest squared distance; sets the natural scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.rho.max_abs()
    }

    /// Configuration with every squared distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rho.scaled(factor))
    }

    /// Relabels the particles, see [`SymmetricPairMap::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            rho: self.rho.permuted(perm),
        }
    }
}

/// `(n-1)`-dimensional content of the simplex spanned by `n` particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexContent {
    pub value: f64,
    pub degenerate: bool,
}

impl SimplexContent {
    fn from_squared(squared: f64, tolerance: f64) -> Result<Self> {
        if squared < -tolerance {
            return Err(Error::NonEmbeddable {
                radicand: squared,
                tolerance,
            });
        }
        if squared <= tolerance.max(0.0) {
            return Ok(Self {
                value: 0.0,
                degenerate: true,
            });
        }
        Ok(Self {
            value: squared.sqrt(),
            degenerate: false,
        })
    }
}

/// Triangle area from the three squared side lengths (Heron's formula in
/// squared form). Radicands within `1e-12·scale²` below zero are treated as
/// degenerate.
pub fn triangle_area(rho: &RhoConfiguration) -> Result<SimplexContent> {
    if rho.n() != 3 {
        return Err(Error::UnsupportedN(rho.n()));
    }
    let (a, b, c) = (rho.get(0, 1), rho.get(0, 2), rho.get(1, 2));
    let radicand = 2.0 * (a * b + a * c + b * c) - (a * a + b * b + c * c);
    let scale = rho.scale();
    let tolerance = RADICAND_EPS * scale * scale;
    let mut content = SimplexContent::from_squared(radicand, tolerance)?;
    content.value *= 0.25;
    Ok(content)
}

/// Simplex content via the Cayley-Menger determinant.
///
/// For `n` points the bordered `(n+1)×(n+1)` matrix `CM` gives
/// `content² = (-1)^n det(CM) / (2^(n-1) ((n-1)!)²)`.
pub fn simplex_content(rho: &RhoConfiguration) -> Result<SimplexContent> {
    let n = rho.n();
    if n < 2 {
        return Err(Error::UnsupportedN(n));
    }
    let det = determinant(cayley_menger_matrix(rho));
    let k = (n - 1) as i32;
    let factorial: f64 = (1..n).map(|v| v as f64).product();
    let norm = 2f64.powi(k) * factorial * factorial;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let squared = sign * det / norm;
    let tolerance = RADICAND_EPS * rho.scale().powi(k) / norm;
    SimplexContent::from_squared(squared, tolerance)
}

/// The bordered Cayley-Menger matrix: zero corner, unit border, `ρ_ij`
/// inside.
pub fn cayley_menger_matrix(rho: &RhoConfiguration) -> DMatrix<f64> {
    let n = rho.n();
    DMatrix::from_fn(n + 1, n + 1, |r, c| match (r, c) {
        (0, 0) => 0.0,
        (0, _) | (_, 0) => 1.0,
        (r, c) if r == c => 0.0,
        (r, c) => rho.get(r - 1, c - 1),
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut m: DMatrix<f64>) -> f64 {
    let size = m.nrows();
    let mut det = 1.0;
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&a, &b| m[(a, col)].abs().total_cmp(&m[(b, col)].abs()))
            .unwrap_or(col);
        if m[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap_rows(pivot, col);
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for row in col + 1..size {
            let factor = m[(row, col)] / p;
            if factor != 0.0 {
                for k in col + 1..size {
                    let v = m[(col, k)];
                    m[(row, k)] -= factor * v;
                }
            }
        }
    }
    det
}

/// Result of the Gram-matrix embedding test.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub embeddable: bool,
    /// Eigenvalues of the Gram matrix, ascending.
    pub spectrum: Vec<f64>,
    /// Number of eigenvalues above tolerance.
    pub rank: usize,
}

/// Tests whether `rho` is realised by points in `ℝ^d`.
///
/// The Gram matrix `G_jk = ½(ρ_0j + ρ_0k - ρ_jk)`, `j, k = 1..n-1`, must be
/// positive semidefinite with rank at most `d`; eigenvalues are compared
/// against `1e-10·trace(G)`.
pub fn embed_check(rho: &RhoConfiguration, d: usize) -> Embedding {
    let n = rho.n();
    if n < 2 {
        return Embedding {
            embeddable: true,
            spectrum: Vec::new(),
            rank: 0,
        };
    }
    let gram = gram_matrix(rho);
    let trace = gram.trace();
    let mut spectrum: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    let tol = GRAM_EPS * trace.abs();
    let psd = spectrum.iter().all(|&e| e >= -tol);
    let rank = spectrum.iter().filter(|&&e| e > tol).count();
    Embedding {
        embeddable: psd && rank <= d,
        spectrum,
        rank,
    }
}

fn gram_matrix(rho: &RhoConfiguration) -> DMatrix<f64> {
    let n = rho.n();
    let r = |i: usize, j: usize| if i == j { 0.0 } else { rho.get(i, j) };
    DMatrix::from_fn(n - 1, n - 1, |a, b| {
        let (j, k) = (a + 1, b + 1);
        0.5 * (r(0, j) + r(0, k) - r(j, k))
    })
}

/// Squared distances of explicit points. All points must share a dimension.
pub fn rho_from_coordinates<P: AsRef<[f64]>>(points: &[P]) -> RhoConfiguration {
    let n = points.len();
    let rho = SymmetricPairMap::from_fn(n, |i, j| {
        let (a, b) = (points[i].as_ref(), points[j].as_ref());
        assert_eq!(a.len(), b.len(), "points of different dimension");
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    });
    RhoConfiguration { rho }
}

/// Seeded configurations of `n` Gaussian points in `dim` dimensions, each
/// with every `ρ_ij ≥ min_rho` (draws violating this are rejected).
pub fn sample_configurations(n: usize, dim: usize, count: usize, seed: u64, min_rho: f64) -> Vec<RhoConfiguration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let rho = rho_from_coordinates(&points);
        if rho.rho().values().iter().all(|&r| r >= min_rho) {
            out.push(rho);
        }
    }
    out
}

/// Radial-measure weight `(content)^(d-n)`.
pub fn measure_weight(rho: &RhoConfiguration, d: usize) -> Result<f64> {
    let n = rho.n();
    let min_d = if n == 3 { 2 } else { n.saturating_sub(1) };
    if d < min_d {
        return Err(Error::InvalidSystem(format!(
            "dimension d = {d} below the minimum {min_d} for n = {n}"
        )));
    }
    let exponent = d as i64 - n as i64;
    if exponent == 0 {
        return Ok(1.0);
    }
    let content = simplex_content(rho)?;
    if content.degenerate && exponent < 0 {
        return Err(Error::DegenerateMeasure { exponent });
    }
    Ok(content.value.powi(exponent as i32))
}
