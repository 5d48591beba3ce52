//! Fixed inputs shared by the benchmarks.

use oscibo_core::geometry::{rho_from_coordinates, RhoConfiguration};
use oscibo_core::harmonic::{forward_map, HarmonicPotential};
use oscibo_core::{SymmetricPairMap, SystemSpec};

/// A generic-mass potential with a known exact solution.
pub fn generic_potential(n: usize) -> HarmonicPotential {
    let masses: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64).collect();
    let d = n.max(3) - 1;
    let spec = SystemSpec::new(d.max(2), masses, 1.0).expect("valid system");
    let a = SymmetricPairMap::from_fn(n, |i, j| 0.4 + 0.1 * ((i * 7 + j * 3) % 5) as f64);
    forward_map(&spec, &a).expect("normalizable exponents")
}

/// Vertices of a slightly irregular simplex in `n - 1` dimensions.
pub fn irregular_simplex(n: usize) -> RhoConfiguration {
    let dim = n - 1;
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..dim).map(|k| if k + 1 == i { 1.0 + 0.1 * k as f64 } else { 0.05 * (i * k) as f64 }).collect())
        .collect();
    rho_from_coordinates(&points)
}
