//! Exact ground states of pairwise harmonic `n`-body systems in the space of
//! squared interparticle distances, and the accuracy of the Born-Oppenheimer
//! approximation for two heavy and `n - 2` light particles.
//!
//! Particles are labelled from 0. In the two-heavy family the heavy
//! particles are 0 and 1.

pub mod born_oppenheimer;
pub mod error;
pub mod gaussian_analysis;
pub mod geometry;
pub mod harmonic;
pub mod operators;
pub mod pairs;
pub mod puiseux;
pub mod state;
pub mod verify;

pub use born_oppenheimer::{bo_assemble, BODecomposition, ElectronicSolution, NuclearSolution};
pub use error::{Error, Result};
pub use gaussian_analysis::{closed_form_t, overlap_squared, MonteCarloEstimate, QuadraticForm};
pub use geometry::{RhoConfiguration, SimplexContent};
pub use harmonic::{
    forward_map, ground_energy, inverse_map, two_heavy_exact, HarmonicPotential, PairClass, TwoHeavyFamily,
};
pub use operators::{RadialOperator, ResidualRoute};
pub use pairs::SymmetricPairMap;
pub use puiseux::PuiseuxSeries;
pub use state::{GaussianState, SystemSpec};
