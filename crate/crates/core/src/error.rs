use thiserror::Error;

/// Errors produced by the oscibo library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("configuration is not embeddable in Euclidean space (radicand {radicand:e}, tolerance {tolerance:e})")]
    NonEmbeddable { radicand: f64, tolerance: f64 },

    #[error("radial measure is singular: simplex content vanishes and exponent d - n = {exponent} is negative")]
    DegenerateMeasure { exponent: i64 },

    #[error("configuration too close to the boundary for finite differences: rho[{}-{}] = {value:e} < 2h = {limit:e}", .pair.0 + 1, .pair.1 + 1)]
    DegenerateConfiguration { pair: (usize, usize), value: f64, limit: f64 },

    #[error("exponent map does not define a normalizable state")]
    NonNormalizable,

    #[error("potential is not confining")]
    NonConfining,

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parameters outside the supported regime: {0}")]
    InvalidRegime(String),

    #[error("unsupported particle count n = {0}")]
    UnsupportedN(usize),

    #[error("series has a zero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("series operation leaves the half-integer exponent lattice: {0}")]
    OffLattice(String),
}

pub type Result<T> = std::result::Result<T, Error>;
