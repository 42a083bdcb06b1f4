//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point violates the declared open domain of a scalar field.
    #[error("point outside declared domain: {0}")]
    Domain(String),

    /// A NaN or infinity showed up while evaluating an operation graph.
    #[error("non-finite intermediate value: {0}")]
    NonFinite(String),

    #[error("unsupported dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Coordinate 2-plane too degenerate for a sectional-curvature quotient.
    #[error("degenerate coordinate plane ({i},{j}): gram determinant {denom:e}")]
    DegeneratePlane { i: usize, j: usize, denom: f64 },

    /// The holonomy decision table only applies to simply connected,
    /// irreducible, nonsymmetric manifolds.
    #[error("holonomy table hypotheses not met: {0}")]
    HypothesesNotMet(String),

    #[error("curvature operator not antisymmetric w.r.t. metric (residual {0:e})")]
    NotAntisymmetric(f64),

    #[error("rank computation unstable: {0}")]
    RankUnstable(String),

    #[error("integration step too coarse: halving the step changed the transport by {0:e}")]
    StepTooCoarse(f64),

    #[error("matrix logarithm undefined: {0}")]
    LogUndefined(String),

    #[error("model has no sampling support: {0}")]
    SamplerUnavailable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
