//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain specification: {0}")]
    InvalidSpec(String),

    #[error("Minkowski radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("no critical position found for direction ({ox}, {oy}): containment never fails")]
    NoCriticalPosition { ox: f64, oy: f64 },

    #[error("parallel-set depth {s} is not in [0, rho = {rho})")]
    DepthExceedsRho { s: f64, rho: f64 },

    #[error("rasterization produced no interior cell")]
    EmptyDomain,

    #[error("point ({x}, {y}) is outside the computational domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("solver failed to converge: {0}")]
    NonConvergence(String),

    #[error("solution lost positivity: min value {min}")]
    NegativeSolution { min: f64 },

    #[error("parallel surface sampling collapsed at depth {t}")]
    DegenerateSurface { t: f64 },

    #[error("stability hypothesis violated: seminorm {seminorm} >= threshold {threshold}")]
    HypothesisViolated { seminorm: f64, threshold: f64 },

    #[error("sandwich depth {s} outside admissible interval ({lo}, {hi})")]
    InvalidSandwichDepth { s: f64, lo: f64, hi: f64 },

    #[error("empirical growth rate is not positive (min ratio {0})")]
    NonPositiveK(f64),

    #[error("empirical normal-derivative bound is not positive (min {0})")]
    NonPositiveD0(f64),

    #[error("field is not discrete-harmonic: residual {residual} exceeds {tol}")]
    NotHarmonic { residual: f64, tol: f64 },

    #[error("field does not solve the stated equation: residual {residual} exceeds {tol}")]
    NotSolution { residual: f64, tol: f64 },

    #[error("no chain path between endpoints after erosion by {erosion}")]
    NoPath { erosion: f64 },

    #[error("chain construction violated an invariant: {0}")]
    ChainInvariant(String),

    #[error("log-log fit needs >= 3 strictly positive samples: {0}")]
    DegenerateFit(String),

    #[error("harnack factors need 0 <= d < r, got d = {d}, r = {r}")]
    InvalidHarnackOffset { d: f64, r: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
