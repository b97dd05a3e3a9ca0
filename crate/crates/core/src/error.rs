//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,

    #[error("p-power exponent must exceed 1, got {0}")]
    BadExponent(f64),

    #[error("splice violates convexity: min sampled Hessian eigenvalue {0:.3e}")]
    SpliceNotConvex(f64),

    #[error("function is infinite at the origin")]
    InfiniteAtOrigin,

    #[error("grid function has no finite values")]
    EmptyFiniteSupport,

    #[error("evaluation hit +inf inside a finite-difference stencil")]
    InfiniteInStencil,

    #[error("generators do not span R^{0}")]
    DegenerateBody(usize),

    #[error("dimension {n} exceeds the cap {cap} for {what}")]
    DimensionCap {
        n: usize,
        cap: usize,
        what: &'static str,
    },

    #[error("requested {requested} grid nodes, configured cap is {cap}")]
    MemoryBudget { requested: usize, cap: usize },

    #[error("Newton iteration stalled: residual {residual:.3e} after {iters} iterations")]
    NewtonStalled { residual: f64, iters: usize },

    #[error("projection inversion failed on {failed} of {total} nodes (cap {cap_percent}%)")]
    ProjectionFailures {
        failed: usize,
        total: usize,
        cap_percent: f64,
    },

    #[error("gradient unavailable (kink or missing derivative data)")]
    GradientUnavailable,

    #[error("Hessian unavailable")]
    HessianUnavailable,

    #[error("family is not pointwise monotone (members {i} and {j} cross at node {node})")]
    NotMonotone { i: usize, j: usize, node: usize },

    #[error("superlinear growth required, but growth class is {0}")]
    GrowthFlag(&'static str),

    #[error("axis must have at least 2 nodes, got {0}")]
    BadAxis(usize),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("smoothing radius required for a non-smooth gauge")]
    SmoothingRequired,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
