//! Extended-real convex functions with optional derivative access and
//! truthful evenness / smoothness / growth metadata.

mod build;
mod families;
pub mod fd;

pub use build::{build_analytic, build_from_json, FunctionSpec};
pub use families::{
    Blend, GridBacked, LipschitzEnvelope, MaxAffine, MaxWithShiftedSqNorm, PPower, PolytopeGauge,
    Quadratic, Shifted, Splice, WithLinearMap,
};

use std::sync::Arc;

use crate::extreal::ExtReal;
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    PiecewiseLinear,
    GridSampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Growth {
    /// At most linear at infinity (gauges, max-affine).
    Linear,
    /// Equals `|x|²/2 + constant` outside `|x| > radius`.
    QuadraticAtInfinity { radius: f64, constant: f64 },
    /// Superlinear but otherwise unclassified (p-powers, general quadratics).
    General,
}

impl Growth {
    pub fn is_superlinear(self) -> bool {
        !matches!(self, Growth::Linear)
    }

    pub fn label(self) -> &'static str {
        match self {
            Growth::Linear => "linear",
            Growth::QuadraticAtInfinity { .. } => "quadratic-at-infinity",
            Growth::General => "general",
        }
    }
}

/// An even, proper convex function on `R^n` with extended-real values.
///
/// Evaluation is pure and instances are immutable after construction, so
/// sharing across worker threads is unrestricted.
pub trait ConvexFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> ExtReal;

    /// Analytic gradient where the function is finite and smooth.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Analytic Hessian where available.
    fn hessian(&self, _x: &[f64]) -> Option<Mat> {
        None
    }

    fn is_even(&self) -> bool;

    fn smoothness(&self) -> Smoothness;

    fn growth(&self) -> Growth;

    /// Closed-form convex conjugate, for families that have one.
    fn analytic_conjugate(&self) -> Option<Arc<dyn ConvexFunction>> {
        None
    }

    /// Short description for reports.
    fn describe(&self) -> String;
}

pub type ConvexFn = Arc<dyn ConvexFunction>;

/// Finite evaluation or panic; for sampling paths where the caller already
/// knows the point is interior.
pub fn eval_finite(f: &dyn ConvexFunction, x: &[f64]) -> f64 {
    f.eval(x).unwrap_finite()
}
