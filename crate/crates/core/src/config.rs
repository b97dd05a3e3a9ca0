//! Centralized tolerance and budget defaults.
//!
//! Every numeric threshold used by the library lives here, is serializable,
//! and can be overridden per run; reports echo the resolved values so that a
//! result can never depend on a hidden constant.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Tolerances {
    /// Relative finite-difference step (scaled by max(1, |x_k|) per axis).
    pub fd_step_rel: f64,
    /// Absolute residual target for Newton solves.
    pub newton_residual: f64,
    /// Iteration cap for Newton solves.
    pub newton_max_iter: usize,
    /// Max allowed |fast − oracle| for the discrete Legendre transform.
    pub fast_vs_oracle_abs: f64,
    /// Entrywise tolerance for the form pullback identity.
    pub pullback_entry: f64,
    /// Max imaginary part of the restricted two-form.
    pub lagrangian_imag: f64,
    /// Gradient tolerance for the defining equations of a lifted point.
    pub lambda_defining: f64,
    /// Coordinate tolerance for bipolar generator recovery.
    pub bipolar_coord: f64,
    /// Slack allowed in sampled midpoint-convexity checks.
    pub convexity_slack: f64,
    /// Boundary-integrand / integral ratio at which a box stops expanding.
    pub boundary_ratio: f64,
    /// Error-bar multiplier for statistical and chained-inequality checks.
    pub sigmas: f64,
    /// Inradius below which a thin-body warning is emitted.
    pub thin_body_warning: f64,
    /// Hard cap on total grid nodes per transform.
    pub max_grid_nodes: usize,
    /// Fraction of failed projection inversions tolerated inside a quadrature.
    pub projection_failure_cap: f64,
    /// Strict-convexity floor for sampled Hessian eigenvalues.
    pub convexity_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fd_step_rel: 1e-4,
            newton_residual: 1e-10,
            newton_max_iter: 200,
            fast_vs_oracle_abs: 1e-12,
            pullback_entry: 1e-6,
            lagrangian_imag: 1e-8,
            lambda_defining: 1e-6,
            bipolar_coord: 1e-9,
            convexity_slack: 1e-9,
            boundary_ratio: 1e-12,
            sigmas: 3.0,
            thin_body_warning: 1e-3,
            max_grid_nodes: 40_000_000,
            projection_failure_cap: 0.001,
            convexity_floor: 1e-6,
        }
    }
}
