//! JSON function specs and the analytic constructor.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convex::families::{MaxAffine, PPower, PolytopeGauge, Quadratic, Splice};
use crate::convex::ConvexFn;
use crate::error::Result;
use crate::linalg::Mat;
use crate::polytope::{BodyFile, SymmetricPolytope};

/// `{"family": "...", ...}` description of a supported analytic family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FunctionSpec {
    /// `x·Ax/2` with `A` symmetric positive definite.
    Quadratic { matrix: Vec<Vec<f64>> },
    /// `Σ|x_i|^p / p` with `p > 1`.
    Ppower { n: usize, p: f64 },
    /// Symmetrized max-affine: `max_i (|a_i·x| + b_i)`.
    Maxaffine {
        slopes: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// Minkowski gauge of a symmetric polytope.
    Gauge { body: BodyFile },
    /// `|x|²/2 + C` outside radius `R`, smooth even core inside.
    Splice {
        n: usize,
        radius: f64,
        constant: f64,
        amplitude: f64,
    },
}

pub fn build_analytic(spec: &FunctionSpec) -> Result<ConvexFn> {
    Ok(match spec {
        FunctionSpec::Quadratic { matrix } => Arc::new(Quadratic::new(Mat::from_rows(matrix))?),
        FunctionSpec::Ppower { n, p } => Arc::new(PPower::new(*n, *p)?),
        FunctionSpec::Maxaffine { slopes, offsets } => {
            Arc::new(MaxAffine::new(slopes.clone(), offsets.clone())?)
        }
        FunctionSpec::Gauge { body } => {
            let body = SymmetricPolytope::new(body.n, body.rep, body.generators.clone())?;
            Arc::new(PolytopeGauge::new(body)?)
        }
        FunctionSpec::Splice {
            n,
            radius,
            constant,
            amplitude,
        } => Arc::new(Splice::new(*n, *radius, *constant, *amplitude)?),
    })
}

pub fn build_from_json(text: &str) -> Result<ConvexFn> {
    let spec: FunctionSpec = serde_json::from_str(text)?;
    build_analytic(&spec)
}
