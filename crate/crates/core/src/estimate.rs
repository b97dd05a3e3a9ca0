//! Integral estimates with provenance for reproducibility.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A (possibly complex) integral value with an error estimate and the
/// sampling metadata needed to reproduce it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub re: f64,
    pub im: f64,
    /// Estimated absolute error (Richardson difference or Monte-Carlo stderr).
    pub error: f64,
    /// Node or sample count.
    pub count: u64,
    /// Seed, for stochastic estimates.
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl IntegralEstimate {
    pub fn real(value: f64, error: f64, count: u64) -> Self {
        IntegralEstimate {
            re: value,
            im: 0.0,
            error,
            count,
            seed: None,
            warnings: Vec::new(),
        }
    }

    pub fn complex(value: Complex64, error: f64, count: u64) -> Self {
        IntegralEstimate {
            re: value.re,
            im: value.im,
            error,
            count,
            seed: None,
            warnings: Vec::new(),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.value().norm()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}
