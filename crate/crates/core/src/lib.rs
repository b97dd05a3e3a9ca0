//! Numerical convex-duality toolkit.
//!
//! Desk-scale machinery for experiments around convex conjugation and polar
//! duality: discrete Legendre transforms with a brute-force oracle, polytope
//! volumes and Mahler products, the functional volume-product inequality,
//! gradient-graph manifolds with their differential-form identities, a
//! contour-deformation integral, and directed volumes of boundary graphs.
//!
//! Everything is seeded and deterministic for a fixed worker count; all
//! tolerances live in [`config::Tolerances`] and are echoed into reports.

pub mod battery;
pub mod config;
pub mod contour;
pub mod convex;
pub mod error;
pub mod estimate;
pub mod extreal;
pub mod functional;
pub mod grid;
pub mod kuperberg;
pub mod lagrangian;
pub mod legendre;
pub mod linalg;
pub mod polytope;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
