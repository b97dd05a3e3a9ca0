//! Tensor trapezoid quadrature over boxes.
//!
//! One sweep accumulates both the full-grid sum and the half-resolution sum
//! (even-index subgrid), so a Richardson-style error estimate costs no extra
//! evaluations. Work is split over first-axis slabs and the slab results are
//! folded in index order, so the value is identical for any worker count.
//! For smooth integrands that decay to zero at the box boundary the
//! trapezoid rule converges spectrally, which is what makes the desk-scale
//! node counts here viable.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, nodes: Vec<usize>) -> Result<BoxDomain> {
        if lo.len() != hi.len() || lo.len() != nodes.len() || lo.is_empty() {
            return Err(Error::Spec("box domain shape mismatch".into()));
        }
        for ((&a, &b), &n) in lo.iter().zip(&hi).zip(&nodes) {
            if !(a < b) {
                return Err(Error::Spec(format!("box needs lo < hi, got [{a}, {b}]")));
            }
            if n < 3 || n % 2 == 0 {
                return Err(Error::Spec(format!(
                    "node count must be odd and at least 3 for the halving estimate, got {n}"
                )));
            }
        }
        Ok(BoxDomain { lo, hi, nodes })
    }

    /// Symmetric box `[-h_k, h_k]` per axis.
    pub fn symmetric(half: &[f64], nodes: usize) -> Result<BoxDomain> {
        BoxDomain::new(
            half.iter().map(|h| -h).collect(),
            half.to_vec(),
            vec![nodes; half.len()],
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn step(&self, k: usize) -> f64 {
        (self.hi[k] - self.lo[k]) / (self.nodes[k] - 1) as f64
    }

    pub fn total_nodes(&self) -> u64 {
        self.nodes.iter().map(|&n| n as u64).product()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub fine: Complex64,
    /// Same integrand on the even-index subgrid (double spacing).
    pub coarse: Complex64,
    /// Largest |f| seen on the box boundary; truncation telltale.
    pub boundary_max: f64,
    pub nodes: u64,
}

impl QuadOutcome {
    /// Conservative absolute error estimate: the halving difference with a
    /// relative floor for the spectrally-converged regime.
    pub fn error_estimate(&self) -> f64 {
        let diff = (self.fine - self.coarse).norm();
        diff.max(1e-13 * self.fine.norm()).max(1e-15)
    }
}

pub fn tensor_trapezoid<F>(domain: &BoxDomain, f: F) -> QuadOutcome
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    tensor_trapezoid_stateful(domain, (), move |_, x| f(x))
}

/// Variant threading mutable state along each first-axis slab's sweep, for
/// integrands that benefit from warm starts (the sweep order inside a slab
/// is a fixed odometer, so results stay worker-count independent).
pub fn tensor_trapezoid_stateful<S, F>(domain: &BoxDomain, init: S, f: F) -> QuadOutcome
where
    S: Clone + Send + Sync,
    F: Fn(&mut S, &[f64]) -> Complex64 + Sync,
{
    let dim = domain.dim();
    let steps: Vec<f64> = (0..dim).map(|k| domain.step(k)).collect();
    let slabs: Vec<(Complex64, Complex64, f64)> = (0..domain.nodes[0])
        .into_par_iter()
        .map(|i0| {
            let mut state = init.clone();
            let mut idx = vec![0usize; dim];
            idx[0] = i0;
            let mut x = vec![0.0; dim];
            let inner: u64 = domain.nodes[1..].iter().map(|&n| n as u64).product();
            let mut fine = Complex64::new(0.0, 0.0);
            let mut coarse = Complex64::new(0.0, 0.0);
            let mut boundary: f64 = 0.0;
            for _ in 0..inner {
                let mut w_fine = 1.0;
                let mut w_coarse = 1.0;
                let mut on_coarse = true;
                let mut on_boundary = false;
                for k in 0..dim {
                    let n = domain.nodes[k];
                    let i = idx[k];
                    x[k] = domain.lo[k] + steps[k] * i as f64;
                    let edge = i == 0 || i == n - 1;
                    w_fine *= steps[k] * if edge { 0.5 } else { 1.0 };
                    if i % 2 == 0 {
                        w_coarse *= 2.0 * steps[k] * if edge { 0.5 } else { 1.0 };
                    } else {
                        on_coarse = false;
                    }
                    on_boundary |= edge;
                }
                let v = f(&mut state, &x);
                fine += w_fine * v;
                if on_coarse {
                    coarse += w_coarse * v;
                }
                if on_boundary {
                    boundary = boundary.max(v.norm());
                }
                // odometer over axes 1.., last fastest
                for k in (1..dim).rev() {
                    idx[k] += 1;
                    if idx[k] < domain.nodes[k] {
                        break;
                    }
                    idx[k] = 0;
                }
                if dim == 1 {
                    break;
                }
            }
            (fine, coarse, boundary)
        })
        .collect();
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut boundary: f64 = 0.0;
    for (a, b, c) in slabs {
        fine += a;
        coarse += b;
        boundary = boundary.max(c);
    }
    QuadOutcome {
        fine,
        coarse,
        boundary_max: boundary,
        nodes: domain.total_nodes(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_integral_is_spectrally_accurate() {
        let domain = BoxDomain::symmetric(&[8.0], 65).unwrap();
        let out = tensor_trapezoid(&domain, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0));
        assert!((out.fine.re - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(out.error_estimate() < 1e-6);
    }

    #[test]
    fn two_dim_gaussian() {
        let domain = BoxDomain::symmetric(&[7.0, 7.0], 41).unwrap();
        let out = tensor_trapezoid(&domain, |x| {
            Complex64::new((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        });
        assert!((out.fine.re - 2.0 * PI).abs() < 1e-10, "{}", out.fine.re);
    }

    #[test]
    fn coarse_sum_matches_direct_half_grid() {
        let domain = BoxDomain::symmetric(&[2.0], 9).unwrap();
        let g = |x: &[f64]| Complex64::new(x[0] * x[0], 0.0);
        let out = tensor_trapezoid(&domain, g);
        let half = BoxDomain::symmetric(&[2.0], 5).unwrap();
        let direct = tensor_trapezoid(&half, g);
        assert!((out.coarse - direct.fine).norm() < 1e-14);
    }

    #[test]
    fn boundary_max_is_tracked() {
        let domain = BoxDomain::symmetric(&[1.0, 1.0], 5).unwrap();
        let out = tensor_trapezoid(&domain, |x| Complex64::new(x[0] + 2.0, 0.0));
        assert!((out.boundary_max - 3.0).abs() < 1e-15);
    }

    #[test]
    fn even_node_counts_rejected() {
        assert!(BoxDomain::symmetric(&[1.0], 8).is_err());
    }

    #[test]
    fn stateful_sweep_sees_slab_order() {
        // state counts evaluations per slab; total must cover the grid
        let domain = BoxDomain::symmetric(&[1.0, 1.0], 5).unwrap();
        let out = tensor_trapezoid_stateful(&domain, 0u64, |count, _x| {
            *count += 1;
            Complex64::new(1.0, 0.0)
        });
        assert_eq!(out.nodes, 25);
        assert!((out.fine.re - 4.0).abs() < 1e-12);
    }
}
