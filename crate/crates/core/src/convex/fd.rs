//! Central finite differences for gradients and Hessians.

use crate::convex::ConvexFunction;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::Mat;

fn step_for(rel: f64, coord: f64) -> f64 {
    rel * coord.abs().max(1.0)
}

pub fn gradient_fd(f: &dyn ConvexFunction, x: &[f64], rel_step: f64) -> Result<Vec<f64>> {
    let n = f.dim();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for k in 0..n {
        let h = step_for(rel_step, x[k]);
        xp[k] = x[k] + h;
        let fp = f.eval(&xp);
        xp[k] = x[k] - h;
        let fm = f.eval(&xp);
        xp[k] = x[k];
        match (fp, fm) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => g[k] = (a - b) / (2.0 * h),
            _ => return Err(Error::InfiniteInStencil),
        }
    }
    Ok(g)
}

/// Central-difference Hessian, symmetrized by construction.
pub fn hessian_fd(f: &dyn ConvexFunction, x: &[f64], rel_step: f64) -> Result<Mat> {
    let n = f.dim();
    let mut h = Mat::zeros(n, n);
    let mut p = x.to_vec();
    let f0 = match f.eval(x) {
        ExtReal::Finite(v) => v,
        ExtReal::Inf => return Err(Error::InfiniteInStencil),
    };
    for i in 0..n {
        let hi = step_for(rel_step, x[i]);
        p[i] = x[i] + hi;
        let fp = f.eval(&p);
        p[i] = x[i] - hi;
        let fm = f.eval(&p);
        p[i] = x[i];
        match (fp, fm) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                h[(i, i)] = (a - 2.0 * f0 + b) / (hi * hi);
            }
            _ => return Err(Error::InfiniteInStencil),
        }
        for j in (i + 1)..n {
            let hj = step_for(rel_step, x[j]);
            let mut quad = [0.0; 4];
            for (idx, (si, sj)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .iter()
                .enumerate()
            {
                p[i] = x[i] + si * hi;
                p[j] = x[j] + sj * hj;
                match f.eval(&p) {
                    ExtReal::Finite(v) => quad[idx] = v,
                    ExtReal::Inf => return Err(Error::InfiniteInStencil),
                }
            }
            p[i] = x[i];
            p[j] = x[j];
            let mixed = (quad[0] - quad[1] - quad[2] + quad[3]) / (4.0 * hi * hj);
            h[(i, j)] = mixed;
            h[(j, i)] = mixed;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{PPower, Quadratic};
    use crate::linalg::Mat;

    #[test]
    fn hessian_fd_recovers_quadratic_matrix() {
        let a = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let q = Quadratic::new(a.clone()).unwrap();
        let h = hessian_fd(&q, &[0.3, -0.7], 1e-4).unwrap();
        assert!(h.max_abs_diff(&a) < 1e-6);
        assert!(h.is_symmetric(0.0));
    }

    #[test]
    fn hessian_fd_quartic_diagonal() {
        // Σ|x_i|⁴/4 has second derivative 3x² per axis
        let q = PPower::new(2, 4.0).unwrap();
        let h = hessian_fd(&q, &[1.0, 1.0], 1e-4).unwrap();
        let expect = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, 3.0]]);
        assert!(h.max_abs_diff(&expect) < 1e-5);
    }

    #[test]
    fn stencil_through_infinity_is_an_error() {
        use crate::convex::{ConvexFunction, Growth, Smoothness};
        use crate::extreal::ExtReal;
        struct Ind;
        impl ConvexFunction for Ind {
            fn dim(&self) -> usize {
                1
            }
            fn eval(&self, x: &[f64]) -> ExtReal {
                if x[0].abs() <= 1.0 {
                    ExtReal::finite(0.0)
                } else {
                    ExtReal::Inf
                }
            }
            fn is_even(&self) -> bool {
                true
            }
            fn smoothness(&self) -> Smoothness {
                Smoothness::PiecewiseLinear
            }
            fn growth(&self) -> Growth {
                Growth::Linear
            }
            fn describe(&self) -> String {
                "indicator".into()
            }
        }
        assert!(matches!(
            hessian_fd(&Ind, &[1.0], 1e-4),
            Err(Error::InfiniteInStencil)
        ));
    }
}
