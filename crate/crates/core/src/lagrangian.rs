//! The gradient-graph manifold of quadruples `(x, y, ∇φ(x), ∇φ(y))`, the
//! midpoint/half-difference projection `(t, s) = ((x+y)/2, (ξ−η)/2)`, its
//! Newton inversion, and numerical verification of the two-form identities
//! that tie the `(x,y)` chart to the `(t,s)` chart.

use num_complex::Complex64;
use rand::RngExt;

use crate::config::Tolerances;
use crate::convex::fd::{gradient_fd, hessian_fd};
use crate::convex::{ConvexFunction, Smoothness};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// A point on the graph manifold, with the defining gradients stored and the
/// projected coordinates always recomputed.
#[derive(Clone, Debug)]
pub struct LambdaPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

impl LambdaPoint {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Midpoint coordinate `t = (x+y)/2`.
    pub fn t(&self) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// Half-difference coordinate `s = (ξ−η)/2`.
    pub fn s(&self) -> Vec<f64> {
        self.xi
            .iter()
            .zip(&self.eta)
            .map(|(a, b)| 0.5 * (a - b))
            .collect()
    }

    /// Max deviation of the stored gradients from `∇φ` at `x` and `y`.
    pub fn defining_residual(&self, phi: &dyn ConvexFunction, tol: &Tolerances) -> Result<f64> {
        let gx = grad_or_fd(phi, &self.x, tol)?;
        let gy = grad_or_fd(phi, &self.y, tol)?;
        let rx = linalg::norm(&linalg::sub(&self.xi, &gx));
        let ry = linalg::norm(&linalg::sub(&self.eta, &gy));
        Ok(rx.max(ry))
    }
}

pub fn grad_or_fd(phi: &dyn ConvexFunction, x: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    if let Some(g) = phi.gradient(x) {
        return Ok(g);
    }
    if phi.smoothness() != Smoothness::Smooth {
        return Err(Error::GradientUnavailable);
    }
    gradient_fd(phi, x, tol.fd_step_rel)
}

pub fn hess_or_fd(phi: &dyn ConvexFunction, x: &[f64], tol: &Tolerances) -> Result<Mat> {
    if let Some(h) = phi.hessian(x) {
        return Ok(h);
    }
    if phi.smoothness() != Smoothness::Smooth {
        return Err(Error::HessianUnavailable);
    }
    hessian_fd(phi, x, tol.fd_step_rel)
}

/// Lift `(x, y)` onto the graph manifold by evaluating the gradients.
pub fn lift(
    phi: &dyn ConvexFunction,
    x: &[f64],
    y: &[f64],
    tol: &Tolerances,
) -> Result<LambdaPoint> {
    let xi = grad_or_fd(phi, x, tol)?;
    let eta = grad_or_fd(phi, y, tol)?;
    Ok(LambdaPoint {
        x: x.to_vec(),
        y: y.to_vec(),
        xi,
        eta,
    })
}

/// Invert the projection: find the unique graph point over `(t, s)`.
///
/// Minimizes `Φ(x) − 2s·x` with `Φ(x) = φ(x) + φ(2t−x)`, i.e. solves
/// `∇φ(x) − ∇φ(2t−x) = 2s` by damped Newton (the factor 2 comes from `s`
/// being the half-difference of the gradients). Requires smooth, strictly
/// convex, superlinear `φ`.
pub fn invert_pi(
    phi: &dyn ConvexFunction,
    t: &[f64],
    s: &[f64],
    warm: Option<&[f64]>,
    tol: &Tolerances,
) -> Result<LambdaPoint> {
    if !phi.growth().is_superlinear() {
        return Err(Error::GrowthFlag(phi.growth().label()));
    }
    if phi.smoothness() != Smoothness::Smooth {
        return Err(Error::GradientUnavailable);
    }
    let n = phi.dim();
    let target: Vec<f64> = s.iter().map(|v| 2.0 * v).collect();
    let reflected = |x: &[f64]| -> Vec<f64> { x.iter().zip(t).map(|(a, b)| 2.0 * b - a).collect() };
    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let gx = grad_or_fd(phi, x, tol)?;
        let gy = grad_or_fd(phi, &reflected(x), tol)?;
        Ok((0..n).map(|k| gx[k] - gy[k] - target[k]).collect())
    };
    let mut x: Vec<f64> = match warm {
        Some(w) => w.to_vec(),
        None => t.iter().zip(s).map(|(a, b)| a + b).collect(),
    };
    let mut g = residual(&x)?;
    let mut r = linalg::norm(&g);
    for iter in 0..tol.newton_max_iter {
        if r <= tol.newton_residual {
            break;
        }
        let j = hess_or_fd(phi, &x, tol)?.add_mat(&hess_or_fd(phi, &reflected(&x), tol)?);
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let d = linalg::solve(&j, &neg_g).unwrap_or(neg_g);
        // backtracking on the residual norm
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + lambda * b).collect();
            if let Ok(gc) = residual(&cand) {
                let rc = linalg::norm(&gc);
                if rc < r * (1.0 - 0.25 * lambda) || rc <= tol.newton_residual {
                    x = cand;
                    g = gc;
                    r = rc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonStalled {
                residual: r,
                iters: iter,
            });
        }
    }
    if r > tol.newton_residual {
        return Err(Error::NewtonStalled {
            residual: r,
            iters: tol.newton_max_iter,
        });
    }
    let y = reflected(&x);
    let xi = grad_or_fd(phi, &x, tol)?;
    let eta = grad_or_fd(phi, &y, tol)?;
    Ok(LambdaPoint { x, y, xi, eta })
}

/// An antisymmetric bilinear form on a coordinate basis, complex-valued
/// entries allowed.
#[derive(Clone, Debug)]
pub struct TwoForm {
    dim: usize,
    m: Vec<Complex64>,
}

impl TwoForm {
    pub fn zeros(dim: usize) -> TwoForm {
        TwoForm {
            dim,
            m: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i * self.dim + j]
    }

    /// Add `c · e^i∧e^j` (both entries kept antisymmetric).
    pub fn add_wedge(&mut self, i: usize, j: usize, c: Complex64) {
        self.m[i * self.dim + j] += c;
        self.m[j * self.dim + i] -= c;
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                acc += u[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    pub fn scaled(&self, c: Complex64) -> TwoForm {
        TwoForm {
            dim: self.dim,
            m: self.m.iter().map(|v| c * v).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> f64 {
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.m.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Congruence transform `Jᵀ M J` for a real matrix `J` mapping the new
    /// basis into this form's basis (the pullback of a bilinear form).
    pub fn pullback(&self, j: &Mat) -> TwoForm {
        assert_eq!(j.rows, self.dim);
        let out_dim = j.cols;
        let mut out = TwoForm::zeros(out_dim);
        for a in 0..out_dim {
            for b in 0..out_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..self.dim {
                    let ja = j[(i, a)];
                    if ja == 0.0 {
                        continue;
                    }
                    for k in 0..self.dim {
                        acc += ja * self.get(i, k) * j[(k, b)];
                    }
                }
                out.m[a * out_dim + b] = acc;
            }
        }
        out
    }
}

/// The restriction of the ambient two-form to the graph manifold in the
/// `(x, y)` chart: zero on the (x,x) and (y,y) blocks and `(H(x)+H(y))/2` on
/// the (x,y) block.
pub fn omega_on_lambda(
    phi: &dyn ConvexFunction,
    p: &LambdaPoint,
    tol: &Tolerances,
) -> Result<TwoForm> {
    let n = p.dim();
    let hx = hess_or_fd(phi, &p.x, tol)?;
    let hy = hess_or_fd(phi, &p.y, tol)?;
    let mut form = TwoForm::zeros(2 * n);
    for j in 0..n {
        for k in 0..n {
            let c = 0.5 * (hx[(j, k)] + hy[(j, k)]);
            form.add_wedge(j, n + k, Complex64::new(c, 0.0));
        }
    }
    Ok(form)
}

/// Jacobian of the projection `(x, y) ↦ (t, s)` on the graph:
/// rows `(t, s)`, columns `(x, y)`.
fn projection_jacobian(hx: &Mat, hy: &Mat) -> Mat {
    let n = hx.rows;
    let mut j = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, k)] = 0.5;
        j[(k, n + k)] = 0.5;
        for l in 0..n {
            j[(n + k, l)] = 0.5 * hx[(k, l)];
            j[(n + k, n + l)] = -0.5 * hy[(k, l)];
        }
    }
    j
}

/// Ambient standard form `(i/2) Σ dz_j∧dζ̄_j` in the basis
/// `(dx, dy, dξ, dη)` of the 4n-dimensional ambient space.
fn ambient_omega(n: usize) -> TwoForm {
    let mut w = TwoForm::zeros(4 * n);
    let half_i = Complex64::new(0.0, 0.5);
    let one = Complex64::new(1.0, 0.0);
    let i_c = Complex64::new(0.0, 1.0);
    for j in 0..n {
        // dz_j = dx_j + i dy_j, dζ̄_j = dξ_j − i dη_j
        let a_parts = [(j, one), (n + j, i_c)];
        let b_parts = [(2 * n + j, one), (3 * n + j, -i_c)];
        for (ai, ac) in a_parts {
            for (bi, bc) in b_parts {
                w.add_wedge(ai, bi, half_i * ac * bc);
            }
        }
    }
    w
}

/// Embedding Jacobian of `(x, y) ↦ (x, y, ∇φ(x), ∇φ(y))`.
fn embedding_jacobian(hx: &Mat, hy: &Mat) -> Mat {
    let n = hx.rows;
    let mut j = Mat::zeros(4 * n, 2 * n);
    for k in 0..n {
        j[(k, k)] = 1.0;
        j[(n + k, n + k)] = 1.0;
        for l in 0..n {
            j[(2 * n + k, l)] = hx[(k, l)];
            j[(3 * n + k, n + l)] = hy[(k, l)];
        }
    }
    j
}

#[derive(Clone, Debug)]
pub struct PullbackReport {
    /// Max entrywise |π*τ − (−1/2)·ω| over the `(x,y)` chart basis.
    pub max_entry_gap: f64,
    /// Max |Im ω| on the restriction (the Lagrangian condition).
    pub max_imag: f64,
    /// |det Dπ| vs `2^{−n}·det((H(x)+H(y))/2)` relative gap.
    pub det_identity_gap: f64,
    /// Hessian asymmetry (flags a bad finite-difference step).
    pub hessian_asymmetry: f64,
}

/// Verify at one point that the projection pulls the flat `(t,s)` symplectic
/// form back to `(−1/2)·ω` on the graph, that the restricted form is real,
/// and that the top-power determinant identity holds.
pub fn pullback_check(
    phi: &dyn ConvexFunction,
    p: &LambdaPoint,
    tol: &Tolerances,
) -> Result<PullbackReport> {
    let n = p.dim();
    let hx = hess_or_fd(phi, &p.x, tol)?;
    let hy = hess_or_fd(phi, &p.y, tol)?;
    let asym = {
        let a = hx.max_abs_diff(&hx.transpose());
        let b = hy.max_abs_diff(&hy.transpose());
        a.max(b)
    };
    if asym > 1e-3 {
        return Err(Error::HessianUnavailable);
    }

    // π*τ via the projection Jacobian
    let tau = {
        let mut t = TwoForm::zeros(2 * n);
        for j in 0..n {
            t.add_wedge(j, n + j, Complex64::new(1.0, 0.0));
        }
        t
    };
    let d_pi = projection_jacobian(&hx, &hy);
    let pulled_tau = tau.pullback(&d_pi);

    // ω restricted to the graph via the ambient pullback
    let omega = ambient_omega(n).pullback(&embedding_jacobian(&hx, &hy));

    let target = omega.scaled(Complex64::new(-0.5, 0.0));
    let max_entry_gap = pulled_tau.max_abs_diff(&target);
    let max_imag = omega.max_imag();

    let det_pi = linalg::det(&d_pi).abs();
    let det_block = {
        let avg = hx.add_mat(&hy).scaled(0.5);
        linalg::det(&avg)
    };
    let expect = det_block / 2f64.powi(n as i32);
    let det_identity_gap = (det_pi - expect).abs() / expect.abs().max(1e-300);

    Ok(PullbackReport {
        max_entry_gap,
        max_imag,
        det_identity_gap,
        hessian_asymmetry: asym,
    })
}

#[derive(Clone, Debug)]
pub struct RotatedReport {
    /// Max |t − Re z'| over coordinates.
    pub t_gap: f64,
    /// Max |s − Re ζ'| over coordinates.
    pub s_gap: f64,
    /// Max |ω'(u,v) − (−i/2)·ω(u,v)| over sampled tangent pairs.
    pub omega_factor_gap: f64,
}

/// The coordinate rotation `z' = ((1−i)/2)z, ζ' = ((1+i)/2)ζ` swaps the roles
/// of the real and imaginary parts: `t = Re z'`, `s = Re ζ'`, and the
/// standard form picks up exactly the factor `−i/2`.
pub fn rotated_coordinates_check(p: &LambdaPoint, seed: u64, samples: usize) -> RotatedReport {
    let n = p.dim();
    let c_z = Complex64::new(0.5, -0.5); // (1−i)/2
    let c_zeta = Complex64::new(0.5, 0.5); // (1+i)/2
    let t = p.t();
    let s = p.s();
    let mut t_gap: f64 = 0.0;
    let mut s_gap: f64 = 0.0;
    for j in 0..n {
        let z = Complex64::new(p.x[j], p.y[j]);
        let zeta = Complex64::new(p.xi[j], p.eta[j]);
        t_gap = t_gap.max(((c_z * z).re - t[j]).abs());
        s_gap = s_gap.max(((c_zeta * zeta).re - s[j]).abs());
    }

    // dz'(u) = ((1−i)/2)·dz(u), dζ̄'(u) = ((1−i)/2)·dζ̄(u)
    let dz = |u: &[f64], j: usize| Complex64::new(u[j], u[n + j]);
    let dzeta_bar = |u: &[f64], j: usize| Complex64::new(u[2 * n + j], -u[3 * n + j]);
    let omega = |u: &[f64], v: &[f64]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += Complex64::new(0.0, 0.5)
                * (dz(u, j) * dzeta_bar(v, j) - dz(v, j) * dzeta_bar(u, j));
        }
        acc
    };
    let omega_rot = |u: &[f64], v: &[f64]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let du = c_z * dz(u, j);
            let dv = c_z * dz(v, j);
            let eu = c_z * dzeta_bar(u, j); // conj of (1+i)/2 is (1−i)/2
            let ev = c_z * dzeta_bar(v, j);
            acc += Complex64::new(0.0, 0.5) * (du * ev - dv * eu);
        }
        acc
    };
    let mut rng = crate::rng::stream_rng(seed, 31);
    let mut omega_factor_gap: f64 = 0.0;
    for _ in 0..samples {
        let u: Vec<f64> = (0..4 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..4 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = omega_rot(&u, &v);
        let rhs = Complex64::new(0.0, -0.5) * omega(&u, &v);
        omega_factor_gap = omega_factor_gap.max((lhs - rhs).norm());
    }
    RotatedReport {
        t_gap,
        s_gap,
        omega_factor_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{ConvexFn, PPower, Quadratic, Splice};
    use crate::extreal::ExtReal;
    use crate::rng;
    use std::sync::Arc;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    /// Wrapper hiding analytic derivatives, to exercise the FD paths.
    struct NoDerivs(ConvexFn);
    impl ConvexFunction for NoDerivs {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn eval(&self, x: &[f64]) -> ExtReal {
            self.0.eval(x)
        }
        fn is_even(&self) -> bool {
            self.0.is_even()
        }
        fn smoothness(&self) -> Smoothness {
            self.0.smoothness()
        }
        fn growth(&self) -> crate::convex::Growth {
            self.0.growth()
        }
        fn describe(&self) -> String {
            format!("noderivs({})", self.0.describe())
        }
    }

    #[test]
    fn lift_identity_gradient() {
        let q = Quadratic::isotropic(2);
        let p = lift(&q, &[1.0, 0.0], &[0.0, 1.0], &tols()).unwrap();
        assert_eq!(p.xi, vec![1.0, 0.0]);
        assert_eq!(p.eta, vec![0.0, 1.0]);
        assert_eq!(p.t(), vec![0.5, 0.5]);
        assert_eq!(p.s(), vec![0.5, -0.5]);
        assert!(p.defining_residual(&q, &tols()).unwrap() < 1e-12);
    }

    #[test]
    fn lift_quartic_gradient() {
        let f = PPower::new(2, 4.0).unwrap();
        let p = lift(&f, &[1.0, 1.0], &[0.5, -0.5], &tols()).unwrap();
        assert!((p.xi[0] - 1.0).abs() < 1e-14 && (p.xi[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invert_pi_gaussian_closed_form() {
        // identity Hessian: x = t + s, y = t − s
        let q = Quadratic::isotropic(2);
        let p = invert_pi(&q, &[0.3, -0.2], &[0.5, 0.1], None, &tols()).unwrap();
        assert!((p.x[0] - 0.8).abs() < 1e-10);
        assert!((p.x[1] + 0.1).abs() < 1e-10);
        assert!((p.y[0] + 0.2).abs() < 1e-10);
        assert!((p.y[1] + 0.3).abs() < 1e-10);
    }

    #[test]
    fn invert_pi_quadratic_matches_linear_algebra() {
        // ∇φ = Ax gives x = t + A^{-1}s
        let mut r = rng::stream_rng(21, 0);
        let a = crate::functional::random_spd(3, &mut r);
        let q = Quadratic::new(a.clone()).unwrap();
        let inv = linalg::inverse(&a).unwrap();
        for _ in 0..20 {
            let t: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
            let s: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
            let p = invert_pi(&q, &t, &s, None, &tols()).unwrap();
            let expect = linalg::add(&t, &inv.mul_vec(&s));
            for (a, b) in p.x.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn round_trip_and_injectivity_on_splice() {
        let f = Splice::new(2, 2.0, 0.1, -0.45).unwrap();
        let mut r = rng::stream_rng(3, 5);
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| r.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| r.random_range(-3.0..3.0)).collect();
            let p = lift(&f, &x, &y, &tols()).unwrap();
            let back = invert_pi(&f, &p.t(), &p.s(), None, &tols()).unwrap();
            for (a, b) in back.x.iter().zip(&x) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
            for (a, b) in back.y.iter().zip(&y) {
                assert!((a - b).abs() < 1e-8);
            }
            // a distinct Newton start converges to the same point
            let warm: Vec<f64> = (0..2).map(|_| r.random_range(-5.0..5.0)).collect();
            let again = invert_pi(&f, &p.t(), &p.s(), Some(&warm), &tols()).unwrap();
            for (a, b) in again.x.iter().zip(&back.x) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn linear_growth_rejected_by_inversion() {
        let gauge = crate::convex::MaxAffine::abs_value();
        assert!(matches!(
            invert_pi(&gauge, &[0.1], &[0.2], None, &tols()),
            Err(Error::GrowthFlag(_)) | Err(Error::GradientUnavailable)
        ));
    }

    #[test]
    fn omega_block_is_hessian_average() {
        let mut r = rng::stream_rng(8, 0);
        let a = crate::functional::random_spd(2, &mut r);
        let q = Quadratic::new(a.clone()).unwrap();
        let p = lift(&q, &[0.4, -0.6], &[1.0, 0.2], &tols()).unwrap();
        let w = omega_on_lambda(&q, &p, &tols()).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let got = w.get(j, 2 + k);
                assert!((got.re - a[(j, k)]).abs() < 1e-12);
                assert_eq!(got.im, 0.0);
            }
        }
        let iso = Quadratic::isotropic(2);
        let p = lift(&iso, &[1.0, 0.0], &[0.0, 1.0], &tols()).unwrap();
        let w = omega_on_lambda(&iso, &p, &tols()).unwrap();
        assert!((w.get(0, 2).re - 1.0).abs() < 1e-15);
        assert!((w.get(1, 3).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pullback_identity_quadratic_exact() {
        for n in [2usize, 3] {
            let mut r = rng::stream_rng(n as u64, 1);
            let q = Quadratic::new(crate::functional::random_spd(n, &mut r)).unwrap();
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let p = lift(&q, &x, &y, &tols()).unwrap();
            let rep = pullback_check(&q, &p, &tols()).unwrap();
            assert!(rep.max_entry_gap < 1e-12, "{}", rep.max_entry_gap);
            assert!(rep.max_imag < 1e-14);
            assert!(rep.det_identity_gap < 1e-10);
        }
    }

    #[test]
    fn pullback_identity_splice_random_points() {
        let f = Splice::new(2, 2.0, 0.0, 0.4).unwrap();
        let mut r = rng::stream_rng(12, 0);
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| r.random_range(-2.5..2.5)).collect();
            let y: Vec<f64> = (0..2).map(|_| r.random_range(-2.5..2.5)).collect();
            let p = lift(&f, &x, &y, &tols()).unwrap();
            let rep = pullback_check(&f, &p, &tols()).unwrap();
            assert!(rep.max_entry_gap < 1e-6, "{}", rep.max_entry_gap);
            assert!(rep.max_imag < 1e-8);
            assert!(rep.det_identity_gap < 1e-8);
        }
    }

    #[test]
    fn pullback_identity_via_finite_differences() {
        let inner: ConvexFn = Arc::new(Splice::new(2, 1.5, 0.2, 0.25).unwrap());
        let f = NoDerivs(inner);
        let mut r = rng::stream_rng(14, 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| r.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| r.random_range(-2.0..2.0)).collect();
            let p = lift(&f, &x, &y, &tols()).unwrap();
            let rep = pullback_check(&f, &p, &tols()).unwrap();
            assert!(rep.max_entry_gap < 1e-6, "{}", rep.max_entry_gap);
            assert!(rep.max_imag < 1e-8, "{}", rep.max_imag);
        }
    }

    #[test]
    fn rotated_coordinates_identities() {
        let q = Quadratic::isotropic(2);
        let mut r = rng::stream_rng(4, 9);
        for i in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| r.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| r.random_range(-3.0..3.0)).collect();
            let p = lift(&q, &x, &y, &tols()).unwrap();
            let rep = rotated_coordinates_check(&p, i, 10);
            assert!(rep.t_gap < 1e-15);
            assert!(rep.s_gap < 1e-15);
            assert!(rep.omega_factor_gap < 1e-10);
        }
    }
}
