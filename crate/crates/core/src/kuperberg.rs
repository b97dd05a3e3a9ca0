//! Directed volumes of gradient graphs over convex bodies, their top wedge,
//! and the bridge to the graph-manifold form integral.
//!
//! The directed volume of the graph `{(x, ∇φ(x)) : x ∈ K}` is an n-vector in
//! `Λ^n(R^n ⊕ R^n)`: one Jacobian-minor integral per n-element subset of the
//! `(e, f)` basis. It depends only on the boundary data because every minor
//! integrand is exact. Wedging the graph's n-vector with the reflected
//! graph's gives a scalar multiple of the top form; the scalar is pinned by
//! the n=1 segment, where both the wedge and the chart integral are known.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::convex::{ConvexFn, ConvexFunction, Growth, Quadratic, Smoothness};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Mat};
use crate::polytope::SymmetricPolytope;
use crate::special;

// ---------------------------------------------------------------------------
// n-vectors
// ---------------------------------------------------------------------------

/// Lexicographically ordered n-element subsets of `0..2n`.
pub fn basis_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..n).collect();
    let m = 2 * n;
    loop {
        out.push(combo.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] + 1 <= m - (n - i) {
                combo[i] += 1;
                for j in (i + 1)..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// An element of `Λ^n(R^n ⊕ R^n)` with coefficients over the sorted subsets
/// of the basis `(e_1..e_n, f_1..f_n)`.
#[derive(Clone, Debug, Serialize)]
pub struct NVector {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl NVector {
    pub fn zeros(n: usize) -> NVector {
        let count = basis_subsets(n).len();
        NVector {
            n,
            coeffs: vec![0.0; count],
        }
    }

    pub fn labels(&self) -> Vec<String> {
        basis_subsets(self.n)
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&i| {
                        if i < self.n {
                            format!("e{}", i + 1)
                        } else {
                            format!("f{}", i - self.n + 1)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("^")
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &NVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Sign of the permutation sorting `[S, Sᶜ]` into `0..2n`: parity of the
/// cross-block inversions (both blocks are already sorted).
fn complement_sign(subset: &[usize], complement: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for &a in subset {
        for &b in complement {
            if a > b {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient of `e_1∧..∧e_n∧f_1∧..∧f_n` in `a ∧ b`.
pub fn wedge_scalar(a: &NVector, b: &NVector) -> f64 {
    assert_eq!(a.n, b.n);
    let subsets = basis_subsets(a.n);
    let index_of = |s: &[usize]| subsets.iter().position(|t| t == s).unwrap();
    let full: Vec<usize> = (0..2 * a.n).collect();
    let mut total = 0.0;
    for (i, s) in subsets.iter().enumerate() {
        let complement: Vec<usize> = full.iter().copied().filter(|v| !s.contains(v)).collect();
        let j = index_of(&complement);
        total += a.coeffs[i] * b.coeffs[j] * complement_sign(s, &complement);
    }
    total
}

/// Scalarization constant for `V = c_n · ⟨V⃗(K⁺) ∧ V⃗(K⁻)⟩`: the basis
/// ordering and dyadic factor are fixed once by the n=1 segment, where the
/// wedge, the chart integral and the Mahler volume are all known in closed
/// form, and then treated as a constant convention.
pub fn wedge_normalization(n: usize) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2f64.powi(1 - 2 * (n as i32))
}

// ---------------------------------------------------------------------------
// star-shaped smooth bodies
// ---------------------------------------------------------------------------

/// A smooth origin-symmetric body given by its gauge, with a canonical
/// potential whose gradient agrees with the gauge's on the boundary.
pub trait StarBody: Send + Sync {
    fn dim(&self) -> usize;
    fn gauge(&self, x: &[f64]) -> f64;
    fn gauge_gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Convex potential with `∇φ = ∇μ` on `∂K` (the μ²/2 convention).
    fn potential(&self) -> ConvexFn;
    fn volume(&self) -> Option<f64>;
    fn polar_volume(&self) -> Option<f64>;
    fn describe(&self) -> String;
}

/// The segment `[-1, 1]` (n = 1).
pub struct Segment;

impl StarBody for Segment {
    fn dim(&self) -> usize {
        1
    }
    fn gauge(&self, x: &[f64]) -> f64 {
        x[0].abs()
    }
    fn gauge_gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0].signum()]
    }
    fn potential(&self) -> ConvexFn {
        Arc::new(Quadratic::isotropic(1))
    }
    fn volume(&self) -> Option<f64> {
        Some(2.0)
    }
    fn polar_volume(&self) -> Option<f64> {
        Some(2.0)
    }
    fn describe(&self) -> String {
        "segment [-1,1]".into()
    }
}

/// Unit ℓp ball, `p ≥ 2` so the potential `‖x‖_p²/2` is C² away from 0.
pub struct LpBall {
    n: usize,
    p: f64,
}

impl LpBall {
    pub fn new(n: usize, p: f64) -> Result<LpBall> {
        if !(p >= 2.0) {
            return Err(Error::Spec(format!(
                "lp-ball potential needs p ≥ 2 for C² regularity, got {p}"
            )));
        }
        Ok(LpBall { n, p })
    }

    pub fn disc(n: usize) -> LpBall {
        LpBall { n, p: 2.0 }
    }
}

/// `‖x‖_p²/2` with analytic gradient and Hessian (singular only at 0).
struct LpPotential {
    n: usize,
    p: f64,
}

impl ConvexFunction for LpPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        let s: f64 = x.iter().map(|v| v.abs().powf(self.p)).sum();
        ExtReal::finite(0.5 * s.powf(2.0 / self.p))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s: f64 = x.iter().map(|v| v.abs().powf(self.p)).sum();
        if s == 0.0 {
            return Some(vec![0.0; self.n]);
        }
        let c = s.powf(2.0 / self.p - 1.0);
        Some(
            x.iter()
                .map(|v| c * v.signum() * v.abs().powf(self.p - 1.0))
                .collect(),
        )
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        let s: f64 = x.iter().map(|v| v.abs().powf(self.p)).sum();
        if s == 0.0 {
            return None;
        }
        let mut h = Mat::zeros(self.n, self.n);
        let c1 = (2.0 - self.p) * s.powf(2.0 / self.p - 2.0);
        let c2 = (self.p - 1.0) * s.powf(2.0 / self.p - 1.0);
        for j in 0..self.n {
            let gj = x[j].signum() * x[j].abs().powf(self.p - 1.0);
            for k in 0..self.n {
                let gk = x[k].signum() * x[k].abs().powf(self.p - 1.0);
                h[(j, k)] = c1 * gj * gk;
            }
            h[(j, j)] += c2 * x[j].abs().powf(self.p - 2.0);
        }
        Some(h)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Smooth
    }

    fn growth(&self) -> Growth {
        Growth::General
    }

    fn describe(&self) -> String {
        format!("lp-potential(p={}, n={})", self.p, self.n)
    }
}

impl StarBody for LpBall {
    fn dim(&self) -> usize {
        self.n
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|v| v.abs().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p)
    }

    fn gauge_gradient(&self, x: &[f64]) -> Vec<f64> {
        let s: f64 = x.iter().map(|v| v.abs().powf(self.p)).sum();
        let c = s.powf(1.0 / self.p - 1.0);
        x.iter()
            .map(|v| c * v.signum() * v.abs().powf(self.p - 1.0))
            .collect()
    }

    fn potential(&self) -> ConvexFn {
        Arc::new(LpPotential {
            n: self.n,
            p: self.p,
        })
    }

    fn volume(&self) -> Option<f64> {
        Some(special::lp_ball_volume(self.n, self.p))
    }

    fn polar_volume(&self) -> Option<f64> {
        // polar of the lp ball is the lq ball, 1/p + 1/q = 1
        let q = self.p / (self.p - 1.0);
        Some(special::lp_ball_volume(self.n, q))
    }

    fn describe(&self) -> String {
        format!("l{}-ball (n={})", self.p, self.n)
    }
}

/// `{x : x·Ex ≤ 1}` for symmetric positive definite `E`.
pub struct Ellipsoid {
    e: Mat,
    quad: Arc<Quadratic>,
}

impl Ellipsoid {
    pub fn new(e: Mat) -> Result<Ellipsoid> {
        let quad = Arc::new(Quadratic::new(e.clone())?);
        Ok(Ellipsoid { e, quad })
    }

    pub fn from_semi_axes(axes: &[f64]) -> Result<Ellipsoid> {
        let n = axes.len();
        let mut e = Mat::zeros(n, n);
        for (i, &a) in axes.iter().enumerate() {
            if !(a > 0.0) {
                return Err(Error::Spec(format!("semi-axis must be positive, got {a}")));
            }
            e[(i, i)] = 1.0 / (a * a);
        }
        Ellipsoid::new(e)
    }
}

impl StarBody for Ellipsoid {
    fn dim(&self) -> usize {
        self.e.rows
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        linalg::dot(x, &self.e.mul_vec(x)).max(0.0).sqrt()
    }

    fn gauge_gradient(&self, x: &[f64]) -> Vec<f64> {
        let q = self.gauge(x).max(1e-300);
        linalg::scale(&self.e.mul_vec(x), 1.0 / q)
    }

    fn potential(&self) -> ConvexFn {
        self.quad.clone()
    }

    fn volume(&self) -> Option<f64> {
        let det = linalg::det(&self.e);
        Some(special::euclidean_ball_volume(self.dim()) / det.sqrt())
    }

    fn polar_volume(&self) -> Option<f64> {
        let det = linalg::det(&self.e);
        Some(special::euclidean_ball_volume(self.dim()) * det.sqrt())
    }

    fn describe(&self) -> String {
        format!("ellipsoid (n={})", self.dim())
    }
}

/// A polytope gauge with the kinks replaced by a C² spline over a band of
/// width `2·radius`; equals the true gauge wherever one facet dominates by
/// more than the smoothing radius. The level set is a smooth body close to
/// the polytope; results for it are reported as data against the radius.
pub struct SmoothedPolytope {
    body: SymmetricPolytope,
    normals: Vec<Vec<f64>>,
    radius: f64,
}

impl SmoothedPolytope {
    pub fn new(body: SymmetricPolytope, radius: f64) -> Result<SmoothedPolytope> {
        if !(radius > 0.0) {
            return Err(Error::SmoothingRequired);
        }
        let normals = body.facet_normals()?;
        Ok(SmoothedPolytope {
            body,
            normals,
            radius,
        })
    }

    pub fn polytope(&self) -> &SymmetricPolytope {
        &self.body
    }
}

/// C² smoothing of |w|: exact outside [−r, r], spline inside.
fn smooth_abs(w: f64, r: f64) -> f64 {
    if w.abs() >= r {
        w.abs()
    } else {
        let w2 = w * w;
        3.0 * r / 8.0 + 3.0 * w2 / (4.0 * r) - w2 * w2 / (8.0 * r * r * r)
    }
}

fn smooth_max(u: f64, v: f64, r: f64) -> f64 {
    0.5 * (u + v + smooth_abs(u - v, r))
}

impl StarBody for SmoothedPolytope {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in &self.normals {
            acc = smooth_max(acc, smooth_abs(linalg::dot(a, x), self.radius), self.radius);
        }
        acc
    }

    fn gauge_gradient(&self, x: &[f64]) -> Vec<f64> {
        // central differences; the gauge is C² by construction
        let n = self.dim();
        let mut g = vec![0.0; n];
        let h = 1e-6;
        let mut p = x.to_vec();
        for k in 0..n {
            p[k] = x[k] + h;
            let f1 = self.gauge(&p);
            p[k] = x[k] - h;
            let f0 = self.gauge(&p);
            p[k] = x[k];
            g[k] = (f1 - f0) / (2.0 * h);
        }
        g
    }

    fn potential(&self) -> ConvexFn {
        Arc::new(SmoothedGaugePotential {
            body: SmoothedPolytope {
                body: self.body.clone(),
                normals: self.normals.clone(),
                radius: self.radius,
            },
        })
    }

    fn volume(&self) -> Option<f64> {
        None
    }

    fn polar_volume(&self) -> Option<f64> {
        None
    }

    fn describe(&self) -> String {
        format!("smoothed polytope (n={}, r={})", self.dim(), self.radius)
    }
}

struct SmoothedGaugePotential {
    body: SmoothedPolytope,
}

impl ConvexFunction for SmoothedGaugePotential {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        let mu = self.body.gauge(x);
        ExtReal::finite(0.5 * mu * mu)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Smooth
    }

    fn growth(&self) -> Growth {
        Growth::General
    }

    fn describe(&self) -> String {
        format!("smoothed gauge potential ({})", self.body.describe())
    }
}

// ---------------------------------------------------------------------------
// meshes and minor integration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct MeshNodes {
    pub radial: usize,
    pub angular: usize,
}

impl MeshNodes {
    pub fn default_for(n: usize) -> MeshNodes {
        match n {
            1 => MeshNodes {
                radial: 2001,
                angular: 1,
            },
            2 => MeshNodes {
                radial: 96,
                angular: 192,
            },
            _ => MeshNodes {
                radial: 40,
                angular: 48,
            },
        }
    }

    fn halved(&self) -> MeshNodes {
        MeshNodes {
            radial: (self.radial / 2).max(3),
            angular: (self.angular / 2).max(4),
        }
    }
}

/// Quadrature nodes (point, weight) covering the body `{μ ≤ 1}` by a radial
/// product mesh: `x = ρ(w)^{…}·direction(angle)/μ(direction)`.
///
/// `rho_power` reparametrizes the radial coordinate (used by the
/// parametrization-independence checks); `theta_offset` rotates the angular
/// origin.
pub fn mesh_points(
    body: &dyn StarBody,
    nodes: MeshNodes,
    rho_power: f64,
    theta_offset: f64,
) -> Vec<(Vec<f64>, f64)> {
    let n = body.dim();
    let mut out = Vec::new();
    match n {
        1 => {
            let r = 1.0 / body.gauge(&[1.0]);
            let count = nodes.radial.max(3);
            let h = 2.0 * r / (count - 1) as f64;
            for i in 0..count {
                let x = -r + h * i as f64;
                let w = h * if i == 0 || i == count - 1 { 0.5 } else { 1.0 };
                out.push((vec![x], w));
            }
        }
        2 => {
            let nr = nodes.radial.max(3);
            let na = nodes.angular.max(8);
            let hw = 1.0 / (nr - 1) as f64;
            let ha = 2.0 * std::f64::consts::PI / na as f64;
            for ia in 0..na {
                let theta = theta_offset + ha * ia as f64;
                let u = [theta.cos(), theta.sin()];
                let mu = body.gauge(&u);
                let d = [u[0] / mu, u[1] / mu];
                // d' = (u'·μ − u·(∇μ·u'))/μ²
                let up = [-theta.sin(), theta.cos()];
                let gmu = body.gauge_gradient(&u);
                let dmu = gmu[0] * up[0] + gmu[1] * up[1];
                let dp = [
                    (up[0] * mu - u[0] * dmu) / (mu * mu),
                    (up[1] * mu - u[1] * dmu) / (mu * mu),
                ];
                let cross = (d[0] * dp[1] - d[1] * dp[0]).abs();
                for iw in 0..nr {
                    let w = hw * iw as f64;
                    let rho = w.powf(rho_power);
                    let drho = if iw == 0 && rho_power != 1.0 {
                        0.0
                    } else {
                        rho_power * w.powf(rho_power - 1.0)
                    };
                    let weight = rho
                        * cross
                        * drho
                        * hw
                        * ha
                        * if iw == 0 || iw == nr - 1 { 0.5 } else { 1.0 };
                    if weight == 0.0 {
                        continue;
                    }
                    out.push((vec![rho * d[0], rho * d[1]], weight));
                }
            }
        }
        3 => {
            let nr = nodes.radial.max(3);
            let na = nodes.angular.max(8);
            let n_theta = na / 2;
            let h_theta = std::f64::consts::PI / (n_theta - 1) as f64;
            let h_psi = 2.0 * std::f64::consts::PI / na as f64;
            let hw = 1.0 / (nr - 1) as f64;
            let eps = 1e-6;
            for it in 0..n_theta {
                let theta = h_theta * it as f64;
                for ip in 0..na {
                    let psi = theta_offset + h_psi * ip as f64;
                    let dir =
                        |th: f64, ps: f64| [th.sin() * ps.cos(), th.sin() * ps.sin(), th.cos()];
                    let d_at = |th: f64, ps: f64| {
                        let u = dir(th, ps);
                        let mu = body.gauge(&u);
                        [u[0] / mu, u[1] / mu, u[2] / mu]
                    };
                    let d = d_at(theta, psi);
                    // angular tangents by central differences
                    let dt = {
                        let a = d_at(theta + eps, psi);
                        let b = d_at(theta - eps, psi);
                        [
                            (a[0] - b[0]) / (2.0 * eps),
                            (a[1] - b[1]) / (2.0 * eps),
                            (a[2] - b[2]) / (2.0 * eps),
                        ]
                    };
                    let dpsi = {
                        let a = d_at(theta, psi + eps);
                        let b = d_at(theta, psi - eps);
                        [
                            (a[0] - b[0]) / (2.0 * eps),
                            (a[1] - b[1]) / (2.0 * eps),
                            (a[2] - b[2]) / (2.0 * eps),
                        ]
                    };
                    let det = (d[0] * (dt[1] * dpsi[2] - dt[2] * dpsi[1])
                        - d[1] * (dt[0] * dpsi[2] - dt[2] * dpsi[0])
                        + d[2] * (dt[0] * dpsi[1] - dt[1] * dpsi[0]))
                        .abs();
                    let w_theta = if it == 0 || it == n_theta - 1 {
                        0.5
                    } else {
                        1.0
                    };
                    for iw in 0..nr {
                        let w = hw * iw as f64;
                        let rho = w.powf(rho_power);
                        let drho = if iw == 0 && rho_power != 1.0 {
                            0.0
                        } else {
                            rho_power * w.powf(rho_power - 1.0)
                        };
                        let weight = rho
                            * rho
                            * det
                            * drho
                            * hw
                            * h_theta
                            * h_psi
                            * w_theta
                            * if iw == 0 || iw == nr - 1 { 0.5 } else { 1.0 };
                        if weight == 0.0 {
                            continue;
                        }
                        out.push((vec![rho * d[0], rho * d[1], rho * d[2]], weight));
                    }
                }
            }
        }
        _ => panic!("directed volumes are desk scale: n ≤ 3"),
    }
    out
}

fn det_small(rows: &[Vec<f64>]) -> f64 {
    match rows.len() {
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => {
            rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
        }
        _ => linalg::det(&Mat::from_rows(rows)),
    }
}

/// Directed volume of the graph `{(x, σ·∇φ(x)) : x ∈ K}` (σ = −1 gives the
/// reflected graph): one minor integral per basis subset.
pub fn directed_volume_with(
    body: &dyn StarBody,
    potential: &ConvexFn,
    flip: bool,
    nodes: MeshNodes,
    tol: &Tolerances,
) -> Result<NVector> {
    let n = body.dim();
    let subsets = basis_subsets(n);
    let points = mesh_points(body, nodes, 1.0, 0.0);
    let sign = if flip { -1.0 } else { 1.0 };
    let partial: Vec<Vec<f64>> = points
        .par_chunks(1024)
        .map(|chunk| {
            let mut acc = vec![0.0; subsets.len()];
            for (x, w) in chunk {
                // the potential is positively homogeneous of degree two, so
                // its Hessian at the origin is taken from a nearby point
                let x_eval: Vec<f64> = if linalg::norm(x) < 1e-9 {
                    vec![1e-9; n]
                } else {
                    x.clone()
                };
                let h = match crate::lagrangian::hess_or_fd(potential.as_ref(), &x_eval, tol) {
                    Ok(h) => h,
                    Err(_) => continue,
                };
                for (si, subset) in subsets.iter().enumerate() {
                    let rows: Vec<Vec<f64>> = subset
                        .iter()
                        .map(|&i| {
                            if i < n {
                                let mut e = vec![0.0; n];
                                e[i] = 1.0;
                                e
                            } else {
                                (0..n).map(|c| sign * h[(i - n, c)]).collect()
                            }
                        })
                        .collect();
                    acc[si] += det_small(&rows) * w;
                }
            }
            acc
        })
        .collect();
    let mut coeffs = vec![0.0; subsets.len()];
    for part in partial {
        for (a, b) in coeffs.iter_mut().zip(part) {
            *a += b;
        }
    }
    Ok(NVector { n, coeffs })
}

pub fn directed_volume(
    body: &dyn StarBody,
    flip: bool,
    nodes: MeshNodes,
    tol: &Tolerances,
) -> Result<NVector> {
    directed_volume_with(body, &body.potential(), flip, nodes, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct KuperbergV {
    pub v: f64,
    pub error: f64,
    pub v_plus: NVector,
    pub v_minus: NVector,
    pub body: String,
}

/// The scalar `V`: wedge the graph and reflected-graph directed volumes and
/// scalarize with the calibrated normalization.
pub fn kuperberg_v(body: &dyn StarBody, nodes: MeshNodes, tol: &Tolerances) -> Result<KuperbergV> {
    let plus = directed_volume(body, false, nodes, tol)?;
    let minus = directed_volume(body, true, nodes, tol)?;
    let coarse_plus = directed_volume(body, false, nodes.halved(), tol)?;
    let coarse_minus = directed_volume(body, true, nodes.halved(), tol)?;
    let c = wedge_normalization(body.dim());
    let v = c * wedge_scalar(&plus, &minus);
    let v_coarse = c * wedge_scalar(&coarse_plus, &coarse_minus);
    let error = (v - v_coarse).abs().max(1e-12 * v.abs());
    Ok(KuperbergV {
        v,
        error,
        v_plus: plus,
        v_minus: minus,
        body: body.describe(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub v: f64,
    pub v_error: f64,
    /// `2^{1−n}·∬_{K×K} det((H(x)+H(y))/2) dx dy`, the chart integral of the
    /// graph-manifold form over the product manifold.
    pub rhs: f64,
    pub rhs_error: f64,
    pub relative_deviation: f64,
    pub mahler: Option<f64>,
    pub lower_bound: f64,
    pub sandwich_ok: Option<bool>,
    pub bridge_ok: bool,
    pub body: String,
}

/// Verify `V` against the chart integral over `K×K` and check the sandwich
/// `π^n/n! ≤ V ≤ M(K)` when the Mahler volume is known in closed form.
pub fn bridge_check(
    body: &dyn StarBody,
    nodes: MeshNodes,
    tol: &Tolerances,
) -> Result<BridgeReport> {
    let n = body.dim();
    let kv = kuperberg_v(body, nodes, tol)?;
    let potential = body.potential();

    let chart_integral = |mesh: MeshNodes| -> Result<f64> {
        let points = mesh_points(body, mesh, 1.0, 0.0);
        let hessians: Vec<(Mat, f64)> = points
            .iter()
            .map(|(x, w)| {
                let x_eval: Vec<f64> = if linalg::norm(x) < 1e-9 {
                    vec![1e-9; n]
                } else {
                    x.clone()
                };
                let h = crate::lagrangian::hess_or_fd(potential.as_ref(), &x_eval, tol)?;
                Ok((h, *w))
            })
            .collect::<Result<_>>()?;
        // ordered partials, then a sequential fold: bitwise identical for
        // any worker count
        let partials: Vec<f64> = hessians
            .par_iter()
            .map(|(hx, wx)| {
                let mut acc = 0.0;
                for (hy, wy) in &hessians {
                    let avg = hx.add_mat(hy).scaled(0.5);
                    let rows: Vec<Vec<f64>> = (0..n)
                        .map(|i| (0..n).map(|j| avg[(i, j)]).collect())
                        .collect();
                    acc += det_small(&rows) * wx * wy;
                }
                acc
            })
            .collect();
        let total: f64 = partials.iter().sum();
        Ok(total * 2f64.powi(1 - (n as i32)))
    };
    let rhs = chart_integral(nodes)?;
    let rhs_coarse = chart_integral(nodes.halved())?;
    let rhs_error = (rhs - rhs_coarse).abs().max(1e-12 * rhs.abs());

    let relative_deviation = (kv.v - rhs).abs() / rhs.abs().max(1e-300);
    let mahler = body.volume().zip(body.polar_volume()).map(|(a, b)| a * b);
    let nf: f64 = (1..=n).map(|k| k as f64).product();
    let lower_bound = std::f64::consts::PI.powi(n as i32) / nf;
    let eps = tol.sigmas * (kv.error + rhs_error);
    let sandwich_ok = mahler.map(|m| kv.v >= lower_bound - eps && kv.v <= m + eps);
    let bridge_ok = relative_deviation <= 1e-3 + (kv.error + rhs_error) / rhs.abs().max(1e-300);
    Ok(BridgeReport {
        v: kv.v,
        v_error: kv.error,
        rhs,
        rhs_error,
        relative_deviation,
        mahler,
        lower_bound,
        sandwich_ok,
        bridge_ok,
        body: body.describe(),
    })
}
