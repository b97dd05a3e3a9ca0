//! Analytic convex families and combinators.

use std::sync::Arc;

use crate::convex::{ConvexFn, ConvexFunction, Growth, Smoothness};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::GridFunction;
use crate::linalg::{self, Mat};
use crate::polytope::SymmetricPolytope;

fn sq_norm_half(x: &[f64]) -> f64 {
    0.5 * linalg::dot(x, x)
}

// ---------------------------------------------------------------------------
// quadratic x·Ax/2
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Quadratic {
    a: Mat,
    inv: Mat,
    is_identity: bool,
}

impl Quadratic {
    pub fn new(a: Mat) -> Result<Quadratic> {
        if a.rows != a.cols || !a.is_symmetric(1e-10) {
            return Err(Error::NotPositiveDefinite);
        }
        if linalg::cholesky(&a).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let inv = linalg::inverse(&a).ok_or(Error::NotPositiveDefinite)?;
        let is_identity = a.max_abs_diff(&Mat::identity(a.rows)) == 0.0;
        Ok(Quadratic {
            a,
            inv,
            is_identity,
        })
    }

    pub fn isotropic(n: usize) -> Quadratic {
        Quadratic::new(Mat::identity(n)).expect("identity is SPD")
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }
}

impl ConvexFunction for Quadratic {
    fn dim(&self) -> usize {
        self.a.rows
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        ExtReal::finite(0.5 * linalg::dot(x, &self.a.mul_vec(x)))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.a.mul_vec(x))
    }

    fn hessian(&self, _x: &[f64]) -> Option<Mat> {
        Some(self.a.clone())
    }

    fn is_even(&self) -> bool {
        true
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Smooth
    }

    fn growth(&self) -> Growth {
        if self.is_identity {
            Growth::QuadraticAtInfinity {
                radius: 0.0,
                constant: 0.0,
            }
        } else {
            Growth::General
        }
    }

    fn analytic_conjugate(&self) -> Option<ConvexFn> {
        Some(Arc::new(Quadratic {
            a: self.inv.clone(),
            inv: self.a.clone(),
            is_identity: self.is_identity,
        }))
    }

    fn describe(&self) -> String {
        if self.is_identity {
            format!("|x|^2/2 (n={})", self.dim())
        } else {
            format!("quadratic (n={})", self.dim())
        }
    }
}

// ---------------------------------------------------------------------------
// p-power Σ|x_i|^p / p
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PPower {
    n: usize,
    p: f64,
}

impl PPower {
    pub fn new(n: usize, p: f64) -> Result<PPower> {
        if !(p > 1.0) {
            return Err(Error::BadExponent(p));
        }
        Ok(PPower { n, p })
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }
}

impl ConvexFunction for PPower {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        ExtReal::finite(x.iter().map(|v| v.abs().powf(self.p)).sum::<f64>() / self.p)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(
            x.iter()
                .map(|v| v.signum() * v.abs().powf(self.p - 1.0))
                .collect(),
        )
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        if self.p < 2.0 && x.iter().any(|v| v.abs() < 1e-8) {
            return None; // second derivative blows up on the axes
        }
        let mut h = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            h[(i, i)] = (self.p - 1.0) * x[i].abs().powf(self.p - 2.0);
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

    fn analytic_conjugate(&self) -> Option<ConvexFn> {
        let q = self.p / (self.p - 1.0);
        Some(Arc::new(PPower { n: self.n, p: q }))
    }

    fn describe(&self) -> String {
        format!("sum |x_i|^{}/{} (n={})", self.p, self.p, self.n)
    }
}

// ---------------------------------------------------------------------------
// symmetrized max-affine max_i (|a_i·x| + b_i)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MaxAffine {
    slopes: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl MaxAffine {
    pub fn new(slopes: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<MaxAffine> {
        if slopes.is_empty() || slopes.len() != offsets.len() {
            return Err(Error::Spec(
                "max-affine needs matching slopes and offsets".into(),
            ));
        }
        let n = slopes[0].len();
        if slopes.iter().any(|s| s.len() != n) {
            return Err(Error::Spec("ragged max-affine slopes".into()));
        }
        Ok(MaxAffine { slopes, offsets })
    }

    /// |x| in one dimension.
    pub fn abs_value() -> MaxAffine {
        MaxAffine::new(vec![vec![1.0]], vec![0.0]).unwrap()
    }
}

impl ConvexFunction for MaxAffine {
    fn dim(&self) -> usize {
        self.slopes[0].len()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        let v = self
            .slopes
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| linalg::dot(a, x).abs() + b)
            .fold(f64::NEG_INFINITY, f64::max);
        ExtReal::finite(v)
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
        format!(
            "max-affine ({} pieces, n={})",
            self.slopes.len(),
            self.dim()
        )
    }
}

// ---------------------------------------------------------------------------
// Minkowski gauge of a symmetric polytope
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PolytopeGauge {
    body: SymmetricPolytope,
    normals: Vec<Vec<f64>>,
}

impl PolytopeGauge {
    pub fn new(body: SymmetricPolytope) -> Result<PolytopeGauge> {
        let normals = body.facet_normals()?;
        Ok(PolytopeGauge { body, normals })
    }

    pub fn body(&self) -> &SymmetricPolytope {
        &self.body
    }
}

impl ConvexFunction for PolytopeGauge {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        ExtReal::finite(
            self.normals
                .iter()
                .map(|u| linalg::dot(u, x).abs())
                .fold(0.0, f64::max),
        )
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
        format!("gauge of {:?}-body (n={})", self.body.rep(), self.dim())
    }
}

// ---------------------------------------------------------------------------
// quadratic-at-infinity splice
// ---------------------------------------------------------------------------

/// `|x|²/2 + C` outside radius `R`, spliced with a smooth even core inside:
/// the core adds `β(1 − |x|²/R²)³`, which matches value, gradient and Hessian
/// at `|x| = R`, so the function is C² everywhere and exactly quadratic
/// outside the ball. Strict convexity is verified on a radial sample at
/// construction.
#[derive(Clone, Debug)]
pub struct Splice {
    n: usize,
    radius: f64,
    constant: f64,
    amplitude: f64,
}

impl Splice {
    pub fn new(n: usize, radius: f64, constant: f64, amplitude: f64) -> Result<Splice> {
        if !(radius > 0.0) {
            return Err(Error::Spec(format!(
                "splice radius must be positive, got {radius}"
            )));
        }
        let s = Splice {
            n,
            radius,
            constant,
            amplitude,
        };
        // sample the two Hessian eigenvalue profiles over the bump support
        let mut min_eig = f64::INFINITY;
        for i in 0..=400 {
            let rho = radius * i as f64 / 400.0;
            let u = (rho / radius).powi(2);
            let (b1, b2) = s.bump_derivs(u);
            let r2 = radius * radius;
            let tangential = 1.0 + 2.0 * b1 / r2;
            let radial = tangential + 4.0 * b2 * rho * rho / (r2 * r2);
            min_eig = min_eig.min(tangential).min(radial);
        }
        if min_eig < 1e-6 {
            return Err(Error::SpliceNotConvex(min_eig));
        }
        Ok(s)
    }

    /// (b'(u), b''(u)) for b(u) = β(1-u)³ on u ∈ [0,1].
    fn bump_derivs(&self, u: f64) -> (f64, f64) {
        if u >= 1.0 {
            return (0.0, 0.0);
        }
        let t = 1.0 - u;
        (-3.0 * self.amplitude * t * t, 6.0 * self.amplitude * t)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl ConvexFunction for Splice {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        let u = linalg::dot(x, x) / (self.radius * self.radius);
        let bump = if u < 1.0 {
            self.amplitude * (1.0 - u).powi(3)
        } else {
            0.0
        };
        ExtReal::finite(sq_norm_half(x) + self.constant + bump)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let r2 = self.radius * self.radius;
        let u = linalg::dot(x, x) / r2;
        let (b1, _) = self.bump_derivs(u);
        Some(x.iter().map(|&v| v + b1 * 2.0 * v / r2).collect())
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        let r2 = self.radius * self.radius;
        let u = linalg::dot(x, x) / r2;
        let (b1, b2) = self.bump_derivs(u);
        let mut h = Mat::identity(self.n);
        for i in 0..self.n {
            h[(i, i)] += 2.0 * b1 / r2;
            for j in 0..self.n {
                h[(i, j)] += 4.0 * b2 * x[i] * x[j] / (r2 * r2);
            }
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
        Growth::QuadraticAtInfinity {
            radius: self.radius,
            constant: self.constant,
        }
    }

    fn describe(&self) -> String {
        format!(
            "splice(R={}, C={}, beta={}, n={})",
            self.radius, self.constant, self.amplitude, self.n
        )
    }
}

// ---------------------------------------------------------------------------
// combinators
// ---------------------------------------------------------------------------

/// `f + delta` (delta may be negative).
pub struct Shifted {
    inner: ConvexFn,
    delta: f64,
}

impl Shifted {
    pub fn new(inner: ConvexFn, delta: f64) -> Shifted {
        Shifted { inner, delta }
    }
}

impl ConvexFunction for Shifted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        self.inner.eval(x) + self.delta
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner.gradient(x)
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        self.inner.hessian(x)
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }

    fn growth(&self) -> Growth {
        match self.inner.growth() {
            Growth::QuadraticAtInfinity { radius, constant } => Growth::QuadraticAtInfinity {
                radius,
                constant: constant + self.delta,
            },
            g => g,
        }
    }

    fn analytic_conjugate(&self) -> Option<ConvexFn> {
        // (f + c)* = f* − c
        let conj = self.inner.analytic_conjugate()?;
        Some(Arc::new(Shifted {
            inner: conj,
            delta: -self.delta,
        }))
    }

    fn describe(&self) -> String {
        format!("{} + {}", self.inner.describe(), self.delta)
    }
}

/// Convex combination `(1−t)·f0 + t·f1`, the homotopy family.
pub struct Blend {
    f0: ConvexFn,
    f1: ConvexFn,
    t: f64,
}

impl Blend {
    pub fn new(f0: ConvexFn, f1: ConvexFn, t: f64) -> Result<Blend> {
        if f0.dim() != f1.dim() {
            return Err(Error::Spec(
                "blend endpoints have different dimensions".into(),
            ));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Spec(format!("blend parameter {t} outside [0,1]")));
        }
        Ok(Blend { f0, f1, t })
    }
}

impl ConvexFunction for Blend {
    fn dim(&self) -> usize {
        self.f0.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        match (self.f0.eval(x), self.f1.eval(x)) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                ExtReal::finite((1.0 - self.t) * a + self.t * b)
            }
            _ => ExtReal::Inf,
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g0 = self.f0.gradient(x)?;
        let g1 = self.f1.gradient(x)?;
        Some(
            g0.iter()
                .zip(&g1)
                .map(|(a, b)| (1.0 - self.t) * a + self.t * b)
                .collect(),
        )
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        let h0 = self.f0.hessian(x)?;
        let h1 = self.f1.hessian(x)?;
        Some(h0.scaled(1.0 - self.t).add_mat(&h1.scaled(self.t)))
    }

    fn is_even(&self) -> bool {
        self.f0.is_even() && self.f1.is_even()
    }

    fn smoothness(&self) -> Smoothness {
        if self.f0.smoothness() == Smoothness::Smooth && self.f1.smoothness() == Smoothness::Smooth
        {
            Smoothness::Smooth
        } else {
            Smoothness::PiecewiseLinear
        }
    }

    fn growth(&self) -> Growth {
        match (self.f0.growth(), self.f1.growth()) {
            (
                Growth::QuadraticAtInfinity {
                    radius: r0,
                    constant: c0,
                },
                Growth::QuadraticAtInfinity {
                    radius: r1,
                    constant: c1,
                },
            ) => Growth::QuadraticAtInfinity {
                radius: r0.max(r1),
                constant: (1.0 - self.t) * c0 + self.t * c1,
            },
            (Growth::Linear, Growth::Linear) => Growth::Linear,
            _ => Growth::General,
        }
    }

    fn describe(&self) -> String {
        format!(
            "blend(t={}: {} / {})",
            self.t,
            self.f0.describe(),
            self.f1.describe()
        )
    }
}

/// `max(f(x), |x|²/2 − j)`: the quadratic-tail approximant from below-growth
/// functions. Decreases pointwise to `f` as `j` grows.
pub struct MaxWithShiftedSqNorm {
    inner: ConvexFn,
    j: f64,
}

impl MaxWithShiftedSqNorm {
    pub fn new(inner: ConvexFn, j: f64) -> MaxWithShiftedSqNorm {
        MaxWithShiftedSqNorm { inner, j }
    }
}

impl ConvexFunction for MaxWithShiftedSqNorm {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        let q = ExtReal::finite(sq_norm_half(x) - self.j);
        self.inner.eval(x).max(q)
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::PiecewiseLinear
    }

    fn growth(&self) -> Growth {
        Growth::General
    }

    fn describe(&self) -> String {
        format!("max({}, |x|^2/2 - {})", self.inner.describe(), self.j)
    }
}

/// The Lipschitz regularization `ψ_j(x) = sup_{|ξ|<j} x·ξ − f*(ξ)`, evaluated
/// through its inf-convolution form `inf_y f(y) + j·|x−y|`. Increases
/// pointwise to `f` as `j` grows.
pub struct LipschitzEnvelope {
    inner: ConvexFn,
    j: f64,
}

impl LipschitzEnvelope {
    pub fn new(inner: ConvexFn, j: f64) -> Result<LipschitzEnvelope> {
        if !(j > 0.0) {
            return Err(Error::Spec(format!(
                "Lipschitz bound must be positive, got {j}"
            )));
        }
        Ok(LipschitzEnvelope { inner, j })
    }

    fn kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        const DELTA: f64 = 1e-10;
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.j * ((d2 + DELTA * DELTA).sqrt() - DELTA)
    }

    fn objective(&self, x: &[f64], y: &[f64]) -> ExtReal {
        self.inner.eval(y) + self.kernel(x, y)
    }

    /// Golden-section minimization of the 1D objective in coordinate `k`.
    fn line_min(&self, x: &[f64], y: &mut Vec<f64>, k: usize) -> ExtReal {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        // bracket the minimum by doubling
        let mut w = 1.0;
        let center = y[k];
        let obj = |y: &mut Vec<f64>, v: f64, s: &Self| {
            y[k] = v;
            s.objective(x, y)
        };
        let mut fc = obj(y, center, self);
        for _ in 0..60 {
            let fl = obj(y, center - w, self);
            let fr = obj(y, center + w, self);
            if fl.total_cmp(&fc).is_ge() && fr.total_cmp(&fc).is_ge() {
                break;
            }
            fc = fc.min(fl).min(fr);
            w *= 2.0;
        }
        let (mut a, mut b) = (center - w, center + w);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut f_c = obj(y, c, self);
        let mut f_d = obj(y, d, self);
        for _ in 0..120 {
            if f_c.total_cmp(&f_d).is_le() {
                b = d;
                d = c;
                f_d = f_c;
                c = b - phi * (b - a);
                f_c = obj(y, c, self);
            } else {
                a = c;
                c = d;
                f_c = f_d;
                d = a + phi * (b - a);
                f_d = obj(y, d, self);
            }
            if b - a < 1e-12 * (1.0 + b.abs()) {
                break;
            }
        }
        let mid = 0.5 * (a + b);
        obj(y, mid, self)
    }
}

impl ConvexFunction for LipschitzEnvelope {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        // inside the j-Lipschitz region the envelope agrees with f
        if let Some(g) = self.inner.gradient(x) {
            if linalg::norm(&g) <= self.j * (1.0 - 1e-9) {
                if let v @ ExtReal::Finite(_) = self.inner.eval(x) {
                    return v;
                }
            }
        }
        let mut y = x.to_vec();
        let mut best = self.inner.eval(x).min(self.objective(x, &y));
        let sweeps = if self.dim() == 1 { 1 } else { 40 };
        for _ in 0..sweeps {
            let mut improved = false;
            for k in 0..self.dim() {
                let v = self.line_min(x, &mut y, k);
                if v.total_cmp(&best).is_lt() {
                    best = v;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        best
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }

    fn growth(&self) -> Growth {
        Growth::Linear
    }

    fn describe(&self) -> String {
        format!("lipschitz_{}({})", self.j, self.inner.describe())
    }
}

/// `f ∘ T` for an invertible linear map `T`.
pub struct WithLinearMap {
    inner: ConvexFn,
    t: Mat,
}

impl WithLinearMap {
    pub fn new(inner: ConvexFn, t: Mat) -> Result<WithLinearMap> {
        if t.rows != inner.dim() || t.cols != inner.dim() {
            return Err(Error::Spec("linear map dimension mismatch".into()));
        }
        if linalg::inverse(&t).is_none() {
            return Err(Error::Spec("linear map must be invertible".into()));
        }
        Ok(WithLinearMap { inner, t })
    }
}

impl ConvexFunction for WithLinearMap {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        self.inner.eval(&self.t.mul_vec(x))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g = self.inner.gradient(&self.t.mul_vec(x))?;
        Some(self.t.transpose().mul_vec(&g))
    }

    fn hessian(&self, x: &[f64]) -> Option<Mat> {
        let h = self.inner.hessian(&self.t.mul_vec(x))?;
        let tt = self.t.transpose();
        Some(tt.matmul(&h).matmul(&self.t))
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }

    fn growth(&self) -> Growth {
        match self.inner.growth() {
            Growth::Linear => Growth::Linear,
            _ => Growth::General,
        }
    }

    fn analytic_conjugate(&self) -> Option<ConvexFn> {
        // (f∘T)*(ξ) = f*(T^{-T} ξ)
        let conj = self.inner.analytic_conjugate()?;
        let inv_t = linalg::inverse(&self.t)?.transpose();
        Some(Arc::new(WithLinearMap {
            inner: conj,
            t: inv_t,
        }))
    }

    fn describe(&self) -> String {
        format!("({}) ∘ T", self.inner.describe())
    }
}

/// A grid sample viewed as a convex function via multilinear interpolation
/// (`+∞` outside the box).
pub struct GridBacked {
    grid: GridFunction,
    even: bool,
}

impl GridBacked {
    pub fn new(grid: GridFunction) -> GridBacked {
        let even = grid.is_even();
        GridBacked { grid, even }
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }
}

impl ConvexFunction for GridBacked {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtReal {
        self.grid.eval_linear(x)
    }

    fn is_even(&self) -> bool {
        self.even
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::GridSampled
    }

    fn growth(&self) -> Growth {
        Growth::General
    }

    fn describe(&self) -> String {
        format!("grid function (n={})", self.grid.dim())
    }
}
