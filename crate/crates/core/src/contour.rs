//! The oscillatory contour integral over the gradient-graph manifold, its
//! evaluation in the `(t,s)` and `(x,y)` charts, deformation sweeps along
//! the convex homotopy, and the chained lower bound against the functional
//! volume product.
//!
//! Admissible integrands are smooth, strictly convex and exactly
//! `|x|²/2 + C` outside a ball; the sign and orientation convention is
//! pinned once by requiring the isotropic Gaussian to give `2^{-n}·I = +π^n`
//! real and positive.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::convex::{ConvexFn, ConvexFunction, Growth, Shifted, Smoothness};
use crate::error::{Error, Result};
use crate::functional::{self, FunctionalBudget};
use crate::lagrangian::{self, LambdaPoint};
use crate::linalg;
use crate::quadrature::{tensor_trapezoid, tensor_trapezoid_stateful, BoxDomain, QuadOutcome};
use crate::rng;

/// `exp(−(1/2)·z·ζ̄)` at a graph point: real exponent `(x·ξ + y·η)/2`,
/// phase `(y·ξ − x·η)/2`.
pub fn integrand(p: &LambdaPoint) -> Complex64 {
    let re = 0.5 * (linalg::dot(&p.x, &p.xi) + linalg::dot(&p.y, &p.eta));
    let im = 0.5 * (linalg::dot(&p.y, &p.xi) - linalg::dot(&p.x, &p.eta));
    Complex64::new(-re, -im).exp()
}

/// How the `s`-side truncation is controlled.
#[derive(Clone)]
pub enum DualDecay {
    /// The conjugate itself is available: use its own adaptive box.
    Conjugate(ConvexFn),
    /// Quadratic-at-infinity tail: `φ*(s) ≥ |s|²/2 − C − D` with `D` the
    /// sampled interior excess `max(0, sup_{|x|≤R} φ − |x|²/2 − C)`.
    QuadraticTail { constant_plus_excess: f64 },
}

#[derive(Clone)]
pub struct Admissibility {
    pub dual_decay: DualDecay,
}

/// Check the class the integral is defined on: smooth, superlinear, and with
/// a usable bound on the conjugate's decay (quadratic-at-infinity growth or
/// a closed-form conjugate). Strict convexity is exercised pointwise by the
/// Newton inversions.
pub fn admissibility(phi: &dyn ConvexFunction) -> Result<Admissibility> {
    if phi.smoothness() != Smoothness::Smooth {
        return Err(Error::GradientUnavailable);
    }
    if !phi.growth().is_superlinear() {
        return Err(Error::GrowthFlag(phi.growth().label()));
    }
    if let Growth::QuadraticAtInfinity { radius, constant } = phi.growth() {
        let n = phi.dim();
        let mut excess: f64 = 0.0;
        if radius > 0.0 {
            let mut rng = rng::stream_rng(0xADA_17, 0);
            for _ in 0..400 {
                let dir = rng::unit_direction(&mut rng, n);
                let rho: f64 = rng.random_range(0.0..radius);
                let x: Vec<f64> = dir.iter().map(|d| d * rho).collect();
                if let Some(v) = phi.eval(&x).value() {
                    excess = excess.max(v - 0.5 * rho * rho - constant);
                }
            }
        }
        return Ok(Admissibility {
            dual_decay: DualDecay::QuadraticTail {
                constant_plus_excess: constant.max(0.0) + excess.max(0.0),
            },
        });
    }
    if let Some(conj) = phi.analytic_conjugate() {
        return Ok(Admissibility {
            dual_decay: DualDecay::Conjugate(conj),
        });
    }
    Err(Error::GrowthFlag(phi.growth().label()))
}

/// Truncation box in `(t, s)`: the `t` half-widths come from the decay of
/// `e^{−φ}`, the `s` half-widths from the conjugate's decay bound.
fn ts_half_widths(
    phi: &dyn ConvexFunction,
    adm: &Admissibility,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let n = phi.dim();
    let target = -(tol.boundary_ratio.ln()) + 5.0;
    let t_half = functional::adaptive_exp_box(phi, tol)?;
    let s_half: Vec<f64> = match &adm.dual_decay {
        DualDecay::Conjugate(conj) => functional::adaptive_exp_box(conj.as_ref(), tol)?,
        DualDecay::QuadraticTail {
            constant_plus_excess,
        } => {
            let r = (2.0 * (target + constant_plus_excess)).sqrt() + 1.0;
            vec![r; n]
        }
    };
    let mut half = t_half;
    half.extend(s_half);
    Ok(half)
}

/// Half-widths for the `(x, y)` chart from the decay of `e^{−(φ−φ(0))/…}`;
/// the modulus on the graph is at most `e^{−(φ(x)+φ(y))/2 + φ(0)}`.
fn xy_half_widths(phi: &dyn ConvexFunction, tol: &Tolerances) -> Result<Vec<f64>> {
    let n = phi.dim();
    let origin = vec![0.0; n];
    let m = phi.eval(&origin).value().ok_or(Error::InfiniteAtOrigin)?;
    let target = 2.0 * (-(tol.boundary_ratio.ln()) + 5.0);
    let mut half = Vec::with_capacity(2 * n);
    for k in 0..n {
        let probe = |r: f64| {
            let mut x = vec![0.0; n];
            x[k] = r;
            match phi.eval(&x).value() {
                Some(v) => v - m >= target,
                None => true,
            }
        };
        let mut hi = 1.0;
        let mut rounds = 0;
        while !probe(hi) && rounds < 60 {
            hi *= 2.0;
            rounds += 1;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if probe(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        half.push(hi * 1.02 + 1e-6);
    }
    let xs = half.clone();
    half.extend(xs);
    Ok(half)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourMethod {
    TsQuadrature,
    XyQuadrature,
    MonteCarlo,
}

impl ContourMethod {
    pub fn label(&self) -> &'static str {
        match self {
            ContourMethod::TsQuadrature => "ts-quadrature",
            ContourMethod::XyQuadrature => "xy-quadrature",
            ContourMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContourBudget {
    /// Quadrature nodes per axis (forced odd).
    pub nodes: usize,
    /// Sample count for the Monte-Carlo method.
    pub samples: u64,
}

impl ContourBudget {
    pub fn default_for(n: usize) -> ContourBudget {
        match n {
            1 => ContourBudget {
                nodes: 121,
                samples: 400_000,
            },
            2 => ContourBudget {
                nodes: 41,
                samples: 1_000_000,
            },
            _ => ContourBudget {
                nodes: 21,
                samples: 2_000_000,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourIntegral {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub chart: String,
    pub nodes: u64,
    pub newton_failures: usize,
    pub phi: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl ContourIntegral {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// `2^{-n}·|I|`, the quantity the Gaussian pins to `π^n`.
    pub fn normalized_modulus(&self, n: usize) -> f64 {
        self.value().norm() / 2f64.powi(n as i32)
    }
}

fn pack(
    value: Complex64,
    out: &QuadOutcome,
    scale: f64,
    chart: &str,
    failures: usize,
    phi: &dyn ConvexFunction,
    tol: &Tolerances,
) -> ContourIntegral {
    let mut warnings = Vec::new();
    if out.boundary_max * scale > tol.boundary_ratio * value.norm() {
        warnings.push(format!(
            "truncation: boundary integrand {:.3e} above ratio {:.1e}",
            out.boundary_max * scale,
            tol.boundary_ratio
        ));
    }
    let mut error = out.error_estimate() * scale;
    if failures > 0 {
        error += value.norm() * failures as f64 / out.nodes as f64;
    }
    ContourIntegral {
        re: value.re,
        im: value.im,
        error,
        chart: chart.to_string(),
        nodes: out.nodes,
        newton_failures: failures,
        phi: phi.describe(),
        warnings,
    }
}

/// The contour integral, orientation fixed so the Gaussian value is positive:
/// `(t,s)` chart integrates `2^n·F(π^{-1}(t,s))` against `dt ds`, the `(x,y)`
/// chart integrates `F·det((H(x)+H(y))/2)`. The two must agree within their
/// combined error estimates.
pub fn contour_integral(
    phi: &ConvexFn,
    method: ContourMethod,
    budget: &ContourBudget,
    seed: u64,
    tol: &Tolerances,
) -> Result<ContourIntegral> {
    let adm = admissibility(phi.as_ref())?;
    let n = phi.dim();
    match method {
        ContourMethod::TsQuadrature => {
            let half = ts_half_widths(phi.as_ref(), &adm, tol)?;
            let domain = BoxDomain::symmetric(&half, budget.nodes | 1)?;
            let failures = AtomicUsize::new(0);
            let out = tensor_trapezoid_stateful(
                &domain,
                None::<Vec<f64>>,
                |warm: &mut Option<Vec<f64>>, coords: &[f64]| {
                    let (t, s) = coords.split_at(n);
                    match lagrangian::invert_pi(phi.as_ref(), t, s, warm.as_deref(), tol) {
                        Ok(p) => {
                            *warm = Some(p.x.clone());
                            integrand(&p)
                        }
                        Err(_) => {
                            *warm = None;
                            failures.fetch_add(1, Ordering::Relaxed);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                },
            );
            let failed = failures.load(Ordering::Relaxed);
            if (failed as f64) > tol.projection_failure_cap * out.nodes as f64 {
                return Err(Error::ProjectionFailures {
                    failed,
                    total: out.nodes as usize,
                    cap_percent: tol.projection_failure_cap * 100.0,
                });
            }
            let scale = 2f64.powi(n as i32);
            Ok(pack(
                out.fine * scale,
                &out,
                scale,
                "ts",
                failed,
                phi.as_ref(),
                tol,
            ))
        }
        ContourMethod::XyQuadrature => {
            let half = xy_half_widths(phi.as_ref(), tol)?;
            let domain = BoxDomain::symmetric(&half, budget.nodes | 1)?;
            let out = tensor_trapezoid(&domain, |coords: &[f64]| {
                let (x, y) = coords.split_at(n);
                let p = match lagrangian::lift(phi.as_ref(), x, y, tol) {
                    Ok(p) => p,
                    Err(_) => return Complex64::new(0.0, 0.0),
                };
                let hx = phi.hessian(x);
                let hy = phi.hessian(y);
                let (Some(hx), Some(hy)) = (hx, hy) else {
                    return Complex64::new(0.0, 0.0);
                };
                let det = linalg::det(&hx.add_mat(&hy).scaled(0.5));
                integrand(&p) * det
            });
            Ok(pack(out.fine, &out, 1.0, "xy", 0, phi.as_ref(), tol))
        }
        ContourMethod::MonteCarlo => contour_mc(phi, &adm, budget, seed, tol),
    }
}

/// Per-axis piecewise-constant proposal built from a 1D profile of the decay.
struct AxisProposal {
    lo: f64,
    step: f64,
    /// cell masses normalized to 1
    cdf: Vec<f64>,
    density: Vec<f64>,
}

impl AxisProposal {
    fn build(half: f64, cells: usize, profile: impl Fn(f64) -> f64) -> AxisProposal {
        let lo = -half;
        let step = 2.0 * half / cells as f64;
        let mut masses = Vec::with_capacity(cells);
        for i in 0..cells {
            let a = lo + step * i as f64;
            let b = a + step;
            masses.push(0.5 * (profile(a) + profile(b)) * step + 1e-300);
        }
        let total: f64 = masses.iter().sum();
        let mut cdf = Vec::with_capacity(cells);
        let mut acc = 0.0;
        let mut density = Vec::with_capacity(cells);
        for m in &masses {
            acc += m / total;
            cdf.push(acc);
            density.push(m / total / step);
        }
        AxisProposal {
            lo,
            step,
            cdf,
            density,
        }
    }

    /// Sample a coordinate; returns (value, density at value).
    fn sample(&self, u: f64, v: f64) -> (f64, f64) {
        let cell = self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1);
        let x = self.lo + self.step * (cell as f64 + v);
        (x, self.density[cell])
    }
}

fn contour_mc(
    phi: &ConvexFn,
    adm: &Admissibility,
    budget: &ContourBudget,
    seed: u64,
    tol: &Tolerances,
) -> Result<ContourIntegral> {
    let n = phi.dim();
    let half = ts_half_widths(phi.as_ref(), adm, tol)?;
    // proposals: e^{−φ(u e_k)} along t-axes, the conjugate's quadratic
    // envelope along s-axes (any positive proposal is unbiased)
    let mut proposals: Vec<AxisProposal> = Vec::with_capacity(2 * n);
    let origin = vec![0.0; n];
    let m0 = phi.eval(&origin).value().ok_or(Error::InfiniteAtOrigin)?;
    for k in 0..n {
        let phi_ref = phi.clone();
        proposals.push(AxisProposal::build(half[k], 512, move |u| {
            let mut x = vec![0.0; n];
            x[k] = u;
            (-(phi_ref.eval(&x).value().unwrap_or(f64::INFINITY) - m0)).exp()
        }));
    }
    match &adm.dual_decay {
        DualDecay::Conjugate(conj) => {
            let m_dual = conj.eval(&origin).value().unwrap_or(0.0);
            for k in 0..n {
                let conj = conj.clone();
                proposals.push(AxisProposal::build(half[n + k], 512, move |u| {
                    let mut s = vec![0.0; n];
                    s[k] = u;
                    (-(conj.eval(&s).value().unwrap_or(f64::INFINITY) - m_dual)).exp()
                }));
            }
        }
        DualDecay::QuadraticTail {
            constant_plus_excess,
        } => {
            let c_d = *constant_plus_excess;
            for k in 0..n {
                proposals.push(AxisProposal::build(half[n + k], 512, move |u| {
                    (-(0.5 * u * u - c_d).max(0.0)).exp()
                }));
            }
        }
    }
    let proposals = Arc::new(proposals);

    const SHARDS: u64 = 64;
    let per = budget.samples / SHARDS;
    let total = per * SHARDS;
    let failures = AtomicUsize::new(0);
    let partials: Vec<(Complex64, f64, f64)> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut r = rng::stream_rng(seed, 100 + shard);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sum_sq_re = 0.0;
            let mut sum_sq_im = 0.0;
            let mut warm: Option<Vec<f64>> = None;
            for _ in 0..per {
                let mut coords = vec![0.0; 2 * n];
                let mut q = 1.0;
                for (k, prop) in proposals.iter().enumerate() {
                    let (x, d) = prop.sample(r.random_range(0.0..1.0), r.random_range(0.0..1.0));
                    coords[k] = x;
                    q *= d;
                }
                let (t, s) = coords.split_at(n);
                let f = match lagrangian::invert_pi(phi.as_ref(), t, s, warm.as_deref(), tol) {
                    Ok(p) => {
                        warm = Some(p.x.clone());
                        integrand(&p)
                    }
                    Err(_) => {
                        warm = None;
                        failures.fetch_add(1, Ordering::Relaxed);
                        Complex64::new(0.0, 0.0)
                    }
                };
                let w = f / q;
                sum += w;
                sum_sq_re += w.re * w.re;
                sum_sq_im += w.im * w.im;
            }
            (sum, sum_sq_re, sum_sq_im)
        })
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sq_re = 0.0;
    let mut sq_im = 0.0;
    for (s, a, b) in partials {
        sum += s;
        sq_re += a;
        sq_im += b;
    }
    let nn = total as f64;
    let mean = sum / nn;
    let var_re = (sq_re / nn - mean.re * mean.re).max(0.0) / nn;
    let var_im = (sq_im / nn - mean.im * mean.im).max(0.0) / nn;
    let scale = 2f64.powi(n as i32);
    let value = mean * scale;
    let stderr = (var_re + var_im).sqrt() * scale;
    let failed = failures.load(Ordering::Relaxed);
    if (failed as f64) > tol.projection_failure_cap * nn {
        return Err(Error::ProjectionFailures {
            failed,
            total: total as usize,
            cap_percent: tol.projection_failure_cap * 100.0,
        });
    }
    Ok(ContourIntegral {
        re: value.re,
        im: value.im,
        error: stderr,
        chart: "monte-carlo".into(),
        nodes: total,
        newton_failures: failed,
        phi: phi.describe(),
        warnings: Vec::new(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationReport {
    pub ts: Vec<f64>,
    pub values_re: Vec<f64>,
    pub values_im: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_pairwise_deviation: f64,
    pub stdev: f64,
    pub mean_error: f64,
    /// Deformation invariance: the spread stays within the error budget.
    pub pass: bool,
}

/// Evaluate the contour integral along the convex homotopy
/// `φ_t = (1−t)φ₀ + tφ₁` on a common truncation box; constancy across `t`
/// is the numerical content of the closed-form deformation argument.
pub fn deformation_sweep(
    phi0: &ConvexFn,
    phi1: &ConvexFn,
    steps: usize,
    budget: &ContourBudget,
    tol: &Tolerances,
) -> Result<DeformationReport> {
    if steps < 2 {
        return Err(Error::Spec(
            "deformation sweep needs at least 2 steps".into(),
        ));
    }
    let n = phi0.dim();
    // normalize φ₁(0) = 0 (the graph, hence the integral, is shift-invariant)
    let origin = vec![0.0; n];
    let c1 = phi1.eval(&origin).value().ok_or(Error::InfiniteAtOrigin)?;
    let phi1n: ConvexFn = Arc::new(Shifted::new(phi1.clone(), -c1));

    let blends: Vec<ConvexFn> = (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            Ok(Arc::new(crate::convex::Blend::new(phi0.clone(), phi1n.clone(), t)?) as ConvexFn)
        })
        .collect::<Result<_>>()?;

    // union box across the family, then one fixed domain for every step
    let mut half = vec![0.0; 2 * n];
    for b in &blends {
        let adm = admissibility(b.as_ref())?;
        let h = ts_half_widths(b.as_ref(), &adm, tol)?;
        for (a, v) in half.iter_mut().zip(h) {
            *a = f64::max(*a, v);
        }
    }
    let domain = BoxDomain::symmetric(&half, budget.nodes | 1)?;

    let mut values = Vec::with_capacity(steps);
    let mut errors = Vec::with_capacity(steps);
    let scale = 2f64.powi(n as i32);
    for b in &blends {
        let failures = AtomicUsize::new(0);
        let out = tensor_trapezoid_stateful(
            &domain,
            None::<Vec<f64>>,
            |warm: &mut Option<Vec<f64>>, coords: &[f64]| {
                let (t, s) = coords.split_at(n);
                match lagrangian::invert_pi(b.as_ref(), t, s, warm.as_deref(), tol) {
                    Ok(p) => {
                        *warm = Some(p.x.clone());
                        integrand(&p)
                    }
                    Err(_) => {
                        *warm = None;
                        failures.fetch_add(1, Ordering::Relaxed);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
        );
        let failed = failures.load(Ordering::Relaxed);
        if (failed as f64) > tol.projection_failure_cap * out.nodes as f64 {
            return Err(Error::ProjectionFailures {
                failed,
                total: out.nodes as usize,
                cap_percent: tol.projection_failure_cap * 100.0,
            });
        }
        values.push(out.fine * scale);
        errors.push(out.error_estimate() * scale);
    }

    let mean = values.iter().sum::<Complex64>() / steps as f64;
    let stdev = (values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / steps as f64).sqrt();
    let mut max_dev: f64 = 0.0;
    for a in &values {
        for b in &values {
            max_dev = max_dev.max((a - b).norm());
        }
    }
    let mean_error = errors.iter().sum::<f64>() / steps as f64;
    let pass = stdev <= tol.sigmas * mean_error;
    Ok(DeformationReport {
        ts: (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect(),
        values_re: values.iter().map(|v| v.re).collect(),
        values_im: values.iter().map(|v| v.im).collect(),
        errors,
        max_pairwise_deviation: max_dev,
        stdev,
        mean_error,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    /// `2^{-n}|I_φ|`.
    pub lhs: f64,
    /// `2^{-n}∫|integrand||Ω| = ∫ e^{−(x·ξ+y·η)/2} dt ds`.
    pub middle: f64,
    /// The functional volume product `J(φ)`.
    pub rhs: f64,
    pub lhs_error: f64,
    pub middle_error: f64,
    pub rhs_error: f64,
    pub chain_holds: bool,
    /// |Im I| relative to the error budget (monitored, not asserted).
    pub imag_part: f64,
}

/// The two-sided bound `2^{-n}|I_φ| ≤ 2^{-n}∫|·||Ω| ≤ J(φ)`, each term with
/// its own error estimate.
pub fn mahler_lower_bound_check(
    phi: &ConvexFn,
    budget: &ContourBudget,
    fbudget: &FunctionalBudget,
    tol: &Tolerances,
) -> Result<ChainReport> {
    if !phi.is_even() {
        return Err(Error::Spec(
            "the chained bound needs an even function".into(),
        ));
    }
    let adm = admissibility(phi.as_ref())?;
    let n = phi.dim();
    let half = ts_half_widths(phi.as_ref(), &adm, tol)?;
    let domain = BoxDomain::symmetric(&half, budget.nodes | 1)?;

    let run = |modulus: bool| -> (QuadOutcome, usize) {
        let failures = AtomicUsize::new(0);
        let out = tensor_trapezoid_stateful(
            &domain,
            None::<Vec<f64>>,
            |warm: &mut Option<Vec<f64>>, coords: &[f64]| {
                let (t, s) = coords.split_at(n);
                match lagrangian::invert_pi(phi.as_ref(), t, s, warm.as_deref(), tol) {
                    Ok(p) => {
                        *warm = Some(p.x.clone());
                        let v = integrand(&p);
                        if modulus {
                            Complex64::new(v.norm(), 0.0)
                        } else {
                            v
                        }
                    }
                    Err(_) => {
                        *warm = None;
                        failures.fetch_add(1, Ordering::Relaxed);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
        );
        (out, failures.load(Ordering::Relaxed))
    };
    let (signed, _) = run(false);
    let (absed, failed) = run(true);
    if (failed as f64) > tol.projection_failure_cap * absed.nodes as f64 {
        return Err(Error::ProjectionFailures {
            failed,
            total: absed.nodes as usize,
            cap_percent: tol.projection_failure_cap * 100.0,
        });
    }

    let lhs = signed.fine.norm();
    let lhs_error = signed.error_estimate();
    let middle = absed.fine.re;
    let middle_error = absed.error_estimate();
    let fm = functional::functional_mahler(phi, fbudget, tol)?;
    let rhs = fm.product;
    let rhs_error = fm.error;
    let chain_holds = lhs <= middle + tol.sigmas * (lhs_error + middle_error)
        && middle <= rhs + tol.sigmas * (middle_error + rhs_error);
    Ok(ChainReport {
        lhs,
        middle,
        rhs,
        lhs_error,
        middle_error,
        rhs_error,
        chain_holds,
        imag_part: signed.fine.im.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{Quadratic, Splice};
    use crate::functional::ConjugateRoute;
    use std::f64::consts::PI;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn gaussian(n: usize) -> ConvexFn {
        Arc::new(Quadratic::isotropic(n))
    }

    #[test]
    fn integrand_examples() {
        // diagonal point x = y = ξ = η = v: modulus e^{−|v|²}, zero phase
        let v = vec![0.7, -0.3];
        let p = LambdaPoint {
            x: v.clone(),
            y: v.clone(),
            xi: v.clone(),
            eta: v.clone(),
        };
        let want = (-(linalg::dot(&v, &v))).exp();
        let got = integrand(&p);
        assert!((got.re - want).abs() < 1e-15);
        assert!(got.im.abs() < 1e-15);

        let p = LambdaPoint {
            x: vec![1.0, 0.0],
            y: vec![0.0, 0.0],
            xi: vec![1.0, 0.0],
            eta: vec![0.0, 0.0],
        };
        assert!((integrand(&p).re - (-0.5f64).exp()).abs() < 1e-15);

        let p = LambdaPoint {
            x: vec![1.0, 0.0],
            y: vec![0.0, 1.0],
            xi: vec![1.0, 0.0],
            eta: vec![0.0, 1.0],
        };
        let got = integrand(&p);
        assert!((got.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_calibration_1d_ts() {
        let phi = gaussian(1);
        let out = contour_integral(
            &phi,
            ContourMethod::TsQuadrature,
            &ContourBudget::default_for(1),
            0,
            &tols(),
        )
        .unwrap();
        assert!(
            (out.normalized_modulus(1) - PI).abs() < 1e-6 * PI,
            "{}",
            out.normalized_modulus(1)
        );
        // orientation: positive real
        assert!(out.re > 0.0);
        assert!(out.im.abs() <= 3.0 * out.error.max(1e-12));
        assert_eq!(out.newton_failures, 0);
    }

    #[test]
    fn error_estimate_shrinks_under_node_doubling() {
        let phi: ConvexFn = Arc::new(Splice::new(1, 2.0, 0.3, 0.4).unwrap());
        let coarse = contour_integral(
            &phi,
            ContourMethod::TsQuadrature,
            &ContourBudget { nodes: 41, samples: 0 },
            0,
            &tols(),
        )
        .unwrap();
        let fine = contour_integral(
            &phi,
            ContourMethod::TsQuadrature,
            &ContourBudget { nodes: 81, samples: 0 },
            0,
            &tols(),
        )
        .unwrap();
        assert!(
            fine.error < coarse.error,
            "fine {} vs coarse {}",
            fine.error,
            coarse.error
        );
        assert!((fine.value() - coarse.value()).norm() <= 3.0 * (fine.error + coarse.error));
    }

    #[test]
    fn gaussian_calibration_2d_both_charts() {
        let phi = gaussian(2);
        let budget = ContourBudget::default_for(2);
        let ts = contour_integral(&phi, ContourMethod::TsQuadrature, &budget, 0, &tols()).unwrap();
        assert!(
            (ts.normalized_modulus(2) - PI * PI).abs() < 1e-5 * PI * PI,
            "{}",
            ts.normalized_modulus(2)
        );
        let xy = contour_integral(&phi, ContourMethod::XyQuadrature, &budget, 0, &tols()).unwrap();
        assert!(
            (xy.value() - ts.value()).norm() <= 3.0 * (xy.error + ts.error).max(1e-9),
            "ts {} vs xy {}",
            ts.value(),
            xy.value()
        );
    }

    #[test]
    fn charts_agree_on_splice() {
        let phi: ConvexFn = Arc::new(Splice::new(1, 2.0, 0.3, -0.5).unwrap());
        let budget = ContourBudget {
            nodes: 161,
            samples: 0,
        };
        let ts = contour_integral(&phi, ContourMethod::TsQuadrature, &budget, 0, &tols()).unwrap();
        let xy = contour_integral(&phi, ContourMethod::XyQuadrature, &budget, 0, &tols()).unwrap();
        assert!(
            (xy.value() - ts.value()).norm() <= 3.0 * (xy.error + ts.error).max(1e-8),
            "ts {} ± {} vs xy {} ± {}",
            ts.value(),
            ts.error,
            xy.value(),
            xy.error
        );
        // deformation invariance: the splice integral equals the Gaussian one
        let g = contour_integral(
            &gaussian(1),
            ContourMethod::TsQuadrature,
            &budget,
            0,
            &tols(),
        )
        .unwrap();
        assert!(
            (ts.value() - g.value()).norm() <= 3.0 * (ts.error + g.error).max(1e-7),
            "splice {} vs gaussian {}",
            ts.value(),
            g.value()
        );
    }

    #[test]
    fn charts_agree_on_splice_2d() {
        let phi: ConvexFn = Arc::new(Splice::new(2, 1.6, 0.2, 0.35).unwrap());
        let budget = ContourBudget { nodes: 33, samples: 0 };
        let ts = contour_integral(&phi, ContourMethod::TsQuadrature, &budget, 0, &tols()).unwrap();
        let xy = contour_integral(&phi, ContourMethod::XyQuadrature, &budget, 0, &tols()).unwrap();
        assert!(
            (xy.value() - ts.value()).norm() <= 3.0 * (xy.error + ts.error),
            "ts {} ± {} vs xy {} ± {}",
            ts.value(),
            ts.error,
            xy.value(),
            xy.error
        );
        // even φ with symmetric sampling: the phase cancels
        assert!(ts.im.abs() <= 3.0 * ts.error.max(1e-12));
    }

    #[test]
    fn monte_carlo_matches_gaussian() {
        let phi = gaussian(1);
        let budget = ContourBudget {
            nodes: 0,
            samples: 200_000,
        };
        let mc = contour_integral(&phi, ContourMethod::MonteCarlo, &budget, 42, &tols()).unwrap();
        assert!(
            (mc.normalized_modulus(1) - PI).abs() <= 3.5 * mc.error / 2.0,
            "mc {} ± {}",
            mc.normalized_modulus(1),
            mc.error
        );
        // determinism
        let again =
            contour_integral(&phi, ContourMethod::MonteCarlo, &budget, 42, &tols()).unwrap();
        assert_eq!(mc.re, again.re);
        assert_eq!(mc.im, again.im);
    }

    #[test]
    fn trivial_deformation_is_constant() {
        let phi0 = gaussian(1);
        let phi1: ConvexFn = Arc::new(Shifted::new(gaussian(1), 0.0));
        let rep = deformation_sweep(
            &phi0,
            &phi1,
            5,
            &ContourBudget {
                nodes: 81,
                samples: 0,
            },
            &tols(),
        )
        .unwrap();
        assert!(rep.max_pairwise_deviation < 1e-10);
        assert!(rep.pass);
    }

    #[test]
    fn splice_deformation_sweep_1d() {
        let phi0 = gaussian(1);
        let phi1: ConvexFn = Arc::new(Splice::new(1, 2.0, 0.4, 0.55).unwrap());
        let rep = deformation_sweep(
            &phi0,
            &phi1,
            11,
            &ContourBudget {
                nodes: 161,
                samples: 0,
            },
            &tols(),
        )
        .unwrap();
        assert!(
            rep.pass,
            "stdev {} vs mean err {}",
            rep.stdev, rep.mean_error
        );
        // and the actual value stays at the Gaussian calibration
        let i0 = Complex64::new(rep.values_re[0], rep.values_im[0]);
        assert!((i0.norm() / 2.0 - PI).abs() < 1e-5);
    }

    #[test]
    fn nonadmissible_rejected() {
        // linear growth: the conjugate has bounded support and the
        // deformation class excludes it
        let phi: ConvexFn = Arc::new(crate::convex::MaxAffine::abs_value());
        assert!(matches!(
            contour_integral(
                &phi,
                ContourMethod::TsQuadrature,
                &ContourBudget::default_for(1),
                0,
                &tols()
            ),
            Err(Error::GrowthFlag(_)) | Err(Error::GradientUnavailable)
        ));
    }

    #[test]
    fn chain_gaussian_1d() {
        let phi = gaussian(1);
        let rep = mahler_lower_bound_check(
            &phi,
            &ContourBudget {
                nodes: 121,
                samples: 0,
            },
            &FunctionalBudget::default_for(1),
            &tols(),
        )
        .unwrap();
        // Gaussian: phase vanishes on the graph, so lhs = middle = π; rhs = 2π
        assert!((rep.lhs - PI).abs() / PI < 1e-6, "{}", rep.lhs);
        assert!((rep.middle - PI).abs() / PI < 1e-6);
        assert!((rep.rhs - 2.0 * PI).abs() / (2.0 * PI) < 1e-6);
        assert!(rep.chain_holds);
    }

    #[test]
    fn chain_anisotropic_1d_strict_middle() {
        let a = crate::linalg::Mat::from_rows(&[vec![2.0]]);
        let phi: ConvexFn = Arc::new(Quadratic::new(a).unwrap());
        let rep = mahler_lower_bound_check(
            &phi,
            &ContourBudget {
                nodes: 121,
                samples: 0,
            },
            &FunctionalBudget::default_for(1),
            &tols(),
        )
        .unwrap();
        assert!(rep.chain_holds);
        // middle < rhs strictly for the anisotropic Gaussian
        assert!(rep.middle < rep.rhs - 3.0 * (rep.middle_error + rep.rhs_error));
    }

    #[test]
    fn chain_splice_2d() {
        let phi: ConvexFn = Arc::new(Splice::new(2, 1.5, 0.2, 0.3).unwrap());
        let rep = mahler_lower_bound_check(
            &phi,
            &ContourBudget {
                nodes: 41,
                samples: 0,
            },
            &FunctionalBudget {
                nodes: 161,
                conj_grid_nodes: 441,
                conj_dual_nodes: 241,
                route: ConjugateRoute::ForceGrid,
            },
            &tols(),
        )
        .unwrap();
        assert!(rep.chain_holds, "{rep:?}");
    }
}
