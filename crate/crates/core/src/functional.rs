//! The functional volume product `J(φ) = ∫e^{−φ} · ∫e^{−φ*}` and the sweep
//! harness checking `J(φ) ≥ π^n` across test families.

use std::sync::Arc;

use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::convex::{
    ConvexFn, ConvexFunction, MaxAffine, PPower, PolytopeGauge, Quadratic, Splice,
};
use crate::error::{Error, Result};
use crate::estimate::IntegralEstimate;
use crate::extreal::ExtReal;
use crate::grid::{Axis, GridFunction};
use crate::legendre;
use crate::linalg::Mat;
use crate::polytope::{Rep, SymmetricPolytope};
use crate::quadrature::{tensor_trapezoid, BoxDomain};
use crate::rng;
use num_complex::Complex64;

/// Per-axis half-widths of a box on which `e^{−f}` has decayed below the
/// boundary ratio, found by doubling and bisection along the axes. Skewed
/// mass is caught afterwards by the expansion loop in [`exp_integral`].
pub fn adaptive_exp_box(f: &dyn ConvexFunction, tol: &Tolerances) -> Result<Vec<f64>> {
    let n = f.dim();
    let origin = vec![0.0; n];
    let m = match f.eval(&origin) {
        ExtReal::Finite(v) => v,
        ExtReal::Inf => return Err(Error::InfiniteAtOrigin),
    };
    let target = -(tol.boundary_ratio.ln()) + 5.0;
    let mut halves = Vec::with_capacity(n);
    for k in 0..n {
        let probe = |r: f64| {
            let mut x = vec![0.0; n];
            x[k] = r;
            match f.eval(&x) {
                ExtReal::Finite(v) => v - m >= target,
                ExtReal::Inf => true,
            }
        };
        let mut hi = 1.0;
        let mut doublings = 0;
        while !probe(hi) {
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                break;
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if probe(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        halves.push(hi * 1.02 + 1e-6);
    }
    Ok(halves)
}

/// Tensor-trapezoid integral of `e^{−f}` with min-normalization, a halving
/// error estimate, and box expansion until the boundary integrand is below
/// the configured ratio of the running integral.
pub fn exp_integral(
    f: &dyn ConvexFunction,
    half_widths: &[f64],
    nodes: usize,
    tol: &Tolerances,
) -> Result<IntegralEstimate> {
    let mut halves = half_widths.to_vec();
    let origin = vec![0.0; f.dim()];
    let m = match f.eval(&origin) {
        ExtReal::Finite(v) => v,
        ExtReal::Inf => return Err(Error::InfiniteAtOrigin),
    };
    let mut attempt = 0;
    loop {
        let domain = BoxDomain::symmetric(&halves, nodes | 1)?;
        let out = tensor_trapezoid(&domain, |x| {
            Complex64::new(
                match f.eval(x) {
                    ExtReal::Finite(v) => (-(v - m)).exp(),
                    ExtReal::Inf => 0.0,
                },
                0.0,
            )
        });
        let scale = (-m).exp();
        let value = out.fine.re * scale;
        if out.boundary_max * scale > tol.boundary_ratio * value.abs() && attempt < 8 {
            for h in &mut halves {
                *h *= 1.3;
            }
            attempt += 1;
            continue;
        }
        let mut est = IntegralEstimate::real(value, out.error_estimate() * scale, out.nodes);
        if out.boundary_max * scale > tol.boundary_ratio * value.abs() {
            est.warn(format!(
                "truncation: boundary integrand {:.3e} exceeds {:.1e} of the integral",
                out.boundary_max * scale,
                tol.boundary_ratio
            ));
        }
        return Ok(est);
    }
}

/// Trapezoid integral of `e^{−g}` over the grid's own nodes (`+∞` → 0).
pub fn exp_integral_grid(g: &GridFunction) -> Result<IntegralEstimate> {
    if !g.has_finite_value() {
        return Err(Error::EmptyFiniteSupport);
    }
    let m = g.min_finite().unwrap();
    let all_odd = g.axes().iter().all(|a| a.count % 2 == 1 && a.count >= 3);
    let mut fine = 0.0;
    let mut coarse = 0.0;
    for flat in 0..g.len() {
        let idx = g.multi_index(flat);
        let mut w_fine = 1.0;
        let mut w_coarse = 1.0;
        let mut on_coarse = all_odd;
        for (k, a) in g.axes().iter().enumerate() {
            let edge = idx[k] == 0 || idx[k] == a.count - 1;
            w_fine *= a.step() * if edge { 0.5 } else { 1.0 };
            if on_coarse && idx[k] % 2 == 0 {
                w_coarse *= 2.0 * a.step() * if edge { 0.5 } else { 1.0 };
            } else {
                on_coarse = false;
            }
        }
        let v = match g.value(flat) {
            ExtReal::Finite(v) => (-(v - m)).exp(),
            ExtReal::Inf => 0.0,
        };
        fine += w_fine * v;
        if on_coarse {
            coarse += w_coarse * v;
        }
    }
    let scale = (-m).exp();
    let err = if all_odd {
        ((fine - coarse).abs() * scale).max(1e-13 * fine.abs() * scale)
    } else {
        1e-10 * fine.abs() * scale
    };
    Ok(IntegralEstimate::real(fine * scale, err, g.len() as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateRoute {
    /// Closed-form conjugate when the family has one, grid transform otherwise.
    Auto,
    /// Always go through the discrete Legendre transform.
    ForceGrid,
}

#[derive(Clone, Debug)]
pub struct FunctionalBudget {
    /// Quadrature nodes per axis (forced odd).
    pub nodes: usize,
    /// Primal sampling resolution for the grid-conjugate route.
    pub conj_grid_nodes: usize,
    /// Dual grid resolution for the grid-conjugate route.
    pub conj_dual_nodes: usize,
    pub route: ConjugateRoute,
}

impl FunctionalBudget {
    pub fn default_for(n: usize) -> FunctionalBudget {
        match n {
            1 => FunctionalBudget {
                nodes: 801,
                conj_grid_nodes: 2001,
                conj_dual_nodes: 1201,
                route: ConjugateRoute::Auto,
            },
            2 => FunctionalBudget {
                nodes: 241,
                conj_grid_nodes: 641,
                conj_dual_nodes: 321,
                route: ConjugateRoute::Auto,
            },
            _ => FunctionalBudget {
                nodes: 81,
                conj_grid_nodes: 161,
                conj_dual_nodes: 121,
                route: ConjugateRoute::Auto,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalMahlerResult {
    pub integral_primal: f64,
    pub integral_dual: f64,
    pub product: f64,
    /// `product / π^n`.
    pub margin: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Both integrals of the functional volume product, with consistent adaptive
/// truncation and an explicit error estimate.
pub fn functional_mahler(
    f: &ConvexFn,
    budget: &FunctionalBudget,
    tol: &Tolerances,
) -> Result<FunctionalMahlerResult> {
    let n = f.dim();
    let halves = adaptive_exp_box(f.as_ref(), tol)?;
    let primal = exp_integral(f.as_ref(), &halves, budget.nodes, tol)?;
    let mut warnings = primal.warnings.clone();

    let conj = match budget.route {
        ConjugateRoute::Auto => f.analytic_conjugate(),
        ConjugateRoute::ForceGrid => None,
    };
    let (dual_value, dual_err) = match conj {
        Some(g) => {
            let dual_halves = adaptive_exp_box(g.as_ref(), tol)?;
            let dual = exp_integral(g.as_ref(), &dual_halves, budget.nodes, tol)?;
            warnings.extend(dual.warnings.iter().cloned());
            (dual.re, dual.error)
        }
        None => {
            // grid route: sample, conjugate on the slope-based dual box,
            // integrate the dual grid
            let axes: Vec<Axis> = halves
                .iter()
                .map(|&h| Axis::symmetric(h, budget.conj_grid_nodes | 1))
                .collect::<Result<_>>()?;
            let sampled = GridFunction::sample(f.as_ref(), axes)?;
            let dual_axes = legendre::default_dual_axes(&sampled, budget.conj_dual_nodes | 1)?;
            let pair = legendre::conjugate_with_bound(&sampled, &dual_axes, tol)?;
            let dual = exp_integral_grid(&pair.dual)?;
            warnings.extend(dual.warnings.iter().cloned());
            // a sup error δ on φ* perturbs the integral by ≈ δ·∫e^{−φ*}
            let err = dual.error + pair.sup_error * dual.re;
            (dual.re, err)
        }
    };

    let product = primal.re * dual_value;
    let error = primal.error * dual_value + dual_err * primal.re + primal.error * dual_err;
    Ok(FunctionalMahlerResult {
        integral_primal: primal.re,
        integral_dual: dual_value,
        product,
        margin: product / std::f64::consts::PI.powi(n as i32),
        error,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub enum SweepFamily {
    Quadratics,
    PPowers(Vec<f64>),
    MaxAffine,
    Gauges,
    Splices,
}

impl SweepFamily {
    pub fn label(&self) -> &'static str {
        match self {
            SweepFamily::Quadratics => "quadratic",
            SweepFamily::PPowers(_) => "ppower",
            SweepFamily::MaxAffine => "maxaffine",
            SweepFamily::Gauges => "gauge",
            SweepFamily::Splices => "splice",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub integral_primal: f64,
    pub integral_dual: f64,
    pub product: f64,
    pub margin: f64,
    pub error: f64,
    /// Margin below `1 − error` would indicate a bug, not a counterexample.
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    pub min_margin: f64,
    pub violations: usize,
}

/// Seed-deterministic family members for the sweep.
pub fn family_members(
    family: &SweepFamily,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<ConvexFn>> {
    let mut out: Vec<ConvexFn> = Vec::new();
    match family {
        SweepFamily::Quadratics => {
            for i in 0..count {
                let mut r = rng::stream_rng(seed, i as u64);
                out.push(Arc::new(Quadratic::new(random_spd(n, &mut r))?));
            }
        }
        SweepFamily::PPowers(ps) => {
            for &p in ps.iter().take(if count == 0 {
                ps.len()
            } else {
                count.max(ps.len())
            }) {
                out.push(Arc::new(PPower::new(n, p)?));
            }
        }
        SweepFamily::MaxAffine => {
            for i in 0..count {
                let mut r = rng::stream_rng(seed, 1000 + i as u64);
                let pieces = r.random_range(3..7);
                let slopes: Vec<Vec<f64>> = (0..pieces)
                    .map(|_| {
                        let d = rng::unit_direction(&mut r, n);
                        let s: f64 = r.random_range(0.5..2.0);
                        d.iter().map(|v| v * s).collect()
                    })
                    .collect();
                let offsets: Vec<f64> = (0..pieces).map(|_| r.random_range(-0.5..0.2)).collect();
                out.push(Arc::new(MaxAffine::new(slopes, offsets)?));
            }
        }
        SweepFamily::Gauges => {
            for i in 0..count {
                let body = SymmetricPolytope::random(
                    n,
                    n + 2,
                    Rep::Halfspaces,
                    seed ^ (i as u64).wrapping_mul(0x9e37_79b9),
                );
                out.push(Arc::new(PolytopeGauge::new(body)?));
            }
        }
        SweepFamily::Splices => {
            for i in 0..count {
                let mut r = rng::stream_rng(seed, 2000 + i as u64);
                let radius = r.random_range(1.0..2.5);
                let cap = radius * radius / 6.0 * 0.8;
                let amplitude = r.random_range(-cap..cap);
                let constant = r.random_range(-0.5..0.5);
                out.push(Arc::new(Splice::new(n, radius, constant, amplitude)?));
            }
        }
    }
    Ok(out)
}

/// Margins of `J(φ)/π^n` across a family; any margin below `1 − error`
/// is flagged.
pub fn theorem21_sweep(
    family: &SweepFamily,
    n: usize,
    count: usize,
    seed: u64,
    budget: &FunctionalBudget,
    tol: &Tolerances,
) -> Result<SweepReport> {
    let members = family_members(family, n, count, seed)?;
    let pi_n = std::f64::consts::PI.powi(n as i32);
    let rows: Vec<SweepRow> = members
        .par_iter()
        .map(|f| {
            let res = functional_mahler(f, budget, tol)?;
            Ok(SweepRow {
                label: f.describe(),
                integral_primal: res.integral_primal,
                integral_dual: res.integral_dual,
                product: res.product,
                margin: res.margin,
                error: res.error,
                violation: res.margin < 1.0 - res.error / pi_n,
            })
        })
        .collect::<Result<_>>()?;
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(SweepReport {
        family: family.label().to_string(),
        n,
        seed,
        rows,
        min_margin,
        violations,
    })
}

/// Random symmetric positive definite matrix with eigenvalues in a tame range.
pub fn random_spd(n: usize, r: &mut rand_chacha::ChaCha8Rng) -> Mat {
    let q = rng::random_rotation(r, n);
    let mut d = Mat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = r.random_range(0.4..2.5);
    }
    q.transpose().matmul(&d).matmul(&q)
}
