//! Discrete Legendre transforms.
//!
//! `conjugate_bruteforce` is the reference oracle: the literal sup over all
//! primal nodes. `conjugate_fast_1d` computes the same sup in linear time by
//! walking the lower convex envelope with a monotone argmax pointer, and the
//! n-dimensional transform iterates the 1D pass axis by axis. A grid is +∞
//! outside its box, which makes indicator conjugates exact.

use std::sync::Arc;

use rayon::prelude::*;

use crate::config::Tolerances;
use crate::convex::{ConvexFn, LipschitzEnvelope, MaxWithShiftedSqNorm};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{Axis, GridFunction};

/// Vertices of the lower convex envelope of the finite nodes, as
/// (node index, value) pairs in increasing x.
pub fn lower_convex_envelope(xs: &[f64], vals: &[ExtReal]) -> Vec<(usize, f64)> {
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        let ExtReal::Finite(v) = *v else { continue };
        while hull.len() >= 2 {
            let (ia, va) = hull[hull.len() - 2];
            let (ib, vb) = hull[hull.len() - 1];
            let (xa, xb, xc) = (xs[ia], xs[ib], xs[i]);
            // pop b when slope(a,b) ≥ slope(b,c), i.e. b on or above chord a–c
            if (vb - va) * (xc - xb) >= (v - vb) * (xb - xa) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((i, v));
    }
    hull
}

/// `out[j] = -sup_x (x·ξ_j − row(x))`, the negated 1D conjugate of one row;
/// all-infinite rows produce all-infinite output (the sup over an empty set).
fn neg_conj_row(xs: &[f64], vals: &[ExtReal], dual: &Axis, out: &mut [ExtReal]) {
    let hull = lower_convex_envelope(xs, vals);
    if hull.is_empty() {
        out.fill(ExtReal::Inf);
        return;
    }
    let mut ptr = 0usize;
    for (j, slot) in out.iter_mut().enumerate() {
        let xi = dual.node(j);
        while ptr + 1 < hull.len() {
            let (ia, va) = hull[ptr];
            let (ib, vb) = hull[ptr + 1];
            if (xs[ib] - xs[ia]) * xi - (vb - va) > 0.0 {
                ptr += 1;
            } else {
                break;
            }
        }
        // guard window around the scan position absorbs float-level wiggles
        let lo = ptr.saturating_sub(2);
        let hi = (ptr + 2).min(hull.len() - 1);
        let mut best = f64::NEG_INFINITY;
        for &(i, v) in &hull[lo..=hi] {
            let cand = xs[i] * xi - v;
            if cand > best {
                best = cand;
            }
        }
        *slot = ExtReal::finite(-best);
    }
}

/// Reference oracle: the sup over every primal node, in any dimension.
pub fn conjugate_bruteforce(f: &GridFunction, dual_axes: &[Axis]) -> Result<GridFunction> {
    if !f.has_finite_value() {
        return Err(Error::EmptyFiniteSupport);
    }
    if dual_axes.len() != f.dim() {
        return Err(Error::Spec("dual grid dimension mismatch".into()));
    }
    let primal: Vec<(Vec<f64>, f64)> = (0..f.len())
        .filter_map(|flat| f.value(flat).value().map(|v| (f.coords(flat), v)))
        .collect();
    let out = GridFunction::from_fn(dual_axes.to_vec(), |xi| {
        let mut best = f64::NEG_INFINITY;
        for (x, v) in &primal {
            let mut dot = 0.0;
            for (a, b) in x.iter().zip(xi) {
                dot += a * b;
            }
            let cand = dot - v;
            if cand > best {
                best = cand;
            }
        }
        ExtReal::finite(best)
    })?;
    Ok(out)
}

/// Linear-time 1D conjugate; agrees with the oracle to float accumulation.
pub fn conjugate_fast_1d(f: &GridFunction, dual: Axis) -> Result<GridFunction> {
    if f.dim() != 1 {
        return Err(Error::Spec(format!(
            "fast 1D transform got a {}D grid",
            f.dim()
        )));
    }
    if !f.has_finite_value() {
        return Err(Error::EmptyFiniteSupport);
    }
    let xs = f.axes()[0].nodes();
    let mut out = vec![ExtReal::Inf; dual.count];
    neg_conj_row(&xs, f.values(), &dual, &mut out);
    let values = out
        .iter()
        .map(|v| match v {
            ExtReal::Finite(v) => ExtReal::finite(-v),
            ExtReal::Inf => ExtReal::Inf,
        })
        .collect();
    GridFunction::new(vec![dual], values)
}

/// n-dimensional conjugate by iterated 1D passes.
///
/// The carrier after pass k is `D_k(ξ_1..ξ_k, x_{k+1}..x_n) =
/// inf_{x_1..x_k} (f − Σ ξ_i x_i)`, which stays convex in the remaining
/// primal variables and never needs `−∞`; the result is `−D_n`.
pub fn conjugate_nd(
    f: &GridFunction,
    dual_axes: &[Axis],
    tol: &Tolerances,
) -> Result<GridFunction> {
    if dual_axes.len() != f.dim() {
        return Err(Error::Spec("dual grid dimension mismatch".into()));
    }
    if !f.has_finite_value() {
        return Err(Error::EmptyFiniteSupport);
    }
    // peak intermediate size over the axis passes
    let requested: usize = (0..=f.dim())
        .map(|k| {
            dual_axes[..k]
                .iter()
                .map(|a| a.count)
                .chain(f.axes()[k..].iter().map(|a| a.count))
                .product::<usize>()
        })
        .max()
        .unwrap_or(0);
    if requested > tol.max_grid_nodes {
        return Err(Error::MemoryBudget {
            requested,
            cap: tol.max_grid_nodes,
        });
    }
    let mut carrier = f.clone();
    for axis in 0..f.dim() {
        carrier = neg_conj_pass(&carrier, axis, dual_axes[axis])?;
    }
    let values = carrier
        .values()
        .iter()
        .map(|v| match v {
            ExtReal::Finite(v) => ExtReal::finite(-v),
            ExtReal::Inf => ExtReal::Inf,
        })
        .collect();
    GridFunction::new(dual_axes.to_vec(), values)
}

/// One axis pass of the carrier recursion, rows in parallel.
fn neg_conj_pass(g: &GridFunction, axis: usize, dual: Axis) -> Result<GridFunction> {
    let mut axes_out = g.axes().to_vec();
    axes_out[axis] = dual;
    let xs = g.axes()[axis].nodes();
    let row_shape: Vec<usize> = g
        .axes()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != axis)
        .map(|(_, a)| a.count)
        .collect();
    let rows: usize = row_shape.iter().product();
    let lines: Vec<(Vec<usize>, Vec<ExtReal>)> = (0..rows)
        .into_par_iter()
        .map(|rid| {
            let mut fixed = vec![0usize; g.dim()];
            let mut rest = rid;
            for (slot, count) in row_shape.iter().enumerate().rev() {
                let k = if slot < axis { slot } else { slot + 1 };
                fixed[k] = rest % count;
                rest /= count;
            }
            let row = g.line(axis, &fixed);
            let mut out = vec![ExtReal::Inf; dual.count];
            neg_conj_row(&xs, &row, &dual, &mut out);
            (fixed, out)
        })
        .collect();
    let mut out = GridFunction::from_fn(axes_out, |_| ExtReal::Inf)?;
    for (fixed, line) in lines {
        out.set_line(axis, &fixed, &line);
    }
    Ok(out)
}

/// Default dual box: `[-L_k, L_k]` per axis with `L_k` the largest finite
/// slope of `f` along that axis (conjugate values past the attained slopes
/// are truncation artifacts), padded slightly.
pub fn default_dual_axes(f: &GridFunction, nodes: usize) -> Result<Vec<Axis>> {
    max_slopes(f)
        .into_iter()
        .map(|l| Axis::symmetric(l * 1.05 + 1e-9, nodes))
        .collect()
}

fn max_slopes(f: &GridFunction) -> Vec<f64> {
    (0..f.dim())
        .map(|k| {
            let h = f.axes()[k].step();
            let mut max_slope: f64 = 0.0;
            let row_shape: Vec<usize> = f
                .axes()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, a)| a.count)
                .collect();
            let rows: usize = row_shape.iter().product();
            for rid in 0..rows {
                let mut fixed = vec![0usize; f.dim()];
                let mut rest = rid;
                for (slot, count) in row_shape.iter().enumerate().rev() {
                    let kk = if slot < k { slot } else { slot + 1 };
                    fixed[kk] = rest % count;
                    rest /= count;
                }
                let row = f.line(k, &fixed);
                for w in row.windows(2) {
                    if let (ExtReal::Finite(a), ExtReal::Finite(b)) = (w[0], w[1]) {
                        max_slope = max_slope.max(((b - a) / h).abs());
                    }
                }
            }
            if max_slope == 0.0 {
                1.0
            } else {
                max_slope
            }
        })
        .collect()
}

/// A dual grid with an a-priori bound on |grid sup − continuum sup|:
/// `Σ_k (h_k/2)(max|ξ_k| + L_k)` with `L_k` the attained slopes.
pub struct ConjugatePair {
    pub dual: GridFunction,
    pub sup_error: f64,
}

pub fn conjugate_with_bound(
    f: &GridFunction,
    dual_axes: &[Axis],
    tol: &Tolerances,
) -> Result<ConjugatePair> {
    let dual = conjugate_nd(f, dual_axes, tol)?;
    let slopes = max_slopes(f);
    let mut bound = 0.0;
    for k in 0..f.dim() {
        let h = f.axes()[k].step();
        let xi_max = dual_axes[k].min.abs().max(dual_axes[k].max.abs());
        bound += 0.5 * h * (xi_max + slopes[k]);
    }
    Ok(ConjugatePair {
        dual,
        sup_error: bound,
    })
}

/// The two approximation sequences: `φ_j = max(f, |x|²/2 − j)`, decreasing in
/// `j` toward `f` when `f` grows at most linearly, and the Lipschitz envelope
/// `ψ_j`, increasing toward `f` from below.
pub fn approx_sequences(f: &ConvexFn, j: f64) -> Result<(ConvexFn, ConvexFn)> {
    let phi: ConvexFn = Arc::new(MaxWithShiftedSqNorm::new(f.clone(), j));
    let psi: ConvexFn = Arc::new(LipschitzEnvelope::new(f.clone(), j)?);
    Ok((phi, psi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Decreasing,
    Increasing,
}

#[derive(Debug)]
pub struct MonotoneConjugatesReport {
    pub direction: Direction,
    /// Conjugates move the opposite way at every dual node, exactly.
    pub conjugates_monotone: bool,
    pub max_monotonicity_violation: f64,
    /// Max |conj_j − limit conjugate| over dual nodes with a finite limit.
    pub gaps: Vec<f64>,
    pub final_gap: f64,
    /// Smallest last-member conjugate value at dual nodes where the limit
    /// conjugate is +∞ (grows without bound as the family converges).
    pub min_at_infinite_limit: Option<f64>,
}

/// Monotone-family conjugation check: a decreasing family must produce
/// increasing conjugates converging to the conjugate of the limit, and vice
/// versa. Comparisons are exact: the oracle's per-node arithmetic is
/// identical across members, so float rounding preserves the order.
pub fn monotone_conjugates_check(
    family: &[GridFunction],
    dual_axes: &[Axis],
    limit_conjugate: Option<&GridFunction>,
) -> Result<MonotoneConjugatesReport> {
    if family.len() < 2 {
        return Err(Error::Spec(
            "monotone family needs at least two members".into(),
        ));
    }
    for m in family.iter().skip(1) {
        if m.axes() != family[0].axes() {
            return Err(Error::Spec(
                "family members sampled on different grids".into(),
            ));
        }
    }
    let mut direction = None;
    'outer: for pair in family.windows(2) {
        for node in 0..pair[0].len() {
            match pair[1].value(node).total_cmp(&pair[0].value(node)) {
                std::cmp::Ordering::Less => {
                    direction = Some(Direction::Decreasing);
                    break 'outer;
                }
                std::cmp::Ordering::Greater => {
                    direction = Some(Direction::Increasing);
                    break 'outer;
                }
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    let direction = direction.unwrap_or(Direction::Decreasing);
    for (j, pair) in family.windows(2).enumerate() {
        for node in 0..pair[0].len() {
            let ord = pair[1].value(node).total_cmp(&pair[0].value(node));
            let bad = match direction {
                Direction::Decreasing => ord == std::cmp::Ordering::Greater,
                Direction::Increasing => ord == std::cmp::Ordering::Less,
            };
            if bad {
                return Err(Error::NotMonotone {
                    i: j,
                    j: j + 1,
                    node,
                });
            }
        }
    }
    let conjugates: Vec<GridFunction> = family
        .iter()
        .map(|m| conjugate_bruteforce(m, dual_axes))
        .collect::<Result<_>>()?;
    let mut monotone = true;
    let mut worst: f64 = 0.0;
    for pair in conjugates.windows(2) {
        for node in 0..pair[0].len() {
            let a = pair[0].value(node).unwrap_finite();
            let b = pair[1].value(node).unwrap_finite();
            let defect = match direction {
                Direction::Decreasing => a - b, // conjugates must increase
                Direction::Increasing => b - a,
            };
            if defect > 0.0 {
                monotone = false;
                worst = worst.max(defect);
            }
        }
    }
    let reference = match limit_conjugate {
        Some(g) => g.clone(),
        None => conjugates.last().unwrap().clone(),
    };
    let mut gaps = Vec::with_capacity(conjugates.len());
    for c in &conjugates {
        let mut gap: f64 = 0.0;
        for node in 0..c.len() {
            if let ExtReal::Finite(r) = reference.value(node) {
                gap = gap.max((c.value(node).unwrap_finite() - r).abs());
            }
        }
        gaps.push(gap);
    }
    let min_at_infinite_limit = {
        let last = conjugates.last().unwrap();
        let mut min_val: Option<f64> = None;
        for node in 0..last.len() {
            if reference.value(node) == ExtReal::Inf {
                let v = last.value(node).unwrap_finite();
                min_val = Some(min_val.map_or(v, |m| m.min(v)));
            }
        }
        min_val
    };
    let final_gap = *gaps.last().unwrap();
    Ok(MonotoneConjugatesReport {
        direction,
        conjugates_monotone: monotone,
        max_monotonicity_violation: worst,
        gaps,
        final_gap,
        min_at_infinite_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{build_analytic, ConvexFunction, FunctionSpec, Quadratic};
    use crate::rng;
    use rand::RngExt;

    fn grid_1d(half: f64, count: usize, f: impl Fn(f64) -> ExtReal) -> GridFunction {
        GridFunction::from_fn(vec![Axis::symmetric(half, count).unwrap()], |x| f(x[0])).unwrap()
    }

    /// Random convex grid values: nonnegative curvature integrated twice plus
    /// a random affine part, optionally with +∞ tails.
    fn random_convex_grid(seed: u64, count: usize, with_inf_tails: bool) -> GridFunction {
        let mut r = rng::stream_rng(seed, 7);
        let half = r.random_range(1.0..8.0);
        let slope0: f64 = r.random_range(-3.0..3.0);
        let v0: f64 = r.random_range(-2.0..2.0);
        let axis = Axis::symmetric(half, count).unwrap();
        let h = axis.step();
        let mut vals = Vec::with_capacity(count);
        let mut v = v0;
        let mut s = slope0;
        for _ in 0..count {
            vals.push(ExtReal::finite(v));
            let curv: f64 = r.random_range(0.0..2.0);
            s += curv * h;
            v += s * h;
        }
        if with_inf_tails {
            let cut = count / 8;
            for i in 0..cut {
                vals[i] = ExtReal::Inf;
                vals[count - 1 - i] = ExtReal::Inf;
            }
        }
        GridFunction::new(vec![axis], vals).unwrap()
    }

    #[test]
    fn quadratic_is_self_dual() {
        let f = grid_1d(6.0, 2001, |x| ExtReal::finite(0.5 * x * x));
        let dual = Axis::symmetric(4.0, 801).unwrap();
        let g = conjugate_fast_1d(&f, dual).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat)[0];
            let got = g.value(flat).unwrap_finite();
            assert!((got - 0.5 * xi * xi).abs() < 1e-4, "xi={xi} got={got}");
        }
    }

    #[test]
    fn conjugate_of_abs_is_ball_indicator_pattern() {
        let f = grid_1d(3.0, 1201, |x| ExtReal::finite(x.abs()));
        let dual = Axis::symmetric(2.0, 401).unwrap();
        let g = conjugate_fast_1d(&f, dual).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat)[0];
            let got = g.value(flat).unwrap_finite();
            if xi.abs() <= 1.0 {
                assert!(got.abs() < 1e-9, "xi={xi} got={got}");
            } else {
                // truncated-domain artifact: linear growth at the box slope
                let expect = 3.0 * (xi.abs() - 1.0);
                assert!((got - expect).abs() < 1e-2, "xi={xi} got={got}");
            }
        }
    }

    #[test]
    fn conjugate_of_indicator_is_support_function() {
        let f = grid_1d(2.0, 5, |x| {
            if x.abs() <= 1.0 {
                ExtReal::finite(0.0)
            } else {
                ExtReal::Inf
            }
        });
        let dual = Axis::symmetric(3.0, 7).unwrap();
        let g = conjugate_fast_1d(&f, dual).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat)[0];
            assert!((g.value(flat).unwrap_finite() - xi.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn cosh_conjugate_closed_form() {
        // f = cosh: f*(ξ) = ξ·asinh(ξ) − sqrt(1+ξ²), from inverting f' = sinh
        let f = grid_1d(4.0, 4001, |x| ExtReal::finite(x.cosh()));
        let dual = Axis::symmetric(5.0, 501).unwrap();
        let g = conjugate_bruteforce(&f, &[dual]).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat)[0];
            let expect = xi * xi.asinh() - (1.0 + xi * xi).sqrt();
            assert!(
                (g.value(flat).unwrap_finite() - expect).abs() < 5e-6,
                "xi={xi}"
            );
        }
    }

    #[test]
    fn fast_matches_oracle_on_random_convex_functions() {
        for seed in 0..50 {
            let count = [101, 467, 1001, 2001, 4001][seed as usize % 5];
            let f = random_convex_grid(seed, count, seed % 3 == 0);
            let dual = Axis::symmetric(4.0, 743).unwrap();
            let fast = conjugate_fast_1d(&f, dual).unwrap();
            let oracle = conjugate_bruteforce(&f, &[dual]).unwrap();
            let mut worst: f64 = 0.0;
            for flat in 0..fast.len() {
                let a = fast.value(flat).unwrap_finite();
                let b = oracle.value(flat).unwrap_finite();
                worst = worst.max((a - b).abs());
            }
            assert!(worst <= 1e-12, "seed {seed}: max deviation {worst}");
        }
    }

    #[test]
    fn fast_handles_nonconvex_via_envelope() {
        let axis = Axis::symmetric(3.0, 501).unwrap();
        let f = GridFunction::from_fn(vec![axis], |x| {
            ExtReal::finite(x[0] * x[0] + (5.0 * x[0]).sin() * 0.5)
        })
        .unwrap();
        let dual = Axis::symmetric(5.0, 301).unwrap();
        let fast = conjugate_fast_1d(&f, dual).unwrap();
        let oracle = conjugate_bruteforce(&f, &[dual]).unwrap();
        for flat in 0..fast.len() {
            let d = (fast.value(flat).unwrap_finite() - oracle.value(flat).unwrap_finite()).abs();
            assert!(d <= 1e-12);
        }
    }

    #[test]
    fn hinge_conjugate_matches_oracle_and_closed_form() {
        // f = max(|x|−1, 0): f*(ξ) = |ξ| on |ξ| ≤ 1 (plus the slope-1
        // truncation pattern further out), checked against the oracle
        let f = grid_1d(3.0, 1501, |x| ExtReal::finite((x.abs() - 1.0).max(0.0)));
        let dual = Axis::symmetric(1.0, 251).unwrap();
        let fast = conjugate_fast_1d(&f, dual).unwrap();
        let oracle = conjugate_bruteforce(&f, &[dual]).unwrap();
        for flat in 0..fast.len() {
            let xi = fast.coords(flat)[0];
            let v = fast.value(flat).unwrap_finite();
            assert!((v - oracle.value(flat).unwrap_finite()).abs() <= 1e-12);
            assert!((v - xi.abs()).abs() < 5e-3, "xi={xi} got={v}");
        }
    }

    #[test]
    fn affine_conjugate_spikes_at_slope() {
        // f(x) = 2x: dual minimal (zero) at ξ = 2, large elsewhere
        let f = grid_1d(4.0, 1601, |x| ExtReal::finite(2.0 * x));
        let dual = Axis::new(-4.0, 4.0, 801).unwrap();
        let fast = conjugate_fast_1d(&f, dual).unwrap();
        let oracle = conjugate_bruteforce(&f, &[dual]).unwrap();
        for flat in 0..fast.len() {
            let xi = fast.coords(flat)[0];
            let v = fast.value(flat).unwrap_finite();
            assert!((v - oracle.value(flat).unwrap_finite()).abs() <= 1e-12);
            if (xi - 2.0).abs() < 1e-9 {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nd_separable_quadratic() {
        let axes = vec![
            Axis::symmetric(6.0, 401).unwrap(),
            Axis::symmetric(6.0, 401).unwrap(),
        ];
        let f = GridFunction::from_fn(axes, |x| ExtReal::finite(0.5 * (x[0] * x[0] + x[1] * x[1])))
            .unwrap();
        let dual = vec![
            Axis::symmetric(3.0, 101).unwrap(),
            Axis::symmetric(3.0, 101).unwrap(),
        ];
        let g = conjugate_nd(&f, &dual, &Tolerances::default()).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat);
            let expect = 0.5 * (xi[0] * xi[0] + xi[1] * xi[1]);
            assert!((g.value(flat).unwrap_finite() - expect).abs() < 5e-4);
        }
    }

    #[test]
    fn nd_cubic_power_closed_form() {
        // f = Σ|x|³/3 → f* = Σ|ξ|^{3/2}/(3/2)
        let axes = vec![
            Axis::symmetric(4.0, 801).unwrap(),
            Axis::symmetric(4.0, 801).unwrap(),
        ];
        let f = GridFunction::from_fn(axes, |x| {
            ExtReal::finite(x.iter().map(|v| v.abs().powi(3)).sum::<f64>() / 3.0)
        })
        .unwrap();
        let dual = vec![
            Axis::symmetric(2.0, 81).unwrap(),
            Axis::symmetric(2.0, 81).unwrap(),
        ];
        let g = conjugate_nd(&f, &dual, &Tolerances::default()).unwrap();
        for flat in 0..g.len() {
            let xi = g.coords(flat);
            let expect = xi.iter().map(|v| v.abs().powf(1.5)).sum::<f64>() / 1.5;
            assert!(
                (g.value(flat).unwrap_finite() - expect).abs() < 2e-3,
                "xi={xi:?}"
            );
        }
    }

    #[test]
    fn nd_matches_bruteforce_on_coarse_grids() {
        for seed in 0..5 {
            let mut r = rng::stream_rng(seed, 2);
            let pieces: Vec<Vec<f64>> = (0..4)
                .map(|_| vec![r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)])
                .collect();
            let offsets: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..0.5)).collect();
            let spec = FunctionSpec::Maxaffine {
                slopes: pieces,
                offsets,
            };
            let f_fn = build_analytic(&spec).unwrap();
            let axes = vec![
                Axis::symmetric(3.0, 21).unwrap(),
                Axis::symmetric(3.0, 21).unwrap(),
            ];
            let f = GridFunction::from_fn(axes, |x| f_fn.eval(x)).unwrap();
            let dual = default_dual_axes(&f, 21).unwrap();
            let fast = conjugate_nd(&f, &dual, &Tolerances::default()).unwrap();
            let oracle = conjugate_bruteforce(&f, &dual).unwrap();
            for flat in 0..fast.len() {
                let d =
                    (fast.value(flat).unwrap_finite() - oracle.value(flat).unwrap_finite()).abs();
                assert!(d <= 1e-10, "seed {seed}: {d}");
            }
        }
    }

    #[test]
    fn order_reversal_and_evenness() {
        let f = random_convex_grid(5, 501, false);
        let g = GridFunction::new(
            f.axes().to_vec(),
            f.values()
                .iter()
                .enumerate()
                .map(|(i, v)| *v + (0.3 + (i as f64 * 0.01).sin().abs()))
                .collect(),
        )
        .unwrap();
        let dual = Axis::symmetric(3.0, 301).unwrap();
        let fc = conjugate_bruteforce(&f, &[dual]).unwrap();
        let gc = conjugate_bruteforce(&g, &[dual]).unwrap();
        for flat in 0..fc.len() {
            // g ≥ f pointwise ⟹ g* ≤ f*, exactly
            assert!(fc.value(flat).unwrap_finite() >= gc.value(flat).unwrap_finite());
        }

        let e = grid_1d(2.0, 401, |x| ExtReal::finite(x.abs().powf(1.7)));
        let ec = conjugate_fast_1d(&e, Axis::symmetric(2.5, 255).unwrap()).unwrap();
        assert!(ec.is_even());
    }

    #[test]
    fn biconjugation_returns_convex_envelope() {
        for seed in 0..20 {
            let f = random_convex_grid(100 + seed, 801, false);
            let dual = default_dual_axes(&f, 1601).unwrap();
            let pair = conjugate_with_bound(&f, &dual, &Tolerances::default()).unwrap();
            let back = conjugate_nd(&pair.dual, f.axes(), &Tolerances::default()).unwrap();
            // f is already convex: its envelope is itself at hull vertices
            let hull = lower_convex_envelope(&f.axes()[0].nodes(), f.values());
            let tol = 2.0 * (pair.sup_error + 1e-9);
            for &(i, v) in &hull {
                let b = back.value(i).unwrap_finite();
                assert!(
                    (b - v).abs() <= tol,
                    "seed {seed} node {i}: {b} vs {v} (tol {tol})"
                );
            }
        }
    }

    #[test]
    fn fenchel_young_equality_at_gradient_points() {
        let q = Quadratic::isotropic(1);
        let f = grid_1d(6.0, 2001, |x| q.eval(&[x]));
        let dual = default_dual_axes(&f, 2001).unwrap();
        let pair = conjugate_with_bound(&f, &dual, &Tolerances::default()).unwrap();
        let mut r = rng::stream_rng(9, 0);
        for _ in 0..50 {
            let x = r.random_range(-2.0..2.0);
            let xi = q.gradient(&[x]).unwrap()[0];
            let fstar = pair.dual.eval_linear(&[xi]).unwrap_finite();
            let gap = q.eval(&[x]).unwrap_finite() + fstar - x * xi;
            assert!(gap.abs() <= pair.sup_error + 1e-6, "gap {gap}");
        }
    }

    #[test]
    fn approx_sequences_examples() {
        let f: ConvexFn = Arc::new(crate::convex::MaxAffine::abs_value());
        let (phi10, _) = approx_sequences(&f, 10.0).unwrap();
        assert_eq!(phi10.eval(&[1.0]), ExtReal::finite(1.0));
        let q: ConvexFn = Arc::new(Quadratic::isotropic(1));
        let (_, psi) = approx_sequences(&q, 2.0).unwrap();
        assert!((psi.eval(&[1.0]).unwrap_finite() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn monotone_conjugates_decreasing_family() {
        // φ_j = x²/2 + 1/j decreasing; conjugates ξ²/2 − 1/j increasing
        let axis = Axis::symmetric(5.0, 801).unwrap();
        let family: Vec<GridFunction> = (1..=8)
            .map(|j| {
                GridFunction::from_fn(vec![axis], |x| {
                    ExtReal::finite(0.5 * x[0] * x[0] + 1.0 / j as f64)
                })
                .unwrap()
            })
            .collect();
        let dual = vec![Axis::symmetric(2.0, 201).unwrap()];
        let limit = {
            let g =
                GridFunction::from_fn(vec![axis], |x| ExtReal::finite(0.5 * x[0] * x[0])).unwrap();
            conjugate_bruteforce(&g, &dual).unwrap()
        };
        let rep = monotone_conjugates_check(&family, &dual, Some(&limit)).unwrap();
        assert_eq!(rep.direction, Direction::Decreasing);
        assert!(
            rep.conjugates_monotone,
            "violation {}",
            rep.max_monotonicity_violation
        );
        assert!(rep.gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(
            rep.final_gap <= 1.0 / 8.0 + 1e-9,
            "final gap {}",
            rep.final_gap
        );
    }

    #[test]
    fn monotone_conjugates_quadratic_tail_family() {
        // φ_j = max(|x|, x²/2 − j) decreasing to |x|; conjugates increase
        // toward the ball-indicator conjugate on the dual grid
        let axis = Axis::symmetric(12.0, 1601).unwrap();
        let family: Vec<GridFunction> = [1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&j| {
                GridFunction::from_fn(vec![axis], |x| {
                    ExtReal::finite((x[0].abs()).max(0.5 * x[0] * x[0] - j))
                })
                .unwrap()
            })
            .collect();
        let dual = vec![Axis::symmetric(2.0, 101).unwrap()];
        // the limit conjugate over all of R is the ball indicator: 0 on
        // [−1,1], +∞ outside; gaps are measured where the limit is finite
        let limit = GridFunction::from_fn(dual.clone(), |xi| {
            if xi[0].abs() <= 1.0 {
                ExtReal::finite(0.0)
            } else {
                ExtReal::Inf
            }
        })
        .unwrap();
        let rep = monotone_conjugates_check(&family, &dual, Some(&limit)).unwrap();
        assert_eq!(rep.direction, Direction::Decreasing);
        assert!(rep.conjugates_monotone);
        assert!(rep.gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(rep.final_gap < 1e-9, "final gap {}", rep.final_gap);
        // outside the ball the conjugates strictly exceed the limit's
        // finite plateau and keep growing with j (slowly near the boundary)
        assert!(rep.min_at_infinite_limit.unwrap() > 0.0);
    }

    #[test]
    fn constant_family_has_constant_conjugates() {
        let axis = Axis::symmetric(3.0, 301).unwrap();
        let member = GridFunction::from_fn(vec![axis], |x| ExtReal::finite(x[0] * x[0])).unwrap();
        let family = vec![member.clone(), member.clone(), member];
        let dual = vec![Axis::symmetric(2.0, 101).unwrap()];
        let rep = monotone_conjugates_check(&family, &dual, None).unwrap();
        assert!(rep.conjugates_monotone);
        assert_eq!(rep.final_gap, 0.0);
    }

    #[test]
    fn non_monotone_family_rejected() {
        let axis = Axis::symmetric(2.0, 51).unwrap();
        let a = GridFunction::from_fn(vec![axis], |x| ExtReal::finite(x[0] * x[0])).unwrap();
        let b = GridFunction::from_fn(vec![axis], |x| ExtReal::finite(x[0] * x[0] + x[0])).unwrap();
        let dual = vec![Axis::symmetric(2.0, 11).unwrap()];
        assert!(matches!(
            monotone_conjugates_check(&[a, b], &dual, None),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn empty_support_rejected() {
        let axis = Axis::symmetric(1.0, 5).unwrap();
        let f = GridFunction::new(vec![axis], vec![ExtReal::Inf; 5]).unwrap();
        assert!(matches!(
            conjugate_fast_1d(&f, Axis::symmetric(1.0, 5).unwrap()),
            Err(Error::EmptyFiniteSupport)
        ));
    }
}
