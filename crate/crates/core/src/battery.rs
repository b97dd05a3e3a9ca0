//! The acceptance battery: one function per criterion, each returning
//! pass/fail rows at either desk (`full`) or capped (`quick`) scale.
//! Shared by the `suite` command and the acceptance test target.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::RngExt;

use crate::config::Tolerances;
use crate::contour::{self, ContourBudget, ContourMethod};
use crate::convex::{ConvexFn, Quadratic, Splice, WithLinearMap};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::functional::{self, ConjugateRoute, FunctionalBudget, SweepFamily};
use crate::grid::{Axis, GridFunction};
use crate::kuperberg::{self, Ellipsoid, LpBall, MeshNodes, Segment, StarBody};
use crate::lagrangian;
use crate::legendre;

use crate::polytope::{Rep, SymmetricPolytope, VolumeMethod};
use crate::report::{CheckRow, RefSource};
use crate::rng;

const PI: f64 = std::f64::consts::PI;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Criterion 1: the cube's volume product is `4^n/n!`, exactly in rational
/// arithmetic and to 1e-9 relative in float.
pub fn cube_identity(quick: bool) -> Result<Vec<CheckRow>> {
    let max_n = if quick { 4 } else { 6 };
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let cube = SymmetricPolytope::cube(n);
        let expect = 4f64.powi(n as i32) / factorial(n);
        let vq = cube.volume_exact_rational()?;
        let pq = cube.polar().volume_exact_rational()?;
        let exact = (&vq * &pq).to_f64().unwrap();
        rows.push(CheckRow::against(
            format!("cube identity rational n={n}"),
            exact,
            expect,
            RefSource::ClosedForm,
            0.0,
        ));
        let vf = cube.volume_exact()? * cube.polar().volume_exact()?;
        rows.push(CheckRow::against(
            format!("cube identity float n={n}"),
            vf,
            expect,
            RefSource::ClosedForm,
            1e-9 * expect,
        ));
    }
    Ok(rows)
}

/// Criterion 2: the dimension-free volume-product bound on seeded random
/// symmetric polytopes, with exact volumes.
pub fn body_bound(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let count = if quick { 24 } else { 200 };
    let tol = Tolerances::default();
    let mut worst_ratio = f64::INFINITY;
    let mut worst_label = String::new();
    for i in 0..count {
        let n = 1 + (i % 4);
        let pairs = n.max(2) + 1 + (i % 3);
        let rep = if i % 2 == 0 {
            Rep::Halfspaces
        } else {
            Rep::Vertices
        };
        let body = SymmetricPolytope::random(n, pairs, rep, seed.wrapping_add(i as u64));
        let m = body.mahler(&VolumeMethod::Exact, &tol)?;
        if m.ratio_vs_pi < worst_ratio {
            worst_ratio = m.ratio_vs_pi;
            worst_label = format!("n={n} {rep:?} #{i}");
        }
    }
    Ok(vec![CheckRow::at_least(
        format!("min M(K)/(pi^n/n!) over {count} random bodies (worst: {worst_label})"),
        worst_ratio,
        1.0,
        RefSource::ClosedForm,
        1e-9,
    )])
}

/// Criterion 3: the functional volume-product sweep across families.
pub fn functional_sweep(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let mut rows = Vec::new();

    // quadratics: margin is exactly 2^n
    let dims: &[usize] = if quick { &[1, 2] } else { &[1, 2, 3] };
    for &n in dims {
        let count = if quick { 3 } else { 7 };
        let report = functional::theorem21_sweep(
            &SweepFamily::Quadratics,
            n,
            count,
            seed,
            &FunctionalBudget::default_for(n),
            &tol,
        )?;
        let expect = 2f64.powi(n as i32);
        for row in &report.rows {
            rows.push(CheckRow::against(
                format!("quadratic margin n={n} [{}]", row.label),
                row.margin,
                expect,
                RefSource::ClosedForm,
                1e-4 * expect,
            ));
        }
    }

    // p-powers
    for &n in dims {
        let report = functional::theorem21_sweep(
            &SweepFamily::PPowers(vec![1.5, 2.0, 3.0, 6.0]),
            n,
            0,
            seed,
            &FunctionalBudget::default_for(n),
            &tol,
        )?;
        for row in &report.rows {
            rows.push(CheckRow::at_least(
                format!("p-power margin n={n} [{}]", row.label),
                row.margin,
                1.0,
                RefSource::IndependentOracle,
                3.0 * row.error / PI.powi(n as i32),
            ));
        }
    }

    // max-affine instances through the grid transform
    let ma_count = if quick { 8 } else { 50 };
    let ma_budget = FunctionalBudget {
        nodes: 241,
        conj_grid_nodes: 641,
        conj_dual_nodes: 321,
        route: ConjugateRoute::ForceGrid,
    };
    let report =
        functional::theorem21_sweep(&SweepFamily::MaxAffine, 2, ma_count, seed, &ma_budget, &tol)?;
    rows.push(CheckRow::at_least(
        format!("min max-affine margin over {ma_count} instances (n=2)"),
        report.min_margin,
        1.0,
        RefSource::IndependentOracle,
        3.0 * report.rows.iter().map(|r| r.error).fold(0.0, f64::max) / PI.powi(2),
    ));

    // gauges of random polytopes
    let gauge_budget_2 = FunctionalBudget {
        nodes: 241,
        conj_grid_nodes: 641,
        conj_dual_nodes: 321,
        route: ConjugateRoute::ForceGrid,
    };
    let g2 = if quick { 4 } else { 12 };
    let report =
        functional::theorem21_sweep(&SweepFamily::Gauges, 2, g2, seed, &gauge_budget_2, &tol)?;
    rows.push(CheckRow::at_least(
        format!("min gauge margin over {g2} random polytopes (n=2)"),
        report.min_margin,
        1.0,
        RefSource::IndependentOracle,
        3.0 * report.rows.iter().map(|r| r.error).fold(0.0, f64::max) / PI.powi(2),
    ));
    if !quick {
        let gauge_budget_3 = FunctionalBudget {
            nodes: 81,
            conj_grid_nodes: 161,
            conj_dual_nodes: 121,
            route: ConjugateRoute::ForceGrid,
        };
        let report =
            functional::theorem21_sweep(&SweepFamily::Gauges, 3, 8, seed, &gauge_budget_3, &tol)?;
        rows.push(CheckRow::at_least(
            "min gauge margin over 8 random polytopes (n=3)".to_string(),
            report.min_margin,
            1.0,
            RefSource::IndependentOracle,
            3.0 * report.rows.iter().map(|r| r.error).fold(0.0, f64::max) / PI.powi(3),
        ));
    }

    // splices
    let report = functional::theorem21_sweep(
        &SweepFamily::Splices,
        2,
        if quick { 3 } else { 8 },
        seed,
        &FunctionalBudget {
            nodes: 241,
            conj_grid_nodes: 641,
            conj_dual_nodes: 321,
            route: ConjugateRoute::ForceGrid,
        },
        &tol,
    )?;
    rows.push(CheckRow::at_least(
        "min splice margin (n=2)".to_string(),
        report.min_margin,
        1.0,
        RefSource::IndependentOracle,
        3.0 * report.rows.iter().map(|r| r.error).fold(0.0, f64::max) / PI.powi(2),
    ));

    Ok(rows)
}

/// Criterion 4: the Gaussian pins `2^{-n}|I| = π^n`.
pub fn gaussian_contour(quick: bool) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let mut rows = Vec::new();
    let dims: &[(usize, usize, f64)] = if quick {
        &[(1, 121, 1e-5), (2, 41, 1e-5)]
    } else {
        &[(1, 121, 1e-5), (2, 41, 1e-5), (3, 21, 1e-3)]
    };
    for &(n, nodes, rel) in dims {
        let phi: ConvexFn = Arc::new(Quadratic::isotropic(n));
        let out = contour::contour_integral(
            &phi,
            ContourMethod::TsQuadrature,
            &ContourBudget { nodes, samples: 0 },
            0,
            &tol,
        )?;
        let expect = PI.powi(n as i32);
        rows.push(CheckRow::against(
            format!("gaussian 2^-n|I| n={n}"),
            out.normalized_modulus(n),
            expect,
            RefSource::Literature,
            rel * expect,
        ));
    }
    Ok(rows)
}

/// Criterion 5: deformation invariance along the convex homotopy.
pub fn deformation(quick: bool) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let specs: Vec<(usize, f64, f64, f64, usize)> = if quick {
        vec![(1, 2.0, 0.3, 0.5, 121)]
    } else {
        vec![
            (1, 2.0, 0.3, 0.55, 161),
            (1, 1.4, -0.2, -0.3, 161),
            (1, 2.5, 0.5, 0.8, 161),
            (2, 1.5, 0.2, 0.3, 33),
            (2, 2.0, -0.3, -0.5, 33),
        ]
    };
    let steps = if quick { 5 } else { 11 };
    let mut rows = Vec::new();
    for (i, (n, radius, constant, amplitude, nodes)) in specs.into_iter().enumerate() {
        let phi0: ConvexFn = Arc::new(Quadratic::isotropic(n));
        let phi1: ConvexFn = Arc::new(Splice::new(n, radius, constant, amplitude)?);
        let rep = contour::deformation_sweep(
            &phi0,
            &phi1,
            steps,
            &ContourBudget { nodes, samples: 0 },
            &tol,
        )?;
        rows.push(CheckRow::at_most(
            format!("deformation stdev / (3 x mean error), splice #{i} n={n}"),
            rep.stdev / (3.0 * rep.mean_error).max(1e-300),
            1.0,
            RefSource::IndependentOracle,
            0.0,
        ));
    }
    Ok(rows)
}

fn pullback_test_functions(quick: bool) -> Result<Vec<ConvexFn>> {
    let mut fns: Vec<ConvexFn> = vec![
        Arc::new(Quadratic::isotropic(2)),
        Arc::new(Splice::new(1, 2.0, 0.0, 0.5)?),
        Arc::new(Splice::new(2, 2.0, 0.1, -0.45)?),
        Arc::new(Splice::new(2, 1.5, -0.2, 0.25)?),
    ];
    if !quick {
        let mut r = rng::stream_rng(77, 0);
        for n in [2usize, 3, 3] {
            fns.push(Arc::new(Quadratic::new(functional::random_spd(n, &mut r))?));
        }
        fns.push(Arc::new(Splice::new(3, 1.8, 0.3, 0.35)?));
        fns.push(Arc::new(Splice::new(1, 1.2, 0.0, -0.2)?));
        fns.push(Arc::new(Quadratic::isotropic(3)));
    }
    Ok(fns)
}

/// Criterion 6: the form pullback identity, entrywise, plus the vanishing
/// imaginary part.
pub fn pullback_identity(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let fns = pullback_test_functions(quick)?;
    let total_points = if quick { 100 } else { 500 };
    let per = (total_points / fns.len()).max(1);
    let mut worst_entry: f64 = 0.0;
    let mut worst_imag: f64 = 0.0;
    let mut r = rng::stream_rng(seed, 6);
    for f in &fns {
        let n = f.dim();
        for _ in 0..per {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let p = lagrangian::lift(f.as_ref(), &x, &y, &tol)?;
            let rep = lagrangian::pullback_check(f.as_ref(), &p, &tol)?;
            worst_entry = worst_entry.max(rep.max_entry_gap);
            worst_imag = worst_imag.max(rep.max_imag);
        }
    }
    Ok(vec![
        CheckRow::at_most(
            format!("max entrywise pullback gap over {} points", per * fns.len()),
            worst_entry,
            1e-6,
            RefSource::IndependentOracle,
            0.0,
        ),
        CheckRow::at_most(
            "max |Im| of the restricted form".to_string(),
            worst_imag,
            1e-8,
            RefSource::ClosedForm,
            0.0,
        ),
    ])
}

/// Criterion 7: projection round-trips at 1e-8 with a 100% Newton success
/// rate.
pub fn projection_round_trip(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let fns: Vec<ConvexFn> = {
        let mut r = rng::stream_rng(seed, 3);
        let mut v: Vec<ConvexFn> = vec![
            Arc::new(Quadratic::isotropic(2)),
            Arc::new(Splice::new(1, 2.0, 0.2, 0.5)?),
            Arc::new(Splice::new(2, 1.8, 0.0, -0.4)?),
        ];
        if !quick {
            v.push(Arc::new(Quadratic::new(functional::random_spd(3, &mut r))?));
            v.push(Arc::new(Splice::new(3, 1.5, 0.1, 0.3)?));
        }
        v
    };
    let per = if quick { 30 } else { 100 };
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    let mut total = 0usize;
    let mut r = rng::stream_rng(seed, 4);
    for f in &fns {
        let n = f.dim();
        for _ in 0..per {
            total += 2;
            // (t,s) → (x,y) → (t,s)
            let t: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let s: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            match lagrangian::invert_pi(f.as_ref(), &t, &s, None, &tol) {
                Ok(p) => {
                    for (a, b) in p.t().iter().zip(&t) {
                        worst = worst.max((a - b).abs());
                    }
                    for (a, b) in p.s().iter().zip(&s) {
                        worst = worst.max((a - b).abs());
                    }
                }
                Err(_) => failures += 1,
            }
            // (x,y) → (t,s) → (x,y)
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.5..2.5)).collect();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.5..2.5)).collect();
            match lagrangian::lift(f.as_ref(), &x, &y, &tol)
                .and_then(|p| lagrangian::invert_pi(f.as_ref(), &p.t(), &p.s(), None, &tol))
            {
                Ok(back) => {
                    for (a, b) in back.x.iter().zip(&x) {
                        worst = worst.max((a - b).abs());
                    }
                    for (a, b) in back.y.iter().zip(&y) {
                        worst = worst.max((a - b).abs());
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    Ok(vec![
        CheckRow::at_most(
            format!("max round-trip deviation over {total} inversions"),
            worst,
            1e-8,
            RefSource::IndependentOracle,
            0.0,
        ),
        CheckRow::against(
            "Newton failures".to_string(),
            failures as f64,
            0.0,
            RefSource::ClosedForm,
            0.0,
        ),
    ])
}

/// Criterion 8: monotone families conjugate monotonically the other way and
/// converge to the limit conjugate.
pub fn monotone_conjugates(quick: bool) -> Result<Vec<CheckRow>> {
    let count = if quick { 401 } else { 801 };
    let mut rows = Vec::new();

    // family A: φ_j = x²/2 + 1/j ↓, conjugates ↑ to ξ²/2
    let axis = Axis::symmetric(5.0, count)?;
    let family: Vec<GridFunction> = (1..=8)
        .map(|j| {
            GridFunction::from_fn(vec![axis], |x| {
                ExtReal::finite(0.5 * x[0] * x[0] + 1.0 / j as f64)
            })
        })
        .collect::<Result<_>>()?;
    let dual = vec![Axis::symmetric(2.0, 201)?];
    let limit = {
        let g = GridFunction::from_fn(vec![axis], |x| ExtReal::finite(0.5 * x[0] * x[0]))?;
        legendre::conjugate_bruteforce(&g, &dual)?
    };
    let rep = legendre::monotone_conjugates_check(&family, &dual, Some(&limit))?;
    rows.push(CheckRow::against(
        "family A conjugate monotonicity violations".to_string(),
        rep.max_monotonicity_violation,
        0.0,
        RefSource::ClosedForm,
        0.0,
    ));
    rows.push(CheckRow::at_most(
        "family A final gap to limit conjugate".to_string(),
        rep.final_gap,
        1.0 / 8.0,
        RefSource::ClosedForm,
        1e-9,
    ));

    // family B: φ_j = max(|x|, x²/2 − j) ↓ |x|, conjugates ↑ ball indicator
    let axis = Axis::symmetric(12.0, 2 * count - 1)?;
    let family: Vec<GridFunction> = [1.0, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&j| {
            GridFunction::from_fn(vec![axis], |x| {
                ExtReal::finite((x[0].abs()).max(0.5 * x[0] * x[0] - j))
            })
        })
        .collect::<Result<_>>()?;
    let dual = vec![Axis::symmetric(2.0, 101)?];
    let limit = GridFunction::from_fn(dual[0..1].to_vec(), |xi| {
        if xi[0].abs() <= 1.0 {
            ExtReal::finite(0.0)
        } else {
            ExtReal::Inf
        }
    })?;
    let rep = legendre::monotone_conjugates_check(&family, &dual, Some(&limit))?;
    rows.push(CheckRow::against(
        "family B conjugate monotonicity violations".to_string(),
        rep.max_monotonicity_violation,
        0.0,
        RefSource::ClosedForm,
        0.0,
    ));
    rows.push(CheckRow::at_most(
        "family B final gap to ball-indicator conjugate".to_string(),
        rep.final_gap,
        0.0,
        RefSource::IndependentOracle,
        1e-9,
    ));
    Ok(rows)
}

/// Criterion 9: fast transform ≡ brute-force oracle to 1e-12.
pub fn oracle_equivalence(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let runs = if quick { 10 } else { 50 };
    let mut worst: f64 = 0.0;
    for i in 0..runs {
        let count = [101, 467, 1001, 2001, 4001][i % 5];
        let count = if quick { count.min(1001) } else { count };
        let f = random_convex_grid(seed.wrapping_add(i as u64), count, i % 3 == 0)?;
        let dual = Axis::symmetric(4.0, 743)?;
        let fast = legendre::conjugate_fast_1d(&f, dual)?;
        let oracle = legendre::conjugate_bruteforce(&f, &[dual])?;
        for flat in 0..fast.len() {
            let d = (fast.value(flat).unwrap_finite() - oracle.value(flat).unwrap_finite()).abs();
            worst = worst.max(d);
        }
    }
    Ok(vec![CheckRow::at_most(
        format!("max |fast − oracle| over {runs} random convex grid functions"),
        worst,
        1e-12,
        RefSource::IndependentOracle,
        0.0,
    )])
}

fn random_convex_grid(seed: u64, count: usize, with_inf_tails: bool) -> Result<GridFunction> {
    let mut r = rng::stream_rng(seed, 7);
    let half = r.random_range(1.0..8.0);
    let slope0: f64 = r.random_range(-3.0..3.0);
    let v0: f64 = r.random_range(-2.0..2.0);
    let axis = Axis::symmetric(half, count)?;
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
    GridFunction::new(vec![axis], vals)
}

/// Criterion 10: the wedge scalar matches the chart integral and sits in the
/// sandwich between the dimensional bound and the Mahler volume.
pub fn bridge(quick: bool) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let mut rows = Vec::new();
    let bodies: Vec<(Box<dyn StarBody>, MeshNodes)> = if quick {
        vec![
            (
                Box::new(Segment),
                MeshNodes {
                    radial: 1001,
                    angular: 1,
                },
            ),
            (
                Box::new(LpBall::disc(2)),
                MeshNodes {
                    radial: 48,
                    angular: 96,
                },
            ),
        ]
    } else {
        vec![
            (
                Box::new(Segment),
                MeshNodes {
                    radial: 2001,
                    angular: 1,
                },
            ),
            (
                Box::new(LpBall::disc(2)),
                MeshNodes {
                    radial: 64,
                    angular: 128,
                },
            ),
            (
                Box::new(LpBall::new(2, 4.0)?),
                MeshNodes {
                    radial: 64,
                    angular: 128,
                },
            ),
            (
                Box::new(Ellipsoid::from_semi_axes(&[2.0, 0.5])?),
                MeshNodes {
                    radial: 64,
                    angular: 128,
                },
            ),
        ]
    };
    for (body, nodes) in bodies {
        let rep = kuperberg::bridge_check(body.as_ref(), nodes, &tol)?;
        rows.push(CheckRow::at_most(
            format!("bridge relative deviation [{}]", rep.body),
            rep.relative_deviation,
            1e-3,
            RefSource::IndependentOracle,
            0.0,
        ));
        if let Some(m) = rep.mahler {
            let eps = tol.sigmas * (rep.v_error + rep.rhs_error);
            rows.push(CheckRow::at_least(
                format!("sandwich lower [{}]", rep.body),
                rep.v,
                rep.lower_bound,
                RefSource::Literature,
                eps,
            ));
            rows.push(CheckRow::at_most(
                format!("sandwich upper [{}]", rep.body),
                rep.v,
                m,
                RefSource::ClosedForm,
                eps,
            ));
        }
    }
    Ok(rows)
}

/// Criterion 11: invariance of the Mahler volume and the functional product
/// under invertible linear maps.
pub fn gl_invariance(quick: bool, seed: u64) -> Result<Vec<CheckRow>> {
    let tol = Tolerances::default();
    let count = if quick { 5 } else { 20 };
    let mut rows = Vec::new();
    for &n in if quick {
        &[2usize][..]
    } else {
        &[2usize, 3][..]
    } {
        let mut r = rng::stream_rng(seed, 50 + n as u64);
        let body = SymmetricPolytope::random(n, n + 2, Rep::Halfspaces, seed);
        let m0 = body.mahler(&VolumeMethod::Exact, &tol)?.product;
        let f: ConvexFn = Arc::new(Quadratic::new(functional::random_spd(n, &mut r))?);
        let j0 =
            functional::functional_mahler(&f, &FunctionalBudget::default_for(n), &tol)?.product;
        let mut worst_m: f64 = 0.0;
        let mut worst_j: f64 = 0.0;
        for _ in 0..count {
            let t = rng::random_invertible(&mut r, n);
            let m1 = body
                .apply_linear(&t)?
                .mahler(&VolumeMethod::Exact, &tol)?
                .product;
            worst_m = worst_m.max((m1 - m0).abs() / m0);
            let composed: ConvexFn = Arc::new(WithLinearMap::new(f.clone(), t)?);
            let j1 =
                functional::functional_mahler(&composed, &FunctionalBudget::default_for(n), &tol)?
                    .product;
            worst_j = worst_j.max((j1 - j0).abs() / j0);
        }
        rows.push(CheckRow::at_most(
            format!("max relative |M(TK) − M(K)| over {count} maps (n={n})"),
            worst_m,
            1e-4,
            RefSource::ClosedForm,
            0.0,
        ));
        rows.push(CheckRow::at_most(
            format!("max relative |J(f∘T) − J(f)| over {count} maps (n={n})"),
            worst_j,
            1e-4,
            RefSource::ClosedForm,
            0.0,
        ));
    }
    Ok(rows)
}

/// Every criterion, in order, with its label.
pub fn run_battery(quick: bool, seed: u64) -> Result<Vec<(String, Vec<CheckRow>)>> {
    let mut out = Vec::new();
    out.push(("cube identity".to_string(), cube_identity(quick)?));
    out.push((
        "volume-product bound on random bodies".to_string(),
        body_bound(quick, seed)?,
    ));
    out.push((
        "functional inequality sweep".to_string(),
        functional_sweep(quick, seed)?,
    ));
    out.push((
        "gaussian contour calibration".to_string(),
        gaussian_contour(quick)?,
    ));
    out.push(("deformation invariance".to_string(), deformation(quick)?));
    out.push((
        "form pullback identity".to_string(),
        pullback_identity(quick, seed)?,
    ));
    out.push((
        "projection round-trip".to_string(),
        projection_round_trip(quick, seed)?,
    ));
    out.push((
        "monotone conjugates".to_string(),
        monotone_conjugates(quick)?,
    ));
    out.push((
        "fast transform vs oracle".to_string(),
        oracle_equivalence(quick, seed)?,
    ));
    out.push(("directed-volume bridge".to_string(), bridge(quick)?));
    out.push(("linear invariance".to_string(), gl_invariance(quick, seed)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_battery_passes() {
        for (name, rows) in run_battery(true, 1).unwrap() {
            for row in rows {
                assert!(row.pass, "{name}: {row:?}");
            }
        }
    }
}
