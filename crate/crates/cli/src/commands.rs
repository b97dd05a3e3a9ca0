//! Subcommand handlers. Each builds a `Report` that echoes its resolved
//! configuration, prints a human summary, optionally writes the report, and
//! returns whether every check row passed.

use std::path::Path;
use std::time::Instant;

use serde_json::json;

use mahlerlab_core::battery;
use mahlerlab_core::config::Tolerances;
use mahlerlab_core::contour::{self, ContourBudget, ContourMethod};
use mahlerlab_core::convex::{self, ConvexFn};
use mahlerlab_core::error::{Error, Result};
use mahlerlab_core::functional::{self, ConjugateRoute, FunctionalBudget, SweepFamily};
use mahlerlab_core::grid::{Axis, GridFunction};
use mahlerlab_core::kuperberg::{
    self, Ellipsoid, LpBall, MeshNodes, Segment, SmoothedPolytope, StarBody,
};
use mahlerlab_core::lagrangian;
use mahlerlab_core::legendre;
use mahlerlab_core::polytope::{SymmetricPolytope, VolumeMethod};
use mahlerlab_core::report::{CheckRow, RefSource, Report};
use mahlerlab_core::rng;
use num_traits::ToPrimitive;
use rand::RngExt;

use crate::{BodyMethod, Command, ContourMethodArg, FamilyArg, ProfileArg, TransformMethod};

pub fn dispatch(command: Command, tol: &Tolerances) -> Result<bool> {
    match command {
        Command::Legendre {
            input,
            dual_box,
            dual_nodes,
            method,
            output,
            report,
        } => run_legendre(
            &input,
            dual_box.as_deref(),
            dual_nodes,
            method,
            &output,
            report.as_deref(),
            tol,
        ),
        Command::MahlerBody {
            input,
            method,
            samples,
            seed,
            report,
        } => run_mahler_body(&input, method, samples, seed, report.as_deref(), tol),
        Command::Theorem21 {
            family,
            n,
            count,
            seed,
            nodes,
            grid_route,
            report,
        } => run_theorem21(family, n, count, seed, nodes, grid_route, &report, tol),
        Command::LambdaCheck {
            phi,
            points,
            seed,
            report,
        } => run_lambda_check(&phi, points, seed, report.as_deref(), tol),
        Command::Contour {
            phi,
            method,
            nodes,
            samples,
            deform_to,
            steps,
            seed,
            no_chain,
            report,
        } => run_contour(
            &phi,
            method,
            nodes,
            samples,
            deform_to.as_deref(),
            steps,
            seed,
            no_chain,
            report.as_deref(),
            tol,
        ),
        Command::Kuperberg {
            body,
            smoothing,
            radial,
            angular,
            report,
        } => run_kuperberg(
            &body,
            smoothing.as_deref(),
            radial,
            angular,
            report.as_deref(),
            tol,
        ),
        Command::Suite {
            profile,
            seed,
            report,
        } => run_suite(profile, seed, report.as_deref(), tol),
    }
}

fn finish(mut report: Report, started: Instant, path: Option<&Path>) -> Result<bool> {
    report.wall_ms = started.elapsed().as_millis();
    let pass = report.all_pass();
    for row in &report.rows {
        println!(
            "[{}] {}: {:.12e}{}",
            if row.pass { "ok" } else { "FAIL" },
            row.name,
            row.computed,
            row.reference
                .map(|r| format!(" (reference {r:.12e}, tolerance {:.2e})", row.tolerance))
                .unwrap_or_default()
        );
    }
    if let Some(path) = path {
        report.write_atomic(path)?;
        println!("report written to {}", path.display());
    }
    Ok(pass)
}

fn read_phi(path: &Path) -> Result<ConvexFn> {
    let text = std::fs::read_to_string(path)?;
    convex::build_from_json(&text)
}

fn parse_half_widths(spec: &str, dims: usize) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Spec(format!("bad box spec {spec:?}: {e}")))?;
    match parts.len() {
        1 => Ok(vec![parts[0]; dims]),
        k if k == dims => Ok(parts),
        k => Err(Error::Spec(format!(
            "box spec has {k} entries for {dims} axes"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_legendre(
    input: &Path,
    dual_box: Option<&str>,
    dual_nodes: usize,
    method: TransformMethod,
    output: &Path,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let f = GridFunction::read_json(input)?;
    let dual_axes: Vec<Axis> = match dual_box {
        Some(spec) => parse_half_widths(spec, f.dim())?
            .into_iter()
            .map(|h| Axis::symmetric(h, dual_nodes))
            .collect::<Result<_>>()?,
        None => legendre::default_dual_axes(&f, dual_nodes)?,
    };
    let mut report = Report::new(
        "legendre",
        json!({
            "input": input, "dual_axes": dual_axes, "dual_nodes": dual_nodes,
            "tolerances": tol,
        }),
    );
    let (primary, deviation) = match method {
        TransformMethod::Oracle => (legendre::conjugate_bruteforce(&f, &dual_axes)?, None),
        TransformMethod::Fast => (legendre::conjugate_nd(&f, &dual_axes, tol)?, None),
        TransformMethod::Both => {
            let fast = legendre::conjugate_nd(&f, &dual_axes, tol)?;
            let oracle = legendre::conjugate_bruteforce(&f, &dual_axes)?;
            let mut worst: f64 = 0.0;
            for flat in 0..fast.len() {
                if let (Some(a), Some(b)) = (fast.value(flat).value(), oracle.value(flat).value()) {
                    worst = worst.max((a - b).abs());
                }
            }
            (fast, Some(worst))
        }
    };
    primary.write_json(output)?;
    println!("conjugate written to {}", output.display());
    if let Some(worst) = deviation {
        report.push(CheckRow::at_most(
            "sup deviation fast vs oracle",
            worst,
            tol.fast_vs_oracle_abs,
            RefSource::IndependentOracle,
            0.0,
        ));
    }
    finish(report, started, report_path)
}

fn run_mahler_body(
    input: &Path,
    method: BodyMethod,
    samples: u64,
    seed: u64,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let text = std::fs::read_to_string(input)?;
    let body = SymmetricPolytope::from_file(serde_json::from_str(&text)?)?;
    let n = body.dim();
    let mut report = Report::new(
        "mahler-body",
        json!({
            "input": input, "n": n, "rep": format!("{:?}", body.rep()),
            "method": match method { BodyMethod::Exact => "exact", BodyMethod::Mc => "mc", BodyMethod::Rational => "rational" },
            "samples": samples, "seed": seed, "tolerances": tol,
        }),
    );
    report.seed = Some(seed);
    let nf: f64 = (1..=n).map(|k| k as f64).product();
    let pi_bound = std::f64::consts::PI.powi(n as i32) / nf;
    match method {
        BodyMethod::Rational => {
            let v = body.volume_exact_rational()?;
            let p = body.polar().volume_exact_rational()?;
            let m = &v * &p;
            println!("volume = {v}, polar volume = {p}, product = {m}");
            report.extra = json!({
                "volume": v.to_string(), "polar_volume": p.to_string(),
                "product": m.to_string(),
            });
            report.push(CheckRow::at_least(
                "volume product vs pi^n/n!",
                m.to_f64().unwrap(),
                pi_bound,
                RefSource::Literature,
                0.0,
            ));
        }
        BodyMethod::Exact | BodyMethod::Mc => {
            let vm = match method {
                BodyMethod::Exact => VolumeMethod::Exact,
                _ => VolumeMethod::MonteCarlo { samples, seed },
            };
            let m = body.mahler(&vm, tol)?;
            println!(
                "volume = {}, polar volume = {}, product = {} (± {})",
                m.volume_body, m.volume_polar, m.product, m.error
            );
            for w in &m.warnings {
                println!("warning: {w}");
            }
            report.extra = serde_json::to_value(&m)?;
            report.push(CheckRow::at_least(
                "volume product vs pi^n/n!",
                m.product,
                pi_bound,
                RefSource::Literature,
                tol.sigmas * m.error,
            ));
        }
    }
    finish(report, started, report_path)
}

#[allow(clippy::too_many_arguments)]
fn run_theorem21(
    family: FamilyArg,
    n: usize,
    count: usize,
    seed: u64,
    nodes: usize,
    grid_route: bool,
    report_path: &Path,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let sweep_family = match family {
        FamilyArg::Quadratic => SweepFamily::Quadratics,
        FamilyArg::Ppower => SweepFamily::PPowers(vec![1.5, 2.0, 3.0, 6.0]),
        FamilyArg::Maxaffine => SweepFamily::MaxAffine,
        FamilyArg::Gauge => SweepFamily::Gauges,
        FamilyArg::Splice => SweepFamily::Splices,
    };
    let mut budget = FunctionalBudget::default_for(n);
    if nodes > 0 {
        budget.nodes = nodes;
    }
    if grid_route
        || matches!(
            family,
            FamilyArg::Maxaffine | FamilyArg::Gauge | FamilyArg::Splice
        )
    {
        budget.route = ConjugateRoute::ForceGrid;
    }
    let sweep = functional::theorem21_sweep(&sweep_family, n, count, seed, &budget, tol)?;
    let mut report = Report::new(
        "theorem21",
        json!({
            "family": sweep.family, "n": n, "count": count, "seed": seed,
            "nodes": budget.nodes, "grid_route": budget.route == ConjugateRoute::ForceGrid,
            "tolerances": tol,
        }),
    );
    report.seed = Some(seed);
    let pi_n = std::f64::consts::PI.powi(n as i32);
    for row in &sweep.rows {
        report.push(CheckRow::at_least(
            format!("margin [{}]", row.label),
            row.margin,
            1.0,
            RefSource::IndependentOracle,
            tol.sigmas * row.error / pi_n,
        ));
    }
    report.extra = serde_json::to_value(&sweep)?;
    println!(
        "family {} (n={n}): min margin {} over {} members, {} violations",
        sweep.family,
        sweep.min_margin,
        sweep.rows.len(),
        sweep.violations
    );
    let csv_path = report_path.with_extension("csv");
    let pass = finish(report, started, Some(report_path))?;
    // flat CSV for plotting
    let mut csv = String::from("label,integral_primal,integral_dual,product,margin,error\n");
    for row in &sweep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.label.replace(',', ";"),
            row.integral_primal,
            row.integral_dual,
            row.product,
            row.margin,
            row.error
        ));
    }
    std::fs::write(&csv_path, csv)?;
    println!("csv written to {}", csv_path.display());
    Ok(pass)
}

fn run_lambda_check(
    phi_path: &Path,
    points: usize,
    seed: u64,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let phi = read_phi(phi_path)?;
    let n = phi.dim();
    let mut report = Report::new(
        "lambda-check",
        json!({ "phi": phi.describe(), "points": points, "seed": seed, "tolerances": tol }),
    );
    report.seed = Some(seed);
    let mut r = rng::stream_rng(seed, 0);
    let mut worst_entry: f64 = 0.0;
    let mut worst_imag: f64 = 0.0;
    let mut worst_round: f64 = 0.0;
    let mut worst_rot: f64 = 0.0;
    let mut failures = 0usize;
    let mut per_point = Vec::with_capacity(points);
    for i in 0..points {
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let p = lagrangian::lift(phi.as_ref(), &x, &y, tol)?;
        let pb = lagrangian::pullback_check(phi.as_ref(), &p, tol)?;
        worst_entry = worst_entry.max(pb.max_entry_gap);
        worst_imag = worst_imag.max(pb.max_imag);
        let rot = lagrangian::rotated_coordinates_check(&p, seed ^ i as u64, 8);
        worst_rot = worst_rot
            .max(rot.t_gap)
            .max(rot.s_gap)
            .max(rot.omega_factor_gap);
        let mut round: f64 = 0.0;
        match lagrangian::invert_pi(phi.as_ref(), &p.t(), &p.s(), None, tol) {
            Ok(back) => {
                for (a, b) in back.x.iter().zip(&x) {
                    round = round.max((a - b).abs());
                }
                for (a, b) in back.y.iter().zip(&y) {
                    round = round.max((a - b).abs());
                }
            }
            Err(_) => failures += 1,
        }
        worst_round = worst_round.max(round);
        per_point.push(json!({
            "pullback_gap": pb.max_entry_gap,
            "imag": pb.max_imag,
            "round_trip": round,
        }));
    }
    report.push(CheckRow::at_most(
        "max entrywise pullback gap",
        worst_entry,
        tol.pullback_entry,
        RefSource::IndependentOracle,
        0.0,
    ));
    report.push(CheckRow::at_most(
        "max |Im| of restricted form",
        worst_imag,
        tol.lagrangian_imag,
        RefSource::ClosedForm,
        0.0,
    ));
    report.push(CheckRow::at_most(
        "max projection round-trip deviation",
        worst_round,
        1e-8,
        RefSource::IndependentOracle,
        0.0,
    ));
    report.push(CheckRow::at_most(
        "max rotated-coordinates gap",
        worst_rot,
        1e-10,
        RefSource::ClosedForm,
        0.0,
    ));
    report.push(CheckRow::against(
        "Newton failures",
        failures as f64,
        0.0,
        RefSource::ClosedForm,
        0.0,
    ));
    report.extra = json!({ "per_point": per_point });
    finish(report, started, report_path)
}

#[allow(clippy::too_many_arguments)]
fn run_contour(
    phi_path: &Path,
    method: ContourMethodArg,
    nodes: usize,
    samples: u64,
    deform_to: Option<&Path>,
    steps: usize,
    seed: u64,
    no_chain: bool,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let phi = read_phi(phi_path)?;
    let n = phi.dim();
    let mut budget = ContourBudget::default_for(n);
    if nodes > 0 {
        budget.nodes = nodes;
    }
    budget.samples = samples;
    let method_core = match method {
        ContourMethodArg::TsQuadrature => ContourMethod::TsQuadrature,
        ContourMethodArg::XyQuadrature => ContourMethod::XyQuadrature,
        ContourMethodArg::MonteCarlo => ContourMethod::MonteCarlo,
    };
    let mut report = Report::new(
        "contour",
        json!({
            "phi": phi.describe(), "method": method_core.label(), "nodes": budget.nodes,
            "samples": samples, "steps": steps, "seed": seed,
            "deform_to": deform_to, "tolerances": tol,
        }),
    );
    report.seed = Some(seed);

    if let Some(target_path) = deform_to {
        let phi1 = read_phi(target_path)?;
        let sweep = contour::deformation_sweep(&phi, &phi1, steps, &budget, tol)?;
        println!(
            "deformation sweep over {steps} steps: stdev {:.3e}, mean error {:.3e}",
            sweep.stdev, sweep.mean_error
        );
        report.push(CheckRow::at_most(
            "deformation stdev vs error budget",
            sweep.stdev,
            tol.sigmas * sweep.mean_error,
            RefSource::IndependentOracle,
            0.0,
        ));
        report.extra = serde_json::to_value(&sweep)?;
        return finish(report, started, report_path);
    }

    let out = contour::contour_integral(&phi, method_core, &budget, seed, tol)?;
    println!(
        "I = {:+.9e} {:+.9e}i (± {:.3e}), chart {}, 2^-n|I| = {:.9}",
        out.re,
        out.im,
        out.error,
        out.chart,
        out.normalized_modulus(n)
    );
    report.push(CheckRow::at_most(
        "phase reality |Im I|",
        out.im.abs(),
        tol.sigmas * out.error,
        RefSource::IndependentOracle,
        0.0,
    ));
    let mut extra = serde_json::to_value(&out)?;
    if !no_chain {
        let chain = contour::mahler_lower_bound_check(
            &phi,
            &budget,
            &FunctionalBudget::default_for(n),
            tol,
        )?;
        println!(
            "chain: {:.9} ≤ {:.9} ≤ {:.9}",
            chain.lhs, chain.middle, chain.rhs
        );
        report.push(CheckRow::at_most(
            "chain: normalized |I| vs modulus integral",
            chain.lhs,
            chain.middle,
            RefSource::IndependentOracle,
            tol.sigmas * (chain.lhs_error + chain.middle_error),
        ));
        report.push(CheckRow::at_most(
            "chain: modulus integral vs functional product",
            chain.middle,
            chain.rhs,
            RefSource::IndependentOracle,
            tol.sigmas * (chain.middle_error + chain.rhs_error),
        ));
        extra["chain"] = serde_json::to_value(&chain)?;
    }
    report.extra = extra;
    finish(report, started, report_path)
}

fn parse_body(
    spec: &str,
    smoothing: Option<&str>,
) -> Result<Vec<(Box<dyn StarBody>, Option<f64>)>> {
    if spec == "segment" {
        return Ok(vec![(Box::new(Segment), None)]);
    }
    if let Some(rest) = spec.strip_prefix("lp:") {
        let mut it = rest.split(':');
        let p: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Spec(format!("bad lp spec {spec:?}")))?;
        let n: usize = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Spec(format!("bad lp spec {spec:?}")))?;
        return Ok(vec![(Box::new(LpBall::new(n, p)?), None)]);
    }
    if let Some(rest) = spec.strip_prefix("ellipsoid:") {
        let axes: Vec<f64> = rest
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Spec(format!("bad ellipsoid spec {spec:?}: {e}")))?;
        return Ok(vec![(Box::new(Ellipsoid::from_semi_axes(&axes)?), None)]);
    }
    // otherwise: a polytope body file, needing smoothing radii
    let text = std::fs::read_to_string(spec)?;
    let body = SymmetricPolytope::from_file(serde_json::from_str(&text)?)?;
    let radii: Vec<f64> = smoothing
        .ok_or(Error::SmoothingRequired)?
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Spec(format!("bad smoothing radii: {e}")))?;
    if radii.is_empty() {
        return Err(Error::SmoothingRequired);
    }
    radii
        .into_iter()
        .map(|r| {
            Ok((
                Box::new(SmoothedPolytope::new(body.clone(), r)?) as Box<dyn StarBody>,
                Some(r),
            ))
        })
        .collect()
}

fn run_kuperberg(
    body_spec: &str,
    smoothing: Option<&str>,
    radial: usize,
    angular: usize,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let bodies = parse_body(body_spec, smoothing)?;
    let n = bodies[0].0.dim();
    let mut nodes = MeshNodes::default_for(n);
    if radial > 0 {
        nodes.radial = radial;
    }
    if angular > 0 {
        nodes.angular = angular;
    }
    let mut report = Report::new(
        "kuperberg",
        json!({
            "body": body_spec, "smoothing": smoothing, "radial": nodes.radial,
            "angular": nodes.angular, "tolerances": tol,
        }),
    );
    let nf: f64 = (1..=n).map(|k| k as f64).product();
    let lower = std::f64::consts::PI.powi(n as i32) / nf;
    let mut table = Vec::new();
    for (body, radius) in &bodies {
        let rep = kuperberg::bridge_check(body.as_ref(), nodes, tol)?;
        println!(
            "{}: V = {:.9} (± {:.2e}), chart integral = {:.9}, M(K) = {:?}, pi^n/n! = {:.9}",
            rep.body, rep.v, rep.v_error, rep.rhs, rep.mahler, lower
        );
        match radius {
            None => {
                report.push(CheckRow::at_most(
                    format!("bridge relative deviation [{}]", rep.body),
                    rep.relative_deviation,
                    1e-3,
                    RefSource::IndependentOracle,
                    0.0,
                ));
                if let Some(m) = rep.mahler {
                    let eps = tol.sigmas * (rep.v_error + rep.rhs_error);
                    report.push(CheckRow::at_least(
                        format!("sandwich lower [{}]", rep.body),
                        rep.v,
                        lower,
                        RefSource::Literature,
                        eps,
                    ));
                    report.push(CheckRow::at_most(
                        format!("sandwich upper [{}]", rep.body),
                        rep.v,
                        m,
                        RefSource::ClosedForm,
                        eps,
                    ));
                }
            }
            // smoothed polytopes: values are data, reported with the radius
            Some(_) => {}
        }
        table.push(serde_json::to_value(&rep)?);
    }
    report.extra = json!({ "bodies": table });
    finish(report, started, report_path)
}

fn run_suite(
    profile: ProfileArg,
    seed: u64,
    report_path: Option<&Path>,
    tol: &Tolerances,
) -> Result<bool> {
    let started = Instant::now();
    let quick = profile == ProfileArg::Quick;
    let mut report = Report::new(
        "suite",
        json!({
            "profile": if quick { "quick" } else { "full" },
            "seed": seed,
            "tolerances": tol,
        }),
    );
    report.seed = Some(seed);
    for (name, rows) in battery::run_battery(quick, seed)? {
        let pass = rows.iter().all(|r| r.pass);
        println!("[{}] {}", if pass { "PASS" } else { "FAIL" }, name);
        for mut row in rows {
            row.name = format!("{name}: {}", row.name);
            report.push(row);
        }
    }
    let pass = finish(report, started, report_path)?;
    println!(
        "suite: {}",
        if pass {
            "all criteria pass"
        } else {
            "FAILURES present"
        }
    );
    Ok(pass)
}
