//! Command-line front end: transforms, volume products, graph checks,
//! contour integrals, directed volumes, and the acceptance suite.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mahlerlab_core::config::Tolerances;
use mahlerlab_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "mahlerlab",
    version,
    about = "Numerical convex-duality toolkit: Legendre transforms, polar bodies and volume products, gradient-graph form identities, contour deformation, directed volumes"
)]
struct Cli {
    /// Worker threads (default: all cores, or MAHLERLAB_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// JSON file with tolerance overrides (missing fields keep defaults).
    #[arg(long, global = true)]
    tolerances: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete Legendre transform of a grid file.
    Legendre {
        /// Input grid file (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Dual box half-widths: one value for all axes or comma-separated
        /// per axis; defaults to the slope-based box.
        #[arg(long)]
        dual_box: Option<String>,
        /// Dual nodes per axis.
        #[arg(long, default_value_t = 257)]
        dual_nodes: usize,
        #[arg(long, value_enum, default_value_t = TransformMethod::Both)]
        method: TransformMethod,
        /// Output grid file for the conjugate.
        #[arg(long)]
        output: PathBuf,
        /// JSON summary report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Volumes, polar volumes and the volume product of a symmetric polytope.
    MahlerBody {
        /// Body file (JSON): {"n", "rep": "V"|"H", "generators": [[..]]}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BodyMethod::Exact)]
        method: BodyMethod,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sweep the functional volume-product inequality over a family.
    Theorem21 {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Quadrature nodes per axis (0 = dimension default).
        #[arg(long, default_value_t = 0)]
        nodes: usize,
        /// Force the discrete Legendre transform even when a closed-form
        /// conjugate exists.
        #[arg(long)]
        grid_route: bool,
        /// Report path (a flat CSV is written next to it).
        #[arg(long)]
        report: PathBuf,
    },
    /// Graph-manifold checks: round trips, pullback identity, rotations.
    LambdaCheck {
        /// Function spec (JSON).
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The contour integral: single value, or a deformation sweep.
    Contour {
        /// Function spec (JSON).
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_enum, default_value_t = ContourMethodArg::TsQuadrature)]
        method: ContourMethodArg,
        /// Quadrature nodes per axis (0 = dimension default).
        #[arg(long, default_value_t = 0)]
        nodes: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Sweep the convex homotopy from --phi toward this spec (JSON).
        #[arg(long)]
        deform_to: Option<PathBuf>,
        /// Homotopy steps for the sweep.
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the chained inequality table.
        #[arg(long)]
        no_chain: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Directed volumes, the scalar V, and the bridge to the chart integral.
    Kuperberg {
        /// Body: "segment", "lp:<p>:<n>", "ellipsoid:a1,a2[,a3]", or a
        /// polytope body file (then --smoothing is required).
        #[arg(long)]
        body: String,
        /// Smoothing radii for polytope gauges (comma-separated).
        #[arg(long)]
        smoothing: Option<String>,
        #[arg(long, default_value_t = 0)]
        radial: usize,
        #[arg(long, default_value_t = 0)]
        angular: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The acceptance battery.
    Suite {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TransformMethod {
    Oracle,
    Fast,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BodyMethod {
    Exact,
    Mc,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Quadratic,
    Ppower,
    Maxaffine,
    Gauge,
    Splice,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ContourMethodArg {
    TsQuadrature,
    XyQuadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ProfileArg {
    Quick,
    Full,
}

/// Exit codes: 0 all checks pass, 1 check failures, 2 parse/config errors,
/// 3 numeric failures.
fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Io(_)
        | CoreError::Json(_)
        | CoreError::Spec(_)
        | CoreError::BadAxis(_)
        | CoreError::BadExponent(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    // die quietly when a pipe consumer closes early instead of panicking
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();

    let workers = cli.workers.or_else(|| {
        std::env::var("MAHLERLAB_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global();
    }

    let tolerances = match &cli.tolerances {
        None => Tolerances::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(CoreError::from)
            .and_then(|text| serde_json::from_str(&text).map_err(CoreError::from))
        {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error reading tolerances: {e}");
                return ExitCode::from(2);
            }
        },
    };

    match commands::dispatch(cli.command, &tolerances) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::from(exit_code_for(&e))
        }
    }
}
