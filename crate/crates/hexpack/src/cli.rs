//! The `hexpack` command line.
//!
//! Exit codes: 0 on success, 2 on a usage or input error, 3 when the solver
//! runs out of iterations (the partial field is still written).

use std::io::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hexpack_core::harmonic::{EdgeWeights, Quadrature, WeightCache, DEFAULT_QUADRATURE_ORDER};
use hexpack_core::layout::{develop, ring_ratio_bound, Anchor};
use hexpack_core::solver::{harmonic_interpolation, max_defect, solve_patch_with, SolveMode, SolveOptions, SolverError};
use hexpack_core::spiral::{classify, spiral_field, SpiralError, DEFAULT_CLASSIFY_TOL};
use hexpack_core::{ScalarField, SpiralParams, VertexId, Window};

use crate::config::{ColorArg, Config, InitArg, ModeArg};
use crate::field_csv::{parse_field_csv, render_field_csv};
use crate::formats::{layout_json, parse_weights_csv, report_json, to_json, walk_json, weights_csv, VerifyJson};
use crate::parallel::{self, Threaded};
use crate::render::{render_svg, ColorMap, RenderStyle};

#[derive(Debug, Parser)]
#[command(name = "hexpack", version, about = "Circle packings on the hexagonal lattice")]
pub struct Cli {
    /// JSON file supplying values for any long flag (flags take precedence)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads for Jacobi sweeps and walks [default: 1]
    #[arg(long, global = true, env = "HEXPACK_THREADS", value_name = "INT")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the Doyle spiral log-radius field ln r0 + m ln x + n ln y as CSV
    Spiral(SpiralArgs),
    /// Solve the packing equation in the interior, holding the boundary fixed
    Solve(SolveArgs),
    /// Print defect, weight, harmonicity and ratio diagnostics as JSON
    Verify(VerifyArgs),
    /// Export harmonic edge weights as CSV rows m1,n1,m2,n2,eta
    Harmonic(HarmonicArgs),
    /// Develop a solved field into the plane and write an SVG
    Render(RenderArgs),
    /// Estimate the return frequency of the weighted random walk
    Walk(WalkArgs),
}

#[derive(Debug, Args)]
pub struct SpiralArgs {
    /// Radius at (0,0), > 0 [default: 1]
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    pub r0: Option<f64>,
    /// Radius ratio along m, > 0 [default: 1]
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Radius ratio along n, > 0 [default: 1]
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Index window m_min:m_max,n_min:n_max (required)
    #[arg(long, value_name = "WINDOW", allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Output CSV path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Input field CSV; its boundary is kept (required)
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output field CSV (required)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Stop when every |2π − angle sum| is at most this [default: 1e-10]
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Iteration budget [default: 100000]
    #[arg(long = "max-iter", value_name = "INT")]
    pub max_iter: Option<usize>,
    /// Iteration scheme [default: gauss-seidel]
    #[arg(long, value_enum, value_name = "MODE")]
    pub mode: Option<ModeArg>,
    /// Initial interior [default: harmonic]
    #[arg(long, value_enum, value_name = "INIT")]
    pub init: Option<InitArg>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Input field CSV (required)
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Gauss–Legendre points per edge-weight integral [default: 32]
    #[arg(long, value_name = "INT")]
    pub order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HarmonicArgs {
    /// Input field CSV (required)
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output weights CSV [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Gauss–Legendre points per edge-weight integral [default: 32]
    #[arg(long, value_name = "INT")]
    pub order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Input field CSV satisfying the packing equation (required)
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output SVG path (required)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Circle fill [default: uniform]
    #[arg(long, value_enum, value_name = "MAP")]
    pub color: Option<ColorArg>,
    /// Stroke width in layout units, > 0 [default: 0.02]
    #[arg(long = "stroke-width", value_name = "FLOAT")]
    pub stroke_width: Option<f64>,
    /// Margin as a fraction of the bounding box, >= 0 [default: 0.05]
    #[arg(long, value_name = "FLOAT")]
    pub padding: Option<f64>,
    /// Also write the layout as JSON [default: none]
    #[arg(long, value_name = "PATH")]
    pub layout: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Field CSV whose harmonic weights drive the walk (this or --weights)
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Weights CSV as written by `harmonic` (this or --in)
    #[arg(long, value_name = "PATH")]
    pub weights: Option<PathBuf>,
    /// Start vertex m,n [default: 0,0 if in the window, else its center]
    #[arg(long, value_name = "M,N", allow_hyphen_values = true)]
    pub start: Option<String>,
    /// Steps per trial [default: 100]
    #[arg(long, value_name = "INT")]
    pub steps: Option<u64>,
    /// Number of trials [default: 10000]
    #[arg(long, value_name = "INT")]
    pub trials: Option<u64>,
    /// Random seed [default: 0]
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Gauss–Legendre points when weights come from --in [default: 32]
    #[arg(long, value_name = "INT")]
    pub order: Option<usize>,
}

/// What stopped a command.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    NonConvergence(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing required flag --{flag}")))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_field(path: &Path) -> Result<ScalarField, Failure> {
    parse_field_csv(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn quadrature(order: usize) -> Result<Quadrature, Failure> {
    Quadrature::gauss_legendre(order).map_err(|e| usage(format!("--order: {e}")))
}

fn threads(cli: Option<usize>, cfg: &Config) -> Result<NonZeroUsize, Failure> {
    let n = cli.or(cfg.threads).unwrap_or(1);
    NonZeroUsize::new(n).ok_or_else(|| usage("--threads must be at least 1"))
}

fn parse_vertex(s: &str) -> Result<VertexId, Failure> {
    let bad = || usage(format!("--start must look like m,n, got {s:?}"));
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    Ok(VertexId::new(m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(usage)?,
        None => Config::default(),
    };
    let threads = threads(cli.threads, &cfg)?;
    match cli.command {
        Command::Spiral(a) => cmd_spiral(a, &cfg),
        Command::Solve(a) => cmd_solve(a, &cfg, threads),
        Command::Verify(a) => cmd_verify(a, &cfg),
        Command::Harmonic(a) => cmd_harmonic(a, &cfg),
        Command::Render(a) => cmd_render(a, &cfg),
        Command::Walk(a) => cmd_walk(a, &cfg, threads),
    }
}

fn cmd_spiral(a: SpiralArgs, cfg: &Config) -> Result<(), Failure> {
    let r0 = a.r0.or(cfg.r0).unwrap_or(1.0);
    let x = a.x.or(cfg.x).unwrap_or(1.0);
    let y = a.y.or(cfg.y).unwrap_or(1.0);
    let window: Window = required(a.window.or(cfg.window.clone()), "window")?
        .parse()
        .map_err(|e| usage(format!("--window: {e}")))?;
    let p = SpiralParams::new(r0, x, y).map_err(|e| match e {
        SpiralError::InvalidParameter { name, value } => {
            usage(format!("--{name} must be positive and finite, got {value}"))
        }
        e => usage(e),
    })?;
    let out = a.out.or(cfg.out.clone());
    emit(out.as_deref(), &render_field_csv(&spiral_field(&p, window)))
}

fn cmd_solve(a: SolveArgs, cfg: &Config, threads: NonZeroUsize) -> Result<(), Failure> {
    let input = required(a.input.or(cfg.input.clone()), "in")?;
    let out = required(a.out.or(cfg.out.clone()), "out")?;
    let mode = match a.mode.or(cfg.mode).unwrap_or(ModeArg::GaussSeidel) {
        ModeArg::GaussSeidel => SolveMode::GaussSeidel,
        ModeArg::Jacobi => SolveMode::Jacobi,
        ModeArg::Newton => SolveMode::Newton,
    };
    let defaults = SolveOptions::default();
    let opts = SolveOptions::new(
        a.tol.or(cfg.tol).unwrap_or(defaults.tolerance),
        a.max_iter.or(cfg.max_iter).unwrap_or(defaults.max_iterations),
        mode,
    )
    .map_err(|e| usage(format!("--tol/--max-iter: {e}")))?;
    let u0 = read_field(&input)?;
    let u0 = match a.init.or(cfg.init).unwrap_or(InitArg::Harmonic) {
        InitArg::Harmonic => harmonic_interpolation(&u0),
        InitArg::Keep => u0,
    };
    match solve_patch_with(&u0, &opts, &Threaded::new(threads)) {
        Ok((u, report)) => {
            write_text(&out, &render_field_csv(&u))?;
            emit(None, &report_json(&report))
        }
        Err(SolverError::NonConvergence { report, field }) => {
            write_text(&out, &render_field_csv(&field))?;
            emit(None, &report_json(&report))?;
            Err(Failure::NonConvergence(format!(
                "no convergence within {} iterations (max defect {:e}); partial field written to {}",
                report.iterations,
                report.final_defect,
                out.display()
            )))
        }
        Err(e) => Err(usage(format!("{}: {e}", input.display()))),
    }
}

/// Diagnostics of a log-radius field.
pub fn verify_field(u: &ScalarField, q: &Quadrature) -> VerifyJson {
    let weights = EdgeWeights::from_field(u, q);
    let etas = || weights.iter().map(|(_, _, eta)| eta);
    let classification = match classify(u, DEFAULT_CLASSIFY_TOL) {
        Ok(c) => c.label().to_string(),
        Err(_) => "other".to_string(),
    };
    VerifyJson {
        max_defect: max_defect(u),
        min_eta: etas().reduce(f64::min),
        max_eta: etas().reduce(f64::max),
        max_harmonic_residual: WeightCache::new(u, q).max_abs_residual(),
        min_d1_ratio: ring_ratio_bound(u).ok(),
        classification,
    }
}

fn cmd_verify(a: VerifyArgs, cfg: &Config) -> Result<(), Failure> {
    let input = required(a.input.or(cfg.input.clone()), "in")?;
    let q = quadrature(a.order.or(cfg.order).unwrap_or(DEFAULT_QUADRATURE_ORDER))?;
    let u = read_field(&input)?;
    emit(None, &to_json(&verify_field(&u, &q)))
}

fn cmd_harmonic(a: HarmonicArgs, cfg: &Config) -> Result<(), Failure> {
    let input = required(a.input.or(cfg.input.clone()), "in")?;
    let q = quadrature(a.order.or(cfg.order).unwrap_or(DEFAULT_QUADRATURE_ORDER))?;
    let u = read_field(&input)?;
    let out = a.out.or(cfg.out.clone());
    emit(out.as_deref(), &weights_csv(&EdgeWeights::from_field(&u, &q)))
}

fn cmd_render(a: RenderArgs, cfg: &Config) -> Result<(), Failure> {
    let input = required(a.input.or(cfg.input.clone()), "in")?;
    let out = required(a.out.or(cfg.out.clone()), "out")?;
    let defaults = RenderStyle::default();
    let color = match a.color.or(cfg.color).unwrap_or(ColorArg::Uniform) {
        ColorArg::Uniform => ColorMap::Uniform,
        ColorArg::LogRadius => ColorMap::ByLogRadius,
        ColorArg::D1u => ColorMap::ByD1u,
        ColorArg::Residual => ColorMap::ByResidual,
    };
    let style = RenderStyle::new(
        a.stroke_width.or(cfg.stroke_width).unwrap_or(defaults.stroke_width()),
        color,
        a.padding.or(cfg.padding).unwrap_or(defaults.padding()),
    )
    .map_err(usage)?;
    let u = read_field(&input)?;
    let layout = develop(&u, Anchor::default_for(u.window())).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    write_text(&out, &render_svg(&layout, &style))?;
    if let Some(p) = a.layout.or(cfg.layout.clone()) {
        write_text(&p, &layout_json(&layout))?;
    }
    Ok(())
}

fn cmd_walk(a: WalkArgs, cfg: &Config, threads: NonZeroUsize) -> Result<(), Failure> {
    let weights = match (a.input.or(cfg.input.clone()), a.weights.or(cfg.weights.clone())) {
        (Some(_), Some(_)) => return Err(usage("give only one of --in and --weights")),
        (None, None) => return Err(usage("missing required flag --in or --weights")),
        (Some(p), None) => {
            let q = quadrature(a.order.or(cfg.order).unwrap_or(DEFAULT_QUADRATURE_ORDER))?;
            EdgeWeights::from_field(&read_field(&p)?, &q)
        }
        (None, Some(p)) => parse_weights_csv(&read_text(&p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
    };
    let window = *weights.window();
    let start = match a.start.or(cfg.start.clone()) {
        Some(s) => parse_vertex(&s)?,
        None => Anchor::default_for(&window).vertex,
    };
    if !window.contains(start) {
        return Err(usage(format!("--start {start} lies outside the window {window}")));
    }
    let steps = a.steps.or(cfg.steps).unwrap_or(100);
    let trials = a.trials.or(cfg.trials).unwrap_or(10_000);
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let outcome = parallel::random_walk_return(&weights, start, steps, trials, seed, threads);
    emit(None, &walk_json(&outcome))
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::NonConvergence(m) => m,
            };
            eprintln!("hexpack: {msg}");
            ExitCode::from(f.exit_code())
        }
    }
}
