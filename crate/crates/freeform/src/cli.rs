//! Command line: `freeform verify|sweep|describe`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeform_core::functionals::Tolerances;
use freeform_core::geometry::MAX_AMPLITUDE;
use freeform_core::quadrature::QuadratureSpec;
use freeform_core::spaceform::SpaceForm;

use crate::describe::describe_shape;
use crate::error::{RunError, RunResult};
use crate::family::{generate, Family, FamilyConfig, BALL_RADIUS};
use crate::shape::ShapeSpec;
use crate::suite::{run_suite, LowDimCase, Orders, Suite, SuiteConfig};
use crate::sweep::{builtin_profile, run_sweep, write_sweep_csv, EpsilonRange};

#[derive(Debug, Parser)]
#[command(name = "freeform", version, about = "Numerical verification of curvature inequalities for free-boundary hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite over a shape family or shape file.
    Verify(VerifyArgs),
    /// Evaluate one inequality along a perturbation amplitude range (CSV).
    Sweep(SweepArgs),
    /// Print the geometry of a single shape as JSON.
    Describe(DescribeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `-1`, `0`, `1` or `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureArg {
    One(i32),
    All,
}

fn parse_curvature(s: &str) -> Result<CurvatureArg, String> {
    match s.trim() {
        "all" => Ok(CurvatureArg::All),
        t => match t.parse::<i32>() {
            Ok(k @ -1..=1) => Ok(CurvatureArg::One(k)),
            _ => Err(format!("expected -1, 0, 1 or all, got {t:?}")),
        },
    }
}

fn parse_orders(s: &str) -> Result<Orders, String> {
    if s.trim() == "all" {
        return Ok(Orders::All);
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Orders::Only)
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Sectional curvature of the space form.
    #[arg(long = "K", value_parser = parse_curvature, allow_hyphen_values = true, default_value = "all")]
    pub curvature: CurvatureArg,
    /// Hypersurface dimension for built-in shapes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Gauss-Legendre points per panel.
    #[arg(long, default_value_t = QuadratureSpec::default().order)]
    pub quad_order: usize,
    /// Panel refinement level (2^level panels).
    #[arg(long, default_value_t = QuadratureSpec::default().level)]
    pub quad_level: u32,
    /// Relative tolerance of inequality verdicts.
    #[arg(long, default_value_t = Tolerances::default().rel)]
    pub rel_tol: f64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::new(self.quad_order, self.quad_level)
    }

    fn tol(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            ..Tolerances::default()
        }
    }

    fn single_curvature(&self) -> RunResult<i32> {
        match self.curvature {
            CurvatureArg::One(k) => Ok(k),
            CurvatureArg::All => Ok(0),
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Built-in shape family (default depends on the suite).
    #[arg(long, value_enum, conflicts_with = "shape")]
    pub family: Option<Family>,
    /// Shape definition: a JSON file holding one shape or an array of them,
    /// or one of the built-in names `cap`, `disk`, `profile`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Orders k: `all` or a comma list.
    #[arg(long, value_parser = parse_orders, default_value = "all")]
    pub k: Orders,
    /// Shapes per family and curvature.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest perturbation amplitude of random families.
    #[arg(long, default_value_t = 0.15)]
    pub epsilon: f64,
    /// Low-dimensional corollary case.
    #[arg(long, value_enum, default_value = "i")]
    pub case: LowDimCase,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Built-in name (`profile`) or JSON file; the amplitude is overridden.
    #[arg(long, default_value = "profile")]
    pub shape: String,
    /// Amplitude range `start:end:step`.
    #[arg(long)]
    pub epsilon: EpsilonRange,
    /// The order k to sweep.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Built-in name (`cap`, `disk`, `profile`) or JSON file.
    #[arg(long)]
    pub shape: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn builtin(name: &str, curvature: i32, n: usize) -> RunResult<Option<ShapeSpec>> {
    let space = SpaceForm::from_curvature(curvature).map_err(|e| RunError::Config(e.to_string()))?;
    let rm = space.radius_to_model(BALL_RADIUS).map_err(|e| RunError::Config(e.to_string()))?;
    Ok(match name {
        "cap" => Some(ShapeSpec::cap(curvature, BALL_RADIUS, n, rm)),
        "disk" => Some(ShapeSpec::disk(curvature, BALL_RADIUS, n)),
        "profile" => Some(builtin_profile(curvature, n).with_amplitude(0.1)),
        _ => None,
    })
}

/// Shapes from a built-in name or a JSON file with one shape or a list.
fn load_shapes(name: &str, curvature: i32, n: usize) -> RunResult<Vec<ShapeSpec>> {
    if let Some(s) = builtin(name, curvature, n)? {
        return Ok(vec![s]);
    }
    let path = Path::new(name);
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{name:?} is neither a built-in shape nor a readable file: {e}")))?;
    match serde_json::from_str::<Vec<ShapeSpec>>(&text) {
        Ok(v) if !v.is_empty() => Ok(v),
        Ok(_) => Err(RunError::Config(format!("{name}: empty shape list"))),
        Err(_) => Ok(vec![ShapeSpec::from_json(&text)?]),
    }
}

fn single_shape(name: &str, curvature: i32, n: usize) -> RunResult<ShapeSpec> {
    let mut v = load_shapes(name, curvature, n)?;
    if v.len() != 1 {
        return Err(RunError::Config(format!("{name}: expected exactly one shape")));
    }
    Ok(v.remove(0))
}

fn default_family(suite: Suite) -> Family {
    match suite {
        Suite::Perez | Suite::Kwong => Family::Spheres,
        Suite::Reilly | Suite::Identities => Family::Perturbed,
        _ => Family::Caps,
    }
}

fn curvatures(arg: CurvatureArg, suite: Suite) -> Vec<i32> {
    match arg {
        CurvatureArg::One(k) => vec![k],
        CurvatureArg::All if suite.euclidean_only() => vec![0],
        CurvatureArg::All => vec![-1, 0, 1],
    }
}

fn open_out(path: &Option<PathBuf>) -> RunResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// Suite configuration from `verify` arguments.
pub fn verify_config(a: &VerifyArgs) -> RunResult<SuiteConfig> {
    if !(a.epsilon >= 0.0 && a.epsilon <= MAX_AMPLITUDE) {
        return Err(RunError::Config(format!("--epsilon must lie in [0, {MAX_AMPLITUDE}]")));
    }
    let n = match (a.suite, a.common.n) {
        (Suite::CorLowdim, None) => a.case.dim(),
        (_, n) => n.unwrap_or(2),
    };
    let quad = a.common.quad();
    let mut shapes = Vec::new();
    for k in curvatures(a.common.curvature, a.suite) {
        match &a.shape {
            Some(name) => shapes.extend(load_shapes(name, k, n)?),
            None => {
                let mut family = a.family.unwrap_or_else(|| default_family(a.suite));
                // the convexity corollaries draw perturbed shapes from the convex screen
                if family == Family::Perturbed && matches!(a.suite, Suite::CorConvex | Suite::CorLowdim) {
                    family = Family::Convex;
                }
                let cfg = FamilyConfig {
                    count: a.count,
                    seed: a.seed,
                    epsilon: a.epsilon,
                    quad,
                };
                shapes.extend(generate(family, k, n, &cfg)?);
            }
        }
    }
    if shapes.is_empty() {
        return Err(RunError::Config("no shapes to verify".into()));
    }
    Ok(SuiteConfig {
        suite: a.suite,
        shapes,
        orders: a.k.clone(),
        quad,
        tol: a.common.tol(),
        case: a.case,
        seed: a.seed,
    })
}

fn verify(a: &VerifyArgs) -> RunResult<i32> {
    let cfg = verify_config(a)?;
    let start = Instant::now();
    let mut report = run_suite(&cfg)?;
    if a.timing {
        report.wall_clock_s = Some(start.elapsed().as_secs_f64());
    }
    let mut out = open_out(&a.common.out)?;
    match a.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(i32::from(report.any_fail()))
}

fn sweep(a: &SweepArgs) -> RunResult<i32> {
    let k = a.common.single_curvature()?;
    let n = a.common.n.unwrap_or(2);
    let base = single_shape(&a.shape, k, n)?;
    let points = run_sweep(a.suite, &base, &a.epsilon, a.k, &a.common.quad(), &a.common.tol())?;
    let mut out = open_out(&a.common.out)?;
    write_sweep_csv(&points, &mut out)?;
    out.flush()?;
    Ok(0)
}

fn describe(a: &DescribeArgs) -> RunResult<i32> {
    let k = a.common.single_curvature()?;
    let spec = single_shape(&a.shape, k, a.common.n.unwrap_or(2))?;
    let d = describe_shape(&spec, &a.common.quad())?;
    let mut out = open_out(&a.common.out)?;
    serde_json::to_writer_pretty(&mut out, &d)?;
    writeln!(out)?;
    out.flush()?;
    Ok(0)
}

pub fn run(cli: &Cli) -> RunResult<i32> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
        Command::Describe(a) => describe(a),
    }
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("freeform: {e}");
            e.exit_code()
        }
    }
}
