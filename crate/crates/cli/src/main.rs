use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use siegel_capture::capture::{
    capture_polys, expected_degree, trace_component_boundary, trace_parameter_ray, trace_zakeri, write_centers_csv,
    RayOptions, TraceOptions, ZakeriOptions, MAX_LEVEL,
};
use siegel_capture::classify::{symmetry_suite, Budgets};
use siegel_capture::family::{CubicSiegelMap, RotationNumber, Slice};
use siegel_capture::numerics::geometry::closed_polyline_distance;
use siegel_capture::numerics::{format_complex, parse_complex};
use siegel_capture::render::{render, write_image, write_sidecar, ImageFormat, Plane, RenderJob};
use siegel_capture::siegel::{boundary_critical_point_with, siegel_boundary, LinearizationData, LinearizationOptions};
use siegel_capture::Complex64;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] siegel_capture::Error),
    #[error("I/O error at {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_)
            | CliError::Core(siegel_capture::Error::InvalidArgument(_) | siegel_capture::Error::InvalidRotation { .. }) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "siegel-capture", version, about = "Capture components of the cubic Siegel family")]
struct Cli {
    /// Rotation number: "golden" or a continued fraction such as "[0;2,(1)]".
    #[arg(long, global = true, default_value = "golden", value_parser = parse_theta)]
    theta: RotationNumber,

    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true, env = "SIEGEL_CAPTURE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a parameter or dynamical plane to PPM/PNG with a JSON sidecar.
    Render {
        #[command(subcommand)]
        plane: RenderPlane,
    },
    /// Enumerate capture-component centers up to a level.
    Centers(CentersArgs),
    /// Run a verification check and emit a JSON report.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// Trace rays, component boundaries, the Zakeri curve or a Siegel boundary.
    Trace {
        #[command(subcommand)]
        target: TraceTarget,
    },
}

#[derive(Subcommand, Debug)]
enum RenderPlane {
    /// Parameter plane of P_c.
    ParamC(RenderArgs),
    /// Parameter plane of f_a(z) = λz + az² + z³.
    ParamA(RenderArgs),
    /// Dynamical plane of one map.
    Dyn(DynArgs),
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long, default_value = "0+0i", value_parser = parse_complex_arg, allow_hyphen_values = true)]
    center: Complex64,
    /// Window width; the height follows the aspect ratio.
    #[arg(long, default_value_t = 64.0)]
    width: f64,
    /// Pixels per side.
    #[arg(long, default_value_t = 512)]
    res: usize,
    /// Supersampling factor per axis (1, 2 or 4).
    #[arg(long, default_value_t = 1)]
    supersample: usize,
    /// Orbit iteration budget per sample.
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Escape radius.
    #[arg(long, default_value_t = 1e4)]
    escape_radius: f64,
    /// Critical-point boundary tolerance relative to the disk diameter.
    #[arg(long, default_value_t = 5e-3)]
    verdict_tol: f64,
    /// Counterclockwise quarter turns applied to the image.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..4))]
    rotate: u8,
    /// Output image; the extension selects PPM or PNG.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DynArgs {
    /// Parameter of P_c.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true, conflicts_with = "a", required_unless_present = "a")]
    c: Option<Complex64>,
    /// Parameter of f_a.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    a: Option<Complex64>,
    /// Skip the Siegel boundary overlay.
    #[arg(long)]
    no_overlay: bool,
    #[command(flatten)]
    view: RenderArgs,
}

#[derive(Args, Debug)]
struct CentersArgs {
    #[arg(long, default_value_t = 4)]
    max_level: usize,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCheck {
    /// Center counts, simplicity, separation and residuals of the capture tower.
    Census(VerifyCensusArgs),
    /// Role-swap agreement between c and 1/c.
    Symmetry(VerifySymmetryArgs),
    /// Linearization residual and conformal-radius stability at c = 3 and the level-2 centers.
    Linearization(VerifyLinearizationArgs),
}

#[derive(Args, Debug)]
struct ReportArg {
    /// JSON report path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyCensusArgs {
    #[arg(long, default_value_t = 4)]
    max_level: usize,
    #[arg(long, hide = true)]
    perturb_level: Option<usize>,
    #[arg(long, hide = true, default_value_t = 1e-3)]
    perturb_eps: f64,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
struct VerifySymmetryArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Required agreement fraction.
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
    #[arg(long, default_value_t = 20000)]
    max_iter: usize,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
struct VerifyLinearizationArgs {
    #[arg(long, default_value_t = 256)]
    terms: usize,
    /// Bound on the functional-equation residual.
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    /// Bound on the relative conformal-radius change when the order doubles.
    #[arg(long, default_value_t = 0.05)]
    drift_tol: f64,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Subcommand, Debug)]
enum TraceTarget {
    /// Landing polygon of a capture component.
    Component(TraceComponentArgs),
    /// One parameter ray.
    Ray(TraceRayArgs),
    /// Zakeri curve by bisection along rays from the origin.
    Zakeri(TraceZakeriArgs),
    /// Siegel-disk boundary of P_c.
    Siegel(TraceSiegelArgs),
}

#[derive(Args, Debug)]
struct RayArgs {
    #[arg(long, default_value_t = 0.995)]
    r_stop: f64,
    #[arg(long, default_value_t = 1e-10)]
    newton_tol: f64,
}

impl RayArgs {
    fn options(&self) -> RayOptions {
        RayOptions { r_stop: self.r_stop, newton_tol: self.newton_tol, ..RayOptions::default() }
    }
}

#[derive(Args, Debug)]
struct OutArg {
    /// JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TraceComponentArgs {
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    center: Complex64,
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 256)]
    rays: usize,
    /// Relative closure gap above which the trace counts as failed.
    #[arg(long, default_value_t = 1e-3)]
    gap_tol: f64,
    #[command(flatten)]
    ray: RayArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct TraceRayArgs {
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    center: Complex64,
    #[arg(long, default_value_t = 1)]
    level: usize,
    /// Ray angle in turns.
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    #[command(flatten)]
    ray: RayArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct TraceZakeriArgs {
    /// Number of directions.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = 512)]
    terms: usize,
    #[arg(long, default_value_t = 1e-4)]
    bracket: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct TraceSiegelArgs {
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    c: Complex64,
    #[arg(long, default_value_t = 256)]
    terms: usize,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// Relative distance below which a critical point counts as on the boundary.
    #[arg(long, default_value_t = 5e-3)]
    verdict_tol: f64,
    /// Largest series order tried by the boundary verdict.
    #[arg(long, default_value_t = 16384)]
    verdict_max_terms: usize,
    #[command(flatten)]
    out: OutArg,
}

fn parse_theta(text: &str) -> Result<RotationNumber, String> {
    RotationNumber::parse(text).map_err(|e| e.to_string())
}

fn parse_complex_arg(text: &str) -> Result<Complex64, String> {
    parse_complex(text)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn emit_json(value: &Value, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(siegel_capture::Error::from)?;
    match path {
        Some(path) => std::fs::write(path, text + "\n").map_err(io_error(path)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".json");
    PathBuf::from(name)
}

fn cmd_render(theta: &RotationNumber, threads: usize, plane: RenderPlane) -> CliResult<()> {
    let (plane, view, overlay) = match plane {
        RenderPlane::ParamC(view) => (Plane::ParamC, view, false),
        RenderPlane::ParamA(view) => (Plane::ParamA, view, false),
        RenderPlane::Dyn(args) => {
            let plane = match (args.c, args.a) {
                (Some(c), _) => Plane::Dynamical { slice: Slice::C, parameter: c },
                (None, Some(a)) => Plane::Dynamical { slice: Slice::A, parameter: a },
                (None, None) => return Err(CliError::Usage("render dyn needs --c or --a".into())),
            };
            (plane, args.view, !args.no_overlay)
        }
    };
    let format = ImageFormat::from_path(&view.out)?;
    let mut job = RenderJob::new(theta.clone(), plane, view.center, view.width, view.res);
    job.supersampling = view.supersample;
    job.quarter_turns = view.rotate;
    job.overlay_boundary = overlay;
    job.threads = Some(threads);
    job.budgets.max_iterations = view.max_iter;
    job.budgets.escape_radius = view.escape_radius;
    job.budgets.verdict_tol = view.verdict_tol;
    job.validate()?;
    let start = Instant::now();
    let image = render(&job)?;
    let elapsed = start.elapsed().as_secs_f64();
    write_image(&image, &view.out, format)?;
    let sidecar = sidecar_path(&view.out);
    write_sidecar(&job, &image, elapsed, &sidecar)?;
    let [capture, cycle, escape, unresolved] = image.histogram.fractions();
    println!(
        "wrote {} ({}×{}) and {} in {elapsed:.2} s; capture {capture:.4}, cycle {cycle:.4}, escape {escape:.4}, unresolved {unresolved:.4}",
        view.out.display(),
        image.width,
        image.height,
        sidecar.display()
    );
    Ok(())
}

fn check_level(level: usize) -> CliResult<()> {
    if level == 0 || level > MAX_LEVEL {
        return Err(CliError::Usage(format!("level must lie in 1..={MAX_LEVEL}, got {level}")));
    }
    Ok(())
}

fn cmd_centers(theta: &RotationNumber, args: CentersArgs) -> CliResult<()> {
    check_level(args.max_level)?;
    let report = capture_polys(theta, args.max_level)?.census()?;
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(io_error(path))?;
        let mut writer = BufWriter::new(file);
        write_centers_csv(&report.centers, &mut writer).and_then(|_| writer.flush()).map_err(io_error(path))?;
    }
    for center in report.centers.iter().flatten() {
        println!("{} {}", center.level, format_complex(center.c, 6));
    }
    let counts: Vec<String> = report.centers.iter().map(|level| level.len().to_string()).collect();
    println!("counts {}", counts.join(" "));
    Ok(())
}

fn verdict(pass: bool, report: Value, path: Option<&Path>, what: &str) -> CliResult<()> {
    emit_json(&report, path)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{what} check failed")))
    }
}

fn cmd_verify_census(theta: &RotationNumber, args: VerifyCensusArgs) -> CliResult<()> {
    check_level(args.max_level)?;
    let mut tower = capture_polys(theta, args.max_level)?;
    if let Some(level) = args.perturb_level {
        if level == 0 || level > args.max_level {
            return Err(CliError::Usage(format!("perturbed level {level} exceeds --max-level {}", args.max_level)));
        }
        tower = tower.perturbed(level, args.perturb_eps);
    }
    let path = args.report.report.as_deref();
    match tower.census() {
        Ok(report) => {
            let counts: Vec<usize> = report.centers.iter().map(Vec::len).collect();
            let pass = report.levels.iter().all(|l| {
                l.count == l.expected_count && l.degree == expected_degree(l.level) && l.min_derivative > 0.0
            });
            verdict(pass, json!({ "check": "census", "pass": pass, "counts": counts, "census": report }), path, "census")
        }
        Err(error) => verdict(false, json!({ "check": "census", "pass": false, "error": error.to_string() }), path, "census"),
    }
}

fn cmd_verify_symmetry(theta: &RotationNumber, args: VerifySymmetryArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let budgets = Budgets { max_iterations: args.max_iter, ..Budgets::acceptance() };
    let report = symmetry_suite(theta, args.samples, args.seed, &budgets);
    let pass = report.resolved >= args.samples && report.agreement >= args.threshold;
    verdict(pass, json!({ "check": "symmetry", "pass": pass, "threshold": args.threshold, "report": report }), args.report.report.as_deref(), "symmetry")
}

fn cmd_verify_linearization(theta: &RotationNumber, args: VerifyLinearizationArgs) -> CliResult<()> {
    let mut parameters = vec![Complex64::new(3.0, 0.0)];
    parameters.extend(capture_polys(theta, 2)?.census()?.centers[1].iter().map(|center| center.c));
    let base = LinearizationOptions::default().with_terms(args.terms);
    let mut rows = Vec::new();
    let mut pass = true;
    for c in parameters {
        let map = CubicSiegelMap::c_plane(theta, c)?;
        let row = match (LinearizationData::new(&map, &base), LinearizationData::new(&map, &base.with_terms(2 * args.terms))) {
            (Ok(single), Ok(double)) => {
                let drift = (double.rho() / single.rho() - 1.0).abs();
                let ok = single.terms() == args.terms && single.residual() < args.residual_tol && drift < args.drift_tol;
                pass &= ok;
                json!({ "c": c, "pass": ok, "terms": single.terms(), "rho": single.rho(), "residual": single.residual(), "rho_drift": drift })
            }
            (Err(e), _) | (_, Err(e)) => {
                pass = false;
                json!({ "c": c, "pass": false, "error": e.to_string() })
            }
        };
        rows.push(row);
    }
    let report = json!({ "check": "linearization", "pass": pass, "theta": theta, "terms": args.terms, "parameters": rows });
    verdict(pass, report, args.report.report.as_deref(), "linearization")
}

fn cmd_trace(theta: &RotationNumber, target: TraceTarget) -> CliResult<()> {
    match target {
        TraceTarget::Component(args) => {
            check_level(args.level)?;
            let opts = TraceOptions { rays: args.rays, ray: args.ray.options(), ..TraceOptions::default() };
            let trace = trace_component_boundary(theta, args.center, args.level, &opts)?;
            let pass = trace.relative_gap() < args.gap_tol && trace.failed() == 0;
            let mut value = serde_json::to_value(&trace).map_err(siegel_capture::Error::from)?;
            value["relative_gap"] = json!(trace.relative_gap());
            value["pass"] = json!(pass);
            verdict(pass, value, args.out.out.as_deref(), "closure")
        }
        TraceTarget::Ray(args) => {
            check_level(args.level)?;
            let trace = trace_parameter_ray(theta, args.center, args.level, args.angle, &args.ray.options())?;
            emit_json(&serde_json::to_value(&trace).map_err(siegel_capture::Error::from)?, args.out.out.as_deref())
        }
        TraceTarget::Zakeri(args) => {
            let opts = ZakeriOptions { directions: args.samples, terms: args.terms, bracket: args.bracket };
            let trace = trace_zakeri(theta, &opts)?;
            let mut value = serde_json::to_value(&trace).map_err(siegel_capture::Error::from)?;
            if !trace.points.is_empty() {
                value["distance_to_plus_one"] = json!(closed_polyline_distance(Complex64::new(1.0, 0.0), &trace.points).0);
                value["distance_to_minus_one"] = json!(closed_polyline_distance(Complex64::new(-1.0, 0.0), &trace.points).0);
            }
            emit_json(&value, args.out.out.as_deref())
        }
        TraceTarget::Siegel(args) => {
            let map = CubicSiegelMap::c_plane(theta, args.c)?;
            if args.verdict_max_terms < args.terms {
                return Err(CliError::Usage("--verdict-max-terms must be at least --terms".into()));
            }
            let lin = LinearizationData::new(&map, &LinearizationOptions::default().with_terms(args.terms))?;
            let points = siegel_boundary(&lin, args.samples)?;
            let mut export = lin.export(theta);
            export.samples = points.len();
            export.points = points.iter().map(|z| [z.re, z.im]).collect();
            let mut value = serde_json::to_value(&export).map_err(siegel_capture::Error::from)?;
            let base = LinearizationOptions::default().with_terms(args.terms);
            let (verdict, _) = boundary_critical_point_with(&map, args.verdict_tol, &base, args.verdict_max_terms);
            value["verdict"] = serde_json::to_value(&verdict).map_err(siegel_capture::Error::from)?;
            emit_json(&value, args.out.out.as_deref())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    let theta = &cli.theta;
    match cli.command {
        Command::Render { plane } => cmd_render(theta, threads, plane),
        Command::Centers(args) => cmd_centers(theta, args),
        Command::Verify { check } => match check {
            VerifyCheck::Census(args) => cmd_verify_census(theta, args),
            VerifyCheck::Symmetry(args) => cmd_verify_symmetry(theta, args),
            VerifyCheck::Linearization(args) => cmd_verify_linearization(theta, args),
        },
        Command::Trace { target } => cmd_trace(theta, target),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
