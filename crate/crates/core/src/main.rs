use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;
use skspline::lab::{deviation, run_convergence_study, LpExponent, RateSpec};
use skspline::{
    build_fundamental, interpolate, solve_linear_system, FourierRep, GridSpec, Kernel, KernelSpec, MultiIndex, Norm,
    SkError, TorusPoint,
};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "skspline", version, about = "sk-spline interpolation on the torus")]
struct Cli {
    /// JSON file with default values for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for random evaluation points
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate K(x) along a line through the origin
    Kernel(KernelArgs),
    /// Build the fundamental spline and report its cardinality
    Fundamental(FundamentalArgs),
    /// Interpolate knot samples and evaluate the interpolant
    Interpolate(InterpolateArgs),
    /// Run a convergence study and write CSV
    Study(StudyArgs),
    /// Run the invariant suite on small grids
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Clone)]
struct KernelFlags {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// l2 or linf
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    kernel: KernelFlags,
    /// Parameters t of the points t * direction, e.g. "0,pi/2,pi"
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Direction of the slice, default e_1
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,
}

#[derive(Args)]
struct FundamentalArgs {
    #[command(flatten)]
    kernel: KernelFlags,
    /// Degrees, one value or one per axis
    #[arg(long)]
    n: Option<String>,
    /// Fourier truncation radius (sup norm of the frequency)
    #[arg(long)]
    radius: Option<i64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    kernel: KernelFlags,
    #[arg(long)]
    n: Option<String>,
    /// Knot values in Omega_n order, comma separated
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<String>,
    /// Trigonometric polynomial sampled at the knots, "m1,..,md:re:im;..."
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Evaluation points, coordinates separated by ',' and points by ';'
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Number of random evaluation points when --points is absent
    #[arg(long)]
    random: Option<usize>,
    /// Also evaluate the dense linear-system oracle
    #[arg(long)]
    check_dense: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    kernel: KernelFlags,
    #[arg(long)]
    p: Option<f64>,
    /// Target exponent, a number or "inf"
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    n_list: Option<String>,
    /// Quadrature points per axis
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Random points per check
    #[arg(long)]
    samples: Option<usize>,
}

/// Values read from `--config`; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    d: Option<usize>,
    gamma: Option<f64>,
    norm: Option<Norm>,
    tol: Option<f64>,
    n: Option<Vec<usize>>,
    n_list: Option<Vec<usize>>,
    p: Option<f64>,
    q: Option<LpExponent>,
    m: Option<usize>,
    phi: Option<PhiConfig>,
    points: Option<String>,
    direction: Option<Vec<f64>>,
    samples: Option<Vec<f64>>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    radius: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PhiConfig {
    Text(String),
    Terms(Vec<Vec<f64>>),
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl From<SkError> for CliError {
    fn from(e: SkError) -> Self {
        let code = match e {
            SkError::Io(_) => EXIT_IO,
            SkError::SingularKernel { .. } | SkError::NumericalRank { .. } => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SKSPLINE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| usage(format!("SKSPLINE_THREADS='{raw}' is not a count")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    match cli.command {
        Command::Kernel(args) => cmd_kernel(args, &config),
        Command::Fundamental(args) => cmd_fundamental(args, &config),
        Command::Interpolate(args) => cmd_interpolate(args, &config, seed),
        Command::Study(args) => cmd_study(args, &config),
        Command::Selfcheck(args) => cmd_selfcheck(args, seed),
    }
}

fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be finite, got {v}")))
    }
}

fn build_kernel(flags: &KernelFlags, config: &Config) -> CliResult<Kernel> {
    let d = flags.d.or(config.d).ok_or_else(|| usage("--d is required"))?;
    if d == 0 || d > 4 {
        return Err(usage(format!("--d must be between 1 and 4, got {d}")));
    }
    let gamma = finite("gamma", flags.gamma.or(config.gamma).ok_or_else(|| usage("--gamma is required"))?)?;
    let norm = match &flags.norm {
        Some(text) => text.parse()?,
        None => config.norm.unwrap_or(Norm::L2),
    };
    let tol = finite("tol", flags.tol.or(config.tol).unwrap_or(skspline::kernel::DEFAULT_TAIL_TOL))?;
    let spec = KernelSpec::power(d, gamma, norm)?.with_tail_tol(tol)?;
    Ok(Kernel::new(spec)?)
}

/// Accepts numbers and multiples of pi such as `pi`, `-pi/2`, `3pi/4`, `2*pi`.
fn parse_angle(text: &str) -> CliResult<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || usage(format!("cannot read '{text}' as a number"));
    let value = if let Some(pos) = t.find("pi") {
        let head = t[..pos].trim_end_matches('*').trim();
        let coef = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        let tail = t[pos + 2..].trim();
        let denom = if tail.is_empty() {
            1.0
        } else {
            tail.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?
        };
        coef * PI / denom
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| usage(format!("bad {what} entry '{s}'"))))
        .collect()
}

fn grid_from(flag: &Option<String>, config: &Config, d: usize) -> CliResult<GridSpec> {
    let n: Vec<usize> = match flag {
        Some(text) => parse_list(text, "degree")?,
        None => config.n.clone().ok_or_else(|| usage("--n is required"))?,
    };
    let n = match n.len() {
        1 => vec![n[0]; d],
        len if len == d => n,
        len => return Err(usage(format!("--n has {len} entries but d = {d}"))),
    };
    Ok(GridSpec::new(n)?)
}

fn phi_from(flag: &Option<String>, config: &Config, d: usize) -> CliResult<Option<FourierRep>> {
    Ok(match (flag, &config.phi) {
        (Some(text), _) => Some(FourierRep::parse_terms(d, text)?),
        (None, Some(PhiConfig::Text(text))) => Some(FourierRep::parse_terms(d, text)?),
        (None, Some(PhiConfig::Terms(rows))) => Some(FourierRep::from_json_terms(d, rows)?),
        (None, None) => None,
    })
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError { code: EXIT_IO, message: e.to_string() })
        }
    }
}

fn cmd_kernel(args: KernelArgs, config: &Config) -> CliResult<()> {
    let kernel = build_kernel(&args.kernel, config)?;
    let d = kernel.dim();
    let tol = kernel.spec().tail_tol();
    let points = args.points.or(config.points.clone()).unwrap_or_else(|| "0,pi/2,pi".into());
    let direction: Vec<f64> = match (&args.direction, &config.direction) {
        (Some(text), _) => text.split(',').map(parse_angle).collect::<CliResult<_>>()?,
        (None, Some(v)) => v.clone(),
        (None, None) => (0..d).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
    };
    if direction.len() != d {
        return Err(usage(format!("--direction needs {d} entries")));
    }
    let mut out = String::from("t,value,tail_bound\n");
    for t in points.split(',').map(parse_angle) {
        let t = t?;
        let x = TorusPoint::new(direction.iter().map(|v| v * t).collect());
        let v = kernel.eval_certified(&x, tol)?;
        out.push_str(&format!("{t},{},{}\n", v.value, v.tail_bound));
    }
    emit(None, &out)
}

fn cmd_fundamental(args: FundamentalArgs, config: &Config) -> CliResult<()> {
    let kernel = build_kernel(&args.kernel, config)?;
    let grid = grid_from(&args.n, config, kernel.dim())?;
    let fs = build_fundamental(&kernel, &grid, kernel.spec().tail_tol())?;
    let deviation = grid
        .knots()
        .iter()
        .enumerate()
        .map(|(i, x)| (fs.eval_point(x) - if i == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let rep = match args.radius.or(config.radius) {
        Some(r) if r >= 0 => fs.fourier_truncated(r),
        Some(r) => return Err(usage(format!("--radius must be nonnegative, got {r}"))),
        None => fs.fourier().clone(),
    };
    let doc = json!({
        "d": grid.dim(),
        "n": grid.degrees(),
        "gamma": kernel.spec().gamma(),
        "norm": kernel.spec().norm(),
        "truncation_tail": rep.truncation_tail(),
        "constant": fs.coeffs().constant,
        "knot_coeffs": fs.coeffs().knot_coeffs,
        "terms": rep.to_json_terms(),
    });
    let text = serde_json::to_string_pretty(&doc).map_err(SkError::from)? + "\n";
    let output = args.output.or(config.output.clone());
    emit(output.as_deref(), &text)?;
    let report = format!("max cardinality deviation at knots: {deviation:e}");
    if output.is_some() {
        println!("{report}");
    } else {
        eprintln!("{report}");
    }
    Ok(())
}

fn parse_points(text: &str, d: usize) -> CliResult<Vec<Vec<f64>>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let coords: Vec<f64> = p.split(',').map(parse_angle).collect::<CliResult<_>>()?;
            if coords.len() != d {
                return Err(usage(format!("point '{p}' needs {d} coordinates")));
            }
            Ok(coords)
        })
        .collect()
}

fn cmd_interpolate(args: InterpolateArgs, config: &Config, seed: u64) -> CliResult<()> {
    let kernel = build_kernel(&args.kernel, config)?;
    let d = kernel.dim();
    let grid = grid_from(&args.n, config, d)?;
    let samples: Vec<f64> = match (&args.samples, &config.samples, phi_from(&args.phi, config, d)?) {
        (Some(text), _, _) => parse_list(text, "sample")?,
        (None, _, Some(phi)) => grid.knots().iter().map(|x| phi.eval(x.coords()).re).collect(),
        (None, Some(v), None) => v.clone(),
        (None, None, None) => return Err(usage("give --samples or --phi")),
    };
    let fs = Arc::new(build_fundamental(&kernel, &grid, kernel.spec().tail_tol())?);
    let ip = interpolate(&fs, &samples)?;
    let dense = if args.check_dense { Some(solve_linear_system(&kernel, &grid, &samples)?) } else { None };
    let points = match args.points.or(config.points.clone()) {
        Some(text) => parse_points(&text, d)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..args.random.unwrap_or(10)).map(|_| (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect()).collect()
        }
    };
    let coords: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let mut out = coords.join(",") + ",value";
    if dense.is_some() {
        out.push_str(",dense_value");
    }
    out.push('\n');
    for x in &points {
        let cells: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{},{}", cells.join(","), ip.eval(x)));
        if let Some(coeffs) = &dense {
            out.push_str(&format!(",{}", coeffs.eval(&kernel, &grid, x)));
        }
        out.push('\n');
    }
    emit(args.output.or(config.output.clone()).as_deref(), &out)
}

fn cmd_study(args: StudyArgs, config: &Config) -> CliResult<()> {
    let kernel = build_kernel(&args.kernel, config)?;
    let d = kernel.dim();
    let gamma = kernel.spec().gamma().expect("power-law kernel");
    let p = finite("p", args.p.or(config.p).ok_or_else(|| usage("--p is required"))?)?;
    let q: LpExponent = match &args.q {
        Some(text) => text.parse()?,
        None => config.q.ok_or_else(|| usage("--q is required"))?,
    };
    // the hypothesis is checked before any computation starts
    let spec = RateSpec::new(p, q, gamma, d)?;
    let n_list: Vec<usize> = match &args.n_list {
        Some(text) => parse_list(text, "degree")?,
        None => config.n_list.clone().ok_or_else(|| usage("--n-list is required"))?,
    };
    let phi = phi_from(&args.phi, config, d)?.ok_or_else(|| usage("--phi is required"))?;
    let m = args.m.or(config.m).unwrap_or(64);
    let result = run_convergence_study(&kernel, &spec, &phi, &n_list, m)?;
    let output = args.output.or(config.output.clone());
    emit(output.as_deref(), &result.to_csv())?;
    let summary = format!(
        "fitted slope {:.4}, predicted exponent {}",
        result.fitted_slope, result.predicted_exponent
    );
    if output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_selfcheck(args: SelfcheckArgs, seed: u64) -> CliResult<()> {
    let samples = args.samples.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut report = |name: &str, worst: f64, limit: f64| {
        let ok = worst <= limit;
        if !ok {
            failures += 1;
        }
        println!("{} {name}: {worst:.3e} (limit {limit:e})", if ok { "ok  " } else { "FAIL" });
    };
    for (d, n, gamma, norm) in [(1, 4, 3.0, Norm::L2), (2, 2, 2.5, Norm::L2), (2, 2, 3.0, Norm::Linf)] {
        println!("d={d} n={n} gamma={gamma} norm={norm}");
        let kernel = Kernel::power(d, gamma, norm)?;
        let grid = GridSpec::uniform(d, n)?;
        let fs = Arc::new(build_fundamental(&kernel, &grid, 1e-10)?);
        let points: Vec<Vec<f64>> =
            (0..samples).map(|_| (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect()).collect();

        let cardinal = grid
            .knots()
            .iter()
            .enumerate()
            .map(|(i, x)| (fs.eval_point(x) - if i == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        report("cardinality", cardinal, 1e-8);

        let unity = points.iter().map(|x| (fs.translates(x).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
        report("partition of unity", unity, 1e-8);

        let values: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ip = interpolate(&fs, &values)?;
        let dense = solve_linear_system(&kernel, &grid, &values)?;
        let oracle =
            points.iter().map(|x| (ip.eval_translate(x) - dense.eval(&kernel, &grid, x)).abs()).fold(0.0, f64::max);
        report("dense oracle equivalence", oracle, 1e-7);

        let mut theta = 0.0f64;
        for x in &points {
            for l in -(4 * n as i64)..=(4 * n as i64) {
                let mut entries = vec![0; d];
                entries[0] = l;
                if l != 0 {
                    theta = theta.max(deviation(&fs, &MultiIndex::new(entries), x).norm());
                }
            }
        }
        report("deviation bound |theta| - 4", (theta - 4.0).max(0.0), 1e-6);

        let plan = kernel.lattice_plan(&grid, 1e-10)?;
        let mut symmetry = 0.0f64;
        for x in points.iter().take(5) {
            for j in grid.enumerate_omega().into_iter().skip(1) {
                let (a, _) = plan.phi(&j, x);
                let (b, _) = plan.phi(&j.neg(), x);
                symmetry = symmetry.max((a - b.conj()).norm());
            }
        }
        report("symmetry rho_-j = rho_j, sigma_-j = -sigma_j", symmetry, 1e-9);
    }
    if failures > 0 {
        return Err(CliError { code: EXIT_NUMERIC, message: format!("{failures} checks failed") });
    }
    Ok(())
}
