//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ci1::{ci1_density, rescale_ci1, sample_ci1_unit};
use crate::cid::{calibrate_c, rescale_cid, sample_cid_approx_unit, ApproxConfig, DEFAULT_C_CONSTANT};
use crate::density::validate_family;
use crate::error::{param, Error, Result};
use crate::estimate::{geometric_mean_estimate, Estimator};
use crate::exact::exact_all_pairs;
use crate::generate::{random_family, FamilySpec};
use crate::io::{distance_csv, distance_json, parse_config, read_family, Config, RunManifest};
use crate::pipeline::{run_scheme, sketch_family, Method, SchemeParams, SketchChoice, SketchMode};
use crate::rng::RandomStream;

#[derive(Debug, Parser)]
#[command(name = "l1sketch", version, about = "All-pairs L1 distances between piecewise-polynomial densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance matrix of a density family.
    Dist(DistArgs),
    /// Draw random vectors.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Evaluate densities on a grid.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Calibrate the interpolation constant c of the r-approximation.
    Calibrate(CalibrateArgs),
    /// Time exact and sketch runs on random families.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Sketch,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SketchModeArg {
    Auto,
    CidApprox,
    Uniformize,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Family file (JSON).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "sketch")]
    pub method: MethodArg,
    /// Relative error for sketch; absolute error for mc.
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, env = "L1SKETCH_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// geometric_mean or median.
    #[arg(long)]
    pub estimator: Option<Estimator>,
    /// TOML file with seed, estimator and c_constant.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Interpolation constant for degree >= 2.
    #[arg(long = "c")]
    pub c_constant: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub sketch_mode: SketchModeArg,
}

#[derive(Debug, Subcommand)]
pub enum SampleCommand {
    /// Exact draws from CI_1(a, b).
    Ci1(SampleCi1Args),
    /// r-approximation draws from CI_d(a, b).
    Cid(SampleCidArgs),
}

#[derive(Debug, Args)]
pub struct SampleCi1Args {
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, env = "L1SKETCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleCidArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, env = "L1SKETCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// CI_1 density on a square grid; rows `x0,x1,f`.
    Ci1Density {
        /// `lo:hi:step`, used for both coordinates.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every density of a family on a grid; rows `x,f_1,...,f_m`.
    Density {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 16)]
    pub d_max: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, env = "L1SKETCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Family sizes.
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    pub m: Vec<usize>,
    /// Pieces per density.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Replicate counts for the sketch rows.
    #[arg(long, value_delimiter = ',', default_value = "500,2000,8000")]
    pub t: Vec<usize>,
    #[arg(long, env = "L1SKETCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dist(args) => cmd_dist(args),
        Command::Sample(SampleCommand::Ci1(args)) => cmd_sample_ci1(args),
        Command::Sample(SampleCommand::Cid(args)) => cmd_sample_cid(args),
        Command::Eval(EvalCommand::Ci1Density { grid, out }) => cmd_eval_ci1(&grid, out.as_deref()),
        Command::Eval(EvalCommand::Density { input, grid, out }) => cmd_eval_density(&input, &grid, out.as_deref()),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Full manifest, including wall time, as one JSON line on stderr.
fn report(manifest: &RunManifest, started: Instant) {
    let mut full = manifest.clone();
    full.wall_time_s = Some(started.elapsed().as_secs_f64());
    eprintln!("manifest: {}", full.to_json());
}

fn cmd_dist(args: DistArgs) -> Result<()> {
    let started = Instant::now();
    let config = match &args.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => Config::default(),
    };
    let (family, bytes) = read_family(&args.input)?;
    for w in validate_family(&family, true)? {
        eprintln!("warning: {w}");
    }

    let method = match args.method {
        MethodArg::Exact => Method::Exact,
        MethodArg::Sketch => Method::Sketch,
        MethodArg::Mc => Method::Mc,
    };
    let mut params = SchemeParams::new(method);
    params.epsilon = args.epsilon;
    params.delta = args.delta;
    params.seed = args.seed.or(config.seed).unwrap_or(0);
    params.estimator = args.estimator.or(config.estimator).unwrap_or_default();
    params.c_constant = args.c_constant.or(config.c_constant).unwrap_or(DEFAULT_C_CONSTANT);
    params.threads = args.threads;
    params.sketch_choice = match args.sketch_mode {
        SketchModeArg::Auto => SketchChoice::Auto,
        SketchModeArg::CidApprox => SketchChoice::CidApprox,
        SketchModeArg::Uniformize => SketchChoice::Uniformize,
    };
    if !(params.c_constant > 0.0 && params.c_constant.is_finite()) {
        return param(format!("c must be positive, got {}", params.c_constant));
    }

    let matrix = run_scheme(&family, &params)?;

    let mut manifest = RunManifest::new("dist");
    manifest.seed = Some(params.seed);
    manifest.input_sha256 = Some(crate::io::digest(&bytes));
    manifest
        .param("method", method)
        .param("epsilon", params.epsilon)
        .param("delta", params.delta)
        .param("estimator", params.estimator)
        .param("c_constant", params.c_constant)
        .param("sketch_mode", format!("{:?}", args.sketch_mode).to_lowercase())
        .param("format", format!("{:?}", args.format).to_lowercase());
    let text = match args.format {
        FormatArg::Csv => distance_csv(&matrix, &manifest),
        FormatArg::Json => distance_json(&matrix, &manifest),
    };
    emit(args.out.as_deref(), &text)?;
    report(&manifest, started);
    Ok(())
}

fn cmd_sample_ci1(args: SampleCi1Args) -> Result<()> {
    let started = Instant::now();
    if !(args.a < args.b) {
        return param(format!("need a < b, got a = {}, b = {}", args.a, args.b));
    }
    let mut rng = RandomStream::new(args.seed, args.stream);
    let mut text = String::new();
    for _ in 0..args.count {
        let z = rescale_ci1(sample_ci1_unit(&mut rng)?, args.a, args.b)?;
        text.push_str(&format!("{},{}\n", z.x0, z.x1));
    }
    emit(args.out.as_deref(), &text)?;
    let mut manifest = RunManifest::new("sample ci1");
    manifest.seed = Some(args.seed);
    manifest
        .param("count", args.count)
        .param("a", args.a)
        .param("b", args.b)
        .param("stream", args.stream);
    report(&manifest, started);
    Ok(())
}

fn cmd_sample_cid(args: SampleCidArgs) -> Result<()> {
    let started = Instant::now();
    if !(args.a < args.b) {
        return param(format!("need a < b, got a = {}, b = {}", args.a, args.b));
    }
    let cfg = ApproxConfig::with_r(args.d, args.r)?;
    let mut rng = RandomStream::new(args.seed, args.stream);
    let mut text = String::new();
    for _ in 0..args.count {
        let z = rescale_cid(&sample_cid_approx_unit(&cfg, &mut rng), args.a, args.b)?;
        let cells: Vec<String> = z.components.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)?;
    let mut manifest = RunManifest::new("sample cid");
    manifest.seed = Some(args.seed);
    manifest
        .param("d", args.d)
        .param("r", args.r)
        .param("count", args.count)
        .param("a", args.a)
        .param("b", args.b)
        .param("stream", args.stream);
    report(&manifest, started);
    Ok(())
}

const MAX_GRID_POINTS: usize = 100_000_000;

/// Points `lo, lo + step, ..., <= hi` from `lo:hi:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Vec<f64> = match parts.as_slice() {
        [lo, hi, step] => [lo, hi, step]
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parameter(format!("grid '{spec}': {e}")))?,
        _ => return param(format!("grid '{spec}' must look like lo:hi:step")),
    };
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && step.is_finite() && hi >= lo) {
        return param(format!("grid '{spec}' needs finite lo <= hi and step > 0"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() + 1.0;
    if count > MAX_GRID_POINTS as f64 {
        return param(format!("grid '{spec}' has too many points"));
    }
    let count = count as usize;
    let last = lo + (count - 1) as f64 * step;
    if count > 1 && (last - hi).abs() <= 1e-9 * step {
        // interpolate so that the endpoints and midpoint are exact
        let span = (count - 1) as f64;
        Ok((0..count).map(|i| lo + (hi - lo) * (i as f64 / span)).collect())
    } else {
        Ok((0..count).map(|i| lo + i as f64 * step).collect())
    }
}

fn cmd_eval_ci1(grid: &str, out: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let xs = parse_grid(grid)?;
    if xs.len() * xs.len() > MAX_GRID_POINTS {
        return param(format!("grid '{grid}' has too many points"));
    }
    let mut manifest = RunManifest::new("eval ci1-density");
    manifest.param("grid", grid);
    let mut text = format!("# manifest: {}\nx0,x1,f\n", manifest.to_json());
    for &x0 in &xs {
        for &x1 in &xs {
            text.push_str(&format!("{x0},{x1},{}\n", ci1_density(x0, x1)));
        }
    }
    emit(out, &text)?;
    report(&manifest, started);
    Ok(())
}

fn cmd_eval_density(input: &Path, grid: &str, out: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let xs = parse_grid(grid)?;
    let (family, bytes) = read_family(input)?;
    let mut manifest = RunManifest::new("eval density");
    manifest.input_sha256 = Some(crate::io::digest(&bytes));
    manifest.param("grid", grid);
    let mut text = format!("# manifest: {}\nx", manifest.to_json());
    for name in family.names() {
        text.push(',');
        text.push_str(&name);
    }
    text.push('\n');
    for &x in &xs {
        text.push_str(&x.to_string());
        for f in &family.densities {
            text.push_str(&format!(",{}", f.eval(&family.breakpoints, x)));
        }
        text.push('\n');
    }
    emit(out, &text)?;
    report(&manifest, started);
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let started = Instant::now();
    let calibration = calibrate_c(args.d_max, args.eps, args.trials, args.seed)?;
    let mut manifest = RunManifest::new("calibrate");
    manifest.seed = Some(args.seed);
    manifest
        .param("d_max", args.d_max)
        .param("eps", args.eps)
        .param("trials", args.trials);
    let doc = serde_json::json!({
        "manifest": manifest,
        "c": calibration.c,
        "safety_factor": calibration.safety_factor,
        "per_degree": calibration.per_degree,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    report(&manifest, started);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let started = Instant::now();
    if args.m.iter().any(|&m| m < 2) || args.t.contains(&0) {
        return param("bench needs every m >= 2 and every t >= 1");
    }
    let mode = match args.d {
        0 => SketchMode::UniformFastpath,
        1 => SketchMode::ExactCi1,
        d => SketchMode::CidApprox {
            r: ApproxConfig::new(d, 0.1, DEFAULT_C_CONSTANT)?.r,
        },
    };
    let mut ts = args.t.clone();
    ts.sort_unstable();
    let mut text = String::from("method,m,n,t,d,seconds\n");
    for &m in &args.m {
        let family = random_family(FamilySpec {
            m,
            n: args.n,
            degree: args.d,
            seed: args.seed,
        })?;
        let clock = Instant::now();
        let exact = exact_all_pairs(&family);
        let seconds = clock.elapsed().as_secs_f64();
        std::hint::black_box(&exact);
        text.push_str(&format!("exact,{m},{},0,{},{seconds}\n", args.n, args.d));
        for &t in &ts {
            let clock = Instant::now();
            let sketch = sketch_family(&family, t, mode, args.seed)?;
            for j in 0..m {
                for k in (j + 1)..m {
                    std::hint::black_box(geometric_mean_estimate(&sketch.differences(j, k), 0.5, 0.5)?);
                }
            }
            let seconds = clock.elapsed().as_secs_f64();
            text.push_str(&format!("sketch,{m},{},{t},{},{seconds}\n", args.n, args.d));
        }
    }
    emit(args.out.as_deref(), &text)?;
    let mut manifest = RunManifest::new("bench");
    manifest.seed = Some(args.seed);
    manifest
        .param("m", &args.m)
        .param("n", args.n)
        .param("d", args.d)
        .param("t", &args.t);
    report(&manifest, started);
    Ok(())
}
