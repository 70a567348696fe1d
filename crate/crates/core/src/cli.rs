//! The `espart` command line. Every command prints a [`RunReport`] as JSON,
//! to standard output or to `--out`.
//!
//! Exit codes: 0 success, 2 bad input or configuration, 3 failed hypothesis
//! or extraction, 4 failed validation, 5 nothing found.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{mv_check, mv_random_suite, TrigPolynomial};
use crate::error::{Error, Result};
use crate::examples::{
    easycor_block_counts, easycor_blocks, easycor_gamma, hkw_cover, progression_check, LengthRule,
    Schedule,
};
use crate::gram::riesz_margin;
use crate::io;
use crate::partition::{extract, validate};
use crate::pointset::{geometric_grid, PointSetWindow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 5;
pub const THREADS_ENV: &str = "ESPART_THREADS";

/// Output document of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub timing_ms: u64,
    pub version: String,
}

#[derive(Debug, Parser)]
#[command(
    name = "espart",
    version,
    about = "Uniform partitions of exponential systems into Riesz sequences"
)]
pub struct Cli {
    /// Worker threads; overrides ESPART_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Window density and dimension estimates.
    Density(DensityArgs),
    /// Extract the partition certificate, optionally validating it.
    Partition(PartitionArgs),
    /// Extremal eigenvalues of a Gram section against a target lower bound.
    Gram(GramArgs),
    /// Montgomery–Vaughan check on one polynomial or a random suite.
    Mv(MvArgs),
    /// Generate an example cover or frequency set.
    Gen(GenArgs),
    /// Search a subsample for a long progression with small step.
    Progression(ProgressionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    pub points: PathBuf,
    /// Density exponent.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub h_min: Option<f64>,
    #[arg(long)]
    pub h_max: Option<f64>,
    #[arg(long, default_value_t = 24)]
    pub h_steps: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PartitionArgs {
    pub cover: PathBuf,
    pub points: PathBuf,
    /// Overrides the cover's exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub validate: bool,
    /// Set `E` to validate on; defaults to the realized cover.
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,8,16,32")]
    pub window_sizes: Vec<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GramArgs {
    pub set: PathBuf,
    pub points: PathBuf,
    /// Use the complement of the set.
    #[arg(long)]
    pub complement: bool,
    #[arg(long, default_value_t = 0.0)]
    pub target_lower: f64,
    /// Use only this many consecutive points around the first one `≥ 0`.
    #[arg(long)]
    pub section: Option<usize>,
    /// Include the matrix in the output.
    #[arg(long)]
    pub matrix: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MvArgs {
    /// Frequencies; omit with --random.
    pub points: Option<PathBuf>,
    /// JSON list of coefficients, each a number or `[re, im]`; default all ones.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// `a,b`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.0, 1.0])]
    pub interval: Vec<f64>,
    /// Run this many random instances instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    Hkw,
    Easycor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Geometric,
    InverseSquare,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub example: ExampleKind,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = RuleKind::Geometric)]
    pub rule: RuleKind,
    /// Rule constant; defaults to 1/2 (geometric) or 3/π² (inverse square).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long = "Z", default_value_t = 0)]
    pub z: usize,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.8)]
    pub beta: f64,
    #[arg(long, default_value_t = 24)]
    pub j_max: usize,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Desk)]
    pub schedule: ScheduleKind,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Desk,
    Paper,
}

#[derive(Debug, Args, Serialize)]
pub struct ProgressionArgs {
    pub points: PathBuf,
    #[arg(long = "subsample-N", alias = "subsample-n")]
    pub subsample_n: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// A command's payload and exit code.
struct Outcome {
    outputs: Value,
    code: i32,
}

impl Outcome {
    fn ok(outputs: Value) -> Self {
        Self {
            outputs,
            code: EXIT_OK,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::Partition(_) => "partition",
            Command::Gram(_) => "gram",
            Command::Mv(_) => "mv",
            Command::Gen(_) => "gen",
            Command::Progression(_) => "progression",
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Command::Density(a) => a.out.as_deref(),
            Command::Partition(a) => a.out.as_deref(),
            Command::Gram(a) => a.out.as_deref(),
            Command::Mv(a) => a.out.as_deref(),
            Command::Gen(a) => a.out.as_deref(),
            Command::Progression(a) => a.out.as_deref(),
        }
    }

    fn inputs(&self) -> Result<Value> {
        Ok(match self {
            Command::Density(a) => serde_json::to_value(a)?,
            Command::Partition(a) => serde_json::to_value(a)?,
            Command::Gram(a) => serde_json::to_value(a)?,
            Command::Mv(a) => serde_json::to_value(a)?,
            Command::Gen(a) => serde_json::to_value(a)?,
            Command::Progression(a) => serde_json::to_value(a)?,
        })
    }
}

/// Runs one command, returning its report and exit code.
pub fn execute(cmd: &Command) -> Result<(RunReport, i32)> {
    let started = Instant::now();
    let outcome = match cmd {
        Command::Density(a) => density(a)?,
        Command::Partition(a) => partition(a)?,
        Command::Gram(a) => gram(a)?,
        Command::Mv(a) => mv(a)?,
        Command::Gen(a) => gen(a)?,
        Command::Progression(a) => progression(a)?,
    };
    let report = RunReport {
        command: cmd.name().to_string(),
        inputs: cmd.inputs()?,
        outputs: outcome.outputs,
        timing_ms: started.elapsed().as_millis() as u64,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok((report, outcome.code))
}

/// Parses `args`, runs the command, writes the report; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    crate::configure_threads(threads);

    let result = execute(&cli.command).and_then(|(report, code)| {
        emit(&report, cli.command.out())?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("espart {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn emit(report: &RunReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => io::write_json(path, report),
        None => {
            println!("{}", serde_json::to_string_pretty(report)?);
            Ok(())
        }
    }
}

fn density(a: &DensityArgs) -> Result<Outcome> {
    let w = io::read_points(&a.points)?;
    let grid = match (a.h_min, a.h_max) {
        (None, None) => {
            let g = w.default_scale_grid(a.h_steps);
            if g.is_empty() {
                vec![1.0]
            } else {
                g
            }
        }
        (lo, hi) => {
            let hi = hi.unwrap_or_else(|| w.max_scale().max(1.0));
            let lo = lo.unwrap_or(1.0);
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::config(format!("bad scale range [{lo}, {hi}]")));
            }
            geometric_grid(lo, hi, a.h_steps)
        }
    };
    let report = w.density_estimate(a.r, &grid)?;
    let dimension = if grid.len() >= 3 {
        Some(w.dim_estimate(&[], &grid)?)
    } else {
        None
    };
    Ok(Outcome::ok(json!({
        "points": w.len(),
        "density": report,
        "dimension": dimension,
    })))
}

fn partition(a: &PartitionArgs) -> Result<Outcome> {
    let mut cover = io::read_cover(&a.cover)?;
    if let Some(alpha) = a.alpha {
        cover.alpha = alpha;
        cover.validate()?;
    }
    let w = io::read_points(&a.points)?;
    let cert = extract(&cover, &w)?;
    if !cert.is_valid() {
        let err = cert.ensure_valid().unwrap_err();
        eprintln!("espart partition: {err}");
        return Ok(Outcome {
            outputs: json!({ "certificate": cert }),
            code: err.exit_code(),
        });
    }
    if !a.validate {
        return Ok(Outcome::ok(json!({ "certificate": cert })));
    }
    let set = match &a.set {
        Some(p) => io::read_set(p)?,
        None => cover.realize(cover.centers.as_ref().map_or(0, Vec::len))?,
    };
    let report = validate(&cert, &cover, &set, &w, &a.window_sizes)?;
    let code = match report.ensure() {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("espart partition: {e}");
            e.exit_code()
        }
    };
    Ok(Outcome {
        outputs: json!({ "certificate": cert, "validation": report }),
        code,
    })
}

/// `m` consecutive points centred on the first one `≥ 0`.
fn centred(w: &PointSetWindow, m: usize) -> &[f64] {
    let pts = w.points();
    let m = m.min(pts.len());
    let start = w.anchor().saturating_sub(m / 2).min(pts.len() - m);
    &pts[start..start + m]
}

fn gram(a: &GramArgs) -> Result<Outcome> {
    let set = io::read_set(&a.set)?;
    let w = io::read_points(&a.points)?;
    let freqs = match a.section {
        Some(0) => return Err(Error::config("section size must be positive")),
        Some(m) => centred(&w, m),
        None => w.points(),
    };
    let mut report = riesz_margin(a.complement, &set, freqs, a.target_lower)?;
    if a.matrix {
        let g = if a.complement {
            set.complement()
        } else {
            set.clone()
        };
        report.matrix = Some(crate::gram::gram_matrix(&g, freqs)?.matrix_rows());
    }
    let code = if report.margin > 0.0 {
        EXIT_OK
    } else {
        Error::Validation(String::new()).exit_code()
    };
    Ok(Outcome {
        outputs: serde_json::to_value(&report)?,
        code,
    })
}

fn read_coeffs(path: &Path) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("malformed coefficient list: {e}")))?;
    let items = v
        .get("coeffs")
        .unwrap_or(&v)
        .as_array()
        .ok_or_else(|| Error::input("coefficients must be a JSON list"))?;
    items
        .iter()
        .map(|c| match c {
            Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::input(format!("bad coefficient {c}"))),
            },
            _ => Err(Error::input(format!("bad coefficient {c}"))),
        })
        .collect()
}

fn mv(a: &MvArgs) -> Result<Outcome> {
    if let Some(count) = a.random {
        let suite = mv_random_suite(count, a.seed)?;
        let code = if suite.violations == 0 { EXIT_OK } else { 4 };
        return Ok(Outcome {
            outputs: serde_json::to_value(&suite)?,
            code,
        });
    }
    let path = a
        .points
        .as_ref()
        .ok_or_else(|| Error::config("give a frequency file or --random"))?;
    let [a_end, b_end] = a.interval[..] else {
        return Err(Error::config("--interval takes two values a,b"));
    };
    let freqs = raw_points(path)?;
    let coeffs = match &a.coeffs {
        Some(p) => read_coeffs(p)?,
        None => vec![Complex64::new(1.0, 0.0); freqs.len()],
    };
    let poly = TrigPolynomial::new(freqs, coeffs).map_err(|e| match e {
        Error::Domain(m) => Error::Input(m),
        other => other,
    })?;
    let report = mv_check(&poly, a_end, b_end)?;
    let code = if report.holds { EXIT_OK } else { 4 };
    Ok(Outcome {
        outputs: json!({
            "frequencies": poly.frequencies().len(),
            "coefficient_energy": poly.coefficient_energy(),
            "report": report,
        }),
        code,
    })
}

/// Frequencies in file order, so that repeats are reported instead of merged.
fn raw_points(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    let v: Option<Value> = serde_json::from_str(&text).ok();
    let list = match v {
        Some(Value::Object(o)) if o.get("points").is_some_and(Value::is_array) => {
            serde_json::from_value::<Vec<f64>>(o["points"].clone())
                .map_err(|e| Error::input(format!("malformed point list: {e}")))?
        }
        Some(Value::Array(a)) => serde_json::from_value::<Vec<f64>>(Value::Array(a))
            .map_err(|e| Error::input(format!("malformed point list: {e}")))?,
        _ => {
            return Ok(io::parse_points(&text)?.points().to_vec());
        }
    };
    let mut sorted = list.clone();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::input(format!("repeated frequency {}", w[0])));
    }
    if sorted.is_empty() {
        return Err(Error::input("no frequencies"));
    }
    Ok(sorted)
}

fn gen(a: &GenArgs) -> Result<Outcome> {
    match a.example {
        ExampleKind::Hkw => {
            let rule = match a.rule {
                RuleKind::Geometric => LengthRule::Geometric {
                    c: a.c.unwrap_or(0.5),
                    rho: a.rho,
                },
                RuleKind::InverseSquare => LengthRule::InverseSquare {
                    c: a.c.unwrap_or(3.0 / std::f64::consts::PI.powi(2)),
                },
            };
            let mut cover = hkw_cover(a.n_max, rule)?;
            cover.z = a.z;
            cover.alpha = a.alpha;
            cover.validate()?;
            Ok(Outcome::ok(json!({
                "cover": cover,
                "rule": rule,
                "sum_lengths": cover.sum_lengths(),
            })))
        }
        ExampleKind::Easycor => {
            let schedule = match a.schedule {
                ScheduleKind::Desk => Schedule::Desk,
                ScheduleKind::Paper => Schedule::Paper,
            };
            let blocks = easycor_blocks(a.beta, a.j_max, schedule)?;
            let w = PointSetWindow::new(blocks.iter().flat_map(|b| b.points()).collect())?;
            let counts = easycor_block_counts(&w, &blocks, a.beta);
            Ok(Outcome::ok(json!({
                "points": w.points(),
                "beta": a.beta,
                "gamma": easycor_gamma(a.beta),
                "schedule": schedule,
                "blocks": blocks,
                "block_counts": counts,
            })))
        }
    }
}

fn progression(a: &ProgressionArgs) -> Result<Outcome> {
    let w = io::read_points(&a.points)?;
    let search = progression_check(&w, a.subsample_n, a.delta, a.budget)?;
    let code = if search.found.is_some() {
        EXIT_OK
    } else {
        EXIT_NOT_FOUND
    };
    Ok(Outcome {
        outputs: serde_json::to_value(&search)?,
        code,
    })
}
