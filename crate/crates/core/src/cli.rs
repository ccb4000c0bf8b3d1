//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 usage, 3 validation, 4 I/O, 5 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::curvegeom::{
    close_at_infinity_with, integrate_tangent, ClosureOptions, CLOSURE_TANGENT_TOL,
    DEFAULT_ARC_SEGMENTS, DEFAULT_RADIUS_FACTOR,
};
use crate::dynamics::{drift_report, evolve, Scheme, CFL_LIMIT};
use crate::grid_field::{ground_state, random_field, twist_profile, Grid, SpinField, TwistParams};
use crate::observables::{energy_bound_check, Observables};
use crate::topology::{
    detect_jumps, homotopy_path, writhe_along_path_with, PathMethod, DEFAULT_JUMP_TOL,
};
use crate::writhe::{helical_closure, measure_writhe, writhe_gauss_in, WritheMethod};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Smallest benchmark size.
pub const BENCH_MIN_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "spinwrithe", version, about = "Spin chains as space curves")]
pub struct RunConfig {
    /// Worker threads for the writhe kernel and path scans (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for random generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Write a spin field as JSON.
    Generate(GenerateArgs),
    /// Observables, writhe estimators and energy bounds of a field.
    Measure(MeasureArgs),
    /// Integrate the Landau-Lifshitz flow and record observables.
    Evolve(EvolveArgs),
    /// Writhe along the great-circle path between two fields.
    Homotopy(HomotopyArgs),
    /// Reconstruct the curve of a field and close it at infinity.
    Close(CloseArgs),
    /// Time the Gauss kernel on a standard closed curve.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Ground,
    Twist,
    Random,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: FieldKind,
    #[arg(long, allow_hyphen_values = true, default_value_t = -20.0)]
    pub s_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 20.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::TAU)]
    pub dphi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w_phi: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub s0: f64,
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct MeasureArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    #[arg(long = "j", default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = DEFAULT_RADIUS_FACTOR)]
    pub radius_factor: f64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gauss,
    Fuller,
    Angular,
    All,
}

impl From<MethodArg> for WritheMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gauss => WritheMethod::Gauss,
            MethodArg::Fuller => WritheMethod::Fuller,
            MethodArg::Angular => WritheMethod::Angular,
            MethodArg::All => WritheMethod::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rk4Renorm,
    HeunRenorm,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Rk4Renorm => Scheme::Rk4Renorm,
            SchemeArg::HeunRenorm => Scheme::HeunRenorm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct EvolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: f64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long, value_enum, default_value = "rk4-renorm")]
    pub scheme: SchemeArg,
    /// CSV `t,H,P,M,Wr`.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Drift report JSON; defaults to `<out>.drift.json`, or stderr when
    /// the CSV goes to stdout.
    #[arg(long)]
    pub drift_out: Option<String>,
    /// Final field JSON.
    #[arg(long)]
    pub final_out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathMethodArg {
    GaussClosed,
    Angular,
}

impl From<PathMethodArg> for PathMethod {
    fn from(m: PathMethodArg) -> Self {
        match m {
            PathMethodArg::GaussClosed => PathMethod::GaussClosed,
            PathMethodArg::Angular => PathMethod::Angular,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct HomotopyArgs {
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    pub to: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "gauss-closed")]
    pub method: PathMethodArg,
    #[arg(long, default_value_t = DEFAULT_JUMP_TOL)]
    pub jump_tol: f64,
    #[arg(long, default_value_t = DEFAULT_RADIUS_FACTOR)]
    pub radius_factor: f64,
    /// CSV `lambda,Wr`.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Jump events JSON; defaults to `<out>.events.json`, or stderr.
    #[arg(long)]
    pub events_out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CloseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RADIUS_FACTOR)]
    pub radius_factor: f64,
    #[arg(long, default_value_t = DEFAULT_ARC_SEGMENTS)]
    pub arc_segments: usize,
    /// Export the open curve instead.
    #[arg(long)]
    pub open: bool,
    /// CSV `s,x,y,z,tx,ty,tz`.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Sidecar JSON; defaults to `<out>.json`, or stderr.
    #[arg(long)]
    pub sidecar_out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Json(j) => match j.classify() {
                serde_json::error::Category::Data => EXIT_VALIDATION,
                _ => EXIT_IO,
            },
            Error::NumericalBlowUp { .. }
            | Error::DegenerateCurve(_)
            | Error::InsufficientResolution { .. }
            | Error::PathClosure { .. }
            | Error::ShortTrace(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        let mut message = e.to_string();
        let mut src = std::error::Error::source(&e);
        while let Some(s) = src {
            message.push_str(": ");
            message.push_str(&s.to_string());
            src = s.source();
        }
        CliError { code, message }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

/// Parses and validates an argument vector (including the program name).
///
/// Help and version requests come back as errors with code 0.
pub fn parse_args<I, T>(argv: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = RunConfig::try_parse_from(argv).map_err(|e| CliError {
        code: e.exit_code(),
        message: e.render().to_string(),
    })?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> CliResult<()> {
    match &cfg.command {
        Command::Generate(g) => {
            if !(g.s_min.is_finite() && g.s_max.is_finite() && g.s_min < g.s_max) {
                return Err(CliError::validation("--s-min must be below --s-max"));
            }
            if g.n < crate::grid_field::MIN_NODES {
                return Err(CliError::validation(format!(
                    "--n must be at least {}",
                    crate::grid_field::MIN_NODES
                )));
            }
            if g.kind == FieldKind::Twist {
                positive("w", g.w)?;
                positive("w-phi", g.w_phi)?;
            }
            if g.kind == FieldKind::Random && !(g.amplitude >= 0.0 && g.amplitude.is_finite()) {
                return Err(CliError::validation("--amplitude must be non-negative"));
            }
        }
        Command::Measure(m) => {
            positive("j", m.coupling)?;
            positive("radius-factor", m.radius_factor)?;
        }
        Command::Evolve(e) => {
            positive("dt", e.dt)?;
            if !(e.t_end >= 0.0 && e.t_end.is_finite()) {
                return Err(CliError::validation("--t-end must be non-negative"));
            }
            if e.record_every == 0 {
                return Err(CliError::validation("--record-every must be at least 1"));
            }
        }
        Command::Homotopy(h) => {
            if h.steps < 2 {
                return Err(CliError::validation("--steps must be at least 2"));
            }
            if !(h.jump_tol > 0.0 && h.jump_tol < 1.0) {
                return Err(CliError::validation("--jump-tol must lie in (0, 1)"));
            }
            positive("radius-factor", h.radius_factor)?;
        }
        Command::Close(c) => {
            positive("radius-factor", c.radius_factor)?;
            if c.arc_segments < 2 {
                return Err(CliError::validation("--arc-segments must be at least 2"));
            }
        }
        Command::Bench(b) => {
            if b.n < BENCH_MIN_N {
                return Err(CliError::validation(format!(
                    "--n must be at least {BENCH_MIN_N}"
                )));
            }
        }
    }
    Ok(())
}

fn open_out(path: &str) -> CliResult<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("{path}: {e}"),
        })?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

/// Companion output: explicit path, `<out><suffix>`, or stderr.
fn open_companion(explicit: &Option<String>, out: &str, suffix: &str) -> CliResult<Box<dyn Write>> {
    match explicit {
        Some(p) => open_out(p),
        None if out == "-" => Ok(Box::new(io::stderr())),
        None => open_out(&format!("{out}{suffix}")),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn read_field(path: &Path) -> CliResult<SpinField> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })?;
    SpinField::from_json(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub threads: usize,
    pub pairs: u64,
    pub wall_time_s: f64,
    pub serial_time_s: f64,
    pub pairs_per_sec: f64,
    pub writhe: f64,
    pub serial_writhe: f64,
    pub delta: f64,
}

/// Times the Gauss kernel on the standard closed helix of `n` vertices,
/// serially and on `threads` workers (0 = all cores).
pub fn run_bench(n: usize, threads: usize) -> crate::Result<BenchReport> {
    if n < BENCH_MIN_N {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("{n} < {BENCH_MIN_N}"),
        });
    }
    let curve = helical_closure(n);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "threads",
            reason: e.to_string(),
        })?;
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "threads",
            reason: e.to_string(),
        })?;
    let t0 = Instant::now();
    let serial_writhe = writhe_gauss_in(&serial_pool, &curve)?;
    let serial_time_s = t0.elapsed().as_secs_f64();
    let t0 = Instant::now();
    let writhe = writhe_gauss_in(&pool, &curve)?;
    let wall_time_s = t0.elapsed().as_secs_f64();
    let segs = (curve.len() - 1) as u64;
    let pairs = segs * (segs - 3) / 2;
    let delta = (writhe - serial_writhe).abs();
    if delta > 1e-12 {
        return Err(Error::NumericalBlowUp { t_last: delta });
    }
    Ok(BenchReport {
        n,
        threads: pool.current_num_threads(),
        pairs,
        wall_time_s,
        serial_time_s,
        pairs_per_sec: pairs as f64 / wall_time_s.max(1e-12),
        writhe,
        serial_writhe,
        delta,
    })
}

/// Executes a parsed configuration.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::validation(format!("--threads: {e}")))?;
    pool.install(|| execute(cfg))
}

fn execute(cfg: &RunConfig) -> CliResult<()> {
    match &cfg.command {
        Command::Generate(g) => {
            let grid = Grid::new(g.s_min, g.s_max, g.n)?;
            let field = match g.kind {
                FieldKind::Ground => ground_state(grid),
                FieldKind::Twist => {
                    twist_profile(grid, TwistParams::new(g.theta0, g.w, g.dphi, g.w_phi, g.s0))?
                }
                FieldKind::Random => random_field(grid, cfg.seed, g.modes, g.amplitude)?,
            };
            let mut out = open_out(&g.out)?;
            write_json(&mut *out, &field)
        }
        Command::Measure(m) => {
            let field = read_field(&m.input)?;
            let obs = Observables::measure(&field, m.coupling)?;
            let bounds = match energy_bound_check(&field, m.coupling) {
                Ok(b) => serde_json::to_value(b).map_err(Error::from)?,
                Err(Error::BoundUndefined { .. }) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            let report = measure_writhe(&field, m.method.into(), m.radius_factor)?;
            let doc = json!({
                "H": obs.energy,
                "P": obs.momentum,
                "M": obs.magnetization,
                "Wr": obs.writhe,
                "bounds": bounds,
                "writhe": report,
            });
            let mut out = open_out(&m.out)?;
            write_json(&mut *out, &doc)
        }
        Command::Evolve(e) => {
            let field = read_field(&e.input)?;
            let limit = CFL_LIMIT * field.h() * field.h();
            if e.dt > limit {
                return Err(Error::TimeStepTooLarge { dt: e.dt, limit }.into());
            }
            let trace = evolve(&field, e.t_end, e.dt, e.record_every, e.scheme.into())?;
            let drift = drift_report(&trace)?;
            let mut out = open_out(&e.out)?;
            trace.write_csv(&mut out)?;
            out.flush()?;
            let mut side = open_companion(&e.drift_out, &e.out, ".drift.json")?;
            write_json(&mut *side, &drift)?;
            if let (Some(path), Some(f)) = (&e.final_out, &trace.final_field) {
                let mut fo = open_out(path)?;
                write_json(&mut *fo, f)?;
            }
            Ok(())
        }
        Command::Homotopy(h) => {
            let a = read_field(&h.from)?;
            let b = read_field(&h.to)?;
            let path = homotopy_path(&a, &b, h.steps)?;
            let series = writhe_along_path_with(&path, h.method.into(), h.radius_factor)?;
            let mut out = open_out(&h.out)?;
            writeln!(out, "lambda,Wr")?;
            for (l, w) in path.lambdas.iter().zip(&series) {
                writeln!(out, "{l},{w}")?;
            }
            out.flush()?;
            let events = detect_jumps(&series, &path.lambdas, h.jump_tol)?;
            let mut side = open_companion(&h.events_out, &h.out, ".events.json")?;
            write_json(&mut *side, &events)
        }
        Command::Close(c) => {
            let field = read_field(&c.input)?;
            let open = integrate_tangent(&field);
            let (curve, rf) = if c.open {
                (open, None)
            } else {
                let opts = ClosureOptions {
                    radius_factor: c.radius_factor,
                    arc_segments: c.arc_segments,
                    tangent_tol: CLOSURE_TANGENT_TOL,
                };
                (close_at_infinity_with(&open, &opts)?, Some(c.radius_factor))
            };
            let mut out = open_out(&c.out)?;
            curve.write_csv(&mut out)?;
            out.flush()?;
            let mut side = open_companion(&c.sidecar_out, &c.out, ".json")?;
            write_json(&mut *side, &curve.sidecar(rf))
        }
        Command::Bench(b) => {
            let report = run_bench(b.n, cfg.threads)?;
            let mut out = open_out(&b.out)?;
            write_json(&mut *out, &report)
        }
    }
}

/// Parses, runs and reports; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_args(argv).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) if e.code == EXIT_OK => {
            print!("{}", e.message);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("spinwrithe: {}", e.message.trim_end());
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<RunConfig> {
        parse_args(std::iter::once("spinwrithe").chain(args.iter().copied()))
    }

    #[test]
    fn measure_parses() {
        let cfg = parse(&["measure", "--in", "f.json", "--method", "all"]).unwrap();
        assert_eq!(cfg.seed, 0);
        match cfg.command {
            Command::Measure(m) => {
                assert_eq!(m.method, MethodArg::All);
                assert_eq!(m.input, PathBuf::from("f.json"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_dt_is_validation_error() {
        let err = parse(&["evolve", "--in", "f.json", "--t-end", "1", "--dt", "-1"]).unwrap_err();
        assert_eq!(err.code, EXIT_VALIDATION);
    }

    #[test]
    fn bench_parses_with_global_threads() {
        let cfg = parse(&["bench", "--n", "4096", "--threads", "8"]).unwrap();
        assert_eq!(cfg.threads, 8);
        assert!(matches!(
            cfg.command,
            Command::Bench(BenchArgs { n: 4096, .. })
        ));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            parse(&["measure", "--in", "f.json", "--bogus"])
                .unwrap_err()
                .code,
            EXIT_USAGE
        );
        assert_eq!(parse(&["measure"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse(&["frobnicate"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(
            parse(&["bench", "--n", "10"]).unwrap_err().code,
            EXIT_VALIDATION
        );
        assert_eq!(parse(&["--help"]).unwrap_err().code, EXIT_OK);
    }

    #[test]
    fn unreadable_input_is_io_error() {
        let cfg = parse(&["measure", "--in", "/nonexistent/field.json"]).unwrap();
        assert_eq!(run(&cfg).unwrap_err().code, EXIT_IO);
    }

    #[test]
    fn bench_small() {
        let r = run_bench(64, 1).unwrap();
        assert!(r.writhe.is_finite() && r.wall_time_s >= 0.0);
        assert_eq!(r.delta, 0.0);
        assert!(run_bench(32, 1).is_err());
    }
}
