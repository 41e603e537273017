//! `ee-opt` command line: argument parsing, dispatch and output.
//!
//! Single results are written as flat JSON objects, tables as CSV (or a JSON
//! array with `--format json`). Output is buffered by the caller so a failed
//! run never emits partial results.

pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{
    emit_config, load_config, parse_run_config, ConfigError, OutputFormat, RunConfig,
};

use crate::closedform::{
    ee_max_asymptotic, optimal_antennas, optimal_m_asymptotic, optimal_power, optimal_psd_ratio,
    power_per_antenna_ratio, rate_at_optimal_ratio,
};
use crate::jointopt::{boundary_diagnosis, joint_optimize, OptimizationResult, TraceEntry};
use crate::lambertw::{lambert_w0, DEFAULT_TOL};
use crate::model::{energy_efficiency, ChannelGain, DesignPoint, HardwareProfile, Limits};
use crate::numericopt::{
    brute_force_optimum, ee_surface, optimal_bandwidth, BracketSearchConfig, GridAxis,
    GridOracleConfig, SurfaceAxis, SurfaceRow, SurfaceSpec,
};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "EE_OPT_CONFIG";

#[derive(Debug, Parser)]
#[command(
    name = "ee-opt",
    version,
    about = "Energy-efficient power, bandwidth and antenna count"
)]
pub struct Cli {
    /// Configuration file (overrides $EE_OPT_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override the channel gain from the configuration (dB).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_db: Option<f64>,

    /// Table output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write results to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Jointly optimize P, B and M under the configured limits.
    Optimize {
        /// Also write the iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Evaluate EE over a grid of operating points.
    Sweep(SweepArgs),
    /// Optimal power spectral density P/B for M antennas.
    RatioPb {
        /// Antenna count; defaults to the EE-optimal count.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Optimal transmit power per antenna at bandwidth B.
    RatioPm {
        /// Bandwidth in Hz; defaults to b_max.
        #[arg(long)]
        b: Option<f64>,
    },
    /// EE-optimal power for fixed B and M.
    OptP {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        m: f64,
    },
    /// EE-optimal bandwidth for fixed P and M.
    OptB {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
    },
    /// EE-optimal (real) antenna count for fixed B and P.
    OptM {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        p: f64,
    },
    /// Evaluate the Lambert W function (principal branch).
    Lambertw {
        #[arg(allow_hyphen_values = true)]
        x: f64,
    },
    /// Refined brute-force grid search over (P, B, M).
    Oracle {
        /// Refinement rounds.
        #[arg(long, default_value_t = 3)]
        refine: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Optimize { .. } => "optimize",
            Command::Sweep(_) => "sweep",
            Command::RatioPb { .. } => "ratio-pb",
            Command::RatioPm { .. } => "ratio-pm",
            Command::OptP { .. } => "opt-p",
            Command::OptB { .. } => "opt-b",
            Command::OptM { .. } => "opt-m",
            Command::Lambertw { .. } => "lambertw",
            Command::Oracle { .. } => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisName {
    P,
    B,
    M,
}

/// `--axis NAME --from X --to Y --points N [--log]`, repeatable per axis.
#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, action = clap::ArgAction::Append)]
    pub axis: Vec<AxisName>,
    #[arg(long, allow_hyphen_values = true, action = clap::ArgAction::Append)]
    pub from: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, action = clap::ArgAction::Append)]
    pub to: Vec<f64>,
    #[arg(long, action = clap::ArgAction::Append)]
    pub points: Vec<usize>,
    /// Log-space the preceding axis.
    #[arg(long, action = clap::ArgAction::Append, num_args = 0, default_missing_value = "true")]
    pub log: Vec<bool>,
    /// Fixed transmit power (W) when p is not swept; defaults to p_max.
    #[arg(long)]
    pub p: Option<f64>,
    /// Fixed bandwidth (Hz) when b is not swept; defaults to b_max.
    #[arg(long)]
    pub b: Option<f64>,
    /// Fixed antenna count when m is not swept; defaults to 1.
    #[arg(long)]
    pub m: Option<f64>,
    /// Tie P to the optimal P/B ratio of each row's antenna count.
    #[arg(long)]
    pub optimal_ratio: bool,
    /// Which axes carry `--log`, filled in from argument positions.
    #[arg(skip)]
    pub log_axes: Vec<bool>,
}

/// Parses arguments, resolving which axis each `--log` belongs to.
pub fn parse_args<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = Cli::command().try_get_matches_from(args)?;
    let mut cli = Cli::from_arg_matches(&matches)?;
    if let Command::Sweep(sweep) = &mut cli.command {
        if let Some(("sweep", sub)) = matches.subcommand() {
            sweep.log_axes = log_flags(sub, sweep.axis.len());
        }
    }
    Ok(cli)
}

fn log_flags(sub: &ArgMatches, n_axes: usize) -> Vec<bool> {
    let axis_at: Vec<usize> = sub
        .indices_of("axis")
        .map(|it| it.collect())
        .unwrap_or_default();
    let mut flags = vec![false; n_axes];
    if sub.value_source("log") != Some(clap::parser::ValueSource::CommandLine) {
        return flags;
    }
    for idx in sub.indices_of("log").into_iter().flatten() {
        if let Some(owner) = axis_at.iter().rposition(|&a| a < idx) {
            flags[owner] = true;
        }
    }
    flags
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Structured error report for stderr.
    pub fn to_json(&self, subcommand: &str) -> Value {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        };
        json!({ "error": self.to_string(), "kind": kind, "subcommand": subcommand })
    }
}

/// Formats a float with 12 significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_surface_csv(rows: &[SurfaceRow], out: &mut dyn Write) -> std::io::Result<()> {
    out.write_all(b"p_w,b_hz,m,ee_bit_per_j\n")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            sci(r.p_w),
            sci(r.b_hz),
            sci(r.m),
            sci(r.ee_bit_per_j)
        )?;
    }
    Ok(())
}

pub fn write_trace_csv(trace: &[TraceEntry], out: &mut dyn Write) -> std::io::Result<()> {
    out.write_all(b"iteration,p_w,b_hz,m,ee_bit_per_j\n")?;
    for t in trace {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.iteration,
            sci(t.p),
            sci(t.b),
            sci(t.m),
            sci(t.ee)
        )?;
    }
    Ok(())
}

fn result_json(r: &OptimizationResult, hw: &HardwareProfile) -> Value {
    let report = boundary_diagnosis(r, hw);
    json!({
        "p_w": r.point.p,
        "b_hz": r.point.b,
        "m": r.point.m,
        "ee_bit_per_j": r.ee,
        "cap_bit_per_s": r.capacity,
        "snr_db": r.snr_db,
        "active_constraints": r.active_constraints.names(),
        "regime": report.regime.to_string(),
        "power_per_antenna_w": report.power_per_antenna_w,
        "ratio_gap": report.ratio_gap,
        "iterations": r.iterations,
    })
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn ee_at(p: f64, b: f64, m: f64, hw: &HardwareProfile, ch: &ChannelGain) -> Result<f64, CliError> {
    Ok(energy_efficiency(&DesignPoint::new(p, b, m)?, hw, ch))
}

/// Applies command-line overrides to a parsed configuration.
pub fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) {
    if let Some(db) = cli.beta_db {
        cfg.beta_db = db;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(path) = &cli.output {
        cfg.output = Some(path.display().to_string());
    }
}

/// Runs one subcommand against a configuration, writing its result to `out`.
pub fn run(cmd: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let (hw, ch, limits) = cfg.resolve()?;
    match cmd {
        Command::Optimize { trace } => {
            let r = joint_optimize(&hw, &ch, &limits)?;
            if let Some(path) = trace {
                let mut buf = Vec::new();
                write_trace_csv(&r.trace, &mut buf)?;
                std::fs::write(path, buf)?;
            }
            write_json(out, &result_json(&r, &hw))
        }
        Command::Oracle { refine } => {
            let grid = GridOracleConfig {
                refine_rounds: *refine,
                ..GridOracleConfig::for_limits(&limits)
            };
            let r = brute_force_optimum(&hw, &ch, &limits, &grid)?;
            write_json(out, &result_json(&r, &hw))
        }
        Command::Sweep(args) => {
            let spec = surface_spec(args, &limits)?;
            let rows = ee_surface(&spec, &hw, &ch)?;
            match cfg.format {
                OutputFormat::Csv => write_surface_csv(&rows, out)?,
                OutputFormat::Json => {
                    serde_json::to_writer(&mut *out, &rows).map_err(std::io::Error::from)?;
                    out.write_all(b"\n")?;
                }
            }
            Ok(())
        }
        Command::RatioPb { m } => {
            let m = match m {
                Some(m) => *m,
                None => optimal_m_asymptotic(&hw, &ch, limits.m_max)?,
            };
            let r = optimal_psd_ratio(m as f64, &hw, &ch)?;
            let rate_per_hz = if r.u > 0.0 {
                Some(rate_at_optimal_ratio(1.0, r.u)?)
            } else {
                None
            };
            write_json(
                out,
                &json!({
                    "m": m,
                    "u": r.u,
                    "snr": r.snr_star,
                    "snr_db": r.snr_db(),
                    "z_star_w_per_hz": r.z_star,
                    "ee_max_bit_per_j": ee_max_asymptotic(m as f64, &hw, &ch)?,
                    "rate_per_hz_bit_per_s": rate_per_hz,
                    "degenerate": r.degenerate.map(|d| d.to_string()),
                }),
            )
        }
        Command::RatioPm { b } => {
            let b = b.unwrap_or(limits.b_max);
            write_json(
                out,
                &json!({
                    "b_hz": b,
                    "p_per_m_w": power_per_antenna_ratio(b, &hw)?,
                }),
            )
        }
        Command::OptP { b, m } => {
            let s = optimal_power(*b, *m, &hw, &ch)?;
            let ee = if s.p > 0.0 {
                Some(ee_at(s.p, *b, *m, &hw, &ch)?)
            } else {
                None
            };
            write_json(
                out,
                &json!({
                    "b_hz": b,
                    "m": m,
                    "p_w": s.p,
                    "v": s.v,
                    "ee_bit_per_j": ee,
                    "degenerate": s.degenerate.map(|d| d.to_string()),
                }),
            )
        }
        Command::OptB { p, m } => {
            let s = optimal_bandwidth(
                *p,
                *m,
                &hw,
                &ch,
                &BracketSearchConfig::with_upper(limits.b_max),
            )?;
            write_json(
                out,
                &json!({
                    "p_w": p,
                    "m": m,
                    "b_hz": s.b,
                    "ee_bit_per_j": ee_at(*p, s.b, *m, &hw, &ch)?,
                    "residual": s.residual,
                    "bisection_steps": s.bisection_steps,
                }),
            )
        }
        Command::OptM { b, p } => {
            let s = optimal_antennas(*b, *p, &hw, &ch)?;
            write_json(
                out,
                &json!({
                    "b_hz": b,
                    "p_w": p,
                    "m": s.m,
                    "w": s.w,
                    "ee_bit_per_j": ee_at(*p, *b, s.m, &hw, &ch)?,
                }),
            )
        }
        Command::Lambertw { x } => {
            let w = lambert_w0(*x, DEFAULT_TOL)?;
            write_json(
                out,
                &json!({ "x": x, "w": w, "residual": (w * w.exp() - x).abs() }),
            )
        }
    }
}

fn surface_spec(args: &SweepArgs, limits: &Limits) -> Result<SurfaceSpec, CliError> {
    let n = args.axis.len();
    if n == 0 {
        return Err(CliError::Usage("sweep needs at least one --axis".into()));
    }
    if args.from.len() != n || args.to.len() != n || args.points.len() != n {
        return Err(CliError::Usage(
            "each --axis needs exactly one --from, --to and --points".into(),
        ));
    }
    let mut swept: [Option<GridAxis>; 3] = [None; 3];
    for i in 0..n {
        let slot = args.axis[i] as usize;
        if swept[slot].is_some() {
            return Err(CliError::Usage(format!(
                "axis {:?} given twice",
                args.axis[i]
            )));
        }
        let log = args.log_axes.get(i).copied().unwrap_or(false);
        swept[slot] = Some(GridAxis {
            lo: args.from[i],
            hi: args.to[i],
            points: args.points[i],
            log,
        });
    }
    let axis =
        |slot: usize, fixed: Option<f64>, default: f64, name: &str| match (swept[slot], fixed) {
            (Some(_), Some(_)) => Err(CliError::Usage(format!(
                "--{name} fixes an axis that is also swept"
            ))),
            (Some(a), None) => Ok(SurfaceAxis::Swept(a)),
            (None, v) => Ok(SurfaceAxis::Fixed(v.unwrap_or(default))),
        };
    let p = if args.optimal_ratio {
        if swept[0].is_some() || args.p.is_some() {
            return Err(CliError::Usage(
                "--optimal-ratio sets the power; do not sweep or fix p".into(),
            ));
        }
        SurfaceAxis::OptimalRatio
    } else {
        axis(0, args.p, limits.p_max, "p")?
    };
    Ok(SurfaceSpec {
        p,
        b: axis(1, args.b, limits.b_max, "b")?,
        m: axis(2, args.m, 1.0, "m")?,
    })
}
