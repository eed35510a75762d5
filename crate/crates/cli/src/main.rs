//! `levsqueeze`: recoil sweeps, scattering patterns, sensitivity curves,
//! beam optimization and Wigner data for squeezed-light levitated
//! optomechanics.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levsqueeze::angular::{Axis, QuadSpec};
use levsqueeze::detect::WignerSource;
use levsqueeze::optimize::{BeamFamily, Objective};
use levsqueeze::phase::parse_range;
use levsqueeze::physics::ModeKind;
use levsqueeze::scatter::{CrossSectionUnits, GridSpec};
use levsqueeze::squeeze::PhaseReference;

use config::{parse_beam, parse_bound, Config, ScanSection};

#[derive(Debug)]
pub enum CliError {
    Config { field: String, reason: String },
    Core(levsqueeze::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(levsqueeze::Error::Numerical(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, reason } => write!(f, "invalid {field}: {reason}"),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<levsqueeze::Error> for CliError {
    fn from(e: levsqueeze::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser)]
#[command(name = "levsqueeze", version, about = "Squeezed-light recoil, scattering and sensitivity for levitated particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recoil heating ratio over squeezing level and phase.
    Recoil(RecoilArgs),
    /// Differential cross section and information radiation pattern.
    Irp(IrpArgs),
    /// Minimum detectable signal relative to the standard quantum limit.
    Sensitivity(SensitivityArgs),
    /// Search beam parameters for the lowest recoil or detection noise.
    Optimize(OptimizeArgs),
    /// Covariance and Wigner function of the input light.
    Wigner(WignerArgs),
}

#[derive(Args)]
struct Common {
    /// JSON configuration; relative paths fall back to $LEVSQUEEZE_CONFIG_DIR.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Quadrature resolution, NTHETAxNPHI.
    #[arg(long)]
    quad: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PhysicsArgs {
    /// motion or libration.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    axis: Option<String>,
    /// Gaussian beam, e.g. na=0.9,axis=-z,pol=0. Repeatable.
    #[arg(long)]
    beam: Vec<String>,
    /// Squeezing in dB: value, list or a:b:step.
    #[arg(long)]
    db: Option<String>,
    /// Squeezing degree r, instead of --db.
    #[arg(long)]
    r: Option<String>,
    /// Squeezing phase; pi literals such as 3pi/2 are exact.
    #[arg(long, allow_hyphen_values = true)]
    phase: Option<String>,
    /// Read --phase as the absolute phase rather than relative to 2 arg(ξ).
    #[arg(long)]
    absolute_phase: bool,
}

#[derive(Args)]
struct RecoilArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Only the |ξ| = 1 column.
    #[arg(long)]
    perfect_overlap: bool,
}

#[derive(Args)]
struct IrpArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Plot grid, NTHETAxNPHI.
    #[arg(long)]
    grid: Option<String>,
    /// shape or absolute.
    #[arg(long)]
    units: Option<String>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Overlap modulus |ξ|.
    #[arg(long)]
    xi: Option<f64>,
    /// ω/Ω; the low-frequency limit when omitted.
    #[arg(long)]
    omega_ratio: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Free parameter with bounds, e.g. na=0.1:0.95. Repeatable; replaces the configured set.
    #[arg(long)]
    free: Vec<String>,
    #[arg(long)]
    budget: Option<usize>,
    /// recoil_ratio or s_min_opt.
    #[arg(long)]
    objective: Option<String>,
    /// gaussian, pair or perfect.
    #[arg(long)]
    family: Option<String>,
    /// One-dimensional scan, e.g. na=0.1:0.95:18.
    #[arg(long)]
    scan: Option<String>,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// interacting-input or bare-mode.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

fn enum_flag<T: serde::de::DeserializeOwned>(field: &str, v: &str) -> Result<T, CliError> {
    serde_json::from_value(serde_json::Value::String(v.to_string()))
        .map_err(|_| CliError::config(field, format!("unsupported value `{v}`")))
}

fn parse_grid(field: &str, s: &str) -> Result<(usize, usize), CliError> {
    let q: QuadSpec = s
        .parse()
        .map_err(|_| CliError::config(field, format!("expected NxM, got `{s}`")))?;
    Ok((q.n_theta, q.n_phi))
}

fn base_config(common: &Common) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(q) = &common.quad {
        cfg.quad = q.parse()?;
    }
    if let Some(t) = common.threads {
        cfg.threads = Some(t);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    setup_threads(&cfg)?;
    Ok(cfg)
}

fn apply_physics(cfg: &mut Config, a: &PhysicsArgs) -> Result<(), CliError> {
    let axis = match &a.axis {
        Some(s) => s.parse::<Axis>()?,
        None => cfg.mode.axis(),
    };
    cfg.mode = match a.mode.as_deref() {
        None => match cfg.mode {
            ModeKind::Motion(_) => ModeKind::Motion(axis),
            ModeKind::Libration(_) => ModeKind::Libration(axis),
        },
        Some("motion") => ModeKind::Motion(axis),
        Some("libration") => ModeKind::Libration(axis),
        Some(other) => return Err(CliError::config("mode", format!("expected motion or libration, got `{other}`"))),
    };
    if !a.beam.is_empty() {
        cfg.beams = a.beam.iter().map(|b| parse_beam(b)).collect::<Result<_, _>>()?;
    }
    if let Some(d) = &a.db {
        cfg.squeezer.db = parse_range("db", d)?;
        cfg.squeezer.r = None;
    }
    if let Some(r) = &a.r {
        cfg.squeezer.r = Some(parse_range("r", r)?);
    }
    if let Some(p) = &a.phase {
        cfg.squeezer.phase = parse_range("phase", p)?;
    }
    if a.absolute_phase {
        cfg.squeezer.reference = PhaseReference::Absolute;
    }
    Ok(())
}

fn setup_threads(cfg: &Config) -> Result<(), CliError> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::config("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config("threads", e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Recoil(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_physics(&mut cfg, &a.physics)?;
            if a.perfect_overlap {
                cfg.recoil.perfect_overlap = true;
            }
            cfg.resolve()?;
            commands::recoil(&cfg, &a.common.out)
        }
        Command::Irp(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_physics(&mut cfg, &a.physics)?;
            if let Some(g) = &a.grid {
                let (n_theta, n_phi) = parse_grid("grid", g)?;
                cfg.irp.grid = GridSpec { n_theta, n_phi };
            }
            if let Some(u) = &a.units {
                cfg.irp.units = enum_flag::<CrossSectionUnits>("units", u)?;
            }
            cfg.resolve()?;
            commands::irp(&cfg, &a.common.out)
        }
        Command::Sensitivity(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_physics(&mut cfg, &a.physics)?;
            if let Some(x) = a.xi {
                cfg.sensitivity.xi = Some(x);
            }
            if let Some(w) = a.omega_ratio {
                cfg.sensitivity.omega_ratio = Some(w);
            }
            cfg.resolve()?;
            commands::sensitivity(&cfg, &a.common.out)
        }
        Command::Optimize(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_physics(&mut cfg, &a.physics)?;
            if !a.free.is_empty() {
                cfg.optimize.free = a.free.iter().map(|f| parse_bound(f)).collect::<Result<_, _>>()?;
            }
            if let Some(b) = a.budget {
                cfg.optimize.budget = b;
            }
            if let Some(o) = &a.objective {
                cfg.optimize.objective = enum_flag::<Objective>("objective", o)?;
            }
            if let Some(f) = &a.family {
                cfg.optimize.family = enum_flag::<BeamFamily>("family", f)?;
            }
            if let Some(s) = &a.scan {
                cfg.optimize.scan = Some(parse_scan(s)?);
            }
            cfg.resolve()?;
            commands::optimize(&cfg, &a.common.out)
        }
        Command::Wigner(a) => {
            let mut cfg = base_config(&a.common)?;
            apply_physics(&mut cfg, &a.physics)?;
            if let Some(s) = &a.source {
                cfg.wigner.source = enum_flag::<WignerSource>("source", s)?;
            }
            if let Some(x) = a.xi {
                cfg.wigner.xi = x;
            }
            if let Some(n) = a.points {
                cfg.wigner.points = n;
            }
            cfg.resolve()?;
            commands::wigner(&cfg, &a.common.out)
        }
    }
}

fn parse_scan(s: &str) -> Result<ScanSection, CliError> {
    let bad = || CliError::config("scan", format!("expected name=lo:hi:n, got `{s}`"));
    let (name, rest) = s.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let b = parse_bound(&format!("{name}={}:{}", parts[0], parts[1]))?;
    let n = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(ScanSection {
        parameter: b.parameter,
        lo: b.lo,
        hi: b.hi,
        n,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
