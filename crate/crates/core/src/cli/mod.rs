//! Command-line front end.
//!
//! Each subcommand resolves its flags into a [`RunManifest`], computes every
//! output in memory and only then writes files, so argument errors (exit 2)
//! and numerical failures (exit 3) leave the output directory untouched.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::integrator::IntegratorConfig;
use crate::mathieu::DriveAmplitude;
use crate::scenario::{DriveParameters, ScenarioConfig};

pub use output::{fmt_f64, OutputFile, RunManifest, Settings, Table, TOOL, VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::CheckFailed(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

/// Closed interval written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span(pub f64, pub f64);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{v}` is not a finite number"))
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo >= hi {
            return Err(format!("empty range {lo}:{hi}"));
        }
        Ok(Span(lo, hi))
    }
}

impl Span {
    fn pair(self) -> [f64; 2] {
        [self.0, self.1]
    }
}

#[derive(Debug, Parser)]
#[command(name = "paramosc", version, about = "Parametrically driven coupled oscillators: stability, entanglement and phase-space data")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON scenario file with keys omega, g, delta_g, Omega, t0
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Relative (and absolute) tolerance of the adaptive integrator
    #[arg(long, global = true, value_name = "TOL")]
    pub rel_tol: Option<f64>,
    /// Use fixed-step RK4 with this step instead of the adaptive integrator
    #[arg(long, global = true, value_name = "H", conflicts_with = "rel_tol")]
    pub fixed_step: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long = "g", global = true)]
    pub g: Option<f64>,
    #[arg(long, global = true)]
    pub delta_g: Option<f64>,
    /// Drive amplitude as a fraction of g
    #[arg(long, global = true, conflicts_with = "delta_g")]
    pub delta_ratio: Option<f64>,
    /// Drive angular frequency
    #[arg(long = "Omega", visible_alias = "drive-freq", global = true)]
    pub drive_freq: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t0: Option<f64>,
}

impl GlobalArgs {
    fn overrides_run(&self) -> bool {
        self.config.is_some()
            || self.rel_tol.is_some()
            || self.fixed_step.is_some()
            || self.omega.is_some()
            || self.g.is_some()
            || self.delta_g.is_some()
            || self.delta_ratio.is_some()
            || self.drive_freq.is_some()
            || self.t0.is_some()
    }

    pub fn scenario(&self) -> Result<DriveParameters, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                ScenarioConfig::from_json(&text)?
            }
            None => ScenarioConfig::default(),
        };
        let set = |slot: &mut Option<f64>, v: Option<f64>| {
            if v.is_some() {
                *slot = v;
            }
        };
        set(&mut cfg.omega, self.omega);
        set(&mut cfg.g, self.g);
        set(&mut cfg.drive_freq, self.drive_freq);
        set(&mut cfg.t0, self.t0);
        set(&mut cfg.delta_g, self.delta_g);
        if let Some(r) = self.delta_ratio {
            if !(r.is_finite() && r >= 0.0) {
                return Err(CliError::Usage("invalid parameter `delta_ratio`: must be >= 0".into()));
            }
            cfg.delta_g = Some(r * cfg.g.unwrap_or(0.4));
        }
        Ok(cfg.resolve()?)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let cfg = match (self.fixed_step, self.rel_tol) {
            (Some(h), _) => IntegratorConfig::fixed(h),
            (None, Some(tol)) => IntegratorConfig::adaptive(tol),
            (None, None) => IntegratorConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Mathieu stability chart over an (a, b) grid → chart.csv
    StabilityChart(ChartArgs),
    /// Floquet exponents of both modes along a line of couplings → mode_line.csv
    ModeLine(ModeLineArgs),
    /// Linear and von Neumann entropy time series → entropy.csv, aux.csv
    Entropy(EntropyArgs),
    /// Wigner function grids of one oscillator → wigner_t{N}.csv
    Wigner(WignerArgs),
    /// Joint ground-state density grids over (x1, x2) → density_t{N}.csv
    Density(DensityArgs),
    /// Coupled-system constraint drift and normal-mode equivalence → general.csv
    GeneralCheck(GeneralArgs),
    /// Re-run a manifest.json written by an earlier run
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ChartArgs {
    #[arg(long, default_value = "-1:9", allow_hyphen_values = true, value_name = "LO:HI")]
    pub a: Span,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true, value_name = "LO:HI")]
    pub b: Span,
    /// Grid points per axis
    #[arg(long, default_value_t = 101)]
    pub res: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ModeLineArgs {
    /// Static coupling range; only omega and Omega are taken from the scenario
    #[arg(long = "g-range", default_value = "0.3:0.5", allow_hyphen_values = true, value_name = "LO:HI")]
    pub g_range: Span,
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    /// Drive amplitude as a fraction of each g
    #[arg(long, default_value_t = 0.1, conflicts_with = "fixed_delta_g")]
    pub ratio: f64,
    /// Same drive amplitude for every g
    #[arg(long)]
    pub fixed_delta_g: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    /// End of the run in units of Omega·t
    #[arg(long = "t-max", default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    /// Snapshot times in units of Omega·t
    #[arg(long, value_delimiter = ',', default_value = "0,32,50")]
    pub times: Vec<f64>,
    #[arg(long, default_value = "-8:8", allow_hyphen_values = true, value_name = "LO:HI")]
    pub q: Span,
    #[arg(long, default_value = "-8:8", allow_hyphen_values = true, value_name = "LO:HI")]
    pub p: Span,
    #[arg(long, default_value_t = 400)]
    pub res: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    /// Snapshot times in units of Omega·t
    #[arg(long, value_delimiter = ',', default_value = "0,32,50")]
    pub times: Vec<f64>,
    /// Window for both x1 and x2 [default: five widest-mode widths]
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI")]
    pub x: Option<Span>,
    #[arg(long, default_value_t = 400)]
    pub res: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GeneralArgs {
    /// Number of drive periods to integrate (runs at --rel-tol 1e-12 unless
    /// a tolerance or fixed step is given)
    #[arg(long, default_value_t = 100.0)]
    pub periods: f64,
    /// Largest acceptable constraint drift
    #[arg(long, default_value_t = 1e-8)]
    pub drift_tol: f64,
    /// Largest acceptable relative difference between the two solution paths
    #[arg(long, default_value_t = 1e-6)]
    pub path_tol: f64,
    /// Perturb the initial auxiliary matrix so the seed check must fail
    #[arg(long)]
    pub corrupt_seed: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

const MAX_RES: usize = 4096;

/// Default tolerance of `general-check` when none is given.
pub const GENERAL_CHECK_TOL: f64 = 1e-12;

fn check_res(key: &str, res: usize) -> Result<(), CliError> {
    if (2..=MAX_RES).contains(&res) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("invalid parameter `{key}`: need 2..={MAX_RES}, got {res}")))
    }
}

fn check_times(times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Usage("invalid parameter `times`: need finite values".into()));
    }
    Ok(())
}

fn settings_for(cmd: &Command) -> Result<Settings, CliError> {
    Ok(match cmd {
        Command::StabilityChart(a) => {
            check_res("res", a.res)?;
            Settings::StabilityChart {
                a_range: a.a.pair(),
                b_range: a.b.pair(),
                resolution: a.res,
            }
        }
        Command::ModeLine(a) => {
            if a.n < 2 {
                return Err(CliError::Usage("invalid parameter `n`: need at least 2".into()));
            }
            if a.g_range.0 < 0.0 {
                return Err(CliError::Usage("invalid parameter `g-range`: need g >= 0".into()));
            }
            let amplitude = match a.fixed_delta_g {
                Some(dg) if dg.is_finite() && dg >= 0.0 => DriveAmplitude::Fixed(dg),
                Some(_) => return Err(CliError::Usage("invalid parameter `fixed-delta-g`: need >= 0".into())),
                None if a.ratio.is_finite() && (0.0..1.0).contains(&a.ratio) => DriveAmplitude::Ratio(a.ratio),
                None => return Err(CliError::Usage("invalid parameter `ratio`: need 0 <= ratio < 1".into())),
            };
            Settings::ModeLine {
                g_range: a.g_range.pair(),
                samples: a.n,
                amplitude,
            }
        }
        Command::Entropy(a) => {
            if a.samples < 2 {
                return Err(CliError::Usage("invalid parameter `samples`: need at least 2".into()));
            }
            if !a.t_max.is_finite() {
                return Err(CliError::Usage("invalid parameter `t-max`: must be finite".into()));
            }
            Settings::Entropy {
                omega_t_max: a.t_max,
                samples: a.samples,
            }
        }
        Command::Wigner(a) => {
            check_res("res", a.res)?;
            check_times(&a.times)?;
            Settings::Wigner {
                omega_t: a.times.clone(),
                q_range: a.q.pair(),
                p_range: a.p.pair(),
                resolution: a.res,
            }
        }
        Command::Density(a) => {
            check_res("res", a.res)?;
            check_times(&a.times)?;
            Settings::Density {
                omega_t: a.times.clone(),
                x_range: a.x.map(Span::pair),
                resolution: a.res,
            }
        }
        Command::GeneralCheck(a) => {
            if !(a.periods.is_finite() && a.periods > 0.0) {
                return Err(CliError::Usage("invalid parameter `periods`: must be positive".into()));
            }
            if !(a.drift_tol > 0.0 && a.path_tol > 0.0) {
                return Err(CliError::Usage("invalid parameter: tolerances must be positive".into()));
            }
            Settings::GeneralCheck {
                periods: a.periods,
                drift_tol: a.drift_tol,
                path_tol: a.path_tol,
                corrupt_seed: a.corrupt_seed,
            }
        }
        Command::Replay(_) => unreachable!("replay has no settings of its own"),
    })
}

/// Resolves the command line into a manifest without computing anything.
pub fn resolve(cli: &Cli) -> Result<RunManifest, CliError> {
    if let Command::Replay(r) = &cli.command {
        if cli.global.overrides_run() {
            return Err(CliError::Usage(
                "replay takes scenario and integrator settings from the manifest; only --out is accepted".into(),
            ));
        }
        let text = std::fs::read_to_string(&r.manifest)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", r.manifest.display())))?;
        let mut m = RunManifest::from_json(&text)?;
        m.integrator.validate()?;
        if m.subcommand != m.settings.subcommand() {
            return Err(CliError::Usage(format!(
                "manifest subcommand `{}` does not match its settings",
                m.subcommand
            )));
        }
        if let Some(out) = &cli.global.out {
            m.out_dir = out.clone();
        }
        return Ok(m);
    }
    let params = cli.global.scenario()?;
    let mut integrator = cli.global.integrator()?;
    if matches!(cli.command, Command::GeneralCheck(_)) && cli.global.rel_tol.is_none() && cli.global.fixed_step.is_none() {
        // the 1e-8 drift bound over 100 periods is out of reach at 1e-10
        integrator = IntegratorConfig::adaptive(GENERAL_CHECK_TOL);
    }
    let settings = settings_for(&cli.command)?;
    let out = cli.global.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    Ok(RunManifest::new(params, integrator, out, settings))
}

/// Computes and writes all outputs; returns a one-line summary.
pub fn execute(manifest: &RunManifest) -> Result<String, CliError> {
    let run = commands::run(manifest)?;
    output::write_outputs(manifest, &run.files)?;
    match run.failure {
        Some(msg) => Err(CliError::CheckFailed(msg)),
        None => Ok(run.summary),
    }
}

/// Parses `args`, runs, reports to stdout/stderr and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli).and_then(|m| execute(&m).map(|s| (m, s)));
    match result {
        Ok((m, summary)) => {
            println!("{summary}");
            println!("wrote {}", m.out_dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
