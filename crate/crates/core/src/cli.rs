//! `lambda-sim` command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config FILE`) whose keys
//! are exactly the long flag names, so `--gamma_t 5` overrides
//! `{"gamma_t": 5}`. Precedence is flags > file > defaults. The resolved
//! configuration is written next to every output as `config.json` and can be
//! fed straight back through `--config`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_regime, design_pulses, SuperpositionReport};
use crate::error::Error;
use crate::model::{Amplitudes, Envelope, LambdaParams, MixingAngle, PulseSpec};
use crate::propagator::{propagate_full, EvolutionRecord, IntegratorConfig};
use crate::sweep::{export_grid, format_sig12, run_sweep, AxisScale, AxisSpec, ExportFormat, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const EVOLUTION_CSV_HEADER: &str = "t,p1,p2,p3,loss";

#[derive(Parser, Debug)]
#[command(
    name = "lambda-sim",
    version,
    about = "Dark-state preparation in a Λ system with a decaying intermediate level"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagate one configuration and write the population time series and
    /// the final-state report.
    Evolve(CommandArgs),
    /// Final populations over an (omega0_t, gamma_t) grid.
    Sweep(CommandArgs),
    /// Pulse ratio for a target superposition a|1> + b|3>.
    Design(CommandArgs),
    /// Final-state report from an evolution CSV.
    Report(CommandArgs),
}

#[derive(Args, Debug)]
struct CommandArgs {
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigLayer,
}

/// One layer of configuration: a config file or the command-line flags.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    /// Per-pulse peak Rabi frequency times T.
    #[arg(long = "omega0_t", allow_negative_numbers = true)]
    pub omega0_t: Option<f64>,
    /// Decay rate of |2> times T.
    #[arg(long = "gamma_t", allow_negative_numbers = true)]
    pub gamma_t: Option<f64>,
    /// Single-photon detuning times T.
    #[arg(long = "delta_t", allow_negative_numbers = true)]
    pub delta_t: Option<f64>,
    /// Mixing angle in radians, tan(theta) = pump / Stokes.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// `gaussian`, `constant`, or a JSON custom table.
    #[arg(long, value_parser = parse_envelope)]
    pub envelope: Option<Envelope>,
    #[arg(long = "t_start", allow_negative_numbers = true)]
    pub t_start: Option<f64>,
    #[arg(long = "t_end", allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long = "rel_tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs_tol")]
    pub abs_tol: Option<f64>,
    #[arg(long = "max_step")]
    pub max_step: Option<f64>,
    #[arg(long = "sample_count")]
    pub sample_count: Option<usize>,
    #[arg(long = "max_steps")]
    pub max_steps: Option<usize>,
    #[arg(long = "omega_min")]
    pub omega_min: Option<f64>,
    #[arg(long = "omega_max")]
    pub omega_max: Option<f64>,
    #[arg(long = "omega_points")]
    pub omega_points: Option<usize>,
    /// `linear` or `log`.
    #[arg(long = "omega_scale", value_parser = parse_scale)]
    pub omega_scale: Option<AxisScale>,
    #[arg(long = "gamma_min")]
    pub gamma_min: Option<f64>,
    #[arg(long = "gamma_max")]
    pub gamma_max: Option<f64>,
    #[arg(long = "gamma_points")]
    pub gamma_points: Option<usize>,
    #[arg(long = "gamma_scale", value_parser = parse_scale)]
    pub gamma_scale: Option<AxisScale>,
    /// Worker threads for `sweep`.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sweep output format: `csv` or `json`.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<ExportFormat>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Target |1> component for `design`.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Target |3> component for `design`.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// `design`: also run `evolve` with the designed angle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub simulate: Option<bool>,
    /// Evolution CSV read by `report`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn parse_envelope(s: &str) -> Result<Envelope, String> {
    let trimmed = s.trim();
    let json = if trimmed.starts_with('{') || trimmed.starts_with('"') {
        trimmed.to_string()
    } else {
        format!("\"{trimmed}\"")
    };
    serde_json::from_str(&json).map_err(|e| format!("unknown envelope `{s}`: {e}"))
}

fn parse_scale(s: &str) -> Result<AxisScale, String> {
    match s {
        "linear" => Ok(AxisScale::Linear),
        "log" => Ok(AxisScale::Log),
        _ => Err(format!("unknown axis scale `{s}` (expected linear or log)")),
    }
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    match s {
        "csv" => Ok(ExportFormat::Csv),
        "json" => Ok(ExportFormat::Json),
        _ => Err(format!("unknown format `{s}` (expected csv or json)")),
    }
}

impl ConfigLayer {
    /// Values in `top` win over values in `self`.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            omega0_t: top.omega0_t.or(self.omega0_t),
            gamma_t: top.gamma_t.or(self.gamma_t),
            delta_t: top.delta_t.or(self.delta_t),
            theta: top.theta.or(self.theta),
            envelope: top.envelope.or(self.envelope),
            t_start: top.t_start.or(self.t_start),
            t_end: top.t_end.or(self.t_end),
            rel_tol: top.rel_tol.or(self.rel_tol),
            abs_tol: top.abs_tol.or(self.abs_tol),
            max_step: top.max_step.or(self.max_step),
            sample_count: top.sample_count.or(self.sample_count),
            max_steps: top.max_steps.or(self.max_steps),
            omega_min: top.omega_min.or(self.omega_min),
            omega_max: top.omega_max.or(self.omega_max),
            omega_points: top.omega_points.or(self.omega_points),
            omega_scale: top.omega_scale.or(self.omega_scale),
            gamma_min: top.gamma_min.or(self.gamma_min),
            gamma_max: top.gamma_max.or(self.gamma_max),
            gamma_points: top.gamma_points.or(self.gamma_points),
            gamma_scale: top.gamma_scale.or(self.gamma_scale),
            workers: top.workers.or(self.workers),
            format: top.format.or(self.format),
            output: top.output.or(self.output),
            a: top.a.or(self.a),
            b: top.b.or(self.b),
            simulate: top.simulate.or(self.simulate),
            input: top.input.or(self.input),
        }
    }
}

/// Fully resolved configuration. Serializes with the same keys as
/// [`ConfigLayer`], so an echoed config can be passed back via `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub omega0_t: f64,
    pub gamma_t: f64,
    pub delta_t: f64,
    pub theta: f64,
    pub envelope: Envelope,
    pub t_start: f64,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub sample_count: usize,
    pub max_steps: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub omega_scale: AxisScale,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_points: usize,
    pub gamma_scale: AxisScale,
    pub workers: usize,
    pub format: ExportFormat,
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub simulate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_layer(layer: ConfigLayer) -> Self {
        let integrator = IntegratorConfig::default();
        Self {
            omega0_t: layer.omega0_t.unwrap_or(10.0),
            gamma_t: layer.gamma_t.unwrap_or(10.0),
            delta_t: layer.delta_t.unwrap_or(0.0),
            theta: layer.theta.unwrap_or(std::f64::consts::FRAC_PI_4),
            envelope: layer.envelope.unwrap_or(Envelope::Gaussian),
            t_start: layer.t_start.unwrap_or(-6.0),
            t_end: layer.t_end.unwrap_or(6.0),
            rel_tol: layer.rel_tol.unwrap_or(integrator.rel_tol),
            abs_tol: layer.abs_tol.unwrap_or(integrator.abs_tol),
            max_step: layer.max_step.unwrap_or(integrator.max_step),
            sample_count: layer.sample_count.unwrap_or(integrator.sample_count),
            max_steps: layer.max_steps.unwrap_or(integrator.max_steps),
            omega_min: layer.omega_min.unwrap_or(0.1),
            omega_max: layer.omega_max.unwrap_or(20.0),
            omega_points: layer.omega_points.unwrap_or(50),
            omega_scale: layer.omega_scale.unwrap_or(AxisScale::Linear),
            gamma_min: layer.gamma_min.unwrap_or(0.1),
            gamma_max: layer.gamma_max.unwrap_or(20.0),
            gamma_points: layer.gamma_points.unwrap_or(50),
            gamma_scale: layer.gamma_scale.unwrap_or(AxisScale::Linear),
            workers: layer.workers.unwrap_or(1),
            format: layer.format.unwrap_or(ExportFormat::Csv),
            output: layer.output.unwrap_or_else(|| PathBuf::from("lambda-sim-out")),
            a: layer.a,
            b: layer.b,
            simulate: layer.simulate.unwrap_or(false),
            input: layer.input,
        }
    }

    pub fn params(&self) -> Result<LambdaParams, Error> {
        let pulse = PulseSpec::from_peak_and_angle(self.envelope.clone(), self.omega0_t, self.theta, 1.0)?;
        LambdaParams::new(pulse, self.delta_t, self.gamma_t, self.t_start, self.t_end)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, Error> {
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            sample_count: self.sample_count,
            max_steps: self.max_steps,
            allow_unnormalized: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, Error> {
        let spec = SweepSpec {
            omega_axis: AxisSpec {
                min: self.omega_min,
                max: self.omega_max,
                n_points: self.omega_points,
                scale: self.omega_scale,
            },
            gamma_axis: AxisSpec {
                min: self.gamma_min,
                max: self.gamma_max,
                n_points: self.gamma_points,
                scale: self.gamma_scale,
            },
            delta: self.delta_t,
            theta: self.theta,
            envelope: self.envelope.clone(),
            duration: 1.0,
            t_start: self.t_start,
            t_end: self.t_end,
            thresholds: Default::default(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Config(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StepSizeUnderflow { .. } | Error::StepBudgetExhausted { .. } | Error::VanishingSupport(_) => {
                Failure::Numerical(e.to_string())
            }
            other => Failure::Config(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn load_layer(path: &Path) -> Result<ConfigLayer, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("invalid config {}: {e}", path.display())))
}

fn resolve(args: CommandArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(path) => load_layer(path)?,
        None => ConfigLayer::default(),
    };
    Ok(RunConfig::from_layer(file.overlay(args.overrides)))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_failure(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

fn write_config_echo(cfg: &RunConfig) -> Result<(), Failure> {
    write_file(&cfg.output.join("config.json"), &to_json(cfg))
}

/// Time series with columns `t,p1,p2,p3,loss`.
pub fn evolution_csv(record: &EvolutionRecord) -> Vec<u8> {
    let mut out = String::with_capacity(80 * (record.len() + 1));
    out.push_str(EVOLUTION_CSV_HEADER);
    out.push('\n');
    for ((t, p), loss) in record.times.iter().zip(&record.populations).zip(&record.loss) {
        let row = [*t, p[0], p[1], p[2], *loss].map(format_sig12);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Final `[p1, p2, p3]` from an evolution CSV.
pub fn final_populations_from_csv(text: &str) -> Result<[f64; 3], Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(header) if header.trim() == EVOLUTION_CSV_HEADER => {}
        _ => return Err(Error::Format(format!("expected header `{EVOLUTION_CSV_HEADER}`"))),
    }
    let last = lines.next_back().ok_or_else(|| Error::Format("no data rows".into()))?;
    let fields: Vec<f64> = last
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Format(format!("bad number in `{last}`: {e}")))?;
    if fields.len() != 5 {
        return Err(Error::Format(format!("expected 5 columns in `{last}`")));
    }
    Ok([fields[1], fields[2], fields[3]])
}

fn evolve(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let params = cfg.params()?;
    let integrator = cfg.integrator()?;
    let theta = params.mixing_angle()?;
    let record = propagate_full(&params, Amplitudes::ground(), &integrator)?;
    write_config_echo(cfg)?;
    write_file(&cfg.output.join("evolution.csv"), &evolution_csv(&record))?;
    let report = crate::analysis::superposition_report(&record, theta)?;
    let regime = classify_regime(&params, &record)?;
    let json = to_json(&report);
    write_file(&cfg.output.join("report.json"), &json)?;
    out.write_all(&json).map_err(|e| Failure::Io(e.to_string()))?;
    let _ = writeln!(err, "regime: {regime}");
    Ok(())
}

fn sweep(cfg: &RunConfig, err: &mut dyn Write) -> Result<(), Failure> {
    let spec = cfg.sweep_spec()?;
    let integrator = cfg.integrator()?;
    let grid = run_sweep(&spec, &integrator, cfg.workers)?;
    write_config_echo(cfg)?;
    let name = match cfg.format {
        ExportFormat::Csv => "grid.csv",
        ExportFormat::Json => "grid.json",
    };
    write_file(&cfg.output.join(name), &export_grid(&grid, cfg.format))?;
    let failed = grid.failed_count();
    if failed > 0 {
        let _ = writeln!(err, "warning: {failed} of {} cells failed", grid.cells.len());
    }
    Ok(())
}

fn design(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let (a, b) = match (cfg.a, cfg.b) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Failure::Config("design needs both `a` and `b`".into())),
    };
    let d = design_pulses(a, b)?;
    if d.sign_convention_mismatch {
        let _ = writeln!(
            err,
            "warning: target has a relative + sign; the prepared state is ({:.6}, {:.6})",
            d.achievable[0], d.achievable[1]
        );
    }
    let json = to_json(&d);
    out.write_all(&json).map_err(|e| Failure::Io(e.to_string()))?;
    if cfg.simulate {
        write_file(&cfg.output.join("design.json"), &json)?;
        let chained = RunConfig {
            theta: d.theta.radians(),
            ..cfg.clone()
        };
        evolve(&chained, out, err)?;
    }
    Ok(())
}

fn report(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Failure::Config("report needs `input`".into()))?;
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Config(format!("cannot read input {}: {e}", input.display())))?;
    let populations = final_populations_from_csv(&text)?;
    let theta = MixingAngle::from_radians(cfg.theta)?;
    let report = SuperpositionReport::from_populations(populations, theta)?;
    out.write_all(&to_json(&report)).map_err(|e| Failure::Io(e.to_string()))
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{}", e.render());
            return EXIT_CONFIG;
        }
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Evolve(args) => resolve(args).and_then(|cfg| evolve(&cfg, out, err)),
        Command::Sweep(args) => resolve(args).and_then(|cfg| sweep(&cfg, err)),
        Command::Design(args) => resolve(args).and_then(|cfg| design(&cfg, out, err)),
        Command::Report(args) => resolve(args).and_then(|cfg| report(&cfg, out)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
