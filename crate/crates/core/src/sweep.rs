//! Parameter-grid engine over the (Ω₀T, ΓT) plane.
//!
//! Every cell is an independent full propagation from |1⟩. Cells run on a
//! dedicated thread pool of the requested size and are assembled by index, so
//! the grid is identical for any worker count. A cell whose integration fails
//! is recorded as failed and the sweep continues.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_populations, RegimeLabel, RegimeThresholds};
use crate::error::{Error, Result};
use crate::model::{Amplitudes, Envelope, LambdaParams, MixingAngle, PulseSpec};
use crate::propagator::{propagate_full, IntegratorConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
    pub scale: AxisScale,
}

impl AxisSpec {
    pub fn linear(min: f64, max: f64, n_points: usize) -> Self {
        Self {
            min,
            max,
            n_points,
            scale: AxisScale::Linear,
        }
    }

    pub fn log(min: f64, max: f64, n_points: usize) -> Self {
        Self {
            min,
            max,
            n_points,
            scale: AxisScale::Log,
        }
    }

    fn validate(&self, field: &'static str) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::invalid(field, "axis needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::invalid(field, "axis needs finite min < max"));
        }
        if self.min < 0.0 {
            return Err(Error::invalid(field, "axis values must be non-negative"));
        }
        if self.scale == AxisScale::Log && self.min <= 0.0 {
            return Err(Error::invalid(field, "log axis needs min > 0"));
        }
        Ok(())
    }

    /// Ascending axis values; the endpoints are exactly `min` and `max`.
    pub fn values(&self) -> Vec<f64> {
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let frac = i as f64 / last as f64;
                match self.scale {
                    AxisScale::Linear => self.min + (self.max - self.min) * frac,
                    AxisScale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * frac).exp(),
                }
            })
            .collect()
    }
}

/// Grid definition. The Ω₀ axis is the per-pulse peak at θ = π/4; see
/// [`PulseSpec::from_peak_and_angle`] for other angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub omega_axis: AxisSpec,
    pub gamma_axis: AxisSpec,
    pub delta: f64,
    pub theta: f64,
    pub envelope: Envelope,
    pub duration: f64,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
}

impl SweepSpec {
    /// Gaussian pulses on [−6T, 6T] with θ = π/4 and Δ = 0.
    pub fn symmetric(omega_axis: AxisSpec, gamma_axis: AxisSpec) -> Self {
        Self {
            omega_axis,
            gamma_axis,
            delta: 0.0,
            theta: std::f64::consts::FRAC_PI_4,
            envelope: Envelope::Gaussian,
            duration: 1.0,
            t_start: -6.0,
            t_end: 6.0,
            thresholds: RegimeThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.omega_axis.validate("omega_axis")?;
        self.gamma_axis.validate("gamma_axis")?;
        MixingAngle::from_radians(self.theta)?;
        if !self.delta.is_finite() {
            return Err(Error::invalid("delta_t", "must be finite"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start < self.t_end) {
            return Err(Error::invalid("t_end", "must be greater than t_start"));
        }
        if let Envelope::Custom(table) = &self.envelope {
            table.validate()?;
        }
        Ok(())
    }

    fn cell_params(&self, omega0: f64, gamma: f64) -> Result<LambdaParams> {
        let pulse = PulseSpec::from_peak_and_angle(self.envelope.clone(), omega0, self.theta, self.duration)?;
        LambdaParams::new(pulse, self.delta, gamma, self.t_start, self.t_end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellValues {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub loss: f64,
    pub regime: RegimeLabel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellOutcome {
    Computed(CellValues),
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub omega0_t: f64,
    pub gamma_t: f64,
    pub outcome: CellOutcome,
}

impl GridCell {
    pub fn values(&self) -> Option<&CellValues> {
        match &self.outcome {
            CellOutcome::Computed(v) => Some(v),
            CellOutcome::Failed { .. } => None,
        }
    }
}

/// Final populations over the grid, row-major with Ω₀ as the outer (row)
/// index and Γ as the inner one, both ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    pub omega_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub cells: Vec<GridCell>,
}

impl SweepGrid {
    pub fn n_omega(&self) -> usize {
        self.omega_values.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.gamma_values.len()
    }

    pub fn cell(&self, omega_index: usize, gamma_index: usize) -> &GridCell {
        &self.cells[omega_index * self.n_gamma() + gamma_index]
    }

    pub fn failed_count(&self) -> usize {
        self.cells.iter().filter(|c| c.values().is_none()).count()
    }
}

fn compute_cell(spec: &SweepSpec, cfg: &IntegratorConfig, omega0: f64, gamma: f64) -> CellOutcome {
    let run = || -> Result<CellValues> {
        let params = spec.cell_params(omega0, gamma)?;
        let theta = params.mixing_angle()?;
        let record = propagate_full(&params, Amplitudes::ground(), cfg)?;
        let populations = record.final_populations().ok_or(Error::EmptyRecord)?;
        let [p1, p2, p3] = populations;
        Ok(CellValues {
            p1,
            p2,
            p3,
            loss: 1.0 - (p1 + p2 + p3),
            regime: classify_populations(&params, populations, theta, &spec.thresholds),
        })
    };
    match run() {
        Ok(values) => CellOutcome::Computed(values),
        Err(e) => CellOutcome::Failed { reason: e.to_string() },
    }
}

pub fn run_sweep(spec: &SweepSpec, cfg: &IntegratorConfig, workers: usize) -> Result<SweepGrid> {
    spec.validate()?;
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    // Only the final state is kept, and the step sequence does not depend on
    // the sampling, so two samples give the same cell values as any other count.
    let cell_cfg = IntegratorConfig {
        sample_count: 2,
        ..*cfg
    };
    let omega_values = spec.omega_axis.values();
    let gamma_values = spec.gamma_axis.values();
    let n_gamma = gamma_values.len();
    let total = omega_values.len() * n_gamma;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let cells = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|index| {
                let omega0_t = omega_values[index / n_gamma];
                let gamma_t = gamma_values[index % n_gamma];
                GridCell {
                    omega0_t,
                    gamma_t,
                    outcome: compute_cell(spec, &cell_cfg, omega0_t, gamma_t),
                }
            })
            .collect::<Vec<_>>()
    });

    Ok(SweepGrid {
        spec: spec.clone(),
        omega_values,
        gamma_values,
        cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "omega0T,gammaT,p1,p2,p3,loss,regime";

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// exponent notation outside `[1e-5, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exponent) {
        let decimals = (DIGITS - 1 - exponent) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exponent.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn export_grid(grid: &SweepGrid, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Csv => {
            let mut out = String::with_capacity(64 * (grid.cells.len() + 1));
            out.push_str(CSV_HEADER);
            out.push('\n');
            for cell in &grid.cells {
                let (p1, p2, p3, loss, regime) = match &cell.outcome {
                    CellOutcome::Computed(v) => (v.p1, v.p2, v.p3, v.loss, v.regime.as_str()),
                    CellOutcome::Failed { .. } => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, "Failed"),
                };
                let fields = [cell.omega0_t, cell.gamma_t, p1, p2, p3, loss].map(format_sig12);
                out.push_str(&fields.join(","));
                out.push(',');
                out.push_str(regime);
                out.push('\n');
            }
            out.into_bytes()
        }
        ExportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(grid).expect("grid serializes");
            bytes.push(b'\n');
            bytes
        }
    }
}

pub fn import_grid_json(bytes: &[u8]) -> Result<SweepGrid> {
    serde_json::from_slice(bytes).map_err(|e| Error::Format(e.to_string()))
}
