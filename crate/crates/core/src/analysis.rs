//! Final-state analysis: closed-form dark-state predictions, post-selection
//! over the surviving {|1⟩, |3⟩} subspace, regime labels and the inverse
//! design problem (target superposition → pulse ratio).
//!
//! After the bright state has been emptied through the decaying level, only
//! the dark component `cosθ` survives, so
//!
//! ```text
//! c1(t_f) = cos²θ,   c3(t_f) = −sinθ·cosθ
//! ```
//!
//! and post-selecting on "no loss event" leaves `cosθ|1⟩ − sinθ|3⟩`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{mixing_angle, LambdaParams, MixingAngle, PulseSpec};
use crate::propagator::EvolutionRecord;

/// Below this the post-selected subspace is considered empty.
pub const MIN_SUPPORT: f64 = 1e-12;

/// Flat summary of a run's final state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionReport {
    pub theta: MixingAngle,
    pub p1_final: f64,
    pub p2_final: f64,
    pub p3_final: f64,
    pub loss_total: f64,
    /// cos⁴θ
    pub predicted_p1: f64,
    /// sin²θ·cos²θ
    pub predicted_p3: f64,
    pub deviation: f64,
    pub postselected_p1: f64,
    pub postselected_p3: f64,
}

impl SuperpositionReport {
    pub fn from_populations(populations: [f64; 3], theta: MixingAngle) -> Result<Self> {
        let [p1, p2, p3] = populations;
        let support = p1 + p3;
        if !(support >= MIN_SUPPORT) {
            return Err(Error::VanishingSupport(support));
        }
        let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
        let predicted_p1 = c2 * c2;
        let predicted_p3 = s2 * c2;
        Ok(Self {
            theta,
            p1_final: p1,
            p2_final: p2,
            p3_final: p3,
            loss_total: 1.0 - (p1 + p2 + p3),
            predicted_p1,
            predicted_p3,
            deviation: (p1 - predicted_p1).abs().max((p3 - predicted_p3).abs()),
            postselected_p1: p1 / support,
            postselected_p3: p3 / support,
        })
    }
}

pub fn superposition_report(record: &EvolutionRecord, theta: MixingAngle) -> Result<SuperpositionReport> {
    let populations = record.final_populations().ok_or(Error::EmptyRecord)?;
    SuperpositionReport::from_populations(populations, theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// Damped Rabi-like exchange that has not settled on the dark state.
    Oscillatory,
    /// Final populations match the dark-state prediction.
    Robust,
    /// Decay dominates the coupling and the population stays frozen in |1⟩.
    Overdamped,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::Oscillatory => "Oscillatory",
            RegimeLabel::Robust => "Robust",
            RegimeLabel::Overdamped => "Overdamped",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeThresholds {
    /// Robust when the report deviation is below this.
    pub robust_deviation: f64,
    pub overdamped_min_p1: f64,
    pub overdamped_max_p3: f64,
    /// Overdamped needs a non-trivial mixing angle; at θ ≈ 0 the initial state
    /// is already dark.
    pub overdamped_min_theta: f64,
    /// Overdamped needs Γ above this multiple of the peak effective coupling.
    pub overdamped_min_decay_ratio: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            robust_deviation: 0.01,
            overdamped_min_p1: 0.9,
            overdamped_max_p3: 0.05,
            overdamped_min_theta: 0.1,
            overdamped_min_decay_ratio: 1.0,
        }
    }
}

pub fn classify_regime(params: &LambdaParams, record: &EvolutionRecord) -> Result<RegimeLabel> {
    classify_regime_with(params, record, &RegimeThresholds::default())
}

pub fn classify_regime_with(
    params: &LambdaParams,
    record: &EvolutionRecord,
    thresholds: &RegimeThresholds,
) -> Result<RegimeLabel> {
    let theta = mixing_angle(&params.pulse)?;
    let populations = record.final_populations().ok_or(Error::EmptyRecord)?;
    Ok(classify_populations(params, populations, theta, thresholds))
}

pub(crate) fn classify_populations(
    params: &LambdaParams,
    [p1, _, p3]: [f64; 3],
    theta: MixingAngle,
    thresholds: &RegimeThresholds,
) -> RegimeLabel {
    let c2 = theta.cos().powi(2);
    let deviation = (p1 - c2 * c2).abs().max((p3 - theta.sin().powi(2) * c2).abs());
    if deviation < thresholds.robust_deviation {
        return RegimeLabel::Robust;
    }
    let decay_dominates = params.gamma > thresholds.overdamped_min_decay_ratio * params.pulse.peak_coupling();
    if p1 > thresholds.overdamped_min_p1
        && p3 < thresholds.overdamped_max_p3
        && theta.radians() > thresholds.overdamped_min_theta
        && decay_dominates
    {
        RegimeLabel::Overdamped
    } else {
        RegimeLabel::Oscillatory
    }
}

/// Pulse settings that trap the population in a requested real superposition
/// `a|1⟩ + b|3⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseDesign {
    pub theta: MixingAngle,
    /// Ωp⁰ / Ωs⁰
    pub ratio: f64,
    /// Probability that no loss event occurs, `cos²θ`.
    pub success_probability: f64,
    /// The normalized state actually prepared, `(cosθ, −sinθ)`.
    pub achievable: [f64; 2],
    /// Set when the target's relative sign is `+`: the prepared state differs
    /// from the target by the sign of the |3⟩ component.
    pub sign_convention_mismatch: bool,
}

pub fn design_pulses(target_a: f64, target_b: f64) -> Result<PulseDesign> {
    if !(target_a.is_finite() && target_b.is_finite()) {
        return Err(Error::invalid("target", "components must be finite"));
    }
    if target_a == 0.0 && target_b == 0.0 {
        return Err(Error::ZeroTarget);
    }
    if target_a == 0.0 {
        return Err(Error::TargetUnreachable);
    }
    let norm = target_a.hypot(target_b);
    let (a, b) = (target_a / norm, target_b / norm);
    let theta = MixingAngle::from_radians(b.abs().atan2(a.abs()))?;
    Ok(PulseDesign {
        theta,
        ratio: theta.radians().tan(),
        success_probability: theta.cos().powi(2),
        achievable: [theta.cos(), -theta.sin()],
        sign_convention_mismatch: b != 0.0 && (b / a) > 0.0,
    })
}

/// Lower bound `π / Ω_peak` on the preparation time: one half Rabi cycle of
/// the bright↔excited transition at the peak effective coupling.
pub fn min_time_estimate(pulse: &PulseSpec) -> Result<f64> {
    let peak = pulse.peak_coupling();
    if !(peak > 0.0) {
        return Err(Error::DegeneratePulse);
    }
    Ok(PI / peak)
}
