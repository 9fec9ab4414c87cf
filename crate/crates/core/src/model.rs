//! Domain types for the three-level Λ system and its bright/dark basis.
//!
//! States |1⟩ and |3⟩ are the two ground levels, |2⟩ is the excited level
//! that decays out of the system at rate Γ. The pump field couples |1⟩↔|2⟩
//! and the Stokes field couples |2⟩↔|3⟩. Both fields share one envelope
//! `f(t)`, so the mixing angle `tan θ = Ωp/Ωs` is constant in time.
//!
//! Units: ħ = 1, times in units of the pulse duration `T`, rates in `1/T`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3×3 complex matrix in row-major order.
pub type Matrix3 = [[C64; 3]; 3];

const ZERO: C64 = C64::new(0.0, 0.0);

/// Probability amplitudes of the bare states |1⟩, |2⟩, |3⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
}

impl Amplitudes {
    pub fn new(c1: C64, c2: C64, c3: C64) -> Self {
        Self { c1, c2, c3 }
    }

    /// All population in |1⟩.
    pub fn ground() -> Self {
        Self::new(C64::new(1.0, 0.0), ZERO, ZERO)
    }

    pub fn from_real(c1: f64, c2: f64, c3: f64) -> Self {
        Self::new(C64::new(c1, 0.0), C64::new(c2, 0.0), C64::new(c3, 0.0))
    }

    /// The dark state cosθ|1⟩ − sinθ|3⟩.
    pub fn dark_state(theta: MixingAngle) -> Self {
        from_bright_dark(
            BrightDark {
                bright: ZERO,
                excited: ZERO,
                dark: C64::new(1.0, 0.0),
            },
            theta,
        )
    }

    pub fn to_array(self) -> [C64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn from_array(c: [C64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// `[|c1|², |c2|², |c3|²]`
    pub fn populations(&self) -> [f64; 3] {
        [self.c1.norm_sqr(), self.c2.norm_sqr(), self.c3.norm_sqr()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.populations().iter().sum()
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Amplitudes) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Sampled envelope on a uniform grid, linearly interpolated between samples
/// and zero outside `[t0, t0 + (len - 1)·dt]`. Times are absolute, not scaled
/// by the pulse duration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledEnvelope {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledEnvelope {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        let table = Self { t0, dt, values };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() {
            return Err(Error::invalid("envelope", "custom table t0 must be finite"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("envelope", "custom table dt must be positive"));
        }
        if self.values.len() < 2 {
            return Err(Error::invalid("envelope", "custom table needs at least two samples"));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "envelope",
                "custom table samples must be finite and non-negative",
            ));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&x) {
            return 0.0;
        }
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Shared time dependence `f(t)` of the pump and Stokes fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// `exp[−(t/T)²]`
    Gaussian,
    /// `1` at all times.
    Constant,
    Custom(SampledEnvelope),
}

impl Envelope {
    pub fn eval(&self, t: f64, duration: f64) -> f64 {
        match self {
            Envelope::Gaussian => {
                let x = t / duration;
                (-x * x).exp()
            }
            Envelope::Constant => 1.0,
            Envelope::Custom(table) => table.eval(t),
        }
    }
}

/// Pump and Stokes fields: one envelope, two real non-negative peak Rabi
/// frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub envelope: Envelope,
    pub omega_p0: f64,
    pub omega_s0: f64,
    pub duration: f64,
}

impl PulseSpec {
    pub fn new(envelope: Envelope, omega_p0: f64, omega_s0: f64, duration: f64) -> Result<Self> {
        let pulse = Self {
            envelope,
            omega_p0,
            omega_s0,
            duration,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn gaussian(omega_p0: f64, omega_s0: f64, duration: f64) -> Result<Self> {
        Self::new(Envelope::Gaussian, omega_p0, omega_s0, duration)
    }

    /// Pulses with per-pulse peak `omega0` in the symmetric case θ = π/4.
    ///
    /// For general θ the peaks are `Ωp⁰ = √2·Ω₀·sinθ`, `Ωs⁰ = √2·Ω₀·cosθ`, which
    /// keeps the effective peak coupling at `√2·Ω₀` for every θ.
    pub fn from_peak_and_angle(envelope: Envelope, omega0: f64, theta: f64, duration: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::invalid("omega0_t", "must be finite and non-negative"));
        }
        let theta = MixingAngle::from_radians(theta)?;
        let scale = std::f64::consts::SQRT_2 * omega0;
        Self::new(envelope, scale * theta.sin(), scale * theta.cos(), duration)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p0.is_finite() && self.omega_p0 >= 0.0) {
            return Err(Error::invalid("omega_p0", "must be finite and non-negative"));
        }
        if !(self.omega_s0.is_finite() && self.omega_s0 >= 0.0) {
            return Err(Error::invalid("omega_s0", "must be finite and non-negative"));
        }
        if self.omega_p0 + self.omega_s0 <= 0.0 {
            return Err(Error::DegeneratePulse);
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if let Envelope::Custom(table) = &self.envelope {
            table.validate()?;
        }
        Ok(())
    }

    pub fn shape(&self, t: f64) -> f64 {
        self.envelope.eval(t, self.duration)
    }

    pub fn omega_p(&self, t: f64) -> f64 {
        self.omega_p0 * self.shape(t)
    }

    pub fn omega_s(&self, t: f64) -> f64 {
        self.omega_s0 * self.shape(t)
    }

    /// `√(Ωp⁰² + Ωs⁰²)`
    pub fn peak_coupling(&self) -> f64 {
        self.omega_p0.hypot(self.omega_s0)
    }
}

/// Full configuration of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaParams {
    pub pulse: PulseSpec,
    /// Single-photon detuning Δ of |2⟩.
    pub delta: f64,
    /// Decay rate Γ of |2⟩ out of the system.
    pub gamma: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl LambdaParams {
    pub fn new(pulse: PulseSpec, delta: f64, gamma: f64, t_start: f64, t_end: f64) -> Result<Self> {
        let params = Self {
            pulse,
            delta,
            gamma,
            t_start,
            t_end,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        if !self.delta.is_finite() {
            return Err(Error::invalid("delta_t", "must be finite"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid("gamma_t", "must be finite and non-negative"));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(Error::invalid("t_start", "integration window must be finite"));
        }
        if self.t_start >= self.t_end {
            return Err(Error::invalid("t_end", "must be greater than t_start"));
        }
        Ok(())
    }

    pub fn mixing_angle(&self) -> Result<MixingAngle> {
        mixing_angle(&self.pulse)
    }

    /// Complex energy `(Δ − iΓ)/2` of the excited level.
    pub fn excited_energy(&self) -> C64 {
        C64::new(self.delta, -self.gamma) * 0.5
    }
}

/// Mixing angle θ ∈ [0, π/2] with `tan θ = Ωp⁰/Ωs⁰`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixingAngle(f64);

impl MixingAngle {
    pub fn from_radians(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::invalid("theta", "must lie in [0, pi/2]"));
        }
        Ok(Self(theta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }
}

pub fn mixing_angle(pulse: &PulseSpec) -> Result<MixingAngle> {
    let (p, s) = (pulse.omega_p0, pulse.omega_s0);
    if !(p >= 0.0 && s >= 0.0) || p + s <= 0.0 {
        return Err(Error::DegeneratePulse);
    }
    Ok(MixingAngle(p.atan2(s)))
}

/// `H(t)` with ħ = 1:
///
/// ```text
/// [[0,     Ωp/2,       0   ],
///  [Ωp/2,  (Δ − iΓ)/2, Ωs/2],
///  [0,     Ωs/2,       0   ]]
/// ```
pub fn hamiltonian_at(params: &LambdaParams, t: f64) -> Matrix3 {
    let half_p = C64::new(0.5 * params.pulse.omega_p(t), 0.0);
    let half_s = C64::new(0.5 * params.pulse.omega_s(t), 0.0);
    [
        [ZERO, half_p, ZERO],
        [half_p, params.excited_energy(), half_s],
        [ZERO, half_s, ZERO],
    ]
}

/// `Ω(t) = √(Ωp(t)² + Ωs(t)²)`
pub fn effective_coupling(pulse: &PulseSpec, t: f64) -> f64 {
    pulse.omega_p(t).hypot(pulse.omega_s(t))
}

/// Amplitudes in the basis {|b⟩, |2⟩, |d⟩} with
/// |b⟩ = sinθ|1⟩ + cosθ|3⟩ and |d⟩ = cosθ|1⟩ − sinθ|3⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrightDark {
    pub bright: C64,
    pub excited: C64,
    pub dark: C64,
}

// The transform matrix [[s, 0, c], [0, 1, 0], [c, 0, -s]] is symmetric and
// orthogonal, hence its own inverse.
pub fn to_bright_dark(amps: Amplitudes, theta: MixingAngle) -> BrightDark {
    let (s, c) = (theta.sin(), theta.cos());
    BrightDark {
        bright: amps.c1 * s + amps.c3 * c,
        excited: amps.c2,
        dark: amps.c1 * c - amps.c3 * s,
    }
}

pub fn from_bright_dark(bd: BrightDark, theta: MixingAngle) -> Amplitudes {
    let (s, c) = (theta.sin(), theta.cos());
    Amplitudes {
        c1: bd.bright * s + bd.dark * c,
        c2: bd.excited,
        c3: bd.bright * c - bd.dark * s,
    }
}

/// Hamiltonian in the {|b⟩, |2⟩, |d⟩} basis for a mixing angle changing at
/// rate `theta_dot`.
///
/// The bright/dark coupling `±iθ̇` comes from the time derivative of the basis
/// change. It vanishes for the shared-envelope pulses used throughout this
/// crate, where the dark state decouples exactly; the propagators never
/// integrate it.
pub fn bright_dark_hamiltonian(params: &LambdaParams, t: f64, theta_dot: f64) -> Matrix3 {
    let half_omega = C64::new(0.5 * effective_coupling(&params.pulse, t), 0.0);
    let nonadiabatic = C64::new(0.0, theta_dot);
    [
        [ZERO, half_omega, nonadiabatic],
        [half_omega, params.excited_energy(), ZERO],
        [-nonadiabatic, ZERO, ZERO],
    ]
}
