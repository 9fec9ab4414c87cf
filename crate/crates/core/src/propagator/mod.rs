//! Time evolution of the Λ system.
//!
//! [`propagate_full`] integrates the three bare amplitudes, [`propagate_effective`]
//! integrates only the bright/excited pair with the dark amplitude frozen, and
//! [`propagate_oracle`] is an independent piecewise-constant matrix-exponential
//! propagator used to cross-check both.

mod dopri;
mod expm;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    from_bright_dark, hamiltonian_at, mixing_angle, to_bright_dark, Amplitudes, BrightDark, LambdaParams,
};

use dopri::StepControl;

const MINUS_I: C64 = C64::new(0.0, -1.0);

/// Tolerance on `‖c‖² = 1` for the initial state.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size, in units of `T`.
    pub max_step: f64,
    /// Number of equally spaced output samples, endpoints included.
    pub sample_count: usize,
    /// Attempted steps (accepted or rejected) before giving up.
    pub max_steps: usize,
    /// Skip the unit-norm check on the initial state.
    pub allow_unnormalized: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.1,
            sample_count: 2001,
            max_steps: 10_000_000,
            allow_unnormalized: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid("max_step", "must be positive"));
        }
        if self.sample_count < 2 {
            return Err(Error::invalid("sample_count", "must be at least 2"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
        }
    }
}

/// Time-sampled amplitudes of one propagation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Amplitudes>,
    /// `[|c1|², |c2|², |c3|²]` per sample.
    pub populations: Vec<[f64; 3]>,
    /// `1 − ‖c‖²` per sample.
    pub loss: Vec<f64>,
}

impl EvolutionRecord {
    pub fn new(times: Vec<f64>, amplitudes: Vec<Amplitudes>) -> Self {
        assert_eq!(times.len(), amplitudes.len(), "times and amplitudes must align");
        let populations: Vec<[f64; 3]> = amplitudes.iter().map(Amplitudes::populations).collect();
        let loss = populations.iter().map(|p| 1.0 - p.iter().sum::<f64>()).collect();
        Self {
            times,
            amplitudes,
            populations,
            loss,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_amplitudes(&self) -> Option<Amplitudes> {
        self.amplitudes.last().copied()
    }

    pub fn final_populations(&self) -> Option<[f64; 3]> {
        self.populations.last().copied()
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.loss.last().copied()
    }
}

/// `sample_count` equally spaced times over the window, with both endpoints
/// exact.
pub fn sample_times(t_start: f64, t_end: f64, sample_count: usize) -> Vec<f64> {
    let n = sample_count.max(2);
    let step = (t_end - t_start) / (n - 1) as f64;
    let mut times: Vec<f64> = (0..n).map(|i| t_start + step * i as f64).collect();
    times[n - 1] = t_end;
    times
}

fn check_initial(initial: &Amplitudes, cfg: &IntegratorConfig) -> Result<()> {
    let arr = initial.to_array();
    if arr.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidInitialState("amplitudes must be finite".into()));
    }
    let norm = initial.norm_sqr();
    if !cfg.allow_unnormalized && (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidInitialState(format!(
            "norm squared {norm} differs from 1"
        )));
    }
    Ok(())
}

/// Integrates `i dc/dt = H(t) c` for the three bare amplitudes.
pub fn propagate_full(params: &LambdaParams, initial: Amplitudes, cfg: &IntegratorConfig) -> Result<EvolutionRecord> {
    params.validate()?;
    cfg.validate()?;
    check_initial(&initial, cfg)?;

    let pulse = &params.pulse;
    let excited = params.excited_energy();
    let rhs = |t: f64, c: &[C64; 3]| -> [C64; 3] {
        let shape = pulse.shape(t);
        let half_p = 0.5 * pulse.omega_p0 * shape;
        let half_s = 0.5 * pulse.omega_s0 * shape;
        [
            MINUS_I * (c[1] * half_p),
            MINUS_I * (c[0] * half_p + c[1] * excited + c[2] * half_s),
            MINUS_I * (c[1] * half_s),
        ]
    };

    let times = sample_times(params.t_start, params.t_end, cfg.sample_count);
    let states = dopri::integrate(
        rhs,
        params.t_start,
        params.t_end,
        initial.to_array(),
        &times,
        &cfg.step_control(),
    )?;
    Ok(EvolutionRecord::new(
        times,
        states.into_iter().map(Amplitudes::from_array).collect(),
    ))
}

/// Integrates the bright/excited pair under
/// `[[0, Ω(t)/2], [Ω(t)/2, (Δ − iΓ)/2]]` with the dark amplitude held fixed,
/// and maps every sample back to the bare basis.
pub fn propagate_effective(
    params: &LambdaParams,
    initial: Amplitudes,
    cfg: &IntegratorConfig,
) -> Result<EvolutionRecord> {
    params.validate()?;
    cfg.validate()?;
    check_initial(&initial, cfg)?;

    let theta = mixing_angle(&params.pulse)?;
    let start = to_bright_dark(initial, theta);
    let pulse = &params.pulse;
    let peak = pulse.peak_coupling();
    let excited = params.excited_energy();
    let rhs = |t: f64, c: &[C64; 2]| -> [C64; 2] {
        let half_omega = 0.5 * peak * pulse.shape(t);
        [
            MINUS_I * (c[1] * half_omega),
            MINUS_I * (c[0] * half_omega + c[1] * excited),
        ]
    };

    let times = sample_times(params.t_start, params.t_end, cfg.sample_count);
    let states = dopri::integrate(
        rhs,
        params.t_start,
        params.t_end,
        [start.bright, start.excited],
        &times,
        &cfg.step_control(),
    )?;
    let amplitudes = states
        .into_iter()
        .map(|[bright, excited]| {
            from_bright_dark(
                BrightDark {
                    bright,
                    excited,
                    dark: start.dark,
                },
                theta,
            )
        })
        .collect();
    Ok(EvolutionRecord::new(times, amplitudes))
}

/// Piecewise-constant propagator: the window is cut into `n_slices` equal
/// slices, `H` is frozen at each slice midpoint and the exact slice propagator
/// `exp(−iH·dt)` is applied. Second order in the slice width; exact for
/// time-independent `H` with a single slice.
pub fn propagate_oracle(params: &LambdaParams, initial: Amplitudes, n_slices: usize) -> Result<Amplitudes> {
    params.validate()?;
    if n_slices == 0 {
        return Err(Error::invalid("n_slices", "must be at least 1"));
    }
    let dt = (params.t_end - params.t_start) / n_slices as f64;
    let mut c = initial.to_array();
    for k in 0..n_slices {
        let mid = params.t_start + (k as f64 + 0.5) * dt;
        let mut generator = hamiltonian_at(params, mid);
        generator.iter_mut().flatten().for_each(|h| *h *= MINUS_I * dt);
        c = expm::matvec(&expm::expm(&generator), &c);
    }
    Ok(Amplitudes::from_array(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Envelope, PulseSpec};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn gaussian_params(omega0: f64, gamma: f64, delta: f64) -> LambdaParams {
        let pulse = PulseSpec::from_peak_and_angle(Envelope::Gaussian, omega0, FRAC_PI_4, 1.0).unwrap();
        LambdaParams::new(pulse, delta, gamma, -6.0, 6.0).unwrap()
    }

    #[test]
    fn sample_times_are_exact_at_endpoints() {
        let t = sample_times(-6.0, 6.0, 2001);
        assert_eq!(t.len(), 2001);
        assert_eq!(t[0], -6.0);
        assert_eq!(t[2000], 6.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_unnormalized_initial_state() {
        let params = gaussian_params(10.0, 10.0, 0.0);
        let cfg = IntegratorConfig::default();
        let bad = Amplitudes::from_real(1.0, 0.1, 0.0);
        assert!(matches!(
            propagate_full(&params, bad, &cfg),
            Err(Error::InvalidInitialState(_))
        ));
        let opt_out = IntegratorConfig {
            allow_unnormalized: true,
            sample_count: 2,
            ..cfg
        };
        assert!(propagate_full(&params, bad, &opt_out).is_ok());
        let nan = Amplitudes::from_real(f64::NAN, 0.0, 0.0);
        assert!(propagate_effective(&params, nan, &opt_out).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = IntegratorConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.sample_count = 1;
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig {
            rel_tol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn record_starts_at_initial_state() {
        let params = gaussian_params(10.0, 10.0, 0.0);
        let rec = propagate_full(&params, Amplitudes::ground(), &IntegratorConfig::default()).unwrap();
        assert_eq!(rec.len(), 2001);
        assert_eq!(rec.amplitudes[0], Amplitudes::ground());
        assert_eq!(rec.loss[0], 0.0);
        assert_eq!(*rec.times.last().unwrap(), 6.0);
    }

    #[test]
    fn pi_area_pump_inverts_population() {
        let pulse = PulseSpec::new(Envelope::Constant, PI, 0.0, 1.0).unwrap();
        let params = LambdaParams::new(pulse, 0.0, 0.0, 0.0, 1.0).unwrap();
        let rec = propagate_full(&params, Amplitudes::ground(), &IntegratorConfig::default()).unwrap();
        let p = rec.final_populations().unwrap();
        assert!((p[1] - 1.0).abs() < 1e-8 && p[0] < 1e-8);
        // c1(t) = cos(πt/2) along the whole record
        for (t, a) in rec.times.iter().zip(rec.amplitudes.iter()) {
            assert!((a.c1.re - (PI * t / 2.0).cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn dark_initial_state_is_stationary() {
        let params = gaussian_params(12.0, 7.0, 3.0);
        let theta = params.mixing_angle().unwrap();
        let dark = Amplitudes::dark_state(theta);
        let rec = propagate_effective(&params, dark, &IntegratorConfig::default()).unwrap();
        for (a, loss) in rec.amplitudes.iter().zip(rec.loss.iter()) {
            assert!(a.max_abs_diff(&dark) < 1e-15);
            assert!(loss.abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_identity_for_zero_hamiltonian() {
        let table = crate::model::SampledEnvelope::new(100.0, 1.0, vec![1.0, 1.0]).unwrap();
        let pulse = PulseSpec::new(Envelope::Custom(table), 1.0, 1.0, 1.0).unwrap();
        let params = LambdaParams::new(pulse, 0.0, 0.0, 0.0, 5.0).unwrap();
        let start = Amplitudes::new(C64::new(0.6, 0.1), C64::new(0.0, 0.5), C64::new(-0.3, 0.2));
        let end = propagate_oracle(&params, start, 7).unwrap();
        assert!(end.max_abs_diff(&start) < 1e-15);
        assert!(propagate_oracle(&params, start, 0).is_err());
    }

    #[test]
    fn step_budget_maps_to_numerical_error() {
        let params = gaussian_params(10.0, 10.0, 0.0);
        let cfg = IntegratorConfig {
            max_steps: 5,
            ..IntegratorConfig::default()
        };
        let err = propagate_full(&params, Amplitudes::ground(), &cfg).unwrap_err();
        assert!(err.is_numerical());
    }
}
