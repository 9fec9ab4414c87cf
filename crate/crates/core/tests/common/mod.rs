#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use lambda_sim::{Amplitudes, Envelope, LambdaParams, PulseSpec};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DRAW_SEED: u64 = 20240601;

/// One random parameter set: per-pulse peak, decay, detuning, mixing angle.
#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub omega0: f64,
    pub gamma: f64,
    pub delta: f64,
    pub theta: f64,
}

impl Draw {
    pub fn params(&self) -> LambdaParams {
        gaussian(self.omega0, self.gamma, self.delta, self.theta)
    }

    pub fn params_with_gamma(&self, gamma: f64) -> LambdaParams {
        gaussian(self.omega0, gamma, self.delta, self.theta)
    }
}

/// Ω₀T, ΓT ∈ [0, 30), ΔT ∈ [−30, 30), θ ∈ (0, π/2).
pub fn random_draws(seed: u64, n: usize) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut draw = Draw {
                omega0: rng.gen_range(0.0..30.0),
                gamma: rng.gen_range(0.0..30.0),
                delta: rng.gen_range(-30.0..30.0),
                theta: rng.gen_range(0.0..FRAC_PI_2),
            };
            // Open interval for θ; a zero pulse has no mixing angle.
            draw.theta = draw.theta.max(1e-6);
            draw.omega0 = draw.omega0.max(1e-6);
            draw
        })
        .collect()
}

/// Gaussian pulses on [−6, 6] with the given per-pulse peak scale and angle.
pub fn gaussian(omega0: f64, gamma: f64, delta: f64, theta: f64) -> LambdaParams {
    let pulse = PulseSpec::from_peak_and_angle(Envelope::Gaussian, omega0, theta, 1.0).unwrap();
    LambdaParams::new(pulse, delta, gamma, -6.0, 6.0).unwrap()
}

/// Constant pump and Stokes amplitudes switched on over [0, duration].
pub fn constant(omega_p: f64, omega_s: f64, gamma: f64, delta: f64, duration: f64) -> LambdaParams {
    let pulse = PulseSpec::new(Envelope::Constant, omega_p, omega_s, 1.0).unwrap();
    LambdaParams::new(pulse, delta, gamma, 0.0, duration).unwrap()
}

/// Closed-form final state for constant pulses starting in |1⟩.
///
/// The dark combination `cosθ c1 − sinθ c3` is stationary. The bright
/// combination `sinθ c1 + cosθ c3` and `c2` evolve under
/// `M = [[0, Ω/2], [Ω/2, (Δ − iΓ)/2]]` with `Ω = √(Ωp² + Ωs²)`, and
/// `exp(−iMt) = e^{−iat} [cos(st) I − i sin(st)/s (M − aI)]` where
/// `a = (Δ − iΓ)/4` and `s² = a² + Ω²/4`.
pub fn constant_pulse_closed_form(omega_p: f64, omega_s: f64, gamma: f64, delta: f64, duration: f64) -> Amplitudes {
    let omega = omega_p.hypot(omega_s);
    let (sin_t, cos_t) = (omega_p / omega, omega_s / omega);
    let i = C64::new(0.0, 1.0);
    let a = C64::new(delta, -gamma) / 4.0;
    let s = (a * a + omega * omega / 4.0).sqrt();
    let t = duration;
    let sinc = if s.norm() < 1e-12 {
        C64::from(t)
    } else {
        (s * t).sin() / s
    };
    let phase = (-i * a * t).exp();
    let cos_st = (s * t).cos();
    // exp(−iMt) applied to (bright, excited) = (sinθ, 0).
    let m00 = -a;
    let m10 = C64::from(omega / 2.0);
    let bright = phase * (cos_st - i * sinc * m00) * sin_t;
    let excited = phase * (-i * sinc * m10) * sin_t;
    let dark = C64::from(cos_t);
    Amplitudes::new(sin_t * bright + cos_t * dark, excited, cos_t * bright - sin_t * dark)
}

pub fn max_dev(a: &[Amplitudes], b: &[Amplitudes]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}
