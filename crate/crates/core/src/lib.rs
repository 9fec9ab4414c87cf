//! Simulator for a three-level Λ system whose intermediate level decays.
//!
//! Pump and Stokes pulses with a common envelope split the ground-state
//! manifold into a bright state, which is drained through the lossy excited
//! level, and a dark state, which is untouched. Starting from |1⟩ the system
//! ends in the dark superposition `cosθ|1⟩ − sinθ|3⟩` with probability
//! `cos²θ`.
//!
//! * [`model`]: amplitudes, pulses, the Hamiltonian and the bright/dark basis.
//! * [`propagator`]: adaptive full and reduced integrators plus a
//!   matrix-exponential oracle.
//! * [`analysis`]: final-state reports, post-selection, regimes, pulse design.
//! * [`sweep`]: parallel (Ω₀T, ΓT) grids and their CSV/JSON export.
//! * [`cli`]: the `lambda-sim` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod propagator;
pub mod sweep;

pub use analysis::{
    classify_regime, classify_regime_with, design_pulses, min_time_estimate, superposition_report, PulseDesign,
    RegimeLabel, RegimeThresholds, SuperpositionReport,
};
pub use error::{Error, Result};
pub use model::{
    bright_dark_hamiltonian, effective_coupling, from_bright_dark, hamiltonian_at, mixing_angle, to_bright_dark,
    Amplitudes, BrightDark, Envelope, LambdaParams, MixingAngle, PulseSpec, SampledEnvelope,
};
pub use propagator::{propagate_effective, propagate_full, propagate_oracle, EvolutionRecord, IntegratorConfig};
pub use sweep::{export_grid, import_grid_json, run_sweep, AxisSpec, ExportFormat, SweepGrid, SweepSpec};
