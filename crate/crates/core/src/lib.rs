//! Gaussian-state simulation of continuous-variable quantum teleportation.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. Everything is
//! expressed in shot-noise units: a vacuum quadrature has variance 1, so a
//! variance `v` reports as `10·log10(v)` dB. Conventions that quote the
//! vacuum variance as 1/4 (ħ = 1/2) convert by a factor of
//! [`SHOT_NOISE_SCALE`].
//!
//! Module map:
//!
//! - [`gaussian`]: multimode Gaussian states, symplectic transforms, loss,
//!   homodyne measurement with conditional update, displacement.
//! - [`opo`]: below-threshold OPO squeezing spectra, phase-jitter mixing.
//! - [`teleporter`]: the full protocol with a closed-form (Heisenberg) engine
//!   and a shot-by-shot Monte Carlo engine.
//! - [`metrics`]: fidelity laws, sequential capacity, dB conversion.
//! - [`calibration`]: unit-gain cancellation and the gain bound it implies.
#![no_std]

extern crate alloc;

pub mod calibration;
pub mod error;
pub mod gaussian;
pub mod metrics;
pub mod opo;
pub mod teleporter;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, HomodyneOutcome, Quadrature, SymplecticOp};
pub use metrics::{FidelityValue, SequentialCapacity};
pub use nalgebra;
pub use opo::{OpoParams, SqueezeLevels};
pub use teleporter::{
    Efficiencies, Engine, InputState, LockJitter, MonteCarlo, SqueezerSpec, TeleportReport,
    TeleportTrace, TeleporterConfig,
};

/// Ratio between the vacuum variance used here (1) and the ħ = 1/2
/// convention (1/4).
pub const SHOT_NOISE_SCALE: f64 = 4.0;
