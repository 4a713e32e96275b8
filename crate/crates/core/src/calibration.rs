//! Unit-gain calibration by cancellation.
//!
//! With the squeezers unpumped, a strong modulation tone rides on both EPR
//! beams. Bob's copy arrives directly, Alice's copy arrives through the
//! classical channel with the opposite sign, so Victor sees a residual
//! amplitude `(1 - g)·A`. The suppression `S = -20·log10|1 - g|` therefore
//! bounds the gain error by `|g - 1| <= 10^{-S/20}`.

use alloc::format;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::gaussian::{FeedForward, GaussianState, Quadrature};
use crate::teleporter::{run_heisenberg, TeleporterConfig};

/// Suppression reported when the residual vanishes (`g = 1` exactly).
pub const SUPPRESSION_FLOOR_DB: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CancellationResult {
    pub suppression_db: f64,
    /// `|g - 1|` implied by the suppression.
    pub gain_bound: f64,
    /// Set when the suppression hit [`SUPPRESSION_FLOOR_DB`].
    pub at_floor: bool,
}

/// `|g - 1| <= 10^{-S/20}`.
pub fn gain_bound_from_suppression(suppression_db: f64) -> Result<f64> {
    if !(suppression_db >= 0.0) || suppression_db.is_infinite() {
        return Err(Error::invalid(format!(
            "suppression {suppression_db} dB must be finite and >= 0"
        )));
    }
    Ok(libm::pow(10.0, -suppression_db / 20.0))
}

/// Pushes a tone of amplitude `tone_amplitude` (x quadrature) through the
/// unpumped teleporter at gain `g` and measures how far it is suppressed.
pub fn simulate_cancellation(gain: f64, tone_amplitude: f64) -> Result<CancellationResult> {
    if !(tone_amplitude > 0.0) || !tone_amplitude.is_finite() {
        return Err(Error::invalid(format!(
            "tone amplitude {tone_amplitude} must be positive and finite"
        )));
    }
    if !gain.is_finite() {
        return Err(Error::invalid("gain must be finite"));
    }
    // Modes: input (vacuum), A, B; the tone sits on both EPR beams.
    let state = GaussianState::vacuum(3)?
        .displace(1, tone_amplitude, 0.0)?
        .displace(2, tone_amplitude, 0.0)?
        .beam_splitter(0, 1, 0.5, PI)?;
    let bob = state.feed_forward(&[
        FeedForward {
            source: 0,
            quadrature: Quadrature::X,
            target: 2,
            gain: SQRT_2 * gain,
        },
        FeedForward {
            source: 1,
            quadrature: Quadrature::P,
            target: 2,
            gain: SQRT_2 * gain,
        },
    ])?;
    let residual = libm::fabs(bob.quadrature_mean(0, Quadrature::X)? / tone_amplitude);
    let floor = gain_bound_from_suppression(SUPPRESSION_FLOOR_DB)?;
    if residual <= floor {
        return Ok(CancellationResult {
            suppression_db: SUPPRESSION_FLOOR_DB,
            gain_bound: floor,
            at_floor: true,
        });
    }
    let suppression_db = -20.0 * libm::log10(residual);
    Ok(CancellationResult {
        suppression_db,
        gain_bound: residual,
        at_floor: false,
    })
}

/// Output variance of a vacuum teleported without entanglement at unit
/// gain, computed by running the teleporter.
pub fn classical_floor() -> Result<f64> {
    classical_floor_at_gain(1.0)
}

pub fn classical_floor_at_gain(gain: f64) -> Result<f64> {
    Ok(run_heisenberg(&TeleporterConfig::ideal(0.0, gain))?
        .sigma_x
        .linear)
}

/// Rounds an amplitude gain to the nearest attenuator setting, in steps of
/// `step_db` dB of amplitude (`20·log10 g`). Zero stays zero.
pub fn quantize_gain(gain: f64, step_db: f64) -> f64 {
    if gain == 0.0 || !(step_db > 0.0) {
        return gain;
    }
    let level = 20.0 * libm::log10(libm::fabs(gain));
    let snapped = libm::round(level / step_db) * step_db;
    libm::copysign(libm::pow(10.0, snapped / 20.0), gain)
}
