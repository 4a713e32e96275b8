//! Squeezing delivered by a below-threshold optical parametric oscillator.
//!
//! The pump is described by its normalized amplitude `x = ε/ε_th ∈ [0, 1)`.
//! The classical parametric gain at resonance is `G₊ = 1/(1-x)²`, and the
//! output quadrature spectra relative to shot noise are
//!
//! ```text
//! S∓(Ω) = 1 ∓ η · 4x / ((1 ± x)² + (Ω/γ)²)
//! ```
//!
//! with `η` the total detection efficiency, `Ω` the sideband frequency and
//! `γ` the cavity half-width (HWHM). Other gain conventions exist, e.g.
//! `G₊ = 1/(1-x²)` for intensity gain; only the amplitude form is
//! implemented.

use alloc::format;

use rand_core::RngCore;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::metrics::db;

/// Physical parameters of one squeezer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct OpoParams {
    /// Classical parametric gain `G₊ >= 1`.
    pub parametric_gain: f64,
    /// Total efficiency, `1 - loss`.
    pub efficiency: f64,
    /// RMS lock-phase error in degrees.
    pub jitter_deg: f64,
    /// Sideband frequency in MHz.
    pub sideband_mhz: f64,
    /// Cavity half-width at half-maximum in MHz.
    pub bandwidth_mhz: f64,
}

impl OpoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.parametric_gain >= 1.0) || !self.parametric_gain.is_finite() {
            return Err(Error::invalid(format!(
                "parametric gain {} must be finite and >= 1",
                self.parametric_gain
            )));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::invalid(format!(
                "efficiency {} outside [0, 1]",
                self.efficiency
            )));
        }
        if !(self.jitter_deg >= 0.0) || !self.jitter_deg.is_finite() {
            return Err(Error::invalid(format!(
                "jitter {} deg must be finite and >= 0",
                self.jitter_deg
            )));
        }
        if !(self.sideband_mhz >= 0.0) || !self.sideband_mhz.is_finite() {
            return Err(Error::invalid(format!(
                "sideband {} MHz must be finite and >= 0",
                self.sideband_mhz
            )));
        }
        if !(self.bandwidth_mhz > 0.0) || !self.bandwidth_mhz.is_finite() {
            return Err(Error::invalid(format!(
                "bandwidth {} MHz must be finite and > 0",
                self.bandwidth_mhz
            )));
        }
        Ok(())
    }

    pub fn at_sideband(self, sideband_mhz: f64) -> Self {
        OpoParams {
            sideband_mhz,
            ..self
        }
    }
}

/// Squeezed and antisqueezed quadrature variances in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SqueezeLevels {
    pub squeezed: f64,
    pub antisqueezed: f64,
}

impl SqueezeLevels {
    pub fn new(squeezed: f64, antisqueezed: f64) -> Result<Self> {
        if !(squeezed > 0.0 && antisqueezed > 0.0)
            || !squeezed.is_finite()
            || !antisqueezed.is_finite()
        {
            return Err(Error::invalid(format!(
                "squeeze levels ({squeezed}, {antisqueezed}) must be positive and finite"
            )));
        }
        Ok(SqueezeLevels {
            squeezed,
            antisqueezed,
        })
    }

    pub fn squeezed_db(&self) -> f64 {
        db(self.squeezed).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn antisqueezed_db(&self) -> f64 {
        db(self.antisqueezed).unwrap_or(f64::NEG_INFINITY)
    }
}

/// Inverts `G₊ = 1/(1-x)²`.
pub fn pump_ratio_from_gain(parametric_gain: f64) -> Result<f64> {
    if !(parametric_gain >= 1.0) || !parametric_gain.is_finite() {
        return Err(Error::invalid(format!(
            "parametric gain {parametric_gain} must be finite and >= 1"
        )));
    }
    Ok(1.0 - 1.0 / libm::sqrt(parametric_gain))
}

/// Squeezing and antisqueezing at the configured sideband, before phase
/// jitter.
pub fn squeezing_spectrum(params: &OpoParams) -> Result<SqueezeLevels> {
    params.validate()?;
    let x = pump_ratio_from_gain(params.parametric_gain)?;
    let w = params.sideband_mhz / params.bandwidth_mhz;
    let w2 = w * w;
    let eta = params.efficiency;
    let squeezed = 1.0 - eta * 4.0 * x / ((1.0 + x) * (1.0 + x) + w2);
    let antisqueezed = 1.0 + eta * 4.0 * x / ((1.0 - x) * (1.0 - x) + w2);
    SqueezeLevels::new(squeezed, antisqueezed)
}

/// Levels seen through a lock with RMS phase error `jitter_deg`, using the
/// small-tilt mixing `S₋' = S₋cos²θ + S₊sin²θ` (and symmetrically for S₊).
pub fn jitter_average(levels: SqueezeLevels, jitter_deg: f64) -> Result<SqueezeLevels> {
    if !(jitter_deg >= 0.0) || !jitter_deg.is_finite() {
        return Err(Error::invalid(format!(
            "jitter {jitter_deg} deg must be >= 0"
        )));
    }
    let (s, c) = libm::sincos(jitter_deg.to_radians());
    let (s2, c2) = (s * s, c * c);
    SqueezeLevels::new(
        levels.squeezed * c2 + levels.antisqueezed * s2,
        levels.antisqueezed * c2 + levels.squeezed * s2,
    )
}

/// Sampled counterpart of [`jitter_average`]: averages the tilted levels over
/// `draws` phase errors from `Normal(0, jitter_deg)`.
pub fn jitter_average_monte_carlo<R: RngCore + ?Sized>(
    levels: SqueezeLevels,
    jitter_deg: f64,
    draws: usize,
    rng: &mut R,
) -> Result<SqueezeLevels> {
    if draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    if !(jitter_deg >= 0.0) || !jitter_deg.is_finite() {
        return Err(Error::invalid(format!(
            "jitter {jitter_deg} deg must be >= 0"
        )));
    }
    let dist =
        Normal::new(0.0, jitter_deg.to_radians()).map_err(|e| Error::invalid(format!("{e}")))?;
    let mut acc_s = 0.0;
    let mut acc_a = 0.0;
    for _ in 0..draws {
        let theta: f64 = dist.sample(rng);
        let (s, c) = libm::sincos(theta);
        acc_s += levels.squeezed * c * c + levels.antisqueezed * s * s;
        acc_a += levels.antisqueezed * c * c + levels.squeezed * s * s;
    }
    SqueezeLevels::new(acc_s / draws as f64, acc_a / draws as f64)
}

/// Spectrum followed by the deterministic jitter model.
pub fn squeezing_budget(params: &OpoParams) -> Result<SqueezeLevels> {
    jitter_average(squeezing_spectrum(params)?, params.jitter_deg)
}

/// `r = -ln(S₋)/2`.
pub fn effective_r(levels: SqueezeLevels) -> Result<f64> {
    if !(levels.squeezed > 0.0) {
        return Err(Error::invalid(format!(
            "squeezed variance {} must be positive",
            levels.squeezed
        )));
    }
    Ok(-0.5 * libm::log(levels.squeezed))
}
