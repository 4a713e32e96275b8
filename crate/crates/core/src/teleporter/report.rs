use crate::error::Result;
use crate::metrics::{db, fidelity_from_variances, n_sequential};

use super::config::Engine;

/// A quadrature variance in shot-noise units, with its dB value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Variance {
    pub linear: f64,
    pub db: f64,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub std_error: Option<f64>,
}

impl Variance {
    pub fn new(linear: f64, std_error: Option<f64>) -> Result<Self> {
        Ok(Variance {
            linear,
            db: db(linear)?,
            std_error,
        })
    }
}

/// Outcome of one teleportation run as Victor sees it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TeleportReport {
    pub sigma_x: Variance,
    pub sigma_p: Variance,
    /// Coherent-input fidelity from the two variances.
    pub fidelity: f64,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub fidelity_std_error: Option<f64>,
    /// Full overlap with the input coherent state, including amplitude
    /// mismatch. Only available from the closed-form engine.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub overlap_fidelity: Option<f64>,
    /// `F/(1-F)`; infinite at `F = 1`.
    pub n_s: f64,
    pub r_eff: f64,
    pub mean_out: [f64; 2],
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub mean_std_error: Option<[f64; 2]>,
    pub engine: Engine,
}

impl TeleportReport {
    pub(crate) fn from_variances(
        sigma_x: Variance,
        sigma_p: Variance,
        mean_out: [f64; 2],
        engine: Engine,
    ) -> Result<Self> {
        let fidelity = fidelity_from_variances(sigma_x.linear, sigma_p.linear)?.value();
        let (n_s, r_eff) = if fidelity < 1.0 {
            let cap = n_sequential(fidelity)?;
            (cap.n_s, cap.r_eff)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Ok(TeleportReport {
            sigma_x,
            sigma_p,
            fidelity,
            fidelity_std_error: None,
            overlap_fidelity: None,
            n_s,
            r_eff,
            mean_out,
            mean_std_error: None,
            engine,
        })
    }
}
