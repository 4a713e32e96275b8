//! On-disk experiment description.
//!
//! A config is a TOML document with a `schema_version` and a
//! `[teleporter]` table; optional tables drive the sweep, sequence, OPO and
//! calibration commands. Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use cvqt_core::{OpoParams, TeleporterConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub teleporter: TeleporterConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opo_spectrum: Option<OpoSpectrumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Gains to sweep: either an explicit `gains` list or an inclusive
/// `start`/`stop`/`step` range.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl SweepSpec {
    pub fn list(gains: Vec<f64>) -> Self {
        SweepSpec {
            gains: Some(gains),
            ..Default::default()
        }
    }

    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        SweepSpec {
            gains: None,
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
        }
    }

    /// The gains, sorted ascending.
    pub fn gains(&self) -> CliResult<Vec<f64>> {
        let mut gains = match (&self.gains, self.start, self.stop, self.step) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(start), Some(stop), Some(step)) => {
                if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    return Err(CliError::Config(format!(
                        "sweep range needs finite bounds and step > 0 (got {start}..{stop} by {step})"
                    )));
                }
                if stop < start {
                    return Err(CliError::Config(format!(
                        "sweep range is empty: stop {stop} < start {start}"
                    )));
                }
                // Counting steps avoids drift from repeated addition.
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
            _ => {
                return Err(CliError::Config(
                    "sweep needs either `gains` or all of `start`, `stop`, `step`".into(),
                ))
            }
        };
        if gains.is_empty() {
            return Err(CliError::Config("sweep has no gains".into()));
        }
        if let Some(g) = gains.iter().find(|g| !g.is_finite()) {
            return Err(CliError::Config(format!("sweep gain {g} is not finite")));
        }
        gains.sort_by(f64::total_cmp);
        Ok(gains)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpoSpectrumSpec {
    pub params: OpoParams,
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub step_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    /// Gains to push through the cancellation measurement.
    pub gains: Vec<f64>,
    /// Measured suppressions to convert into gain bounds.
    pub suppression_db: Vec<f64>,
    pub tone_amplitude: Option<f64>,
}

/// Default output locations; `--out` overrides them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub table: Option<PathBuf>,
    /// Per-shot records of a Monte Carlo run, as CSV.
    pub trace: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(teleporter: TeleporterConfig) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            teleporter,
            sweep: None,
            sequence: None,
            opo_spectrum: None,
            calibration: None,
            output: OutputSpec::default(),
        }
    }

    /// Parses and validates a config document. `origin` labels messages.
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "{origin}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Re-checks every physical bound after parsing.
    pub fn validate(&self) -> CliResult<()> {
        self.teleporter.validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.gains()?;
        }
        if let Some(seq) = self.sequence {
            if seq.n_max < 1 {
                return Err(CliError::Config("sequence n_max must be >= 1".into()));
            }
        }
        if let Some(spec) = &self.opo_spectrum {
            spec.params.validate()?;
            sideband_grid(spec.start_mhz, spec.stop_mhz, spec.step_mhz)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> CliResult<String> {
        Ok(toml::to_string(self)?)
    }
}

/// Inclusive grid of sideband frequencies in MHz.
pub fn sideband_grid(start: f64, stop: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(start >= 0.0) || !(stop >= start) || !(step > 0.0) || !stop.is_finite() {
        return Err(CliError::Config(format!(
            "sideband grid needs 0 <= start <= stop and step > 0 (got {start}..{stop} by {step})"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}
