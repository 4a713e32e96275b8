//! Run reports: one TOML document per run.
//!
//! A report is a `[meta]` block (tool version, timestamp, payload hash) and a
//! `[payload]` block holding the results and the configuration that produced
//! them. The hash covers the payload only, so two runs with the same config
//! and seed hash identically whatever their timestamps.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use cvqt_core::calibration::CancellationResult;
use cvqt_core::teleporter::GainRow;
use cvqt_core::{OpoParams, TeleportReport, TeleporterConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub meta: Meta,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub tool_version: String,
    pub generated_at_unix: u64,
    pub payload_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Payload {
    Teleport(TeleportPayload),
    SweepGain(SweepPayload),
    Sequential(SequentialPayload),
    OpoSpectrum(OpoPayload),
    Calibrate(CalibratePayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeleportPayload {
    /// The configuration actually run, after command-line overrides.
    pub config: TeleporterConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub report: TeleportReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPayload {
    pub config: TeleporterConfig,
    pub rows: Vec<GainRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialRow {
    pub n: usize,
    pub fidelity: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialPayload {
    pub config: TeleporterConfig,
    pub n_max: usize,
    /// First `n` with fidelity below 1/2, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_below_classical: Option<usize>,
    pub rows: Vec<SequentialRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpoRow {
    pub sideband_mhz: f64,
    pub squeezed: f64,
    pub squeezed_db: f64,
    pub antisqueezed: f64,
    pub antisqueezed_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpoPayload {
    pub params: OpoParams,
    pub rows: Vec<OpoRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CancellationRow {
    pub gain: f64,
    pub tone_amplitude: f64,
    pub result: CancellationResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRow {
    pub suppression_db: f64,
    pub gain_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibratePayload {
    /// Output variance with no entanglement at unit gain.
    pub classical_floor: f64,
    pub classical_floor_db: f64,
    #[serde(default)]
    pub cancellations: Vec<CancellationRow>,
    #[serde(default)]
    pub bounds: Vec<BoundRow>,
}

/// Lower-case hex SHA-256 of the payload's TOML encoding.
pub fn payload_hash(payload: &Payload) -> CliResult<String> {
    let text = toml::to_string(payload)?;
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    Ok(out)
}

impl RunReport {
    pub fn new(payload: Payload) -> CliResult<Self> {
        let generated_at_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(RunReport {
            meta: Meta {
                tool_version: TOOL_VERSION.to_string(),
                generated_at_unix,
                payload_sha256: payload_hash(&payload)?,
            },
            payload,
        })
    }

    pub fn emit(&self) -> CliResult<String> {
        Ok(toml::to_string(self)?)
    }

    /// Parses a report and checks its payload hash.
    pub fn load(text: &str) -> CliResult<Self> {
        let report: RunReport =
            toml::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))?;
        let hash = payload_hash(&report.payload)?;
        if hash != report.meta.payload_sha256 {
            return Err(CliError::Config(format!(
                "report payload hash {hash} does not match recorded {}",
                report.meta.payload_sha256
            )));
        }
        Ok(report)
    }
}
