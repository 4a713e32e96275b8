use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::db;

use super::config::{Engine, TeleporterConfig};
use super::heisenberg::{report_for, run_heisenberg, teleport_state, verify};
use super::report::TeleportReport;

/// One row of a gain sweep (closed-form engine, `g_x = g_p = gain`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GainRow {
    pub gain: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub fidelity: f64,
    pub n_s: f64,
}

impl GainRow {
    pub fn sigma_x_db(&self) -> f64 {
        db(self.sigma_x).unwrap_or(f64::NAN)
    }

    pub fn sigma_p_db(&self) -> f64 {
        db(self.sigma_p).unwrap_or(f64::NAN)
    }
}

/// Output variances and fidelity for each gain, in the order given.
pub fn sweep_gain(config: &TeleporterConfig, gains: &[f64]) -> Result<Vec<GainRow>> {
    if gains.is_empty() {
        return Err(Error::invalid("gain sweep needs at least one gain"));
    }
    gains
        .iter()
        .map(|&g| {
            let rep = run_heisenberg(&config.with_gains(g, g))?;
            Ok(GainRow {
                gain: g,
                sigma_x: rep.sigma_x.linear,
                sigma_p: rep.sigma_p.linear,
                fidelity: rep.fidelity,
                n_s: rep.n_s,
            })
        })
        .collect()
}

/// Rounding slack when comparing a fidelity against the classical 1/2, so
/// that a chain sitting exactly at the limit does not count as crossing it.
const CLASSICAL_TOL: f64 = 1e-12;

/// A chain of teleporters, each fed by the previous output.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialRun {
    /// Fidelity after the last step.
    pub fidelity: f64,
    /// Victor's view of the output after each step.
    pub steps: Vec<TeleportReport>,
    /// First step (1-based) whose fidelity is below 1/2.
    pub first_below_classical: Option<usize>,
}

/// Composes `n` teleporters with fresh, identical resources. Verification
/// happens on a copy after each step; the chain itself carries Bob's
/// unmeasured output forward.
pub fn sequential(config: &TeleporterConfig, n: usize) -> Result<SequentialRun> {
    if n == 0 {
        return Err(Error::invalid("sequential teleportation needs n >= 1"));
    }
    config.validate()?;
    let input = config.input.state()?;
    let mut state = input.clone();
    let mut steps = Vec::with_capacity(n);
    for _ in 0..n {
        state = teleport_state(config, &state)?;
        let verified = verify(config, state.clone())?;
        steps.push(report_for(&verified, &input, Engine::Heisenberg)?);
    }
    let first_below_classical = steps
        .iter()
        .position(|r| r.fidelity < 0.5 - CLASSICAL_TOL)
        .map(|i| i + 1);
    Ok(SequentialRun {
        fidelity: steps[n - 1].fidelity,
        steps,
        first_below_classical,
    })
}
