//! The teleportation protocol.
//!
//! Two squeezed beams (one rotated by π/2) meet on a half beam splitter to
//! form the EPR pair `(A, B)`. Alice mixes the input with `A` on a second
//! half beam splitter, giving `x_u = (x_in - x_A)/√2` and
//! `p_v = (p_in + p_A)/√2`, and measures both. Bob displaces `B` by
//! `(√2 g_x x_u, √2 g_p p_v)`; Victor verifies the result with homodyne
//! detection.
//!
//! [`run_heisenberg`] propagates moments through the circuit in closed form;
//! [`run_monte_carlo`] samples every measurement shot by shot. Both share
//! the same circuit description.

mod circuit;
mod config;
mod heisenberg;
mod monte_carlo;
mod report;
mod sweep;

pub use circuit::{build_epr, LockPoint, Stage};
pub use config::{
    Efficiencies, Engine, InputState, LockJitter, MonteCarlo, SqueezerSpec, TeleporterConfig,
};
pub use heisenberg::{heisenberg_stages, run_heisenberg, teleport_state};
pub use monte_carlo::{
    monte_carlo_stages, monte_carlo_worker, run_monte_carlo, summarize, ShotRecord, TeleportTrace,
};
pub use report::{TeleportReport, Variance};
pub use sweep::{sequential, sweep_gain, GainRow, SequentialRun};

use crate::error::Result;

/// Runs the engine selected in `config.engine`.
pub fn run(config: &TeleporterConfig) -> Result<(TeleportReport, Option<TeleportTrace>)> {
    match &config.engine {
        Engine::Heisenberg => Ok((run_heisenberg(config)?, None)),
        Engine::MonteCarlo(mc) => {
            let (report, trace) = run_monte_carlo(config, mc)?;
            Ok((report, Some(trace)))
        }
    }
}
