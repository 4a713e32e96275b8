use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, Quadrature};
use crate::metrics::coherent_overlap;

use super::circuit::{
    effective_rms, feed_forward_links, pre_measurement, LockPoint, Locks, Recorder, Sources, Stage,
};
use super::config::{Engine, TeleporterConfig};
use super::report::{TeleportReport, Variance};

fn averaged_locks(config: &TeleporterConfig) -> Locks {
    Locks::Averaged(effective_rms(
        &config.jitter_deg,
        &config.squeezer_a,
        &config.squeezer_b,
    ))
}

fn propagate(
    config: &TeleporterConfig,
    input: &GaussianState,
    locks: &Locks,
    rec: &mut Recorder<'_>,
) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return Err(Error::invalid("teleporter input must be a single mode"));
    }
    let alice = pre_measurement(config, &Sources::of(config)?, input, locks, rec)?;
    // Measuring u and v and displacing B by the scaled outcomes, averaged
    // over outcomes, is the linear map x_B += √2 g_x x_u, p_B += √2 g_p p_v.
    let out = alice.feed_forward(&feed_forward_links(config))?;
    rec.push("bob", &out);
    Ok(out)
}

/// Bob's output for an arbitrary single-mode Gaussian input, before
/// Victor's measurement.
pub fn teleport_state(config: &TeleporterConfig, input: &GaussianState) -> Result<GaussianState> {
    config.validate()?;
    propagate(config, input, &averaged_locks(config), &mut Recorder(None))
}

/// Every intermediate state of the closed-form run, in circuit order.
pub fn heisenberg_stages(config: &TeleporterConfig) -> Result<Vec<Stage>> {
    config.validate()?;
    let locks = averaged_locks(config);
    let mut stages = Vec::new();
    let mut rec = Recorder(Some(&mut stages));
    let input = config.input.state()?;
    rec.push("input", &input);
    let out = propagate(config, &input, &locks, &mut rec)?;
    let verified = locks.apply(out, 0, LockPoint::VictorLo)?;
    rec.push("victor", &verified);
    Ok(stages)
}

pub(crate) fn verify(config: &TeleporterConfig, output: GaussianState) -> Result<GaussianState> {
    averaged_locks(config).apply(output, 0, LockPoint::VictorLo)
}

pub(crate) fn report_for(
    verified: &GaussianState,
    input: &GaussianState,
    engine: Engine,
) -> Result<TeleportReport> {
    let sx = verified.quadrature_variance(0, Quadrature::X)?;
    let sp = verified.quadrature_variance(0, Quadrature::P)?;
    let mean = [verified.mean()[0], verified.mean()[1]];
    let mut report = TeleportReport::from_variances(
        Variance::new(sx, None)?,
        Variance::new(sp, None)?,
        mean,
        engine,
    )?;
    report.overlap_fidelity =
        Some(coherent_overlap(verified, [input.mean()[0], input.mean()[1]])?.value());
    Ok(report)
}

/// Closed-form output moments, propagated operator by operator through the
/// circuit.
pub fn run_heisenberg(config: &TeleporterConfig) -> Result<TeleportReport> {
    config.validate()?;
    let input = config.input.state()?;
    let out = propagate(config, &input, &averaged_locks(config), &mut Recorder(None))?;
    let verified = verify(config, out)?;
    report_for(&verified, &input, Engine::Heisenberg)
}
