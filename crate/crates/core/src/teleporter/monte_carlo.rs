use alloc::{format, vec::Vec};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, Quadrature};
use crate::metrics::fidelity_standard_error;

use super::circuit::{
    effective_rms, feed_forward_gains, pre_measurement, LockPoint, Locks, Recorder, Sources, Stage,
};
use super::config::{Engine, MonteCarlo, TeleporterConfig};
use super::report::{TeleportReport, Variance};

/// Everything measured or applied in one shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    /// Alice's outcome for `x_u`.
    pub x_u: f64,
    /// Alice's outcome for `p_v`.
    pub p_v: f64,
    /// Displacement Bob applied.
    pub dx: f64,
    pub dp: f64,
    /// Victor's x and p outcomes on the same output state.
    pub victor_x: f64,
    pub victor_p: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TeleportTrace {
    pub records: Vec<ShotRecord>,
}

impl TeleportTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Per-run constants shared by every shot.
struct Shooter<'a> {
    config: &'a TeleporterConfig,
    sources: Sources,
    input: GaussianState,
    rms: [f64; 5],
    gains: (f64, f64),
    /// Without jitter the pre-measurement state is the same every shot.
    fixed: Option<GaussianState>,
}

impl<'a> Shooter<'a> {
    fn new(config: &'a TeleporterConfig) -> Result<Self> {
        config.validate()?;
        let rms = effective_rms(&config.jitter_deg, &config.squeezer_a, &config.squeezer_b);
        let input = config.input.state()?;
        let sources = Sources::of(config)?;
        let fixed = if rms.iter().all(|&s| s == 0.0) {
            Some(pre_measurement(
                config,
                &sources,
                &input,
                &Locks::Drawn([0.0; 5]),
                &mut Recorder(None),
            )?)
        } else {
            None
        };
        Ok(Shooter {
            config,
            sources,
            input,
            rms,
            gains: feed_forward_gains(config),
            fixed,
        })
    }

    fn shot<R: RngCore>(&self, rng: &mut R, rec: &mut Recorder<'_>) -> Result<ShotRecord> {
        let mut angles = [0.0; 5];
        for (angle, &sigma) in angles.iter_mut().zip(self.rms.iter()) {
            if sigma > 0.0 {
                let z: f64 = StandardNormal.sample(rng);
                *angle = sigma * z;
            }
        }
        let locks = Locks::Drawn(angles);
        let drawn;
        let alice: &GaussianState = match &self.fixed {
            Some(s) if rec.0.is_none() => s,
            _ => {
                drawn = pre_measurement(self.config, &self.sources, &self.input, &locks, rec)?;
                &drawn
            }
        };
        let (x_u, rest) = alice.homodyne(0, Quadrature::X, rng)?;
        rec.push("after x_u", &rest);
        let (p_v, bob) = rest.homodyne(0, Quadrature::P, rng)?;
        rec.push("after p_v", &bob);
        let (dx, dp) = (self.gains.0 * x_u.value, self.gains.1 * p_v.value);
        let bob = bob.displace(0, dx, dp)?;
        rec.push("bob", &bob);
        let bob = locks.apply(bob, 0, LockPoint::VictorLo)?;
        rec.push("victor", &bob);
        let (vx, _) = bob.homodyne(0, Quadrature::X, rng)?;
        let (vp, _) = bob.homodyne(0, Quadrature::P, rng)?;
        Ok(ShotRecord {
            x_u: x_u.value,
            p_v: p_v.value,
            dx,
            dp,
            victor_x: vx.value,
            victor_p: vp.value,
        })
    }
}

fn worker_rng(mc: &MonteCarlo, worker: u32) -> Result<ChaCha8Rng> {
    if mc.shots < 1 || mc.workers < 1 {
        return Err(Error::invalid(
            "Monte Carlo needs at least one shot and one worker",
        ));
    }
    if worker >= mc.workers {
        return Err(Error::invalid(format!(
            "worker {worker} out of range for {} workers",
            mc.workers
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(u64::from(worker));
    Ok(rng)
}

/// Runs the shots assigned to `worker`. Workers are independent: the
/// generator is ChaCha8 seeded with `mc.seed` on stream `worker`.
pub fn monte_carlo_worker(
    config: &TeleporterConfig,
    mc: &MonteCarlo,
    worker: u32,
) -> Result<TeleportTrace> {
    let shooter = Shooter::new(config)?;
    let mut rng = worker_rng(mc, worker)?;
    let (lo, hi) = mc.worker_range(worker);
    let records = (lo..hi)
        .map(|_| shooter.shot(&mut rng, &mut Recorder(None)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TeleportTrace { records })
}

/// Every intermediate state of the first `shots` shots of worker 0, in
/// order. The shots are the same ones [`monte_carlo_worker`] produces.
pub fn monte_carlo_stages(
    config: &TeleporterConfig,
    mc: &MonteCarlo,
    shots: usize,
) -> Result<Vec<Stage>> {
    let shooter = Shooter::new(config)?;
    let mut rng = worker_rng(mc, 0)?;
    let mut stages = Vec::new();
    for _ in 0..shots {
        shooter.shot(&mut rng, &mut Recorder(Some(&mut stages)))?;
    }
    Ok(stages)
}

struct Moments {
    mean: f64,
    var: f64,
    mean_se: f64,
    var_se: f64,
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> Moments {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let (m2, m4) = values.fold((0.0, 0.0), |(m2, m4), v| {
        let d = (v - mean) * (v - mean);
        (m2 + d, m4 + d * d)
    });
    let var = m2 / (n - 1.0);
    let central4 = m4 / n;
    let biased = m2 / n;
    Moments {
        mean,
        var,
        mean_se: libm::sqrt(var / n),
        var_se: libm::sqrt(((central4 - biased * biased) / n).max(0.0)),
    }
}

/// Joins per-worker traces (in worker order) and reduces them to a report.
pub fn summarize(
    mc: &MonteCarlo,
    traces: Vec<TeleportTrace>,
) -> Result<(TeleportReport, TeleportTrace)> {
    let mut all = TeleportTrace {
        records: Vec::with_capacity(mc.shots as usize),
    };
    for t in traces {
        all.records.extend(t.records);
    }
    if all.len() as u64 != mc.shots {
        return Err(Error::invalid(format!(
            "traces hold {} shots, expected {}",
            all.len(),
            mc.shots
        )));
    }
    if all.len() < 2 {
        return Err(Error::invalid(
            "at least two shots are needed to estimate a variance",
        ));
    }
    let x = moments(all.records.iter().map(|r| r.victor_x));
    let p = moments(all.records.iter().map(|r| r.victor_p));
    let mut report = TeleportReport::from_variances(
        Variance::new(x.var, Some(x.var_se))?,
        Variance::new(p.var, Some(p.var_se))?,
        [x.mean, p.mean],
        Engine::MonteCarlo(*mc),
    )?;
    report.fidelity_std_error = Some(fidelity_standard_error(x.var, p.var, x.var_se, p.var_se));
    report.mean_std_error = Some([x.mean_se, p.mean_se]);
    Ok((report, all))
}

/// Shot-by-shot protocol: Alice's homodynes with conditional updates, Bob's
/// displacement by her outcomes, Victor's homodyne. Workers run in sequence
/// here; results are identical to running them in parallel.
pub fn run_monte_carlo(
    config: &TeleporterConfig,
    mc: &MonteCarlo,
) -> Result<(TeleportReport, TeleportTrace)> {
    let traces = (0..mc.workers.max(1))
        .map(|w| monte_carlo_worker(config, mc, w))
        .collect::<Result<Vec<_>>>()?;
    summarize(mc, traces)
}
