//! Command implementations, independent of argument parsing.

use std::thread;

use cvqt_core::calibration::{classical_floor, gain_bound_from_suppression, simulate_cancellation};
use cvqt_core::metrics::db;
use cvqt_core::opo::squeezing_budget;
use cvqt_core::teleporter::{
    monte_carlo_worker, run_heisenberg, sequential as chain, summarize, sweep_gain,
};
use cvqt_core::{Engine, MonteCarlo, OpoParams, TeleportReport, TeleportTrace, TeleporterConfig};

use crate::error::{CliError, CliResult};
use crate::report::{
    BoundRow, CalibratePayload, CancellationRow, OpoPayload, OpoRow, SequentialPayload,
    SequentialRow, SweepPayload, TeleportPayload,
};

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TONE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Heisenberg,
    MonteCarlo,
}

/// Engine settings from the command line. Any of `seed`, `shots` or
/// `workers` selects the Monte Carlo engine unless `engine` says otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineOverrides {
    pub engine: Option<EngineChoice>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub workers: Option<u32>,
}

impl EngineOverrides {
    pub fn apply(&self, config: TeleporterConfig) -> TeleporterConfig {
        let sampling_flags = self.seed.is_some() || self.shots.is_some() || self.workers.is_some();
        let from_config = match config.engine {
            Engine::MonteCarlo(mc) => Some(mc),
            Engine::Heisenberg => None,
        };
        let want_mc = match self.engine {
            Some(EngineChoice::MonteCarlo) => true,
            Some(EngineChoice::Heisenberg) => false,
            None => from_config.is_some() || sampling_flags,
        };
        let engine = if want_mc {
            let base = from_config.unwrap_or(MonteCarlo::new(DEFAULT_SHOTS, DEFAULT_SEED));
            Engine::MonteCarlo(MonteCarlo {
                shots: self.shots.unwrap_or(base.shots),
                seed: self.seed.unwrap_or(base.seed),
                workers: self.workers.unwrap_or(base.workers),
            })
        } else {
            Engine::Heisenberg
        };
        TeleporterConfig { engine, ..config }
    }
}

/// Monte Carlo run with one thread per worker. The result is the same as
/// running the workers one after another.
pub fn monte_carlo_parallel(
    config: &TeleporterConfig,
    mc: &MonteCarlo,
) -> CliResult<(TeleportReport, TeleportTrace)> {
    let traces = thread::scope(|scope| {
        let handles: Vec<_> = (0..mc.workers)
            .map(|w| scope.spawn(move || monte_carlo_worker(config, mc, w)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("Monte Carlo worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(summarize(mc, traces)?)
}

pub fn teleport(config: &TeleporterConfig) -> CliResult<(TeleportPayload, Option<TeleportTrace>)> {
    config.validate()?;
    let (report, trace, seed) = match &config.engine {
        Engine::Heisenberg => (run_heisenberg(config)?, None, None),
        Engine::MonteCarlo(mc) => {
            let (report, trace) = monte_carlo_parallel(config, mc)?;
            (report, Some(trace), Some(mc.seed))
        }
    };
    Ok((
        TeleportPayload {
            config: *config,
            seed,
            report,
        },
        trace,
    ))
}

/// Closed-form gain sweep; rows come out sorted by gain.
pub fn sweep(config: &TeleporterConfig, gains: &[f64]) -> CliResult<SweepPayload> {
    if gains.is_empty() {
        return Err(CliError::Config(
            "gain sweep needs at least one gain".into(),
        ));
    }
    let mut sorted = gains.to_vec();
    sorted.sort_by(f64::total_cmp);
    let config = TeleporterConfig {
        engine: Engine::Heisenberg,
        ..*config
    };
    Ok(SweepPayload {
        config,
        rows: sweep_gain(&config, &sorted)?,
    })
}

pub fn sequential(config: &TeleporterConfig, n_max: usize) -> CliResult<SequentialPayload> {
    if n_max < 1 {
        return Err(CliError::Config("n-max must be >= 1".into()));
    }
    let config = TeleporterConfig {
        engine: Engine::Heisenberg,
        ..*config
    };
    let run = chain(&config, n_max)?;
    let rows = run
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| SequentialRow {
            n: i + 1,
            fidelity: s.fidelity,
            sigma_x: s.sigma_x.linear,
            sigma_p: s.sigma_p.linear,
        })
        .collect();
    Ok(SequentialPayload {
        config,
        n_max,
        first_below_classical: run.first_below_classical,
        rows,
    })
}

/// Squeezing and antisqueezing (after jitter) at each sideband frequency.
pub fn opo_spectrum(params: &OpoParams, sidebands_mhz: &[f64]) -> CliResult<OpoPayload> {
    params.validate()?;
    let rows = sidebands_mhz
        .iter()
        .map(|&f| {
            let l = squeezing_budget(&params.at_sideband(f))?;
            Ok(OpoRow {
                sideband_mhz: f,
                squeezed: l.squeezed,
                squeezed_db: db(l.squeezed)?,
                antisqueezed: l.antisqueezed,
                antisqueezed_db: db(l.antisqueezed)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(OpoPayload {
        params: *params,
        rows,
    })
}

pub fn calibrate(gains: &[f64], suppressions_db: &[f64], tone: f64) -> CliResult<CalibratePayload> {
    let floor = classical_floor()?;
    let cancellations = gains
        .iter()
        .map(|&gain| {
            Ok(CancellationRow {
                gain,
                tone_amplitude: tone,
                result: simulate_cancellation(gain, tone)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let bounds = suppressions_db
        .iter()
        .map(|&s| {
            Ok(BoundRow {
                suppression_db: s,
                gain_bound: gain_bound_from_suppression(s)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CalibratePayload {
        classical_floor: floor,
        classical_floor_db: db(floor)?,
        cancellations,
        bounds,
    })
}
