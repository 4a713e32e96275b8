//! Argument parsing and command dispatch for the `cvqt` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvqt_core::OpoParams;

use crate::config::{sideband_grid, ExperimentConfig, SweepSpec};
use crate::error::{CliError, CliResult};
use crate::report::{Payload, RunReport};
use crate::run::{self, EngineChoice, EngineOverrides, DEFAULT_TONE};
use crate::tables;

#[derive(Debug, Parser)]
#[command(
    name = "cvqt",
    version,
    about = "Continuous-variable quantum teleportation simulator"
)]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Monte Carlo seed; selects the Monte Carlo engine.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo shot count; selects the Monte Carlo engine.
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<u64>,
    /// Parallel Monte Carlo workers; results depend on (seed, workers).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineArg>,
    /// Write the output here instead of the config's output path or stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// CSV with a header row.
    Table,
    /// TOML run report with metadata.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Heisenberg,
    MonteCarlo,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Teleport the configured input once.
    Teleport {
        /// Per-shot CSV records of a Monte Carlo run.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Output variances and fidelity against the channel gain.
    SweepGain(SweepArgs),
    /// Fidelity of a chain of teleporters.
    Sequential {
        #[arg(long, value_name = "N")]
        n_max: Option<usize>,
    },
    /// Squeezing spectrum of an OPO against sideband frequency.
    OpoSpectrum(OpoArgs),
    /// Unit-gain calibration by cancellation.
    Calibrate {
        /// Gain to test by cancellation (repeatable).
        #[arg(long = "gain", value_name = "G")]
        gains: Vec<f64>,
        /// Measured suppression to convert into a gain bound (repeatable).
        #[arg(
            long = "suppression-db",
            value_name = "DB",
            allow_negative_numbers = true
        )]
        suppression_db: Vec<f64>,
        #[arg(long, value_name = "AMPLITUDE")]
        tone: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated gains.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["start", "stop", "step"])]
    pub gains: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["stop", "step"])]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["start", "step"])]
    pub stop: Option<f64>,
    #[arg(long, requires_all = ["start", "stop"])]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OpoArgs {
    /// Parametric gain G₊.
    #[arg(long)]
    pub parametric_gain: Option<f64>,
    /// Total efficiency (1 - loss).
    #[arg(long)]
    pub efficiency: Option<f64>,
    #[arg(long)]
    pub jitter_deg: Option<f64>,
    /// Cavity half-width at half-maximum.
    #[arg(long)]
    pub bandwidth_mhz: Option<f64>,
    #[arg(long)]
    pub start_mhz: Option<f64>,
    #[arg(long)]
    pub stop_mhz: Option<f64>,
    #[arg(long)]
    pub step_mhz: Option<f64>,
}

impl Cli {
    fn overrides(&self) -> EngineOverrides {
        EngineOverrides {
            engine: self.engine.map(|e| match e {
                EngineArg::Heisenberg => EngineChoice::Heisenberg,
                EngineArg::MonteCarlo => EngineChoice::MonteCarlo,
            }),
            seed: self.seed,
            shots: self.shots,
            workers: self.workers,
        }
    }

    fn load_config(&self) -> CliResult<Option<ExperimentConfig>> {
        self.config
            .as_deref()
            .map(ExperimentConfig::load)
            .transpose()
    }

    fn require_config(&self) -> CliResult<ExperimentConfig> {
        self.load_config()?
            .ok_or_else(|| CliError::Config("this command needs --config PATH".into()))
    }
}

/// Where and how to write a result.
struct Sink<'a> {
    format: Format,
    path: Option<&'a Path>,
}

impl Sink<'_> {
    fn write<T>(
        &self,
        result: T,
        table: fn(&T) -> CliResult<String>,
        wrap: fn(T) -> Payload,
    ) -> CliResult<()> {
        let text = match self.format {
            Format::Table => table(&result)?,
            Format::Report => RunReport::new(wrap(result))?.emit()?,
        };
        write_text(self.path, &text)
    }
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn sink<'a>(cli: &'a Cli, cfg: Option<&'a ExperimentConfig>, default: Format) -> Sink<'a> {
    let format = cli.format.unwrap_or(default);
    let from_config = cfg.and_then(|c| match format {
        Format::Table => c.output.table.as_deref(),
        Format::Report => c.output.report.as_deref(),
    });
    Sink {
        format,
        path: cli.out.as_deref().or(from_config),
    }
}

fn opo_params(args: &OpoArgs, base: Option<OpoParams>) -> CliResult<OpoParams> {
    let missing = |name: &str| {
        CliError::Config(format!(
            "opo-spectrum needs --{name} or an [opo_spectrum] config"
        ))
    };
    Ok(OpoParams {
        parametric_gain: args
            .parametric_gain
            .or(base.map(|b| b.parametric_gain))
            .ok_or_else(|| missing("parametric-gain"))?,
        efficiency: args
            .efficiency
            .or(base.map(|b| b.efficiency))
            .unwrap_or(1.0),
        jitter_deg: args
            .jitter_deg
            .or(base.map(|b| b.jitter_deg))
            .unwrap_or(0.0),
        sideband_mhz: 0.0,
        bandwidth_mhz: args
            .bandwidth_mhz
            .or(base.map(|b| b.bandwidth_mhz))
            .ok_or_else(|| missing("bandwidth-mhz"))?,
    })
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Teleport { trace } => {
            let cfg = cli.require_config()?;
            let tele = cli.overrides().apply(cfg.teleporter);
            let (payload, shots) = run::teleport(&tele)?;
            eprintln!(
                "sigma_x = {:.4} ({:+.3} dB), sigma_p = {:.4} ({:+.3} dB), F = {:.4}",
                payload.report.sigma_x.linear,
                payload.report.sigma_x.db,
                payload.report.sigma_p.linear,
                payload.report.sigma_p.db,
                payload.report.fidelity
            );
            if let (Some(shots), Some(path)) =
                (&shots, trace.as_deref().or(cfg.output.trace.as_deref()))
            {
                write_text(Some(path), &tables::trace_table(shots)?)?;
            }
            sink(cli, Some(&cfg), Format::Report).write(
                payload,
                |t| tables::teleport_table(&t.report),
                Payload::Teleport,
            )
        }
        Command::SweepGain(args) => {
            let cfg = cli.require_config()?;
            let spec = match (&args.gains, args.start, args.stop, args.step) {
                (Some(g), ..) => SweepSpec::list(g.clone()),
                (None, Some(a), Some(b), Some(s)) => SweepSpec::range(a, b, s),
                _ => cfg.sweep.clone().ok_or_else(|| {
                    CliError::Config(
                        "sweep-gain needs --gains, --start/--stop/--step or a [sweep] config"
                            .into(),
                    )
                })?,
            };
            let payload = run::sweep(&cfg.teleporter, &spec.gains()?)?;
            sink(cli, Some(&cfg), Format::Table).write(
                payload,
                tables::gain_table,
                Payload::SweepGain,
            )
        }
        Command::Sequential { n_max } => {
            let cfg = cli.require_config()?;
            let n = n_max.or(cfg.sequence.map(|s| s.n_max)).ok_or_else(|| {
                CliError::Config("sequential needs --n-max or a [sequence] config".into())
            })?;
            let payload = run::sequential(&cfg.teleporter, n)?;
            if let Some(n) = payload.first_below_classical {
                eprintln!("fidelity first drops below 1/2 at n = {n}");
            }
            sink(cli, Some(&cfg), Format::Table).write(
                payload,
                tables::sequential_table,
                Payload::Sequential,
            )
        }
        Command::OpoSpectrum(args) => {
            let cfg = cli.load_config()?;
            let spec = cfg.as_ref().and_then(|c| c.opo_spectrum);
            let params = opo_params(args, spec.map(|s| s.params))?;
            let grid = sideband_grid(
                args.start_mhz.or(spec.map(|s| s.start_mhz)).unwrap_or(0.0),
                args.stop_mhz.or(spec.map(|s| s.stop_mhz)).unwrap_or(10.0),
                args.step_mhz.or(spec.map(|s| s.step_mhz)).unwrap_or(0.25),
            )?;
            let payload = run::opo_spectrum(&params, &grid)?;
            sink(cli, cfg.as_ref(), Format::Table).write(
                payload,
                tables::opo_table,
                Payload::OpoSpectrum,
            )
        }
        Command::Calibrate {
            gains,
            suppression_db,
            tone,
        } => {
            let cfg = cli.load_config()?;
            let spec = cfg
                .as_ref()
                .and_then(|c| c.calibration.clone())
                .unwrap_or_default();
            let gains = if gains.is_empty() {
                spec.gains
            } else {
                gains.clone()
            };
            let sup = if suppression_db.is_empty() {
                spec.suppression_db
            } else {
                suppression_db.clone()
            };
            let tone = tone.or(spec.tone_amplitude).unwrap_or(DEFAULT_TONE);
            let payload = run::calibrate(&gains, &sup, tone)?;
            eprintln!(
                "classical floor = {} ({:+.3} dB)",
                payload.classical_floor, payload.classical_floor_db
            );
            for b in &payload.bounds {
                eprintln!(
                    "{} dB suppression -> |g - 1| <= {:.6}",
                    b.suppression_db, b.gain_bound
                );
            }
            sink(cli, cfg.as_ref(), Format::Report).write(
                payload,
                tables::calibrate_table,
                Payload::Calibrate,
            )
        }
    }
}
