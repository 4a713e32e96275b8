use alloc::format;

use nalgebra::Complex;

use crate::calibration::quantize_gain;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::opo::{squeezing_spectrum, OpoParams, SqueezeLevels};

/// How one squeezed beam is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum SqueezerSpec {
    /// Pure squeezed vacuum with squeezing parameter `r`.
    Direct { r: f64 },
    /// Pure squeezed vacuum whose squeezed variance is `db` dB (negative).
    SqueezingDb { db: f64 },
    /// Output of a below-threshold OPO. Its own loss shapes the levels and
    /// its `jitter_deg` adds to the squeezer lock.
    Opo(OpoParams),
}

impl SqueezerSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SqueezerSpec::Direct { r } if !r.is_finite() => Err(Error::invalid(format!(
                "squeezing parameter {r} must be finite"
            ))),
            SqueezerSpec::SqueezingDb { db } if !db.is_finite() => Err(Error::invalid(format!(
                "squeezing level {db} dB must be finite"
            ))),
            SqueezerSpec::Opo(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// Single-mode x-squeezed source state.
    pub(crate) fn source(&self) -> Result<GaussianState> {
        let vacuum = GaussianState::vacuum(1)?;
        match *self {
            SqueezerSpec::Direct { r } => vacuum.squeeze(0, r, 0.0),
            SqueezerSpec::SqueezingDb { db } => {
                vacuum.squeeze(0, crate::metrics::r_from_db(db), 0.0)
            }
            SqueezerSpec::Opo(p) => {
                let l = squeezing_spectrum(&p)?;
                GaussianState::from_moments(
                    nalgebra::DVector::zeros(2),
                    nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
                        l.squeezed,
                        l.antisqueezed,
                    ])),
                )
            }
        }
    }

    /// Squeezed/antisqueezed variances before any lock jitter.
    pub fn levels(&self) -> Result<SqueezeLevels> {
        let s = self.source()?;
        SqueezeLevels::new(s.cov()[(0, 0)], s.cov()[(1, 1)])
    }

    pub(crate) fn intrinsic_jitter_deg(&self) -> f64 {
        match self {
            SqueezerSpec::Opo(p) => p.jitter_deg,
            _ => 0.0,
        }
    }
}

/// Efficiencies at each location. They are lumped per EPR arm:
/// arm A = `path_a · alice_homodyne_x · alice_homodyne_p`,
/// arm B = `path_b · victor_homodyne`, each applied once after the EPR beam
/// splitter. The input beam itself is never attenuated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Efficiencies {
    pub path_a: f64,
    pub path_b: f64,
    pub alice_homodyne_x: f64,
    pub alice_homodyne_p: f64,
    pub victor_homodyne: f64,
}

impl Default for Efficiencies {
    fn default() -> Self {
        Efficiencies {
            path_a: 1.0,
            path_b: 1.0,
            alice_homodyne_x: 1.0,
            alice_homodyne_p: 1.0,
            victor_homodyne: 1.0,
        }
    }
}

impl Efficiencies {
    /// The same lumped efficiency on both arms.
    pub fn symmetric(eta: f64) -> Self {
        Efficiencies {
            path_a: eta,
            path_b: eta,
            ..Default::default()
        }
    }

    pub fn arm_a(&self) -> f64 {
        self.path_a * self.alice_homodyne_x * self.alice_homodyne_p
    }

    pub fn arm_b(&self) -> f64 {
        self.path_b * self.victor_homodyne
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("path_a", self.path_a),
            ("path_b", self.path_b),
            ("alice_homodyne_x", self.alice_homodyne_x),
            ("alice_homodyne_p", self.alice_homodyne_p),
            ("victor_homodyne", self.victor_homodyne),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "efficiency {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// RMS phase error of each lock, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LockJitter {
    pub squeezer_a: f64,
    pub squeezer_b: f64,
    pub epr_hbs: f64,
    pub alice_hbs: f64,
    pub victor_lo: f64,
}

impl LockJitter {
    pub fn uniform(deg: f64) -> Self {
        LockJitter {
            squeezer_a: deg,
            squeezer_b: deg,
            epr_hbs: deg,
            alice_hbs: deg,
            victor_lo: deg,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("squeezer_a", self.squeezer_a),
            ("squeezer_b", self.squeezer_b),
            ("epr_hbs", self.epr_hbs),
            ("alice_hbs", self.alice_hbs),
            ("victor_lo", self.victor_lo),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "jitter {name} = {v} deg must be >= 0"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum InputState {
    #[default]
    Vacuum,
    /// Coherent state `|α⟩`, `α = re + i·im`.
    Coherent { re: f64, im: f64 },
}

impl InputState {
    pub fn state(&self) -> Result<GaussianState> {
        match *self {
            InputState::Vacuum => GaussianState::vacuum(1),
            InputState::Coherent { re, im } => GaussianState::coherent(&[Complex::new(re, im)]),
        }
    }
}

/// Monte Carlo settings. Shots are split into `workers` contiguous blocks,
/// each with its own ChaCha stream, so results depend only on
/// `(seed, workers)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MonteCarlo {
    pub shots: u64,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub workers: u32,
}

#[cfg(feature = "serde")]
fn one() -> u32 {
    1
}

impl MonteCarlo {
    pub fn new(shots: u64, seed: u64) -> Self {
        MonteCarlo {
            shots,
            seed,
            workers: 1,
        }
    }

    /// Half-open shot range handled by `worker`.
    pub fn worker_range(&self, worker: u32) -> (u64, u64) {
        let w = u128::from(self.workers.max(1));
        let n = u128::from(self.shots);
        let lo = n * u128::from(worker) / w;
        let hi = n * (u128::from(worker) + 1) / w;
        (lo as u64, hi as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Engine {
    #[default]
    Heisenberg,
    MonteCarlo(MonteCarlo),
}

/// Full description of one teleportation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TeleporterConfig {
    pub squeezer_a: SqueezerSpec,
    pub squeezer_b: SqueezerSpec,
    pub gain_x: f64,
    pub gain_p: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub efficiencies: Efficiencies,
    #[cfg_attr(feature = "serde", serde(default))]
    pub jitter_deg: LockJitter,
    #[cfg_attr(feature = "serde", serde(default))]
    pub input: InputState,
    #[cfg_attr(feature = "serde", serde(default))]
    pub engine: Engine,
    /// When set, gains are rounded to this attenuator step (dB of amplitude).
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub attenuator_step_db: Option<f64>,
}

impl TeleporterConfig {
    /// Lossless, jitter-free teleporter with equal squeezing `r` on both
    /// beams and gain `g` on both channels.
    pub fn ideal(r: f64, gain: f64) -> Self {
        TeleporterConfig {
            squeezer_a: SqueezerSpec::Direct { r },
            squeezer_b: SqueezerSpec::Direct { r },
            gain_x: gain,
            gain_p: gain,
            efficiencies: Efficiencies::default(),
            jitter_deg: LockJitter::default(),
            input: InputState::Vacuum,
            engine: Engine::Heisenberg,
            attenuator_step_db: None,
        }
    }

    pub fn with_gains(self, gain_x: f64, gain_p: f64) -> Self {
        TeleporterConfig {
            gain_x,
            gain_p,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.squeezer_a.validate()?;
        self.squeezer_b.validate()?;
        if !self.gain_x.is_finite() || !self.gain_p.is_finite() {
            return Err(Error::invalid("channel gains must be finite"));
        }
        self.efficiencies.validate()?;
        self.jitter_deg.validate()?;
        if let InputState::Coherent { re, im } = self.input {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::invalid("coherent amplitude must be finite"));
            }
        }
        if let Engine::MonteCarlo(mc) = self.engine {
            if mc.shots < 1 {
                return Err(Error::invalid("Monte Carlo needs at least one shot"));
            }
            if mc.workers < 1 {
                return Err(Error::invalid("Monte Carlo needs at least one worker"));
            }
        }
        if let Some(step) = self.attenuator_step_db {
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::invalid(format!(
                    "attenuator step {step} dB must be > 0"
                )));
            }
        }
        Ok(())
    }

    /// Gains actually applied, after optional attenuator quantization.
    pub fn effective_gains(&self) -> (f64, f64) {
        match self.attenuator_step_db {
            Some(step) => (
                quantize_gain(self.gain_x, step),
                quantize_gain(self.gain_p, step),
            ),
            None => (self.gain_x, self.gain_p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_ranges_tile_the_shots() {
        let mc = MonteCarlo {
            shots: 10,
            seed: 0,
            workers: 3,
        };
        let ranges: alloc::vec::Vec<_> = (0..3).map(|w| mc.worker_range(w)).collect();
        assert_eq!(ranges, [(0, 3), (3, 6), (6, 10)]);
    }

    #[test]
    fn validation() {
        let ok = TeleporterConfig::ideal(0.8, 1.0);
        assert!(ok.validate().is_ok());
        let mut bad = ok;
        bad.efficiencies.victor_homodyne = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.gain_x = f64::INFINITY;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.jitter_deg.alice_hbs = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.engine = Engine::MonteCarlo(MonteCarlo::new(0, 1));
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.squeezer_b = SqueezerSpec::Direct { r: f64::NAN };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn db_spec_matches_direct() {
        let a = SqueezerSpec::SqueezingDb { db: -7.0 }.levels().unwrap();
        assert!((a.squeezed - libm::pow(10.0, -0.7)).abs() < 1e-14);
        assert!((a.squeezed * a.antisqueezed - 1.0).abs() < 1e-12);
    }
}
