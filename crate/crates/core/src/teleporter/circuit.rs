use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::Result;
use crate::gaussian::{FeedForward, GaussianState, Quadrature};

use super::config::{LockJitter, SqueezerSpec, TeleporterConfig};

/// Where a phase lock sits in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LockPoint {
    SqueezerA,
    SqueezerB,
    EprHbs,
    AliceHbs,
    VictorLo,
}

impl LockPoint {
    pub const ALL: [LockPoint; 5] = [
        LockPoint::SqueezerA,
        LockPoint::SqueezerB,
        LockPoint::EprHbs,
        LockPoint::AliceHbs,
        LockPoint::VictorLo,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// A named snapshot of the state inside the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: &'static str,
    pub state: GaussianState,
}

/// How lock errors are applied to the state.
pub(crate) enum Locks {
    /// Deterministic two-point average at `±rms` (radians).
    Averaged([f64; 5]),
    /// A concrete phase error per lock for one shot (radians).
    Drawn([f64; 5]),
}

impl Locks {
    pub(crate) fn apply(
        &self,
        state: GaussianState,
        mode: usize,
        point: LockPoint,
    ) -> Result<GaussianState> {
        match self {
            Locks::Averaged(rms) if rms[point.index()] > 0.0 => {
                state.phase_jitter_average(mode, rms[point.index()])
            }
            Locks::Drawn(angle) if angle[point.index()] != 0.0 => {
                state.phase_shift(mode, angle[point.index()])
            }
            _ => Ok(state),
        }
    }
}

/// Per-lock RMS error in radians. A squeezer's own jitter (OPO spec) and
/// the configured lock jitter are independent and add in quadrature.
pub(crate) fn effective_rms(
    jitter: &LockJitter,
    squeezer_a: &SqueezerSpec,
    squeezer_b: &SqueezerSpec,
) -> [f64; 5] {
    let quad = |a: f64, b: f64| libm::sqrt(a * a + b * b);
    [
        quad(jitter.squeezer_a, squeezer_a.intrinsic_jitter_deg()),
        quad(jitter.squeezer_b, squeezer_b.intrinsic_jitter_deg()),
        jitter.epr_hbs,
        jitter.alice_hbs,
        jitter.victor_lo,
    ]
    .map(f64::to_radians)
}

pub(crate) struct Recorder<'a>(pub(crate) Option<&'a mut Vec<Stage>>);

impl Recorder<'_> {
    pub(crate) fn push(&mut self, label: &'static str, state: &GaussianState) {
        if let Some(stages) = self.0.as_mut() {
            stages.push(Stage {
                label,
                state: state.clone(),
            });
        }
    }
}

/// EPR pair `(A, B)` from two squeezers, with per-arm efficiencies and the
/// lock errors averaged in.
///
/// Beam `a` stays x-squeezed and beam `b` is turned by π/2 before the half
/// beam splitter, so `x_A - x_B = √2 x_a` and `p_A + p_B = √2 p_b` carry
/// the squeezed noise of `a` and `b` respectively.
pub fn build_epr(
    squeezer_a: &SqueezerSpec,
    squeezer_b: &SqueezerSpec,
    efficiencies: (f64, f64),
    jitter: &LockJitter,
) -> Result<GaussianState> {
    let locks = Locks::Averaged(effective_rms(jitter, squeezer_a, squeezer_b));
    let sources = Sources::new(squeezer_a, squeezer_b)?;
    epr(&sources, efficiencies, &locks, &mut Recorder(None))
}

/// The two squeezer outputs as a product state, built once per run.
pub(crate) struct Sources(GaussianState);

impl Sources {
    pub(crate) fn new(squeezer_a: &SqueezerSpec, squeezer_b: &SqueezerSpec) -> Result<Self> {
        Ok(Sources(squeezer_a.source()?.tensor(&squeezer_b.source()?)))
    }

    pub(crate) fn of(config: &TeleporterConfig) -> Result<Self> {
        Self::new(&config.squeezer_a, &config.squeezer_b)
    }
}

pub(crate) fn epr(
    sources: &Sources,
    (eta_a, eta_b): (f64, f64),
    locks: &Locks,
    rec: &mut Recorder<'_>,
) -> Result<GaussianState> {
    let mut s = sources.0.clone();
    rec.push("squeezers", &s);
    s = locks.apply(s, 0, LockPoint::SqueezerA)?;
    s = locks.apply(s, 1, LockPoint::SqueezerB)?;
    s = s.phase_shift(1, FRAC_PI_2)?;
    s = locks.apply(s, 1, LockPoint::EprHbs)?;
    rec.push("locked squeezers", &s);
    s = s.beam_splitter(0, 1, 0.5, 0.0)?;
    rec.push("epr", &s);
    s = s.loss(0, eta_a)?.loss(1, eta_b)?;
    rec.push("epr after loss", &s);
    Ok(s)
}

/// Modes `(u, v, B)` just before Alice's measurements.
pub(crate) fn pre_measurement(
    config: &TeleporterConfig,
    sources: &Sources,
    input: &GaussianState,
    locks: &Locks,
    rec: &mut Recorder<'_>,
) -> Result<GaussianState> {
    let eff = (config.efficiencies.arm_a(), config.efficiencies.arm_b());
    let pair = epr(sources, eff, locks, rec)?;
    let mut s = input.tensor(&pair);
    rec.push("input and epr", &s);
    s = locks.apply(s, 1, LockPoint::AliceHbs)?;
    // Phase π puts u = (in - A)/√2 in slot 0 and v = (in + A)/√2 in slot 1.
    s = s.beam_splitter(0, 1, 0.5, PI)?;
    rec.push("alice", &s);
    Ok(s)
}

/// Bob's displacement amplitudes for unit-normalized Alice outcomes.
pub(crate) fn feed_forward_gains(config: &TeleporterConfig) -> (f64, f64) {
    let (gx, gp) = config.effective_gains();
    (SQRT_2 * gx, SQRT_2 * gp)
}

pub(crate) fn feed_forward_links(config: &TeleporterConfig) -> [FeedForward; 2] {
    let (kx, kp) = feed_forward_gains(config);
    [
        FeedForward {
            source: 0,
            quadrature: Quadrature::X,
            target: 2,
            gain: kx,
        },
        FeedForward {
            source: 1,
            quadrature: Quadrature::P,
            target: 2,
            gain: kp,
        },
    ]
}
