//! Multimode Gaussian states and the linear-optics toolbox acting on them.
//!
//! Quadratures are interleaved per mode, `(x₁, p₁, …, x_N, p_N)`, and
//! variances are in shot-noise units (vacuum = 1). In these units the
//! canonical commutator is `[x, p] = 2i` and a covariance matrix `V` is
//! physical iff `V + iΩ ≥ 0`, with `Ω` the block-diagonal symplectic form
//! built from `[[0, 1], [-1, 0]]`.

use alloc::{format, vec::Vec};

use nalgebra::{Complex, DMatrix, DVector};
use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Maximum tolerated `|V - Vᵀ|` entry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack below 1 allowed on the smallest symplectic eigenvalue.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Elementwise tolerance on `S Ω Sᵀ = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    #[inline]
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Result of a projective quadrature measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneOutcome {
    pub value: f64,
    pub quadrature: Quadrature,
    /// Index of the measured mode in the pre-measurement state.
    pub mode: usize,
}

/// One classical feed-forward link: `target.q += gain · source.q`, after
/// which the source mode is consumed by its measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedForward {
    pub source: usize,
    pub quadrature: Quadrature,
    pub target: usize,
    pub gain: f64,
}

/// The symplectic form `Ω` for `n_modes` interleaved modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

fn rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = libm::sincos(theta);
    [[c, -s], [s, c]]
}

/// A linear phase-space transform on a subset of modes.
///
/// `matrix` is `2k × 2k` for `k = acting_modes.len()`, laid out in the order
/// the acting modes are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    acting_modes: Vec<usize>,
}

impl SymplecticOp {
    /// Wraps an arbitrary matrix, rejecting it unless `S Ω Sᵀ = Ω`.
    pub fn new(matrix: DMatrix<f64>, acting_modes: Vec<usize>) -> Result<Self> {
        let dim = 2 * acting_modes.len();
        if acting_modes.is_empty() || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::invalid(format!(
                "symplectic matrix must be {dim}x{dim} for {} modes",
                acting_modes.len()
            )));
        }
        for (i, m) in acting_modes.iter().enumerate() {
            if acting_modes[..i].contains(m) {
                return Err(Error::invalid(format!("mode {m} listed twice")));
            }
        }
        let op = SymplecticOp {
            matrix,
            acting_modes,
        };
        let err = op.symplectic_error();
        if !(err <= SYMPLECTIC_TOL) {
            return Err(Error::invalid(format!(
                "matrix violates the symplectic condition by {err:e}"
            )));
        }
        Ok(op)
    }

    /// Single-mode squeezer. At `angle = 0` the x quadrature is scaled by
    /// `e^{-r}` and p by `e^{r}`; `angle` rotates the squeezing axis.
    pub fn squeezer(mode: usize, r: f64, angle: f64) -> Result<Self> {
        if !r.is_finite() || !angle.is_finite() {
            return Err(Error::invalid(
                "squeezing parameter and angle must be finite",
            ));
        }
        let rot = rotation(angle);
        let (lo, hi) = (libm::exp(-r), libm::exp(r));
        // R(angle) · diag(lo, hi) · R(-angle)
        let m = DMatrix::from_fn(2, 2, |i, j| {
            rot[i][0] * lo * rot[j][0] + rot[i][1] * hi * rot[j][1]
        });
        Ok(SymplecticOp {
            matrix: m,
            acting_modes: alloc::vec![mode],
        })
    }

    /// Rotation of one mode's phase space: `a → e^{iθ} a`.
    pub fn phase_shift(mode: usize, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("phase must be finite"));
        }
        let rot = rotation(theta);
        Ok(SymplecticOp {
            matrix: DMatrix::from_fn(2, 2, |i, j| rot[i][j]),
            acting_modes: alloc::vec![mode],
        })
    }

    /// Beam splitter of power transmittance `T`:
    /// `a_i → √T a_i + √(1-T) e^{iφ} a_j`, `a_j → -√(1-T) e^{-iφ} a_i + √T a_j`.
    pub fn beam_splitter(
        mode_i: usize,
        mode_j: usize,
        transmittance: f64,
        relative_phase: f64,
    ) -> Result<Self> {
        if mode_i == mode_j {
            return Err(Error::invalid("beam splitter needs two distinct modes"));
        }
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::invalid(format!(
                "transmittance {transmittance} outside [0, 1]"
            )));
        }
        if !relative_phase.is_finite() {
            return Err(Error::invalid("relative phase must be finite"));
        }
        let t = libm::sqrt(transmittance);
        let s = libm::sqrt(1.0 - transmittance);
        let fwd = rotation(relative_phase);
        let back = rotation(-relative_phase);
        let mut m = DMatrix::zeros(4, 4);
        for a in 0..2 {
            m[(a, a)] = t;
            m[(a + 2, a + 2)] = t;
            for b in 0..2 {
                m[(a, b + 2)] = s * fwd[a][b];
                m[(a + 2, b)] = -s * back[a][b];
            }
        }
        Ok(SymplecticOp {
            matrix: m,
            acting_modes: alloc::vec![mode_i, mode_j],
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn acting_modes(&self) -> &[usize] {
        &self.acting_modes
    }

    /// Largest entry of `|S Ω Sᵀ - Ω|`.
    pub fn symplectic_error(&self) -> f64 {
        let omega = symplectic_form(self.acting_modes.len());
        let lhs = &self.matrix * &omega * self.matrix.transpose();
        (lhs - omega).amax()
    }

    /// The transform as a full `2N × 2N` matrix (identity on other modes).
    pub fn embed(&self, n_modes: usize) -> Result<DMatrix<f64>> {
        if let Some(&m) = self.acting_modes.iter().find(|&&m| m >= n_modes) {
            return Err(Error::invalid(format!(
                "mode {m} out of range for a {n_modes}-mode state"
            )));
        }
        let mut full = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for (a, &ma) in self.acting_modes.iter().enumerate() {
            for (b, &mb) in self.acting_modes.iter().enumerate() {
                for u in 0..2 {
                    for v in 0..2 {
                        full[(2 * ma + u, 2 * mb + v)] = self.matrix[(2 * a + u, 2 * b + v)];
                    }
                }
            }
        }
        Ok(full)
    }
}

/// Mean vector and covariance matrix of an `N`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("a state needs at least one mode"));
        }
        Ok(Self::vacuum_unchecked(n_modes))
    }

    fn vacuum_unchecked(n_modes: usize) -> Self {
        GaussianState {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Product of coherent states. Amplitude `α` maps to the mean
    /// `(2 Re α, 2 Im α)`, matching `a = (x + ip)/2` in shot-noise units.
    pub fn coherent(amplitudes: &[Complex<f64>]) -> Result<Self> {
        let mut state = Self::vacuum(amplitudes.len())?;
        for (k, alpha) in amplitudes.iter().enumerate() {
            if !alpha.re.is_finite() || !alpha.im.is_finite() {
                return Err(Error::invalid("coherent amplitude must be finite"));
            }
            state.mean[2 * k] = 2.0 * alpha.re;
            state.mean[2 * k + 1] = 2.0 * alpha.im;
        }
        Ok(state)
    }

    /// Builds a state from raw moments, checking shape, symmetry and the
    /// uncertainty relation.
    pub fn from_moments(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::invalid(format!(
                "mean length {dim} is not 2N, N >= 1"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("moments must be finite"));
        }
        let state = GaussianState {
            n_modes: dim / 2,
            mean,
            cov,
        };
        let asym = state.symmetry_error();
        if asym > SYMMETRY_TOL {
            return Err(Error::corrupt(format!("covariance asymmetric by {asym:e}")));
        }
        let nu = state.min_symplectic_eigenvalue()?;
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(Error::corrupt(format!(
                "smallest symplectic eigenvalue {nu} violates the uncertainty relation"
            )));
        }
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn quadrature_mean(&self, mode: usize, q: Quadrature) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(self.mean[2 * mode + q.offset()])
    }

    pub fn quadrature_variance(&self, mode: usize, q: Quadrature) -> Result<f64> {
        self.check_mode(mode)?;
        let i = 2 * mode + q.offset();
        Ok(self.cov[(i, i)])
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::invalid(format!(
                "mode {mode} out of range for a {}-mode state",
                self.n_modes
            )));
        }
        Ok(())
    }

    /// Product state `self ⊗ other`; the modes of `other` follow.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (2 * self.n_modes, 2 * other.n_modes);
        let mut mean = DVector::zeros(a + b);
        mean.rows_mut(0, a).copy_from(&self.mean);
        mean.rows_mut(a, b).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        GaussianState {
            n_modes: self.n_modes + other.n_modes,
            mean,
            cov,
        }
    }

    /// Marginal on the listed modes, in the listed order.
    pub fn reduce(&self, modes: &[usize]) -> Result<GaussianState> {
        for (i, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..i].contains(&m) {
                return Err(Error::invalid(format!("mode {m} listed twice")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(GaussianState {
            n_modes: modes.len(),
            mean: DVector::from_fn(idx.len(), |i, _| self.mean[idx[i]]),
            cov: DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]),
        })
    }

    pub fn apply(&self, op: &SymplecticOp) -> Result<GaussianState> {
        let s = op.embed(self.n_modes)?;
        Ok(self.transformed(&s))
    }

    fn transformed(&self, s: &DMatrix<f64>) -> GaussianState {
        GaussianState {
            n_modes: self.n_modes,
            mean: s * &self.mean,
            cov: s * &self.cov * s.transpose(),
        }
    }

    pub fn squeeze(&self, mode: usize, r: f64, angle: f64) -> Result<GaussianState> {
        self.apply(&SymplecticOp::squeezer(mode, r, angle)?)
    }

    pub fn beam_splitter(
        &self,
        mode_i: usize,
        mode_j: usize,
        transmittance: f64,
        relative_phase: f64,
    ) -> Result<GaussianState> {
        self.apply(&SymplecticOp::beam_splitter(
            mode_i,
            mode_j,
            transmittance,
            relative_phase,
        )?)
    }

    pub fn phase_shift(&self, mode: usize, theta: f64) -> Result<GaussianState> {
        self.apply(&SymplecticOp::phase_shift(mode, theta)?)
    }

    /// Pure-loss channel of efficiency `eta`: the mode is mixed with vacuum
    /// on a beam splitter of transmittance `eta`.
    pub fn loss(&self, mode: usize, eta: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid(format!("efficiency {eta} outside [0, 1]")));
        }
        let amp = libm::sqrt(eta);
        let mut out = self.clone();
        let idx = [2 * mode, 2 * mode + 1];
        for &i in &idx {
            out.mean[i] *= amp;
            for j in 0..2 * self.n_modes {
                if !idx.contains(&j) {
                    out.cov[(i, j)] *= amp;
                    out.cov[(j, i)] *= amp;
                }
            }
        }
        for &i in &idx {
            for &j in &idx {
                let noise = if i == j { 1.0 - eta } else { 0.0 };
                out.cov[(i, j)] = eta * self.cov[(i, j)] + noise;
            }
        }
        Ok(out)
    }

    /// Second-moment average over a symmetric phase error of RMS `rms`
    /// (radians), evaluated at `±rms`. A squeezed quadrature variance `s₋`
    /// becomes `s₋cos²θ + s₊sin²θ`.
    pub fn phase_jitter_average(&self, mode: usize, rms: f64) -> Result<GaussianState> {
        if !(rms >= 0.0) || !rms.is_finite() {
            return Err(Error::invalid(format!(
                "jitter rms {rms} must be finite and >= 0"
            )));
        }
        if rms == 0.0 {
            self.check_mode(mode)?;
            return Ok(self.clone());
        }
        let plus = self.phase_shift(mode, rms)?;
        let minus = self.phase_shift(mode, -rms)?;
        // Moments of the equal mixture: the spread of the two means adds to
        // the averaged covariance.
        let spread = (&plus.mean - &minus.mean) * 0.5;
        Ok(GaussianState {
            n_modes: self.n_modes,
            mean: (plus.mean + minus.mean) * 0.5,
            cov: (plus.cov + minus.cov) * 0.5 + &spread * spread.transpose(),
        })
    }

    pub fn displace(&self, mode: usize, dx: f64, dp: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        out.mean[2 * mode] += dx;
        out.mean[2 * mode + 1] += dp;
        Ok(out)
    }

    /// Conditional state of the other modes after measuring `q` on `mode`
    /// with result `value`. The measured mode is removed.
    pub fn condition(&self, mode: usize, q: Quadrature, value: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let qi = 2 * mode + q.offset();
        let var = self.cov[(qi, qi)];
        if !(var > 0.0) {
            return Err(Error::corrupt(format!(
                "measured quadrature variance {var} is not positive"
            )));
        }
        let rest: Vec<usize> = (0..2 * self.n_modes).filter(|&i| i / 2 != mode).collect();
        let shift = value - self.mean[qi];
        let mean = DVector::from_fn(rest.len(), |a, _| {
            self.mean[rest[a]] + self.cov[(rest[a], qi)] * shift / var
        });
        let cov = DMatrix::from_fn(rest.len(), rest.len(), |a, b| {
            self.cov[(rest[a], rest[b])] - self.cov[(rest[a], qi)] * self.cov[(qi, rest[b])] / var
        });
        Ok(GaussianState {
            n_modes: self.n_modes - 1,
            mean,
            cov,
        })
    }

    /// Projective homodyne measurement: draws the outcome from the marginal
    /// and returns the conditional state of the remaining modes.
    pub fn homodyne<R: RngCore + ?Sized>(
        &self,
        mode: usize,
        q: Quadrature,
        rng: &mut R,
    ) -> Result<(HomodyneOutcome, GaussianState)> {
        self.check_mode(mode)?;
        let qi = 2 * mode + q.offset();
        let var = self.cov[(qi, qi)];
        if !(var > 0.0) {
            return Err(Error::corrupt(format!(
                "measured quadrature variance {var} is not positive"
            )));
        }
        let z: f64 = StandardNormal.sample(rng);
        let value = self.mean[qi] + libm::sqrt(var) * z;
        let rest = self.condition(mode, q, value)?;
        Ok((
            HomodyneOutcome {
                value,
                quadrature: q,
                mode,
            },
            rest,
        ))
    }

    /// Measure-and-displace averaged over all outcomes.
    ///
    /// Each link adds `gain` times the source quadrature to the same
    /// quadrature of its target. Source modes are measured and removed; the
    /// returned state lists the remaining modes in their original order.
    pub fn feed_forward(&self, links: &[FeedForward]) -> Result<GaussianState> {
        let mut sources: Vec<usize> = Vec::new();
        for link in links {
            self.check_mode(link.source)?;
            self.check_mode(link.target)?;
            if !link.gain.is_finite() {
                return Err(Error::invalid("feed-forward gain must be finite"));
            }
            if !sources.contains(&link.source) {
                sources.push(link.source);
            }
        }
        if links.iter().any(|l| sources.contains(&l.target)) {
            return Err(Error::invalid(
                "a feed-forward target cannot also be measured",
            ));
        }
        let dim = 2 * self.n_modes;
        let mut map = DMatrix::identity(dim, dim);
        for link in links {
            let q = link.quadrature.offset();
            map[(2 * link.target + q, 2 * link.source + q)] += link.gain;
        }
        let keep: Vec<usize> = (0..self.n_modes).filter(|m| !sources.contains(m)).collect();
        let mapped = self.transformed(&map);
        if keep.is_empty() {
            return Ok(GaussianState {
                n_modes: 0,
                mean: DVector::zeros(0),
                cov: DMatrix::zeros(0, 0),
            });
        }
        mapped.reduce(&keep)
    }

    /// Largest entry of `|V - Vᵀ|`.
    pub fn symmetry_error(&self) -> f64 {
        (&self.cov - self.cov.transpose()).amax()
    }

    /// Symplectic eigenvalues in ascending order, one per mode.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.n_modes == 0 {
            return Ok(Vec::new());
        }
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let chol = sym
            .cholesky()
            .ok_or_else(|| Error::corrupt("covariance is not positive definite"))?;
        let l = chol.l();
        // Lᵀ Ω L is antisymmetric with eigenvalues ±iν; its square gives ν² twice.
        let m = l.transpose() * symplectic_form(self.n_modes) * &l;
        let gram = m.transpose() * &m;
        let mut ev: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev
            .chunks(2)
            .map(|pair| libm::sqrt(0.5 * (pair[0] + pair[1]).max(0.0)))
            .collect())
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .symplectic_eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Symmetric and satisfying the uncertainty relation.
    pub fn is_physical(&self) -> bool {
        self.symmetry_error() <= SYMMETRY_TOL
            && self
                .min_symplectic_eigenvalue()
                .map_or(false, |nu| nu >= 1.0 - PHYSICALITY_TOL)
    }

    /// `det V`; equal to 1 exactly for pure states.
    pub fn cov_determinant(&self) -> f64 {
        self.cov.determinant()
    }
}
