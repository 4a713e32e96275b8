//! Scalar figures of merit: fidelity, sequential capacity, decibels.

use alloc::format;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Fidelity of a teleported coherent state, `0 < F <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FidelityValue(f64);

impl FidelityValue {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(FidelityValue(value))
        } else {
            Err(Error::invalid(format!("fidelity {value} outside (0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Expected number of sequential teleportations before the fidelity falls
/// to the classical bound, with the matching effective squeezing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialCapacity {
    pub n_s: f64,
    pub r_eff: f64,
}

/// Fidelity after `n` teleportations through identical resources of
/// squeezing `r`: `1 / (1 + n e^{-2r})`.
pub fn fidelity_theory(r: f64, n: f64) -> Result<FidelityValue> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::invalid(format!("step count {n} must be >= 1")));
    }
    if r.is_nan() {
        return Err(Error::invalid("squeezing parameter is NaN"));
    }
    FidelityValue::new(1.0 / (1.0 + n * libm::exp(-2.0 * r)))
}

/// Coherent-input fidelity from the output quadrature variances (shot-noise
/// units), assuming the output amplitude equals the input amplitude.
pub fn fidelity_from_variances(sigma_x: f64, sigma_p: f64) -> Result<FidelityValue> {
    if !(sigma_x > 0.0 && sigma_p > 0.0) || !sigma_x.is_finite() || !sigma_p.is_finite() {
        return Err(Error::invalid(format!(
            "variances ({sigma_x}, {sigma_p}) must be positive and finite"
        )));
    }
    let f = 2.0 / libm::sqrt((1.0 + sigma_x) * (1.0 + sigma_p));
    FidelityValue::new(clamp_rounding(f))
}

/// First-order standard error of [`fidelity_from_variances`] given
/// independent standard errors on the two variances.
pub fn fidelity_standard_error(sigma_x: f64, sigma_p: f64, se_x: f64, se_p: f64) -> f64 {
    let f = 2.0 / libm::sqrt((1.0 + sigma_x) * (1.0 + sigma_p));
    let dx = -0.5 * f / (1.0 + sigma_x);
    let dp = -0.5 * f / (1.0 + sigma_p);
    libm::sqrt(dx * dx * se_x * se_x + dp * dp * se_p * se_p)
}

/// Overlap `⟨α|ρ|α⟩` of a single-mode Gaussian state with a coherent state
/// whose mean quadratures are `target`. Unlike
/// [`fidelity_from_variances`] this accounts for amplitude errors and
/// x–p correlations.
pub fn coherent_overlap(state: &GaussianState, target: [f64; 2]) -> Result<FidelityValue> {
    if state.n_modes() != 1 {
        return Err(Error::invalid("overlap fidelity needs a single-mode state"));
    }
    let sum: DMatrix<f64> = state.cov() + DMatrix::<f64>::identity(2, 2);
    let det = sum.determinant();
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::corrupt("singular covariance in overlap"))?;
    let d = state.mean() - DVector::from_row_slice(&target);
    let quad = (d.transpose() * inv * &d)[(0, 0)];
    FidelityValue::new(clamp_rounding(
        2.0 / libm::sqrt(det) * libm::exp(-0.5 * quad),
    ))
}

// Pure outputs can land a few ulps above 1.
fn clamp_rounding(f: f64) -> f64 {
    if f > 1.0 && f <= 1.0 + 1e-12 {
        1.0
    } else {
        f
    }
}

/// `n_s = F/(1-F)` and `r_eff` from `F = 1/(1 + e^{-2 r_eff})`.
pub fn n_sequential(fidelity: f64) -> Result<SequentialCapacity> {
    if !(fidelity > 0.0 && fidelity < 1.0) {
        return Err(Error::invalid(format!(
            "fidelity {fidelity} outside (0, 1)"
        )));
    }
    let n_s = fidelity / (1.0 - fidelity);
    Ok(SequentialCapacity {
        n_s,
        r_eff: 0.5 * libm::log(n_s),
    })
}

pub fn db(linear: f64) -> Result<f64> {
    if !(linear > 0.0) {
        return Err(Error::invalid(format!("cannot take dB of {linear}")));
    }
    Ok(10.0 * libm::log10(linear))
}

pub fn db_inv(decibels: f64) -> f64 {
    libm::pow(10.0, decibels / 10.0)
}

/// Squeezing parameter whose squeezed variance `e^{-2r}` is `decibels` dB.
pub fn r_from_db(decibels: f64) -> f64 {
    -0.5 * libm::log(db_inv(decibels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eq1_values() {
        assert_eq!(fidelity_theory(0.0, 1.0).unwrap().value(), 0.5);
        assert_abs_diff_eq!(
            fidelity_theory(40.0, 1.0).unwrap().value(),
            1.0,
            epsilon = 1e-15
        );
        let r = -0.5 * libm::log(0.2);
        // 1 / (1 + 3 * 0.2)
        assert_abs_diff_eq!(
            fidelity_theory(r, 3.0).unwrap().value(),
            0.625,
            epsilon = 1e-12
        );
        assert!(fidelity_theory(1.0, 0.5).is_err());
    }

    #[test]
    fn eq5_values() {
        assert_eq!(fidelity_from_variances(1.0, 1.0).unwrap().value(), 1.0);
        assert_eq!(fidelity_from_variances(3.0, 3.0).unwrap().value(), 0.5);
        let f = fidelity_from_variances(db_inv(1.44), db_inv(1.49))
            .unwrap()
            .value();
        assert_abs_diff_eq!(f, 0.833, epsilon = 1e-3);
        assert!(fidelity_from_variances(0.0, 1.0).is_err());
        assert!(fidelity_from_variances(1.0, -2.0).is_err());
    }

    #[test]
    fn sequential_capacity() {
        let c = n_sequential(0.5).unwrap();
        assert_eq!(c.n_s, 1.0);
        assert_eq!(c.r_eff, 0.0);
        assert_abs_diff_eq!(n_sequential(0.76).unwrap().n_s, 3.1667, epsilon = 1e-4);
        assert_abs_diff_eq!(n_sequential(0.833).unwrap().n_s, 4.988, epsilon = 1e-3);
        for f in [0.1, 0.5, 0.76, 0.833, 0.99] {
            let c = n_sequential(f).unwrap();
            assert_abs_diff_eq!(c.n_s, libm::exp(2.0 * c.r_eff), epsilon = 1e-12 * c.n_s);
        }
        assert!(n_sequential(1.0).is_err());
        assert!(n_sequential(0.0).is_err());
    }

    #[test]
    fn decibels() {
        assert_eq!(db(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(db(3.0).unwrap(), 4.771, epsilon = 1e-3);
        assert_abs_diff_eq!(db(libm::pow(10.0, -0.7)).unwrap(), -7.0, epsilon = 1e-12);
        assert!(db(0.0).is_err());
        assert!(db(-1.0).is_err());
        for v in [1e-3, 0.2, 1.0, 3.0, 22.36] {
            assert_abs_diff_eq!(db_inv(db(v).unwrap()), v, epsilon = 1e-12 * v.max(1.0));
        }
        assert_abs_diff_eq!(r_from_db(-7.0), 0.805904, epsilon = 1e-6);
    }

    #[test]
    fn overlap_matches_eq5_for_centered_diagonal_states() {
        let s = GaussianState::vacuum(1)
            .unwrap()
            .squeeze(0, 0.3, 0.0)
            .unwrap();
        let s = s.loss(0, 0.7).unwrap();
        let (vx, vp) = (s.cov()[(0, 0)], s.cov()[(1, 1)]);
        let eq5 = fidelity_from_variances(vx, vp).unwrap().value();
        assert_abs_diff_eq!(
            coherent_overlap(&s, [0.0, 0.0]).unwrap().value(),
            eq5,
            epsilon = 1e-14
        );
        // Two coherent states: exp(-|α-β|²).
        let a = GaussianState::coherent(&[nalgebra::Complex::new(0.3, -0.2)]).unwrap();
        let f = coherent_overlap(&a, [0.0, 0.0]).unwrap().value();
        assert_abs_diff_eq!(f, libm::exp(-(0.09 + 0.04)), epsilon = 1e-14);
    }

    #[test]
    fn fidelity_error_propagation_matches_finite_difference() {
        let (sx, sp, ex, ep) = (1.4, 1.5, 0.01, 0.02);
        let h = 1e-6;
        let f = |a: f64, b: f64| fidelity_from_variances(a, b).unwrap().value();
        let dfx = (f(sx + h, sp) - f(sx - h, sp)) / (2.0 * h);
        let dfp = (f(sx, sp + h) - f(sx, sp - h)) / (2.0 * h);
        let fd = libm::sqrt(dfx * dfx * ex * ex + dfp * dfp * ep * ep);
        assert_abs_diff_eq!(fidelity_standard_error(sx, sp, ex, ep), fd, epsilon = 1e-9);
    }
}
