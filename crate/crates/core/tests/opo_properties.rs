use cvqt_core::metrics::db;
use cvqt_core::opo::{
    jitter_average, jitter_average_monte_carlo, pump_ratio_from_gain, squeezing_budget,
    squeezing_spectrum,
};
use cvqt_core::{OpoParams, SqueezeLevels};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(gain: f64, eta: f64, jitter: f64, sideband: f64) -> OpoParams {
    OpoParams {
        parametric_gain: gain,
        efficiency: eta,
        jitter_deg: jitter,
        sideband_mhz: sideband,
        bandwidth_mhz: 10.0,
    }
}

proptest! {
    #[test]
    fn lossless_opo_is_minimum_uncertainty(gain in 1.0..50.0f64) {
        let l = squeezing_spectrum(&params(gain, 1.0, 0.0, 0.0)).unwrap();
        prop_assert!((l.squeezed * l.antisqueezed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jitter_mixing_is_convex(s in 0.01..1.0f64, a in 1.0..100.0f64, deg in 0.0..90.0f64) {
        let out = jitter_average(SqueezeLevels::new(s, a).unwrap(), deg).unwrap();
        for v in [out.squeezed, out.antisqueezed] {
            prop_assert!(v >= s - 1e-12 && v <= a + 1e-12);
        }
        prop_assert!((out.squeezed + out.antisqueezed - s - a).abs() < 1e-9);
    }

    #[test]
    fn squeezing_degrades_with_loss_jitter_and_frequency(
        gain in 1.5..30.0f64,
        eta in 0.3..0.99f64,
        deg in 0.1..5.0f64,
        f in 0.0..20.0f64,
    ) {
        let base = squeezing_budget(&params(gain, eta, deg, f)).unwrap().squeezed;
        prop_assert!(squeezing_budget(&params(gain, eta * 0.9, deg, f)).unwrap().squeezed > base);
        prop_assert!(squeezing_budget(&params(gain, eta, deg * 1.5, f)).unwrap().squeezed > base);
        // Moving off line centre also shrinks the antisqueezing that jitter
        // mixes in, so frequency is compared on the jitter-free spectrum.
        let near = squeezing_spectrum(&params(gain, eta, 0.0, f)).unwrap().squeezed;
        prop_assert!(squeezing_spectrum(&params(gain, eta, 0.0, f + 1.0)).unwrap().squeezed > near);
    }

    #[test]
    fn pump_ratio_inverts_gain(x in 0.0..0.98f64) {
        let gain = 1.0 / ((1.0 - x) * (1.0 - x));
        prop_assert!((pump_ratio_from_gain(gain).unwrap() - x).abs() < 1e-12);
    }
}

#[test]
fn sampled_jitter_agrees_with_small_tilt_model() {
    let levels = squeezing_spectrum(&params(9.0, 0.89, 0.0, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for deg in [0.5, 1.0, 2.0, 3.0] {
        let exact = jitter_average(levels, deg).unwrap();
        let sampled = jitter_average_monte_carlo(levels, deg, 100_000, &mut rng).unwrap();
        let rel = (sampled.squeezed - exact.squeezed).abs() / exact.squeezed;
        assert!(rel < 0.02, "{deg} deg: relative error {rel}");
        let rel = (sampled.antisqueezed - exact.antisqueezed).abs() / exact.antisqueezed;
        assert!(rel < 0.02, "{deg} deg antisqueezed: relative error {rel}");
    }
}

#[test]
fn experimental_budget_lands_in_the_expected_window() {
    for gain in [9.0, 11.2] {
        let level = squeezing_budget(&params(gain, 0.89, 1.0, 0.0))
            .unwrap()
            .squeezed_db();
        assert!((-8.5..=-7.0).contains(&level), "G = {gain}: {level} dB");
    }
    let dc = squeezing_spectrum(&params(9.0, 0.89, 0.0, 0.0)).unwrap();
    let side = squeezing_spectrum(&params(9.0, 0.89, 0.0, 1.25)).unwrap();
    let penalty = db(side.squeezed).unwrap() - db(dc.squeezed).unwrap();
    assert!((0.1..=0.45).contains(&penalty), "{penalty} dB");
}
