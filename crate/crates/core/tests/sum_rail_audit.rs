mod common;

use common::*;
use proptest::prelude::*;
use qmt_core::measurement::{rms_power, rms_sum_trick};
use qmt_core::signal::oversampling_floor;
use qmt_core::{synthesize, FrequencyLayout, SampledSignal, StateVector, TonalSignal};

fn real_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(-1.0..1.0f64, 1usize << n)
        .prop_map(move |v| StateVector::new(n, v.into_iter().map(|x| c(x, 0.0)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shortcut_holds_for_real_coefficients((n, psi) in (1usize..=5).prop_flat_map(|n| (Just(n), real_state(n)))) {
        let layout = FrequencyLayout::octave(n).unwrap();
        let tonal = synthesize(&psi, &layout).unwrap();
        let sampled = SampledSignal::render(&tonal, oversampling_floor(n)).unwrap();
        prop_assert!((rms_sum_trick(&tonal) - rms_power(&tonal)).abs() <= 1e-10);
        prop_assert!((rms_sum_trick(&sampled) - rms_power(&sampled)).abs() <= 1e-10);
    }

    #[test]
    fn shortcut_error_is_the_mirror_cross_term(psi in state_strategy(2)) {
        let layout = FrequencyLayout::octave(2).unwrap();
        let tonal = synthesize(&psi, &layout).unwrap();
        // (Re + Im)^2 = |psi|^2 + 2 Re Im, and 2 Re Im averages to Im sum_k c_k c_{-k}
        let cross: f64 = tonal.iter().map(|(k, ck)| (ck * tonal.get(-k)).im).sum();
        prop_assert!((rms_sum_trick(&tonal) - rms_power(&tonal) - cross).abs() <= 1e-12);
    }
}

#[test]
fn documented_counterexample() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = TonalSignal::from_coefficients(1.0, [(1, c(h, 0.0)), (-1, c(0.0, h))]);
    let s = SampledSignal::render(&t, 16).unwrap();
    for (trick, power) in [(rms_sum_trick(&t), rms_power(&t)), (rms_sum_trick(&s), rms_power(&s))] {
        assert!((trick - 2.0).abs() < 1e-10);
        assert!((power - 1.0).abs() < 1e-10);
    }
}
