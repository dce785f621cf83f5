mod common;

use common::*;
use proptest::prelude::*;
use qmt_core::measurement::{born_probability, rms_power};
use qmt_core::projection::{apply_controlled_signal, apply_gate_signal, partial_project};
use qmt_core::signal::{basis_coefficients, oversampling_floor};
use qmt_core::{demodulate, synthesize, FrequencyLayout, SampledSignal, Signal, StateVector};

fn render(state: &StateVector) -> (qmt_core::TonalSignal, SampledSignal, FrequencyLayout) {
    let layout = FrequencyLayout::octave(state.num_qubits()).unwrap();
    let tonal = synthesize(state, &layout).unwrap();
    let sampled = SampledSignal::render(&tonal, oversampling_floor(state.num_qubits())).unwrap();
    (tonal, sampled, layout)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_qubit_gates_match_oracle((n, psi) in sized_state(1, 6), seed in any::<u64>(), q in 0usize..6) {
        let q = q % n;
        let gate = seeded_gate(seed);
        let (tonal, sampled, layout) = render(&psi);
        let expected = psi.apply_gate(&gate, q).unwrap();
        let t = demodulate(&apply_gate_signal(&tonal, &layout, &gate, q).unwrap(), &layout).unwrap();
        let s = demodulate(&apply_gate_signal(&sampled, &layout, &gate, q).unwrap(), &layout).unwrap();
        prop_assert!(t.state.max_abs_diff(&expected) <= 1e-12);
        prop_assert!(s.state.max_abs_diff(&expected) <= 1e-9);
        prop_assert!(t.residual <= 1e-20);
    }

    #[test]
    fn controlled_gates_match_oracle((n, psi) in sized_state(2, 6), seed in any::<u64>(), a in 0usize..6, b in 1usize..6) {
        let control = a % n;
        let target = (control + 1 + b % (n - 1)) % n;
        let gate = seeded_gate(seed);
        let (tonal, sampled, layout) = render(&psi);
        let expected = psi.apply_controlled(&gate, control, target).unwrap();
        let t = demodulate(&apply_controlled_signal(&tonal, &layout, &gate, control, target).unwrap(), &layout).unwrap();
        let s = demodulate(&apply_controlled_signal(&sampled, &layout, &gate, control, target).unwrap(), &layout).unwrap();
        prop_assert!(t.state.max_abs_diff(&expected) <= 1e-12);
        prop_assert!(s.state.max_abs_diff(&expected) <= 1e-9);
    }

    #[test]
    fn partial_projections_reconstruct((n, psi) in sized_state(1, 8), q in 0usize..8) {
        let q = q % n;
        let (tonal, _, layout) = render(&psi);
        let pair = partial_project(&tonal, &layout, q).unwrap();
        prop_assert!(pair.reconstruct(&layout).unwrap().max_abs_diff(&tonal) <= 1e-15);
        // the projections are the oracle's subspace amplitudes on the reduced lattice
        let weight = |s: &qmt_core::TonalSignal| basis_coefficients(s, &pair.reduced).iter().map(|a| a.norm_sqr()).sum::<f64>();
        let (w0, w1) = psi.subspace_weights(q).unwrap();
        prop_assert!((weight(&pair.psi0) - w0).abs() <= 1e-12);
        prop_assert!((weight(&pair.psi1) - w1).abs() <= 1e-12);
    }

    #[test]
    fn successive_gates_compose((n, psi) in sized_state(1, 5), s1 in any::<u64>(), s2 in any::<u64>(), q in 0usize..5) {
        let q = q % n;
        let (g1, g2) = (seeded_gate(s1), seeded_gate(s2));
        for backend_sampled in [false, true] {
            let (tonal, sampled, layout) = render(&psi);
            let (twice, once) = if backend_sampled {
                let a = apply_gate_signal(&apply_gate_signal(&sampled, &layout, &g1, q).unwrap(), &layout, &g2, q).unwrap();
                let b = apply_gate_signal(&sampled, &layout, &g2.compose(&g1), q).unwrap();
                (demodulate(&a, &layout).unwrap().state, demodulate(&b, &layout).unwrap().state)
            } else {
                let a = apply_gate_signal(&apply_gate_signal(&tonal, &layout, &g1, q).unwrap(), &layout, &g2, q).unwrap();
                let b = apply_gate_signal(&tonal, &layout, &g2.compose(&g1), q).unwrap();
                (demodulate(&a, &layout).unwrap().state, demodulate(&b, &layout).unwrap().state)
            };
            prop_assert!(twice.max_abs_diff(&once) <= 1e-9);
        }
    }

    #[test]
    fn unitary_gates_preserve_power((n, psi) in sized_state(1, 6), seed in any::<u64>(), q in 0usize..6) {
        let q = q % n;
        let gate = seeded_gate(seed);
        let (tonal, sampled, layout) = render(&psi);
        let norm = psi.norm_sqr();
        let t = apply_gate_signal(&tonal, &layout, &gate, q).unwrap();
        let s = apply_gate_signal(&sampled, &layout, &gate, q).unwrap();
        prop_assert!((t.inner_product(&t).unwrap().re - norm).abs() <= 1e-9);
        prop_assert!((s.inner_product(&s).unwrap().re - norm).abs() <= 1e-9);
    }

    #[test]
    fn parseval((n, psi) in sized_state(1, 6)) {
        let _ = n;
        let (tonal, sampled, _) = render(&psi);
        prop_assert!((tonal.inner_product(&tonal).unwrap().re - psi.norm_sqr()).abs() <= 1e-12);
        prop_assert!((rms_power(&sampled) - psi.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn render_analyze_round_trip((_n, psi) in sized_state(1, 6)) {
        let (tonal, sampled, _) = render(&psi);
        prop_assert!(sampled.analyze().max_abs_diff(&tonal) <= 1e-12);
        let again = SampledSignal::render(&sampled.analyze(), sampled.samples_per_period()).unwrap();
        let diff = again.samples().iter().zip(sampled.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12);
    }

    #[test]
    fn backends_agree_on_products_and_filters((n, psi) in sized_state(1, 6), k in -3i64..=3, q in 0usize..6) {
        let q = q % n;
        let (tonal, sampled, layout) = render(&psi);
        let carrier = qmt_core::TonalSignal::tone(k, c(0.0, 1.0), layout.base_frequency());
        let t = tonal.multiply(&carrier).unwrap().multiply(&tonal.scale(c(0.5, 0.0))).unwrap();
        let s = sampled.multiply(&sampled.with_tones(&carrier).unwrap()).unwrap().multiply(&sampled.scale(c(0.5, 0.0))).unwrap();
        prop_assert!(s.analyze().max_abs_diff(&t) <= 1e-9);
        let pt = partial_project(&tonal, &layout, q).unwrap();
        let ps = partial_project(&sampled, &layout, q).unwrap();
        prop_assert!(ps.psi0.analyze().max_abs_diff(&pt.psi0) <= 1e-9);
        prop_assert!(ps.psi1.analyze().max_abs_diff(&pt.psi1) <= 1e-9);
    }

    #[test]
    fn born_weights_match_subspaces((n, psi) in sized_state(1, 6), q in 0usize..6) {
        let q = q % n;
        prop_assume!(psi.norm_sqr() > 1e-6);
        let (tonal, sampled, layout) = render(&psi);
        let (w0, w1) = psi.subspace_weights(q).unwrap();
        for p in [born_probability(&tonal, &layout, q).unwrap(), born_probability(&sampled, &layout, q).unwrap()] {
            prop_assert!((p.q0 - w0).abs() <= 1e-10 && (p.q1 - w1).abs() <= 1e-10);
            prop_assert!((p.q0 + p.q1 - rms_power(&tonal)).abs() <= 1e-10);
            prop_assert!((p.p0 - w0 / (w0 + w1)).abs() <= 1e-10);
        }
    }
}

#[test]
fn identity_gate_is_exact_on_tonal_backend() {
    let psi = demo_state();
    let (tonal, _, layout) = render(&psi);
    for q in 0..2 {
        let out = apply_gate_signal(&tonal, &layout, &qmt_core::GateU2::identity(), q).unwrap();
        assert_eq!(demodulate(&out, &layout).unwrap().state, psi);
    }
}

#[test]
fn example_gate_on_demo_state() {
    let psi = demo_state();
    let (tonal, sampled, layout) = render(&psi);
    for m in [example_gate_printed(), example_gate_unitarized()] {
        let gate = qmt_core::GateU2::new(m).unwrap();
        let expected = psi.apply_gate(&gate, 1).unwrap();
        let t = demodulate(&apply_gate_signal(&tonal, &layout, &gate, 1).unwrap(), &layout).unwrap().state;
        let s = demodulate(&apply_gate_signal(&sampled, &layout, &gate, 1).unwrap(), &layout).unwrap().state;
        assert!(t.max_abs_diff(&expected) < 1e-12);
        assert!(s.max_abs_diff(&expected) < 1e-9);
    }
}

#[test]
fn example_gate_unitarity() {
    let printed = qmt_core::GateU2::new(example_gate_printed()).unwrap();
    let fixed = qmt_core::GateU2::new(example_gate_unitarized()).unwrap();
    assert!(printed.unitarity_deviation() > 0.03 && printed.unitarity_deviation() < 0.032);
    assert!(fixed.unitarity_deviation() < 1e-4);
    assert!(qmt_core::GateU2::strict(example_gate_printed()).is_err());
    assert!(qmt_core::GateU2::strict(example_gate_unitarized()).is_err());
    assert!(qmt_core::GateU2::with_tolerance(example_gate_printed(), 1e-2).is_err());
    assert!(qmt_core::GateU2::with_tolerance(example_gate_unitarized(), 1e-2).is_ok());
}
