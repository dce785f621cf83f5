#![allow(dead_code)]

use proptest::prelude::*;
use qmt_core::analysis::haar_gate;
use qmt_core::{Complex64, GateU2, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients of the two-qubit state used in the hardware demonstration.
pub fn demo_state() -> StateVector {
    StateVector::new(2, vec![c(0.6579, -0.2895), c(0.5385, 0.1383), c(-0.2280, 0.3953), c(-0.2460, -0.4277)]).unwrap()
}

/// The example gate as printed, with `Im U01 = 0.8460`.
pub fn example_gate_printed() -> [[Complex64; 2]; 2] {
    [[c(0.1759, 0.1836), c(0.4346, 0.8460)], [c(-0.4346, 0.8640), c(0.1759, -0.1836)]]
}

/// The example gate with `Im U01 = 0.8640`, unitary to within rounding of
/// the printed digits.
pub fn example_gate_unitarized() -> [[Complex64; 2]; 2] {
    [[c(0.1759, 0.1836), c(0.4346, 0.8640)], [c(-0.4346, 0.8640), c(0.1759, -0.1836)]]
}

pub fn seeded_gate(seed: u64) -> GateU2 {
    haar_gate(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn state_strategy(num_qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1usize << num_qubits)
        .prop_map(move |v| StateVector::new(num_qubits, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap())
}

/// `(n, state)` with `n` in `lo..=hi`.
pub fn sized_state(lo: usize, hi: usize) -> impl Strategy<Value = (usize, StateVector)> {
    (lo..=hi).prop_flat_map(|n| (Just(n), state_strategy(n)))
}
