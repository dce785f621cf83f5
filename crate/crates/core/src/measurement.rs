//! Measurement gates.
//!
//! A qubit is measured by forming its partial projections, taking their mean
//! powers `q0`, `q1`, and comparing a uniform draw `u` with `p0 = q0/(q0+q1)`:
//! the outcome is 1 exactly when `u > p0`. The signal then collapses to the
//! unnormalized branch `phi_b psi_b`, which feeds the next measurement.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::CircuitProgram;
use crate::error::{Error, Result};
use crate::noise::{NoiseConfig, NoisyPipeline};
use crate::oracle::StateVector;
use crate::projection::ProjectionEngine;
use crate::rng::{stream_rng, Stream};
use crate::signal::{FrequencyLayout, Signal, SignalBackend, TonalSignal};

/// Mean power `(1/T) int |psi|^2`.
pub fn rms_power<S: Signal>(signal: &S) -> f64 {
    signal.rms_power()
}

/// Mean of `(Re psi + Im psi)^2`. Equals [`rms_power`] only when the DC part
/// of `psi^2` is real; kept as a diagnostic.
pub fn rms_sum_trick<S: Signal>(signal: &S) -> f64 {
    signal.rms_sum_trick()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BornProbabilities {
    pub q0: f64,
    pub q1: f64,
    pub p0: f64,
    pub p1: f64,
}

impl BornProbabilities {
    fn from_powers(q0: f64, q1: f64) -> Result<Self> {
        let total = q0 + q1;
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateState);
        }
        let p0 = q0 / total;
        Ok(Self { q0, q1, p0, p1: 1.0 - p0 })
    }

    /// Comparator decision. A branch with zero power can never be selected.
    pub fn decide(&self, u: f64) -> u8 {
        if self.q1 == 0.0 {
            0
        } else if self.q0 == 0.0 {
            1
        } else {
            u8::from(u > self.p0)
        }
    }
}

/// Result of measuring one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitMeasurement<S> {
    pub bit: u8,
    pub collapsed: S,
    pub probabilities: BornProbabilities,
}

/// One full-register readout.
///
/// `bits`, `u_draws` and `probabilities` are in measurement order; `order[k]`
/// is the qubit measured at step `k` and `probabilities[k]` the `p0` used there.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementShot {
    pub order: Vec<usize>,
    pub bits: Vec<u8>,
    pub u_draws: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl MeasurementShot {
    /// Basis index `x` of the outcome.
    pub fn outcome(&self) -> usize {
        self.order.iter().zip(&self.bits).map(|(&q, &b)| (b as usize) << q).sum()
    }

    /// Outcome bit of `qubit`, if measured.
    pub fn bit_of(&self, qubit: usize) -> Option<u8> {
        self.order.iter().position(|&q| q == qubit).map(|k| self.bits[k])
    }

    pub fn bitstring(&self) -> String {
        bitstring(self.outcome(), self.order.len())
    }
}

/// Ket label of `x`, qubit `n-1` leftmost.
pub fn bitstring(x: usize, num_qubits: usize) -> String {
    (0..num_qubits).rev().map(|q| if x >> q & 1 == 1 { '1' } else { '0' }).collect()
}

/// Order in which [`MeasurementChain::measure_all`] reads the qubits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum MeasurementOrder {
    #[default]
    Ascending,
    Descending,
    Custom(Vec<usize>),
}

impl MeasurementOrder {
    pub fn qubits(&self, num_qubits: usize) -> Result<Vec<usize>> {
        let order: Vec<usize> = match self {
            MeasurementOrder::Ascending => (0..num_qubits).collect(),
            MeasurementOrder::Descending => (0..num_qubits).rev().collect(),
            MeasurementOrder::Custom(v) => v.clone(),
        };
        let mut seen = vec![false; num_qubits];
        for &q in &order {
            if q >= num_qubits || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidArgument(format!("measurement order {order:?} is not a permutation")));
            }
        }
        if order.len() != num_qubits {
            return Err(Error::InvalidArgument(format!("measurement order {order:?} is not a permutation")));
        }
        Ok(order)
    }
}

/// Measurement gates over a projection engine.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeasurementChain {
    pub engine: ProjectionEngine,
    pub order: MeasurementOrder,
}

impl MeasurementChain {
    pub fn with_order(order: MeasurementOrder) -> Self {
        Self { engine: ProjectionEngine::ideal(), order }
    }

    pub fn born_probability<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        qubit: usize,
    ) -> Result<BornProbabilities> {
        let pair = self.engine.partial_project(signal, layout, qubit)?;
        BornProbabilities::from_powers(pair.psi0.rms_power(), pair.psi1.rms_power())
    }

    pub fn measure_qubit<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        qubit: usize,
        u: f64,
    ) -> Result<QubitMeasurement<S>> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidArgument(format!("comparator input {u} outside [0, 1]")));
        }
        let pair = self.engine.partial_project(signal, layout, qubit)?;
        let probabilities = BornProbabilities::from_powers(pair.psi0.rms_power(), pair.psi1.rms_power())?;
        let bit = probabilities.decide(u);
        let c = layout.carrier(qubit)?;
        let sign = if bit == 0 { c } else { -c };
        let carrier = signal.with_tones(&TonalSignal::tone(sign, Complex64::new(1.0, 0.0), layout.base_frequency()))?;
        let branch = if bit == 0 { &pair.psi0 } else { &pair.psi1 };
        Ok(QubitMeasurement { bit, collapsed: carrier.multiply(branch)?, probabilities })
    }

    /// Measures every qubit in the chain's order, threading the collapsed
    /// signal. Returns the shot and the final collapsed signal.
    pub fn measure_sequence<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        u: &[f64],
    ) -> Result<(MeasurementShot, S)> {
        let order = self.order.qubits(layout.num_qubits())?;
        if u.len() != order.len() {
            return Err(Error::DimensionMismatch { expected: order.len(), found: u.len() });
        }
        let mut current = signal.clone();
        let mut shot = MeasurementShot {
            order: order.clone(),
            bits: Vec::with_capacity(order.len()),
            u_draws: u.to_vec(),
            probabilities: Vec::with_capacity(order.len()),
        };
        for (&q, &draw) in order.iter().zip(u) {
            let m = self.measure_qubit(&current, layout, q, draw)?;
            shot.bits.push(m.bit);
            shot.probabilities.push(m.probabilities.p0);
            current = m.collapsed;
        }
        Ok((shot, current))
    }

    pub fn measure_all<S: Signal>(&self, signal: &S, layout: &FrequencyLayout, u: &[f64]) -> Result<MeasurementShot> {
        self.measure_sequence(signal, layout, u).map(|(shot, _)| shot)
    }
}

/// Born probabilities on `qubit` with ideal filters.
pub fn born_probability<S: Signal>(signal: &S, layout: &FrequencyLayout, qubit: usize) -> Result<BornProbabilities> {
    MeasurementChain::default().born_probability(signal, layout, qubit)
}

pub fn measure_qubit<S: Signal>(
    signal: &S,
    layout: &FrequencyLayout,
    qubit: usize,
    u: f64,
) -> Result<QubitMeasurement<S>> {
    MeasurementChain::default().measure_qubit(signal, layout, qubit, u)
}

/// Ascending-order full readout with ideal filters.
pub fn measure_all<S: Signal>(signal: &S, layout: &FrequencyLayout, u: &[f64]) -> Result<MeasurementShot> {
    MeasurementChain::default().measure_all(signal, layout, u)
}

/// Outcome counts over the `2^n` basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    num_qubits: usize,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, counts: vec![0; 1 << num_qubits] }
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Pearson statistic against `expected` probabilities. Cells with zero
    /// expected probability must be empty; the returned degrees of freedom
    /// count only cells with positive probability.
    pub fn chi_square(&self, expected: &[f64]) -> Result<(f64, usize)> {
        if expected.len() != self.counts.len() {
            return Err(Error::DimensionMismatch { expected: self.counts.len(), found: expected.len() });
        }
        let total = self.total() as f64;
        let mut stat = 0.0;
        let mut cells = 0;
        for (&count, &p) in self.counts.iter().zip(expected) {
            if p > 0.0 {
                let e = p * total;
                stat += (count as f64 - e).powi(2) / e;
                cells += 1;
            } else if count > 0 {
                return Ok((f64::INFINITY, cells.max(1)));
            }
        }
        Ok((stat, cells.saturating_sub(1)))
    }
}

/// Runs `program` from `initial` for `shots` shots and histograms the final
/// full-register readout.
///
/// Shot `s` draws its comparator inputs from stream `(seed, Shots, s)`, so the
/// result does not depend on scheduling. Gates before the first measurement
/// are evaluated once and shared by all shots.
pub fn sample_shots<B: SignalBackend>(
    backend: &B,
    program: &CircuitProgram,
    initial: &StateVector,
    shots: u64,
    seed: u64,
    chain: &MeasurementChain,
) -> Result<Histogram> {
    sample_shots_with_noise(backend, program, initial, shots, seed, chain, &NoiseConfig::ideal())
}

/// [`sample_shots`] with hardware noise. Each noisy shot gets its own
/// synthesis and gate noise from stream `(seed, Noise, s)`; with an ideal
/// config the gate prefix is shared as in [`sample_shots`].
pub fn sample_shots_with_noise<B: SignalBackend>(
    backend: &B,
    program: &CircuitProgram,
    initial: &StateVector,
    shots: u64,
    seed: u64,
    chain: &MeasurementChain,
    noise: &NoiseConfig,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let layout = program.layout()?;
    let pipeline = NoisyPipeline::new(backend, layout.clone(), *noise)?.with_engine(chain.engine);
    let shared = if noise.is_ideal() {
        let (prefix, rest) = program.split_at_first_measurement();
        let start = backend.synthesize(initial, &layout)?;
        Some((prefix.run_gates(&start, &layout, &chain.engine)?, rest))
    } else {
        None
    };

    let outcomes: Vec<Result<usize>> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, Stream::Shots, s);
            let mut draw = || rng.random::<f64>();
            let run = match &shared {
                Some((prepared, rest)) => rest.run(prepared, &layout, chain, &mut draw)?,
                None => {
                    let mut noise_rng = stream_rng(seed, Stream::Noise, s);
                    let start = pipeline.synthesize(initial, &mut noise_rng)?;
                    program.run_noisy(&pipeline, &start, chain, &mut draw, &mut noise_rng)?
                }
            };
            let final_shot = match run.final_readout {
                Some(shot) => shot,
                None => {
                    let u: Vec<f64> = (0..layout.num_qubits()).map(|_| draw()).collect();
                    chain.measure_all(&run.signal, &layout, &u)?
                }
            };
            Ok(final_shot.outcome())
        })
        .collect();

    let mut hist = Histogram::new(layout.num_qubits());
    for outcome in outcomes {
        hist.record(outcome?);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{basis_signal, synthesize, SampledSignal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn singlet_signal() -> (TonalSignal, FrequencyLayout) {
        let layout = FrequencyLayout::octave(2).unwrap();
        (synthesize(&StateVector::singlet(), &layout).unwrap(), layout)
    }

    #[test]
    fn power_of_unit_tonal() {
        let t = TonalSignal::tone(1, c(1.0, 0.0), 1.0);
        assert_eq!(rms_power(&t), 1.0);
        assert!((rms_power(&SampledSignal::render(&t, 16).unwrap()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singlet_projection_power() {
        let (psi, layout) = singlet_signal();
        let pair = crate::projection::partial_project(&psi, &layout, 1).unwrap();
        assert!((rms_power(&pair.psi0) - 0.5).abs() < 1e-15);
        let p = born_probability(&psi, &layout, 0).unwrap();
        assert!((p.p0 - 0.5).abs() < 1e-15 && (p.p1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn deterministic_state_measures_zero() {
        let layout = FrequencyLayout::octave(2).unwrap();
        let phi = basis_signal(0, &layout).unwrap();
        let p = born_probability(&phi, &layout, 1).unwrap();
        assert_eq!((p.p0, p.p1), (1.0, 0.0));
        let m = measure_qubit(&phi, &layout, 1, 0.999).unwrap();
        assert_eq!(m.bit, 0);
        assert_eq!(m.collapsed, phi);
    }

    #[test]
    fn singlet_collapse_anticorrelates() {
        let (psi, layout) = singlet_signal();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = measure_qubit(&psi, &layout, 1, 0.75).unwrap();
        assert_eq!(m.bit, 1);
        let expected = TonalSignal::tone(-1, c(-h, 0.0), layout.base_frequency());
        assert!(m.collapsed.max_abs_diff(&expected) < 1e-15);
        let next = born_probability(&m.collapsed, &layout, 0).unwrap();
        assert_eq!(next.p0, 1.0);
        for u in [0.0, 0.5, 1.0] {
            assert_eq!(measure_qubit(&m.collapsed, &layout, 0, u).unwrap().bit, 0);
        }
    }

    #[test]
    fn measure_all_on_basis_state() {
        let layout = FrequencyLayout::octave(2).unwrap();
        let phi = basis_signal(3, &layout).unwrap();
        for u in [[0.0, 0.0], [0.3, 0.9], [1.0, 1.0]] {
            let shot = measure_all(&phi, &layout, &u).unwrap();
            assert_eq!(shot.bits, vec![1, 1]);
            assert_eq!(shot.outcome(), 3);
            assert_eq!(shot.bitstring(), "11");
        }
    }

    #[test]
    fn singlet_readout_in_both_orders() {
        let (psi, layout) = singlet_signal();
        let shot = measure_all(&psi, &layout, &[0.2, 0.6]).unwrap();
        assert_eq!(shot.order, vec![0, 1]);
        assert_eq!(shot.bits, vec![0, 1]);
        assert_eq!(shot.probabilities[1], 0.0);
        let a_first = MeasurementChain::with_order(MeasurementOrder::Descending);
        let shot = a_first.measure_all(&psi, &layout, &[0.2, 0.6]).unwrap();
        assert_eq!(shot.order, vec![1, 0]);
        assert_eq!((shot.bit_of(1), shot.bit_of(0)), (Some(0), Some(1)));
    }

    #[test]
    fn zero_signal_is_degenerate() {
        let layout = FrequencyLayout::octave(1).unwrap();
        let zero = TonalSignal::new(layout.base_frequency());
        assert_eq!(born_probability(&zero, &layout, 0), Err(Error::DegenerateState));
        assert_eq!(measure_qubit(&zero, &layout, 0, 0.5).map(|m| m.bit), Err(Error::DegenerateState));
    }

    #[test]
    fn comparator_input_is_validated() {
        let (psi, layout) = singlet_signal();
        assert!(measure_qubit(&psi, &layout, 0, 1.5).is_err());
        assert!(measure_all(&psi, &layout, &[0.5]).is_err());
        let bad = MeasurementChain::with_order(MeasurementOrder::Custom(vec![0, 0]));
        assert!(bad.measure_all(&psi, &layout, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn sum_trick_counterexample() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = TonalSignal::from_coefficients(1.0, [(1, c(h, 0.0)), (-1, c(0.0, h))]);
        assert!((rms_sum_trick(&t) - 2.0).abs() < 1e-15);
        assert!((rms_power(&t) - 1.0).abs() < 1e-15);
        let s = SampledSignal::render(&t, 16).unwrap();
        assert!((rms_sum_trick(&s) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn chi_square_flags_impossible_outcomes() {
        let mut h = Histogram::new(1);
        h.record(0);
        h.record(1);
        assert_eq!(h.chi_square(&[1.0, 0.0]).unwrap().0, f64::INFINITY);
        let (stat, dof) = h.chi_square(&[0.5, 0.5]).unwrap();
        assert_eq!((stat, dof), (0.0, 1));
    }
}
