//! Gates by subspace projection.
//!
//! Multiplying `psi` by `e^{-+j w_i t}` shifts the qubit-`i` factor to DC for
//! one branch and to `-+2 w_i` for the other. A comb filter that passes only
//! the lattice of the remaining qubits then leaves the two partial projections
//! `psi_0`, `psi_1`, which satisfy `psi = phi_0 psi_0 + phi_1 psi_1`. A gate
//! remodulates them with new qubit-`i` carriers:
//!
//! ```text
//! psi' = (U00 phi_0 + U10 phi_1) psi_0 + (U01 phi_0 + U11 phi_1) psi_1
//! ```
//!
//! Partial projections live on the reduced layout, where qubits above `i`
//! move down one index.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::GateU2;
use crate::signal::{FrequencyLayout, Signal, TonalSignal};

/// Set of passband frequencies (units of `w0`) of an ideal comb filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombFilterSpec {
    keep: BTreeSet<i64>,
}

impl CombFilterSpec {
    pub fn new(keep: impl IntoIterator<Item = i64>) -> Self {
        Self { keep: keep.into_iter().collect() }
    }

    /// Passes exactly the basis frequencies of `layout`.
    pub fn for_layout(layout: &FrequencyLayout) -> Self {
        Self { keep: layout.basis_set() }
    }

    pub fn keep_set(&self) -> &BTreeSet<i64> {
        &self.keep
    }

    /// Number of strictly positive passbands.
    pub fn positive_passbands(&self) -> usize {
        self.keep.iter().filter(|&&k| k > 0).count()
    }
}

/// Ideal comb filter: restriction to the keep set.
pub fn comb_filter<S: Signal>(signal: &S, spec: &CombFilterSpec) -> S {
    signal.comb_filter(spec)
}

/// Whether the unwanted images `K - 2c_i` and `K + 2c_i` produced by
/// down-conversion avoid the comb keep set `K` for `qubit`.
pub fn filter_images_disjoint(layout: &FrequencyLayout, qubit: usize) -> Result<bool> {
    let shift = 2 * layout.carrier(qubit)?;
    let keep = layout.reduced(qubit)?.basis_set();
    Ok(keep.iter().all(|k| !keep.contains(&(k - shift)) && !keep.contains(&(k + shift))))
}

/// Windowed-sinc FIR realization of a comb filter.
///
/// The ideal comb on a `grid`-point harmonic grid has a `grid`-periodic
/// impulse response. It is truncated to `taps` centered taps, Hann windowed
/// and scaled to unit passband gain. Harmonics `d` apart are resolved once the
/// main lobe half-width `2 grid / (taps + 1)` is below `d`, so `taps` should be
/// several times `grid`.
#[derive(Debug, Clone)]
pub struct FirComb {
    grid: usize,
    /// Taps for delays `-half..=half`.
    taps: Vec<Complex64>,
}

impl FirComb {
    pub fn design(spec: &CombFilterSpec, taps: usize, grid: usize) -> Result<Self> {
        if taps == 0 || taps.is_multiple_of(2) || grid < 2 {
            return Err(Error::InvalidArgument(format!("FIR needs an odd tap count and grid >= 2, got {taps}/{grid}")));
        }
        let half = (taps / 2) as i64;
        let tau = 2.0 * std::f64::consts::PI;
        let window = |m: i64| 0.5 * (1.0 + (std::f64::consts::PI * m as f64 / (half + 1) as f64).cos());
        let gain = grid as f64 / (-half..=half).map(window).sum::<f64>();
        let coeffs = (-half..=half)
            .map(|m| {
                let ideal: Complex64 = spec
                    .keep_set()
                    .iter()
                    .map(|&k| Complex64::from_polar(1.0, tau * (k * m) as f64 / grid as f64))
                    .sum::<Complex64>()
                    / grid as f64;
                ideal * window(m) * gain
            })
            .collect();
        Ok(Self { grid, taps: coeffs })
    }

    /// Frequency response at `f` (units of `w0`).
    pub fn response(&self, f: f64) -> Complex64 {
        let half = (self.taps.len() / 2) as i64;
        let tau = 2.0 * std::f64::consts::PI;
        self.taps
            .iter()
            .zip(-half..=half)
            .map(|(&h, m)| h * Complex64::from_polar(1.0, -tau * f * m as f64 / self.grid as f64))
            .sum()
    }

    /// Worst passband deviation `max |H - 1|` over `pass` and worst stopband
    /// leakage `max |H|` over `stop`.
    pub fn ripple(&self, pass: impl IntoIterator<Item = i64>, stop: impl IntoIterator<Item = i64>) -> (f64, f64) {
        let pass_dev = pass.into_iter().map(|k| (self.response(k as f64) - 1.0).norm()).fold(0.0, f64::max);
        let stop_leak = stop.into_iter().map(|k| self.response(k as f64).norm()).fold(0.0, f64::max);
        (pass_dev, stop_leak)
    }
}

/// Filter realization used for partial projection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FilterModel {
    /// Brick-wall restriction.
    #[default]
    Ideal,
    /// Windowed-sinc FIR with `taps` taps designed on a `grid`-point period.
    Fir { taps: usize, grid: usize },
}

/// The two partial projections of a signal on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialProjectionPair<S> {
    pub psi0: S,
    pub psi1: S,
    pub qubit: usize,
    /// Layout of the remaining qubits.
    pub reduced: FrequencyLayout,
}

impl<S: Signal> PartialProjectionPair<S> {
    /// `phi_0 psi_0 + phi_1 psi_1` with the carriers of `layout`.
    pub fn reconstruct(&self, layout: &FrequencyLayout) -> Result<S> {
        let c = layout.carrier(self.qubit)?;
        let w0 = layout.base_frequency();
        let up = self.psi0.with_tones(&TonalSignal::tone(c, Complex64::new(1.0, 0.0), w0))?;
        let down = self.psi0.with_tones(&TonalSignal::tone(-c, Complex64::new(1.0, 0.0), w0))?;
        up.multiply(&self.psi0)?.add(&down.multiply(&self.psi1)?)
    }
}

/// Projection and gate chain with a configurable filter model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionEngine {
    filter: FilterModel,
}

impl ProjectionEngine {
    pub fn new(filter: FilterModel) -> Self {
        Self { filter }
    }

    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn filter_model(&self) -> FilterModel {
        self.filter
    }

    fn filter<S: Signal>(&self, signal: &S, spec: &CombFilterSpec) -> Result<S> {
        match self.filter {
            FilterModel::Ideal => Ok(signal.comb_filter(spec)),
            FilterModel::Fir { taps, grid } => {
                let fir = FirComb::design(spec, taps, grid)?;
                Ok(signal.shape_spectrum(&|f| fir.response(f)))
            }
        }
    }

    /// Down-converts by each qubit-`i` carrier and comb filters onto the
    /// reduced lattice.
    pub fn partial_project<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        qubit: usize,
    ) -> Result<PartialProjectionPair<S>> {
        let c = layout.carrier(qubit)?;
        let reduced = layout.reduced(qubit)?;
        let spec = CombFilterSpec::for_layout(&reduced);
        let w0 = layout.base_frequency();
        let to_dc0 = signal.with_tones(&TonalSignal::tone(-c, Complex64::new(1.0, 0.0), w0))?;
        let to_dc1 = signal.with_tones(&TonalSignal::tone(c, Complex64::new(1.0, 0.0), w0))?;
        let psi0 = self.filter(&to_dc0.multiply(signal)?, &spec)?;
        let psi1 = self.filter(&to_dc1.multiply(signal)?, &spec)?;
        Ok(PartialProjectionPair { psi0, psi1, qubit, reduced })
    }

    /// Applies `gate` to `qubit` by projection and remodulation.
    pub fn apply_gate<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        gate: &GateU2,
        qubit: usize,
    ) -> Result<S> {
        let pair = self.partial_project(signal, layout, qubit)?;
        self.remodulate(&pair, layout, gate)
    }

    fn remodulate<S: Signal>(
        &self,
        pair: &PartialProjectionPair<S>,
        layout: &FrequencyLayout,
        gate: &GateU2,
    ) -> Result<S> {
        let c = layout.carrier(pair.qubit)?;
        let w0 = layout.base_frequency();
        let u = gate.matrix();
        let carrier0 = pair.psi0.with_tones(&TonalSignal::from_coefficients(w0, [(c, u[0][0]), (-c, u[1][0])]))?;
        let carrier1 = pair.psi0.with_tones(&TonalSignal::from_coefficients(w0, [(c, u[0][1]), (-c, u[1][1])]))?;
        carrier0.multiply(&pair.psi0)?.add(&carrier1.multiply(&pair.psi1)?)
    }

    /// Applies `gate` to `target` when `control` is 1: project on the
    /// control, transform the `psi_1` branch on the reduced layout, and
    /// remodulate.
    pub fn apply_controlled<S: Signal>(
        &self,
        signal: &S,
        layout: &FrequencyLayout,
        gate: &GateU2,
        control: usize,
        target: usize,
    ) -> Result<S> {
        layout.carrier(target)?;
        if control == target {
            return Err(Error::ControlIsTarget(control));
        }
        let mut pair = self.partial_project(signal, layout, control)?;
        let reduced_target = if target > control { target - 1 } else { target };
        pair.psi1 = self.apply_gate(&pair.psi1, &pair.reduced, gate, reduced_target)?;
        pair.reconstruct(layout)
    }
}

/// [`ProjectionEngine::partial_project`] with ideal filters.
pub fn partial_project<S: Signal>(
    signal: &S,
    layout: &FrequencyLayout,
    qubit: usize,
) -> Result<PartialProjectionPair<S>> {
    ProjectionEngine::ideal().partial_project(signal, layout, qubit)
}

/// [`ProjectionEngine::apply_gate`] with ideal filters.
pub fn apply_gate_signal<S: Signal>(signal: &S, layout: &FrequencyLayout, gate: &GateU2, qubit: usize) -> Result<S> {
    ProjectionEngine::ideal().apply_gate(signal, layout, gate, qubit)
}

/// [`ProjectionEngine::apply_controlled`] with ideal filters.
pub fn apply_controlled_signal<S: Signal>(
    signal: &S,
    layout: &FrequencyLayout,
    gate: &GateU2,
    control: usize,
    target: usize,
) -> Result<S> {
    ProjectionEngine::ideal().apply_controlled(signal, layout, gate, control, target)
}
