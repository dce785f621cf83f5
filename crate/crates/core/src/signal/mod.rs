//! Quadrature modulated tonals.
//!
//! A basis state `|x>` is the product of one conjugate tonal per qubit,
//! `phi_x(t) = prod_i e^{+-j w_i t}` (sign `+` for bit 0), so an `n`-qubit state
//! is the tonal sum `psi(t) = sum_x alpha_x phi_x(t)`. With octave spacing the
//! `2^n` basis frequencies are the distinct odd multiples of `w0`.
//!
//! Two interchangeable backends implement [`Signal`]: [`TonalSignal`] is an
//! exact sparse coefficient map, [`SampledSignal`] a dual-rail time series
//! over whole periods. All pipelines are generic over the backend.

mod layout;
mod sampled;
mod tonal;

use std::fmt;

use num_complex::Complex64;
use rand::RngCore;

pub use layout::{check_samples_per_period, oversampling_floor, FrequencyLayout, DEFAULT_BASE_FREQUENCY};
pub use sampled::SampledSignal;
pub use tonal::TonalSignal;

use crate::error::{Error, Result};
use crate::oracle::StateVector;
use crate::projection::CombFilterSpec;

/// Operations every signal backend supports.
pub trait Signal: Clone + fmt::Debug + Send + Sync {
    fn base_frequency(&self) -> f64;

    /// A signal of the same backend and time base carrying exactly `tones`.
    fn with_tones(&self, tones: &TonalSignal) -> Result<Self>;

    /// Fourier coefficients over harmonics of `w0`.
    fn to_tonal(&self) -> TonalSignal;

    /// Time-domain samples. Tonal signals are rendered at the given rate;
    /// sampled signals return their own samples and ignore the arguments.
    fn waveform(&self, samples_per_period: usize, periods: usize) -> Result<SampledSignal>;

    fn multiply(&self, other: &Self) -> Result<Self>;

    fn add(&self, other: &Self) -> Result<Self>;

    fn scale(&self, factor: Complex64) -> Self;

    /// Ideal brick-wall comb filter.
    fn comb_filter(&self, spec: &CombFilterSpec) -> Self;

    /// Linear filter with frequency response `response(f)`, `f` in units of `w0`.
    fn shape_spectrum(&self, response: &dyn Fn(f64) -> Complex64) -> Self;

    /// Time-averaged `conj(a) b`.
    fn inner_product(&self, other: &Self) -> Result<Complex64>;

    /// Mean of `|psi|^2` over the integration window.
    fn rms_power(&self) -> f64;

    /// Mean of `(Re psi + Im psi)^2` over the integration window.
    fn rms_sum_trick(&self) -> f64;

    /// `mu psi + nu conj(psi)`, the general rail-mixing distortion.
    fn widely_linear(&self, mu: Complex64, nu: Complex64) -> Self;

    /// Independent Gaussian noise on each rail of each sample.
    fn add_white_noise(&self, sigma: f64, rng: &mut dyn RngCore) -> Result<Self>;
}

impl Signal for TonalSignal {
    fn base_frequency(&self) -> f64 {
        TonalSignal::base_frequency(self)
    }

    fn with_tones(&self, tones: &TonalSignal) -> Result<Self> {
        if tones.base_frequency() != self.base_frequency() {
            return Err(Error::LayoutMismatch);
        }
        Ok(tones.clone())
    }

    fn to_tonal(&self) -> TonalSignal {
        self.clone()
    }

    fn waveform(&self, samples_per_period: usize, periods: usize) -> Result<SampledSignal> {
        SampledSignal::render_periods(self, samples_per_period, periods)
    }

    fn multiply(&self, other: &Self) -> Result<Self> {
        TonalSignal::multiply(self, other)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        TonalSignal::add(self, other)
    }

    fn scale(&self, factor: Complex64) -> Self {
        TonalSignal::scale(self, factor)
    }

    fn comb_filter(&self, spec: &CombFilterSpec) -> Self {
        self.restrict(spec.keep_set())
    }

    fn shape_spectrum(&self, response: &dyn Fn(f64) -> Complex64) -> Self {
        TonalSignal::from_coefficients(self.base_frequency(), self.iter().map(|(k, c)| (k, c * response(k as f64))))
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        TonalSignal::inner_product(self, other)
    }

    fn rms_power(&self) -> f64 {
        self.power()
    }

    fn rms_sum_trick(&self) -> f64 {
        self.sum_rail_power()
    }

    fn widely_linear(&self, mu: Complex64, nu: Complex64) -> Self {
        TonalSignal::widely_linear(self, mu, nu)
    }

    fn add_white_noise(&self, sigma: f64, _rng: &mut dyn RngCore) -> Result<Self> {
        if sigma != 0.0 {
            return Err(Error::InvalidArgument("white noise requires the sampled backend".into()));
        }
        Ok(self.clone())
    }
}

impl Signal for SampledSignal {
    fn base_frequency(&self) -> f64 {
        SampledSignal::base_frequency(self)
    }

    fn with_tones(&self, tones: &TonalSignal) -> Result<Self> {
        if tones.base_frequency() != self.base_frequency() {
            return Err(Error::LayoutMismatch);
        }
        SampledSignal::render_periods(tones, self.samples_per_period(), self.periods())
    }

    fn to_tonal(&self) -> TonalSignal {
        self.analyze()
    }

    fn waveform(&self, _samples_per_period: usize, _periods: usize) -> Result<SampledSignal> {
        Ok(self.clone())
    }

    fn multiply(&self, other: &Self) -> Result<Self> {
        SampledSignal::multiply(self, other)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        SampledSignal::add(self, other)
    }

    fn scale(&self, factor: Complex64) -> Self {
        SampledSignal::scale(self, factor)
    }

    fn comb_filter(&self, spec: &CombFilterSpec) -> Self {
        self.restrict(spec.keep_set())
    }

    fn shape_spectrum(&self, response: &dyn Fn(f64) -> Complex64) -> Self {
        SampledSignal::shape_spectrum(self, response)
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        SampledSignal::inner_product(self, other)
    }

    fn rms_power(&self) -> f64 {
        self.power()
    }

    fn rms_sum_trick(&self) -> f64 {
        self.sum_rail_power()
    }

    fn widely_linear(&self, mu: Complex64, nu: Complex64) -> Self {
        SampledSignal::widely_linear(self, mu, nu)
    }

    fn add_white_noise(&self, sigma: f64, rng: &mut dyn RngCore) -> Result<Self> {
        SampledSignal::add_white_noise(self, sigma, rng)
    }
}

/// Builds backend signals from states.
pub trait SignalBackend: Sync {
    type Signal: Signal;

    fn name(&self) -> &'static str;

    fn synthesize(&self, state: &StateVector, layout: &FrequencyLayout) -> Result<Self::Signal>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TonalBackend;

impl SignalBackend for TonalBackend {
    type Signal = TonalSignal;

    fn name(&self) -> &'static str {
        "tonal"
    }

    fn synthesize(&self, state: &StateVector, layout: &FrequencyLayout) -> Result<TonalSignal> {
        synthesize(state, layout)
    }
}

/// Sampled backend. `samples_per_period = None` uses [`oversampling_floor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledBackend {
    pub samples_per_period: Option<usize>,
    pub periods: usize,
}

impl Default for SampledBackend {
    fn default() -> Self {
        Self { samples_per_period: None, periods: 1 }
    }
}

impl SampledBackend {
    pub fn with_samples(samples_per_period: usize) -> Self {
        Self { samples_per_period: Some(samples_per_period), periods: 1 }
    }

    pub fn samples_for(&self, num_qubits: usize) -> usize {
        self.samples_per_period.unwrap_or_else(|| oversampling_floor(num_qubits))
    }
}

impl SignalBackend for SampledBackend {
    type Signal = SampledSignal;

    fn name(&self) -> &'static str {
        "sampled"
    }

    fn synthesize(&self, state: &StateVector, layout: &FrequencyLayout) -> Result<SampledSignal> {
        let n = self.samples_for(layout.num_qubits());
        check_samples_per_period(layout.num_qubits(), n)?;
        SampledSignal::render_periods(&synthesize(state, layout)?, n, self.periods)
    }
}

/// `phi_x`, the basis signal of `|x>`.
pub fn basis_signal(x: usize, layout: &FrequencyLayout) -> Result<TonalSignal> {
    Ok(TonalSignal::tone(layout.basis_frequency(x)?, Complex64::new(1.0, 0.0), layout.base_frequency()))
}

/// `psi = sum_x alpha_x phi_x`.
pub fn synthesize(state: &StateVector, layout: &FrequencyLayout) -> Result<TonalSignal> {
    if state.num_qubits() != layout.num_qubits() {
        return Err(Error::DimensionMismatch { expected: layout.dim(), found: state.dim() });
    }
    Ok(TonalSignal::from_coefficients(
        layout.base_frequency(),
        state.amplitudes().iter().enumerate().map(|(x, &a)| (layout.basis_frequency_unchecked(x), a)),
    ))
}

/// Output of [`demodulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulation {
    pub state: StateVector,
    /// Power outside the layout's basis frequencies.
    pub residual: f64,
}

/// Recovers `alpha_x = <phi_x|psi>` for every basis signal of `layout`.
pub fn demodulate<S: Signal>(signal: &S, layout: &FrequencyLayout) -> Result<Demodulation> {
    let spectrum = signal.to_tonal();
    let amplitudes = basis_coefficients(&spectrum, layout);
    let band = layout.basis_set();
    let residual = spectrum.iter().filter(|(k, _)| !band.contains(k)).map(|(_, c)| c.norm_sqr()).sum();
    Ok(Demodulation { state: StateVector::new(layout.num_qubits(), amplitudes)?, residual })
}

/// Coefficients at each basis frequency of `layout`, in basis-index order.
/// Works for zero-qubit (scalar) layouts too.
pub fn basis_coefficients(spectrum: &TonalSignal, layout: &FrequencyLayout) -> Vec<Complex64> {
    (0..layout.dim()).map(|x| spectrum.get(layout.basis_frequency_unchecked(x))).collect()
}
