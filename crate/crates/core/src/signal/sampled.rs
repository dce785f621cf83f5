use std::cell::RefCell;
use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;

use super::TonalSignal;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let plan = if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
        plan.process(buf);
    });
}

/// Dual-rail time series: real part is the in-phase rail, imaginary part the
/// quadrature rail.
///
/// Holds `samples_per_period * periods` samples starting at `t = 0`, with
/// sample `m` at `t_m = m T / samples_per_period`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    base_frequency: f64,
    samples_per_period: usize,
    periods: usize,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    /// Samples `tonal` over one period.
    pub fn render(tonal: &TonalSignal, samples_per_period: usize) -> Result<Self> {
        Self::render_periods(tonal, samples_per_period, 1)
    }

    /// Samples `tonal` over `periods` whole periods.
    pub fn render_periods(tonal: &TonalSignal, samples_per_period: usize, periods: usize) -> Result<Self> {
        let n = samples_per_period;
        if n < 2 || periods == 0 {
            return Err(Error::InvalidArgument(format!("need at least 2 samples and 1 period, got {n} x {periods}")));
        }
        if let Some(k) = tonal.frequencies().find(|k| 2 * k.unsigned_abs() >= n as u64) {
            return Err(Error::Aliasing { frequency: k, samples: n });
        }
        let twiddle: Vec<Complex64> =
            (0..n).map(|r| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64)).collect();
        let one_period: Vec<Complex64> = (0..n)
            .map(|m| tonal.iter().map(|(k, c)| c * twiddle[(k * m as i64).rem_euclid(n as i64) as usize]).sum())
            .collect();
        let samples = one_period.iter().copied().cycle().take(n * periods).collect();
        Ok(Self { base_frequency: tonal.base_frequency(), samples_per_period: n, periods, samples })
    }

    pub fn from_samples(
        base_frequency: f64,
        samples_per_period: usize,
        periods: usize,
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        if samples_per_period < 2 || periods == 0 || samples.len() != samples_per_period * periods {
            return Err(Error::DimensionMismatch { expected: samples_per_period * periods, found: samples.len() });
        }
        Ok(Self { base_frequency, samples_per_period, periods, samples })
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample times in seconds.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = 2.0 * std::f64::consts::PI / self.base_frequency / self.samples_per_period as f64;
        (0..self.samples.len()).map(move |m| m as f64 * dt)
    }

    pub(crate) fn map_samples(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { samples: self.samples.iter().map(|&s| f(s)).collect(), ..self.clone() }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.base_frequency != other.base_frequency
            || self.samples_per_period != other.samples_per_period
            || self.periods != other.periods
        {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// Frequency in units of `w0` of DFT bin `b`, when it lies on the
    /// harmonic grid.
    fn bin_frequency(&self, b: usize) -> Option<i64> {
        let len = self.samples.len() as i64;
        let f = if (b as i64) < (len + 1) / 2 { b as i64 } else { b as i64 - len };
        (f % self.periods as i64 == 0).then(|| f / self.periods as i64)
    }

    fn signed_bin(&self, b: usize) -> f64 {
        let len = self.samples.len() as i64;
        let f = if (b as i64) < (len + 1) / 2 { b as i64 } else { b as i64 - len };
        f as f64 / self.periods as f64
    }

    /// Scaled DFT: entry `b` is the Fourier coefficient of bin `b`.
    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        fft(&mut buf, false);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn with_spectrum(&self, mut spectrum: Vec<Complex64>) -> Self {
        fft(&mut spectrum, true);
        Self { samples: spectrum, ..self.clone() }
    }

    /// Fourier analysis back to an exact tonal map over harmonics of `w0`.
    ///
    /// Coefficients below `1e-13` of the largest are treated as rounding
    /// residue and dropped.
    pub fn analyze(&self) -> TonalSignal {
        let spectrum = self.spectrum();
        let peak = spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = peak * 1e-13;
        TonalSignal::from_coefficients(
            self.base_frequency,
            spectrum
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > floor)
                .filter_map(|(b, &c)| self.bin_frequency(b).map(|k| (k, c))),
        )
    }

    /// Single Fourier coefficient at harmonic `k`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let len = self.samples.len();
        let n = self.samples_per_period as f64;
        let sum: Complex64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let r = (k * m as i64).rem_euclid(self.samples_per_period as i64) as f64;
                s * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * r / n)
            })
            .sum();
        sum / len as f64
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(), ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_samples(|s| s * factor)
    }

    /// Zeroes every DFT bin outside `keep`; off-harmonic bins are always
    /// removed.
    pub fn restrict(&self, keep: &BTreeSet<i64>) -> Self {
        let mut spectrum = self.spectrum();
        for (b, c) in spectrum.iter_mut().enumerate() {
            if !self.bin_frequency(b).is_some_and(|k| keep.contains(&k)) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.with_spectrum(spectrum)
    }

    /// Multiplies each bin by `response(f)`, `f` in units of `w0`. This is
    /// circular convolution with the response's impulse, exact for periodic
    /// signals.
    pub fn shape_spectrum(&self, response: &dyn Fn(f64) -> Complex64) -> Self {
        let mut spectrum = self.spectrum();
        for (b, c) in spectrum.iter_mut().enumerate() {
            *c *= response(self.signed_bin(b));
        }
        self.with_spectrum(spectrum)
    }

    /// `(1/L) sum_m conj(a_m) b_m`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let sum: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        Ok(sum / self.samples.len() as f64)
    }

    /// `(1/L) sum_m |s_m|^2`.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Mean of `(Re s + Im s)^2` over the samples.
    pub fn sum_rail_power(&self) -> f64 {
        self.samples.iter().map(|s| (s.re + s.im).powi(2)).sum::<f64>() / self.samples.len() as f64
    }

    pub fn widely_linear(&self, mu: Complex64, nu: Complex64) -> Self {
        self.map_samples(|s| mu * s + nu * s.conj())
    }

    /// Adds independent `N(0, sigma^2)` to both rails of every sample.
    pub fn add_white_noise(&self, sigma: f64, rng: &mut dyn RngCore) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise sigma {sigma} must be finite and >= 0")));
        }
        if sigma == 0.0 {
            return Ok(self.clone());
        }
        let normal = Normal::new(0.0, sigma).expect("validated sigma");
        let samples = self.samples.iter().map(|s| s + Complex64::new(normal.sample(rng), normal.sample(rng))).collect();
        Ok(Self { samples, ..self.clone() })
    }
}
