//! Hardware imperfections of the analog signal chain.
//!
//! Noise enters at three places: the DC levels that set the synthesis
//! coefficients and gate matrix entries (`coefficient_jitter`), the waveform
//! itself (rail gain and quadrature errors, additive white noise), and
//! optionally the FIR comb ripple selected through [`FilterModel`]. A config of
//! all zeros leaves every pipeline output untouched.
//!
//! [`FilterModel`]: crate::projection::FilterModel

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::density::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::oracle::{GateU2, StateVector};
use crate::projection::ProjectionEngine;
use crate::rng::{stream_rng, Stream};
use crate::signal::{demodulate, FrequencyLayout, SampledSignal, Signal, SignalBackend};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Per-sample standard deviation on each rail.
    pub awgn_sigma: f64,
    /// Relative gain error of the quadrature rail.
    pub gain_imbalance: f64,
    /// Quadrature phase error in radians.
    pub phase_skew: f64,
    /// Standard deviation of the DC error on each real and imaginary
    /// coefficient part.
    pub coefficient_jitter: f64,
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn awgn(sigma: f64) -> Self {
        Self { awgn_sigma: sigma, ..Self::default() }
    }

    pub fn jitter(sigma: f64) -> Self {
        Self { coefficient_jitter: sigma, ..Self::default() }
    }

    pub fn is_ideal(&self) -> bool {
        self.awgn_sigma == 0.0 && self.gain_imbalance == 0.0 && self.phase_skew == 0.0 && self.coefficient_jitter == 0.0
    }

    pub fn has_iq_error(&self) -> bool {
        self.gain_imbalance != 0.0 || self.phase_skew != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.awgn_sigma, self.gain_imbalance, self.phase_skew, self.coefficient_jitter];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("noise parameters must be finite".into()));
        }
        if self.awgn_sigma < 0.0 || self.coefficient_jitter < 0.0 {
            return Err(Error::InvalidArgument("noise standard deviations must be non-negative".into()));
        }
        if self.gain_imbalance <= -1.0 {
            return Err(Error::InvalidArgument("gain imbalance must exceed -1".into()));
        }
        Ok(())
    }

    /// `(mu, nu)` of the widely linear map `mu psi + nu conj(psi)` that keeps
    /// the in-phase rail and replaces the quadrature rail with
    /// `(1 + g)(sin(phi) Re psi + cos(phi) Im psi)`.
    pub fn iq_coefficients(&self) -> (Complex64, Complex64) {
        let r = 1.0 + self.gain_imbalance;
        let a = r * self.phase_skew.cos();
        let b = r * self.phase_skew.sin();
        (Complex64::new((1.0 + a) / 2.0, b / 2.0), Complex64::new((1.0 - a) / 2.0, b / 2.0))
    }
}

fn gaussian(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn jitter_value(c: Complex64, normal: &Normal<f64>, rng: &mut dyn RngCore) -> Complex64 {
    let re = normal.sample(rng);
    let im = normal.sample(rng);
    c + Complex64::new(re, im)
}

/// Gaussian noise on each rail of each sample.
pub fn add_awgn(signal: &SampledSignal, sigma: f64, rng: &mut dyn RngCore) -> Result<SampledSignal> {
    signal.add_white_noise(sigma, rng)
}

/// Independent Gaussian offsets on the real and imaginary part of every
/// amplitude.
pub fn perturb_coefficients(state: &StateVector, jitter: f64, rng: &mut dyn RngCore) -> Result<StateVector> {
    if jitter == 0.0 {
        return Ok(state.clone());
    }
    let normal = gaussian(jitter)?;
    let amps = state.amplitudes().iter().map(|&a| jitter_value(a, &normal, rng)).collect();
    StateVector::new(state.num_qubits(), amps)
}

/// Same offsets on the four gate entries. The result is generally not
/// unitary.
pub fn perturb_gate(gate: &GateU2, jitter: f64, rng: &mut dyn RngCore) -> Result<GateU2> {
    if jitter == 0.0 {
        return Ok(*gate);
    }
    let normal = gaussian(jitter)?;
    let mut m = *gate.matrix();
    for row in m.iter_mut() {
        for entry in row.iter_mut() {
            *entry = jitter_value(*entry, &normal, rng);
        }
    }
    Ok(GateU2::unchecked(m))
}

/// Rail gain and quadrature phase errors.
pub fn apply_iq_imbalance<S: Signal>(signal: &S, gain_imbalance: f64, phase_skew: f64) -> S {
    if gain_imbalance == 0.0 && phase_skew == 0.0 {
        return signal.clone();
    }
    let cfg = NoiseConfig { gain_imbalance, phase_skew, ..NoiseConfig::default() };
    let (mu, nu) = cfg.iq_coefficients();
    signal.widely_linear(mu, nu)
}

/// Synthesis, gates and readout with a noise model attached.
#[derive(Debug, Clone)]
pub struct NoisyPipeline<'a, B> {
    pub backend: &'a B,
    pub layout: FrequencyLayout,
    pub engine: ProjectionEngine,
    pub noise: NoiseConfig,
}

impl<'a, B: SignalBackend> NoisyPipeline<'a, B> {
    pub fn new(backend: &'a B, layout: FrequencyLayout, noise: NoiseConfig) -> Result<Self> {
        noise.validate()?;
        Ok(Self { backend, layout, engine: ProjectionEngine::ideal(), noise })
    }

    pub fn with_engine(mut self, engine: ProjectionEngine) -> Self {
        self.engine = engine;
        self
    }

    /// Waveform-stage noise: IQ imbalance, then AWGN.
    pub fn distort(&self, signal: &B::Signal, rng: &mut dyn RngCore) -> Result<B::Signal> {
        let out = apply_iq_imbalance(signal, self.noise.gain_imbalance, self.noise.phase_skew);
        if self.noise.awgn_sigma == 0.0 {
            return Ok(out);
        }
        out.add_white_noise(self.noise.awgn_sigma, rng)
    }

    pub fn synthesize(&self, state: &StateVector, rng: &mut dyn RngCore) -> Result<B::Signal> {
        let jittered = perturb_coefficients(state, self.noise.coefficient_jitter, rng)?;
        let signal = self.backend.synthesize(&jittered, &self.layout)?;
        self.distort(&signal, rng)
    }

    pub fn apply_gate(
        &self,
        signal: &B::Signal,
        gate: &GateU2,
        qubit: usize,
        rng: &mut dyn RngCore,
    ) -> Result<B::Signal> {
        let gate = perturb_gate(gate, self.noise.coefficient_jitter, rng)?;
        let out = self.engine.apply_gate(signal, &self.layout, &gate, qubit)?;
        self.distort(&out, rng)
    }

    pub fn apply_controlled(
        &self,
        signal: &B::Signal,
        gate: &GateU2,
        control: usize,
        target: usize,
        rng: &mut dyn RngCore,
    ) -> Result<B::Signal> {
        let gate = perturb_gate(gate, self.noise.coefficient_jitter, rng)?;
        let out = self.engine.apply_controlled(signal, &self.layout, &gate, control, target)?;
        self.distort(&out, rng)
    }

    /// Demodulated amplitudes at the basis frequencies.
    pub fn readout(&self, signal: &B::Signal) -> Result<StateVector> {
        Ok(demodulate(signal, &self.layout)?.state)
    }
}

/// Fit of one probe state in [`effective_channel`].
#[derive(Debug, Clone)]
pub struct ProbeFit {
    pub name: &'static str,
    pub input: DensityMatrix,
    /// Mean normalized output projector.
    pub output: CMatrix,
    pub lambda: f64,
    /// Monte-Carlo standard error of `lambda`.
    pub std_error: f64,
}

/// Depolarizing fit `E[rho_out] ~ lambda rho_in + (1 - lambda) I / d`.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub lambda: f64,
    /// Frobenius norm of the fit error summed over probes.
    pub residual: f64,
    pub probes: Vec<ProbeFit>,
}

fn probe_states(num_qubits: usize) -> Result<Vec<(&'static str, StateVector)>> {
    let dim = 1usize << num_qubits;
    let uniform = |phase: Complex64| -> Result<StateVector> {
        let amps = (0..dim).map(|x| phase.powu(x.count_ones())).collect();
        StateVector::new(num_qubits, amps)?.normalized()
    };
    let mut ghz = vec![Complex64::new(0.0, 0.0); dim];
    ghz[0] = Complex64::new(1.0, 0.0);
    ghz[dim - 1] = Complex64::new(1.0, 0.0);
    Ok(vec![
        ("zeros", StateVector::zero(num_qubits)?),
        ("ones", StateVector::basis(dim - 1, num_qubits)?),
        ("plus", uniform(Complex64::new(1.0, 0.0))?),
        ("plus_i", uniform(Complex64::new(0.0, 1.0))?),
        ("ghz", StateVector::new(num_qubits, ghz)?.normalized()?),
    ])
}

fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Monte-Carlo estimate of the channel that synthesis plus readout applies
/// to a set of probe states, with a least-squares depolarizing fit.
///
/// Trial `t` of every probe draws from stream `(seed, Noise, t)`, so probes
/// share noise realizations and their fitted `lambda` values differ only
/// through the state dependence of the channel.
pub fn effective_channel<B: SignalBackend>(
    backend: &B,
    noise: &NoiseConfig,
    num_qubits: usize,
    trials: usize,
    seed: u64,
) -> Result<ChannelEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let pipeline = NoisyPipeline::new(backend, FrequencyLayout::octave(num_qubits)?, *noise)?;
    let dim = 1usize << num_qubits;
    let mixed = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);

    let mut probes = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for (name, state) in probe_states(num_qubits)? {
        let input = DensityMatrix::from_pure(&state);
        let a = input.matrix() - &mixed;
        let a_norm = frobenius_inner(&a, &a);
        let outputs: Vec<Result<CMatrix>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream_rng(seed, Stream::Noise, t as u64);
                let signal = pipeline.synthesize(&state, &mut rng)?;
                let out = pipeline.readout(&signal)?;
                let out = out.normalized()?;
                Ok(DensityMatrix::from_pure(&out).matrix().clone())
            })
            .collect();
        let mut mean = DMatrix::zeros(dim, dim);
        let mut lambdas = Vec::with_capacity(trials);
        for out in outputs {
            let out = out?;
            lambdas.push(frobenius_inner(&a, &(&out - &mixed)) / a_norm);
            mean += out;
        }
        mean /= Complex64::new(trials as f64, 0.0);
        let b = &mean - &mixed;
        num += frobenius_inner(&a, &b);
        den += a_norm;
        let lambda = lambdas.iter().sum::<f64>() / trials as f64;
        let std_error = if trials > 1 {
            let var = lambdas.iter().map(|l| (l - lambda).powi(2)).sum::<f64>() / (trials - 1) as f64;
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        probes.push(ProbeFit { name, input, output: mean, lambda, std_error });
    }
    let lambda = num / den;
    let residual = probes
        .iter()
        .map(|p| {
            let fit = (p.input.matrix() - &mixed).scale(lambda) + &mixed;
            (&p.output - fit).iter().map(|c| c.norm_sqr()).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt();
    Ok(ChannelEstimate { lambda, residual, probes })
}
