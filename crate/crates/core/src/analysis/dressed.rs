use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::oracle::StateVector;

/// `s` in `a = s alpha + nu`.
pub const DRESSING_SCALE: f64 = std::f64::consts::SQRT_2 - 1.0;

/// A bare state rescaled and offset by a random unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    /// `a = s alpha + nu`, unnormalized.
    pub amplitudes: StateVector,
    pub scale: f64,
    /// `nu = z / ||z||` for a standard complex Gaussian `z`.
    pub noise: StateVector,
}

/// Dresses a normalized state.
pub fn dress(state: &StateVector, rng: &mut dyn RngCore) -> Result<DressedState> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    let z: Vec<Complex64> = (0..state.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let noise = StateVector::new(state.num_qubits(), z)?.normalized()?;
    let amps = state.amplitudes().iter().zip(noise.amplitudes()).map(|(&a, &v)| a * DRESSING_SCALE + v).collect();
    Ok(DressedState { amplitudes: StateVector::new(state.num_qubits(), amps)?, scale: DRESSING_SCALE, noise })
}
