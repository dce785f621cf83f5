use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// `2 pi * 1000` rad/s, a 1 kHz fundamental.
pub const DEFAULT_BASE_FREQUENCY: f64 = 2.0 * std::f64::consts::PI * 1000.0;

/// Minimum samples per fundamental period for an `n`-qubit pipeline.
///
/// Gate intermediates reach `|k| ~ 1.5 * 2^n`; eight times the qubit band
/// keeps every intermediate strictly below Nyquist.
pub fn oversampling_floor(num_qubits: usize) -> usize {
    8 << num_qubits
}

/// Checks a sampled-backend configuration for an `n`-qubit layout.
pub fn check_samples_per_period(num_qubits: usize, samples: usize) -> Result<()> {
    let floor = oversampling_floor(num_qubits);
    if samples < floor || !samples.is_multiple_of(1 << num_qubits) {
        return Err(Error::Undersampled { samples, floor, num_qubits });
    }
    Ok(())
}

/// Carrier assignment for a register.
///
/// Qubit `i` is carried by the conjugate tonal pair `e^{+-j c_i w0 t}` where
/// `c_i` is an integer carrier index. A full register uses octave spacing
/// `c_i = 2^i`. Partial projections live on reduced layouts: the same carriers
/// with one qubit removed and the higher qubits shifted down one position.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyLayout {
    base_frequency: f64,
    carriers: Vec<i64>,
}

impl FrequencyLayout {
    /// Octave-spaced layout at the default 1 kHz fundamental.
    pub fn octave(num_qubits: usize) -> Result<Self> {
        Self::octave_with_base(num_qubits, DEFAULT_BASE_FREQUENCY)
    }

    pub fn octave_with_base(num_qubits: usize, base_frequency: f64) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        if num_qubits > 40 {
            return Err(Error::InvalidArgument(format!("{num_qubits} qubits exceeds the 40-qubit limit")));
        }
        if !(base_frequency > 0.0 && base_frequency.is_finite()) {
            return Err(Error::InvalidArgument(format!("base frequency {base_frequency} must be positive")));
        }
        Ok(Self { base_frequency, carriers: (0..num_qubits).map(|i| 1i64 << i).collect() })
    }

    pub fn num_qubits(&self) -> usize {
        self.carriers.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.carriers.len()
    }

    /// `w0` in rad/s.
    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    pub fn base_frequency_hz(&self) -> f64 {
        self.base_frequency / (2.0 * std::f64::consts::PI)
    }

    /// One fundamental period `T = 2 pi / w0` in seconds.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.base_frequency
    }

    /// Carrier index of `qubit` in units of `w0`.
    pub fn carrier(&self, qubit: usize) -> Result<i64> {
        self.carriers.get(qubit).copied().ok_or(Error::QubitOutOfRange { qubit, num_qubits: self.num_qubits() })
    }

    pub fn carriers(&self) -> &[i64] {
        &self.carriers
    }

    /// `w_i` in rad/s.
    pub fn qubit_frequency(&self, qubit: usize) -> Result<f64> {
        Ok(self.carrier(qubit)? as f64 * self.base_frequency)
    }

    /// Frequency index of the basis signal `phi_x`: bit 0 contributes `+c_i`,
    /// bit 1 contributes `-c_i`.
    pub fn basis_frequency(&self, x: usize) -> Result<i64> {
        if x >= self.dim() {
            return Err(Error::BasisIndexOutOfRange { index: x, num_qubits: self.num_qubits() });
        }
        Ok(self.basis_frequency_unchecked(x))
    }

    pub(crate) fn basis_frequency_unchecked(&self, x: usize) -> i64 {
        self.carriers.iter().enumerate().map(|(i, &c)| if x >> i & 1 == 0 { c } else { -c }).sum()
    }

    /// `basis_frequency(x)` for every `x` in index order.
    pub fn basis_frequencies(&self) -> Vec<i64> {
        (0..self.dim()).map(|x| self.basis_frequency_unchecked(x)).collect()
    }

    pub fn basis_set(&self) -> BTreeSet<i64> {
        self.basis_frequencies().into_iter().collect()
    }

    /// Largest `|k|` of any basis signal.
    pub fn max_frequency(&self) -> i64 {
        self.carriers.iter().map(|c| c.abs()).sum()
    }

    /// The layout left after removing `qubit`.
    pub fn reduced(&self, qubit: usize) -> Result<Self> {
        self.carrier(qubit)?;
        let mut carriers = self.carriers.clone();
        carriers.remove(qubit);
        Ok(Self { base_frequency: self.base_frequency, carriers })
    }

    pub fn is_octave(&self) -> bool {
        self.carriers.iter().enumerate().all(|(i, &c)| c == 1 << i)
    }
}
