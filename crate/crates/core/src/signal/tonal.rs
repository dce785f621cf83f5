use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exact frequency-domain signal `psi(t) = sum_k c_k e^{j k w0 t}`.
///
/// Frequencies are integer multiples of `w0`. Zero coefficients are never
/// stored, so two equal signals have equal maps.
#[derive(Debug, Clone, PartialEq)]
pub struct TonalSignal {
    base_frequency: f64,
    coefficients: BTreeMap<i64, Complex64>,
}

impl TonalSignal {
    /// The zero signal.
    pub fn new(base_frequency: f64) -> Self {
        Self { base_frequency, coefficients: BTreeMap::new() }
    }

    pub fn tone(k: i64, amplitude: Complex64, base_frequency: f64) -> Self {
        let mut s = Self::new(base_frequency);
        s.insert(k, amplitude);
        s
    }

    /// Sums duplicate frequencies.
    pub fn from_coefficients(base_frequency: f64, pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut s = Self::new(base_frequency);
        for (k, c) in pairs {
            s.accumulate(k, c);
        }
        s
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    /// Sets the coefficient at `k`, removing it when `c` is zero.
    pub fn insert(&mut self, k: i64, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            self.coefficients.remove(&k);
        } else {
            self.coefficients.insert(k, c);
        }
    }

    /// Adds `c` to the coefficient at `k`.
    pub fn accumulate(&mut self, k: i64, c: Complex64) {
        let sum = self.get(k) + c;
        self.insert(k, sum);
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.coefficients.get(&k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coefficients.iter().map(|(&k, &c)| (k, c))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        self.coefficients.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_abs_frequency(&self) -> Option<i64> {
        self.coefficients.keys().map(|k| k.abs()).max()
    }

    /// `psi(t)` at time `t` seconds.
    pub fn value_at(&self, t: f64) -> Complex64 {
        self.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * self.base_frequency * t)).sum()
    }

    /// Largest coefficient distance over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: BTreeSet<i64> = self.frequencies().chain(other.frequencies()).collect();
        keys.into_iter().map(|k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base_frequency != other.base_frequency {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// Product of signals: the coefficient maps convolve.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let mut out = Self::new(self.base_frequency);
        for (ka, ca) in self.iter() {
            for (kb, cb) in other.iter() {
                out.accumulate(ka + kb, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.accumulate(k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_coefficients(self.base_frequency, self.iter().map(|(k, c)| (k, c * factor)))
    }

    /// Keeps only the frequencies in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<i64>) -> Self {
        Self {
            base_frequency: self.base_frequency,
            coefficients: self.coefficients.iter().filter(|(k, _)| keep.contains(k)).map(|(&k, &c)| (k, c)).collect(),
        }
    }

    /// `sum_k conj(a_k) b_k`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_base(other)?;
        Ok(self.iter().map(|(k, a)| a.conj() * other.get(k)).sum())
    }

    /// Mean power over a period, `sum_k |c_k|^2`.
    pub fn power(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    /// Mean of `(Re psi + Im psi)^2` over a period, in closed form:
    /// `sum_k |c_k|^2 + Im(sum_k c_k c_{-k})`.
    pub fn sum_rail_power(&self) -> f64 {
        let cross: Complex64 = self.iter().map(|(k, c)| c * self.get(-k)).sum();
        self.power() + cross.im
    }

    /// `mu psi + nu conj(psi)`; conjugation maps `c_k` to `conj(c_{-k})`.
    pub fn widely_linear(&self, mu: Complex64, nu: Complex64) -> Self {
        let keys: BTreeSet<i64> = self.frequencies().flat_map(|k| [k, -k]).collect();
        Self::from_coefficients(
            self.base_frequency,
            keys.into_iter().map(|k| (k, mu * self.get(k) + nu * self.get(-k).conj())),
        )
    }
}
