//! Dense state-vector reference simulator.
//!
//! Bit order: qubit `i` is bit `i` of the basis index, so
//! `x = x_0 + 2 x_1 + ... + 2^{n-1} x_{n-1}` and `|x_{n-1} ... x_0>` is the
//! ket label. Every signal-domain operation in this crate is checked against
//! this module.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default accepted deviation `max |U^dagger U - I|` for gates.
///
/// Wide enough to admit matrices printed to four decimals with a transcription
/// slip (deviation about 3.1e-2); the gate is then applied verbatim.
pub const DEFAULT_UNITARITY_TOLERANCE: f64 = 5e-2;

/// Tolerance used by strict mode.
pub const STRICT_UNITARITY_TOLERANCE: f64 = 1e-10;

/// Amplitudes over the `2^n` computational basis states. Normalization is not
/// enforced: collapsed states are carried unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        let dim = 1usize << num_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amplitudes.len() });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Builds a state from an amplitude list whose length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("amplitude count {len} is not a power of two >= 2")));
        }
        Self::new(len.trailing_zeros() as usize, amplitudes)
    }

    /// `|x>` on `n` qubits.
    pub fn basis(x: usize, num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        let dim = 1usize << num_qubits;
        if x >= dim {
            return Err(Error::BasisIndexOutOfRange { index: x, num_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[x] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(0, num_qubits)
    }

    /// The two-qubit singlet `(|01> - |10>)/sqrt(2)`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits: 2,
            amplitudes: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        }
    }

    /// The Bell state `(|00> + |11>)/sqrt(2)`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits: 2,
            amplitudes: vec![
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
            ],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        self.amplitudes[x]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { num_qubits: self.num_qubits, amplitudes: self.amplitudes.iter().map(|a| a * factor).collect() }
    }

    /// Born probabilities `|alpha_x|^2 / ||psi||^2`.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.amplitudes.iter().map(|a| a.norm_sqr() / total).collect())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Applies `gate` to `target`: every amplitude pair differing only in the
    /// target bit is mapped by the 2x2 matrix.
    pub fn apply_gate(&self, gate: &GateU2, target: usize) -> Result<Self> {
        self.check_qubit(target)?;
        let mut out = self.clone();
        apply_pairs(&mut out.amplitudes, gate, target, |_| true);
        Ok(out)
    }

    /// Applies `gate` to `target` inside the `control = 1` subspace.
    pub fn apply_controlled(&self, gate: &GateU2, control: usize, target: usize) -> Result<Self> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::ControlIsTarget(control));
        }
        let mut out = self.clone();
        apply_pairs(&mut out.amplitudes, gate, target, |x| x >> control & 1 == 1);
        Ok(out)
    }

    /// Squared norms `(q0, q1)` of the two halves split on `qubit`.
    pub fn subspace_weights(&self, qubit: usize) -> Result<(f64, f64)> {
        self.check_qubit(qubit)?;
        let mut q = (0.0, 0.0);
        for (x, a) in self.amplitudes.iter().enumerate() {
            if x >> qubit & 1 == 0 {
                q.0 += a.norm_sqr();
            } else {
                q.1 += a.norm_sqr();
            }
        }
        Ok(q)
    }

    /// Unnormalized projection onto `qubit = bit`.
    pub fn project(&self, qubit: usize, bit: u8) -> Result<Self> {
        self.check_qubit(qubit)?;
        let mut out = self.clone();
        for (x, a) in out.amplitudes.iter_mut().enumerate() {
            if (x >> qubit & 1) as u8 != bit {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }

    /// `<self|other> = sum_x conj(a_x) b_x`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn apply_pairs(amps: &mut [Complex64], gate: &GateU2, target: usize, active: impl Fn(usize) -> bool) {
    let bit = 1usize << target;
    let m = gate.matrix();
    for x in 0..amps.len() {
        if x & bit != 0 || !active(x) {
            continue;
        }
        let a0 = amps[x];
        let a1 = amps[x | bit];
        amps[x] = m[0][0] * a0 + m[0][1] * a1;
        amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// A single-qubit gate, row-major `[[U00, U01], [U10, U11]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateU2 {
    m: [[Complex64; 2]; 2],
}

impl GateU2 {
    /// Validates against [`DEFAULT_UNITARITY_TOLERANCE`].
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_UNITARITY_TOLERANCE)
    }

    pub fn strict(m: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::with_tolerance(m, STRICT_UNITARITY_TOLERANCE)
    }

    pub fn with_tolerance(m: [[Complex64; 2]; 2], tolerance: f64) -> Result<Self> {
        let gate = Self { m };
        let deviation = gate.unitarity_deviation();
        if deviation.is_nan() || deviation > tolerance {
            return Err(Error::NonUnitary { deviation, tolerance });
        }
        Ok(gate)
    }

    /// No validation. Used for noisy hardware realizations of a gate, which
    /// are not unitary.
    pub fn unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// `max |(U^dagger U - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let m = &self.m;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateU2) -> GateU2 {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        GateU2 { m }
    }

    pub fn adjoint(&self) -> GateU2 {
        let m = &self.m;
        GateU2 { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    pub fn identity() -> Self {
        Self::real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn pauli_x() -> Self {
        Self::real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        let (z, i) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
        Self { m: [[z, -i], [i, z]] }
    }

    pub fn pauli_z() -> Self {
        Self::real([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::real([[h, h], [h, -h]])
    }

    pub fn phase_s() -> Self {
        Self::diagonal(Complex64::new(0.0, 1.0))
    }

    pub fn phase_s_dagger() -> Self {
        Self::diagonal(Complex64::new(0.0, -1.0))
    }

    pub fn phase_t() -> Self {
        Self::diagonal(Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4))
    }

    fn diagonal(phase: Complex64) -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { m: [[o, z], [z, phase]] }
    }

    fn real(r: [[f64; 2]; 2]) -> Self {
        Self {
            m: [
                [Complex64::new(r[0][0], 0.0), Complex64::new(r[0][1], 0.0)],
                [Complex64::new(r[1][0], 0.0), Complex64::new(r[1][1], 0.0)],
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Dense 2^n x 2^n matrix of `gate` on `target`, built by Kronecker
    /// products with the highest qubit leftmost.
    fn lifted(gate: &GateU2, target: usize, n: usize) -> Vec<Vec<Complex64>> {
        let mut acc = vec![vec![c(1.0, 0.0)]];
        for q in (0..n).rev() {
            let f: [[Complex64; 2]; 2] = if q == target { *gate.matrix() } else { *GateU2::identity().matrix() };
            let d = acc.len();
            let mut next = vec![vec![c(0.0, 0.0); 2 * d]; 2 * d];
            for i in 0..d {
                for j in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            next[i * 2 + a][j * 2 + b] = acc[i][j] * f[a][b];
                        }
                    }
                }
            }
            acc = next;
        }
        acc
    }

    fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn basis_states() {
        assert_eq!(StateVector::basis(0, 1).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::basis(3, 2).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = StateVector::basis(5, 3).unwrap();
        assert_eq!(s.dim(), 8);
        assert!(s.amplitudes().iter().enumerate().all(|(x, a)| *a == if x == 5 { c(1.0, 0.0) } else { c(0.0, 0.0) }));
        assert!(matches!(StateVector::basis(4, 2), Err(Error::BasisIndexOutOfRange { .. })));
        assert!(matches!(StateVector::basis(0, 0), Err(Error::EmptyRegister)));
    }

    #[test]
    fn pauli_and_hadamard() {
        let one = StateVector::zero(1).unwrap().apply_gate(&GateU2::pauli_x(), 0).unwrap();
        assert_eq!(one, StateVector::basis(1, 1).unwrap());
        let plus = StateVector::zero(1).unwrap().apply_gate(&GateU2::hadamard(), 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.amplitude(0) - c(h, 0.0)).norm() < 1e-15);
        assert!((plus.amplitude(1) - c(h, 0.0)).norm() < 1e-15);
        assert!(matches!(
            StateVector::zero(1).unwrap().apply_gate(&GateU2::pauli_x(), 1),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn cnot_truth_table() {
        let x = GateU2::pauli_x();
        let s = StateVector::basis(0b10, 2).unwrap().apply_controlled(&x, 1, 0).unwrap();
        assert_eq!(s, StateVector::basis(0b11, 2).unwrap());
        let s = StateVector::basis(0, 2).unwrap().apply_controlled(&x, 1, 0).unwrap();
        assert_eq!(s, StateVector::basis(0, 2).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let input = StateVector::new(2, vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(input.apply_controlled(&x, 1, 0).unwrap(), StateVector::bell());
        assert_eq!(input.apply_controlled(&x, 1, 1), Err(Error::ControlIsTarget(1)));
    }

    #[test]
    fn cnot_matches_permutation_matrix() {
        // control 1, target 0: |10> <-> |11>
        let perm = [0usize, 1, 3, 2];
        for x in 0..4 {
            let out = StateVector::basis(x, 2).unwrap().apply_controlled(&GateU2::pauli_x(), 1, 0).unwrap();
            assert_eq!(out, StateVector::basis(perm[x], 2).unwrap());
        }
    }

    #[test]
    fn gate_matches_kronecker_lift() {
        let u = GateU2::hadamard().compose(&GateU2::phase_t());
        let n = 3;
        let amps: Vec<Complex64> = (0..8).map(|k| c((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect();
        let psi = StateVector::new(n, amps.clone()).unwrap();
        for target in 0..n {
            let expect = matvec(&lifted(&u, target, n), &amps);
            let got = psi.apply_gate(&u, target).unwrap();
            for (a, b) in got.amplitudes().iter().zip(&expect) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singlet_weights() {
        let s = StateVector::singlet();
        for q in 0..2 {
            let (q0, q1) = s.subspace_weights(q).unwrap();
            assert!((q0 - 0.5).abs() < 1e-15 && (q1 - 0.5).abs() < 1e-15);
        }
        assert_eq!(StateVector::zero(1).unwrap().subspace_weights(0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::basis(0, 1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(zero.inner(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(zero.inner(&one).unwrap(), c(0.0, 0.0));
        assert!(matches!(zero.inner(&StateVector::zero(2).unwrap()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unitarity_checks() {
        assert!(GateU2::hadamard().unitarity_deviation() < 1e-15);
        let bad = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(GateU2::new(bad), Err(Error::NonUnitary { .. })));
        assert!(GateU2::strict(*GateU2::phase_t().matrix()).is_ok());
    }

    #[test]
    fn compose_and_adjoint() {
        let s = GateU2::phase_s();
        let z = s.compose(&s);
        assert!((z.entry(1, 1) - c(-1.0, 0.0)).norm() < 1e-15);
        let id = s.compose(&s.adjoint());
        assert!(id.unitarity_deviation() < 1e-15);
        assert_eq!(GateU2::phase_s_dagger(), s.adjoint());
    }
}
