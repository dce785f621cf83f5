use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::analysis::density::CMatrix;
use crate::error::Result;
use crate::oracle::{GateU2, StateVector};

fn complex_gaussian(rng: &mut dyn RngCore) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-random `dim x dim` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut dyn RngCore) -> CMatrix {
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_gate(rng: &mut dyn RngCore) -> GateU2 {
    let u = haar_unitary(2, rng);
    GateU2::unchecked([[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]])
}

/// Uniformly random pure state on `n` qubits.
pub fn random_state(num_qubits: usize, rng: &mut dyn RngCore) -> Result<StateVector> {
    let amps = (0..1usize << num_qubits).map(|_| complex_gaussian(rng)).collect();
    StateVector::new(num_qubits, amps)?.normalized()
}
