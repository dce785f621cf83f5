use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::StateVector;

/// Eigenvalues below this are treated as rounding noise.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

/// Hermitian positive semidefinite `2^n x 2^n` matrix with positive trace.
/// Unit trace is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let num_qubits = qubits_for(matrix.nrows())?;
        if matrix.ncols() != matrix.nrows() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let deviation = (&matrix - matrix.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if deviation > EIGENVALUE_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = hermitize(&matrix);
        let min_eigenvalue = matrix.clone().symmetric_eigen().eigenvalues.min();
        if min_eigenvalue < -EIGENVALUE_TOLERANCE {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        if matrix.trace().re.is_nan() || matrix.trace().re <= 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { num_qubits, matrix })
    }

    /// `|psi><psi|`, unnormalized if `psi` is.
    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self { num_qubits: state.num_qubits(), matrix: &v * v.adjoint() }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self { num_qubits, matrix: CMatrix::identity(dim, dim).scale(1.0 / dim as f64) }
    }

    /// Nearest unit-trace state under eigenvalue clipping: hermitize, zero the
    /// negative eigenvalues and renormalize the trace. Falls back to the
    /// maximally mixed state when nothing positive remains.
    pub fn project_physical(matrix: &CMatrix) -> Result<Self> {
        let num_qubits = qubits_for(matrix.nrows())?;
        let eig = hermitize(matrix).symmetric_eigen();
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Ok(Self::maximally_mixed(num_qubits));
        }
        let d =
            nalgebra::DVector::from_iterator(clipped.len(), clipped.iter().map(|&l| Complex64::new(l / total, 0.0)));
        let v = &eig.eigenvectors;
        let m = v * CMatrix::from_diagonal(&d) * v.adjoint();
        Ok(Self { num_qubits, matrix: hermitize(&m) })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn normalized(&self) -> Self {
        Self { num_qubits: self.num_qubits, matrix: self.matrix.scale(1.0 / self.trace()) }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `Tr(op rho)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        (op * &self.matrix).trace()
    }

    /// `<v| rho |v>`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let row: Complex64 = (0..dim).map(|j| self.matrix[(i, j)] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc.re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("matrix dimension {dim} is not a power of two >= 2")));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Relative floor below which eigenvalues count as rounding noise when
/// taking square roots. Without it a rank-1 projector picks up spurious
/// `sqrt(1e-16) ~ 1e-8` components.
pub const SQRT_RELATIVE_FLOOR: f64 = 1e-13;

/// Square root of a Hermitian PSD matrix through its eigendecomposition.
/// Eigenvalues below `SQRT_RELATIVE_FLOOR * max_eigenvalue` are set to zero.
pub fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitize(m).symmetric_eigen();
    let floor = eig.eigenvalues.max().max(0.0) * SQRT_RELATIVE_FLOOR;
    let roots = eig.eigenvalues.map(|l| Complex64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&roots) * v.adjoint()
}
