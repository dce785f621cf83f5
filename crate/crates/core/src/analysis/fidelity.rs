use crate::analysis::density::{hermitian_sqrt, DensityMatrix};
use crate::error::{Error, Result};
use crate::oracle::StateVector;

/// `|<a|b>| / (||a|| ||b||)`.
pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm();
    let norms = a.norm() * b.norm();
    if norms == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((overlap / norms).min(1.0))
}

/// Uhlmann root fidelity normalized by the traces:
/// `Tr sqrt(sqrt(rho_hat) rho sqrt(rho_hat)) / sqrt(Tr rho Tr rho_hat)`.
///
/// The trace term equals the sum of singular values of
/// `sqrt(rho_hat) sqrt(rho)`, which avoids a second square root of
/// near-zero eigenvalues.
pub fn fidelity_mixed(rho_hat: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if rho_hat.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: rho_hat.dim() });
    }
    let product = hermitian_sqrt(rho_hat.matrix()) * hermitian_sqrt(rho.matrix());
    let root_trace: f64 = product.svd(false, false).singular_values.iter().sum();
    Ok((root_trace / (rho.trace() * rho_hat.trace()).sqrt()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn pure_fidelity_basics() {
        let psi = StateVector::singlet();
        assert!((fidelity_pure(&psi, &psi).unwrap() - 1.0).abs() < 1e-15);
        let zero = StateVector::basis(0, 1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(fidelity_pure(&zero, &one).unwrap(), 0.0);
        let doubled = psi.scaled(Complex64::new(2.0, 0.0));
        assert!((fidelity_pure(&doubled, &psi).unwrap() - 1.0).abs() < 1e-15);
        let null = StateVector::new(1, vec![Complex64::new(0.0, 0.0); 2]).unwrap();
        assert_eq!(fidelity_pure(&null, &zero), Err(Error::ZeroVector));
    }

    #[test]
    fn mixed_fidelity_basics() {
        let rho = DensityMatrix::from_pure(&StateVector::singlet());
        assert!((fidelity_mixed(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        // sqrt(<psi| I/4 |psi>)
        assert!((fidelity_mixed(&mixed, &rho).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity_mixed(&rho, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }
}
