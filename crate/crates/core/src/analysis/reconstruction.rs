//! Density-matrix estimators for two-qubit tomography data.

use num_complex::Complex64;

use crate::analysis::density::{hermitian_sqrt, CMatrix, DensityMatrix};
use crate::analysis::tomography::{pauli_hs_basis, require_two_qubits, TomoDataset};
use crate::error::Result;

/// `sum_k e_k B_k` over the Hilbert-Schmidt Pauli basis, clipped to the
/// physical cone.
pub fn qst_linear_inversion(data: &TomoDataset) -> Result<DensityMatrix> {
    let e = data.pauli_expectations()?;
    let basis = pauli_hs_basis();
    let mut rho = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            // Tr(B_k rho) = <sigma_i sigma_j> / 2
            rho += basis[4 * i + j].scale(e[i][j] / 2.0);
        }
    }
    DensityMatrix::project_physical(&rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop once one iteration improves the log-likelihood by less than this.
    pub tolerance: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { max_iterations: 10_000, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct MleResult {
    pub rho: DensityMatrix,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome projector vectors with nonzero counts.
struct Likelihood {
    terms: Vec<(Vec<Complex64>, f64)>,
    total: f64,
}

impl Likelihood {
    fn new(data: &TomoDataset) -> Result<Self> {
        data.validate_complete()?;
        let mut terms = Vec::new();
        for r in &data.records {
            let vs = r.setting.measurement_vectors();
            for (x, v) in vs.into_iter().enumerate() {
                if r.counts[x] > 0.0 {
                    terms.push((v, r.counts[x]));
                }
            }
        }
        let total = terms.iter().map(|(_, n)| n).sum();
        Ok(Self { terms, total })
    }

    /// `sum n ln <v| rho |v>`; `-inf` if an observed outcome has zero
    /// probability.
    fn value(&self, rho: &CMatrix) -> f64 {
        let mut acc = 0.0;
        for (v, n) in &self.terms {
            let p = quadratic_form(rho, v);
            if p.is_nan() || p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += n * p.ln();
        }
        acc
    }

    /// `G = sum n / p |v><v|`.
    fn g_matrix(&self, rho: &CMatrix) -> CMatrix {
        let mut g = CMatrix::zeros(4, 4);
        for (v, n) in &self.terms {
            let w = n / quadratic_form(rho, v);
            for i in 0..4 {
                for j in 0..4 {
                    g[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        g
    }
}

fn quadratic_form(m: &CMatrix, v: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..v.len() {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..v.len() {
            row += m[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// Lower-triangular `T` from 16 reals: 4 diagonal entries, then real and
/// imaginary parts of the strictly lower entries row by row.
fn t_from_params(theta: &[f64]) -> CMatrix {
    let d = 4;
    let mut t = CMatrix::zeros(d, d);
    for i in 0..d {
        t[(i, i)] = Complex64::new(theta[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in 0..i {
            t[(i, j)] = Complex64::new(theta[k], theta[k + 1]);
            k += 2;
        }
    }
    t
}

fn params_from_t(t: &CMatrix) -> Vec<f64> {
    let d = 4;
    let mut theta: Vec<f64> = (0..d).map(|i| t[(i, i)].re).collect();
    for i in 0..d {
        for j in 0..i {
            theta.push(t[(i, j)].re);
            theta.push(t[(i, j)].im);
        }
    }
    theta
}

fn rho_from_t(t: &CMatrix) -> (CMatrix, f64) {
    let s = t.adjoint() * t;
    let trace = s.trace().re;
    (s.unscale(trace), trace)
}

/// Lower-triangular `T` with real non-negative diagonal and `T^dagger T = rho`.
///
/// With `A = sqrt(rho)` and the index reversal `P`, a QR factorization
/// `P A P = Q R` gives `rho = (P R P)^dagger (P R P)` where `P R P` is lower
/// triangular. This also works for rank-deficient `rho`.
fn cholesky_factor(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let a = hermitian_sqrt(rho);
    let reversed = CMatrix::from_fn(d, d, |i, j| a[(d - 1 - i, d - 1 - j)]);
    let mut r = reversed.qr().r();
    for i in 0..d {
        let diag = r[(i, i)];
        if diag.norm() > 0.0 {
            let phase = (diag / diag.norm()).conj();
            for j in 0..d {
                r[(i, j)] *= phase;
            }
        }
    }
    CMatrix::from_fn(d, d, |i, j| r[(d - 1 - i, d - 1 - j)])
}

/// `dL/dtheta` at `T` for `rho = T^dagger T / Tr`.
fn gradient(like: &Likelihood, t: &CMatrix) -> Vec<f64> {
    let (rho, trace) = rho_from_t(t);
    let mut m = like.g_matrix(&rho);
    for i in 0..4 {
        m[(i, i)] -= Complex64::new(like.total, 0.0);
    }
    let a = m * t.adjoint();
    let scale = 2.0 / trace;
    let mut g: Vec<f64> = (0..4).map(|i| scale * a[(i, i)].re).collect();
    for i in 0..4 {
        for j in 0..i {
            g.push(scale * a[(j, i)].re);
            g.push(-scale * a[(j, i)].im);
        }
    }
    g
}

/// Maximum-likelihood estimate over `rho = T^dagger T / Tr(T^dagger T)` by
/// gradient ascent with Armijo backtracking.
pub fn qst_mle(data: &TomoDataset, init: &DensityMatrix, options: &MleOptions) -> Result<MleResult> {
    require_two_qubits(init.num_qubits())?;
    let like = Likelihood::new(data)?;
    let mut start = init.normalized().matrix().clone();
    if like.value(&start) == f64::NEG_INFINITY {
        let mixed = CMatrix::identity(4, 4).scale(0.25);
        start = start.scale(0.99) + mixed.scale(0.01);
    }
    let mut theta = params_from_t(&cholesky_factor(&start));
    let mut value = like.value(&rho_from_t(&t_from_params(&theta)).0);
    let mut step = 1.0 / like.total.max(1.0);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let t = t_from_params(&theta);
        let g = gradient(&like, &t);
        let g2: f64 = g.iter().map(|x| x * x).sum();
        if g2 == 0.0 {
            converged = true;
            break;
        }
        let accepted = loop {
            let trial: Vec<f64> = theta.iter().zip(&g).map(|(x, d)| x + step * d).collect();
            let v = like.value(&rho_from_t(&t_from_params(&trial)).0);
            if v >= value + 1e-4 * step * g2 {
                break Some((trial, v));
            }
            step *= 0.5;
            if step < 1e-300 {
                break None;
            }
        };
        let Some((trial, v)) = accepted else {
            converged = true;
            break;
        };
        let improvement = v - value;
        // Rescale so Tr(T^dagger T) = 1; rho is unchanged.
        let norm = trial.iter().map(|x| x * x).sum::<f64>().sqrt();
        theta = trial.iter().map(|x| x / norm).collect();
        value = v;
        step *= 2.0;
        if improvement < options.tolerance {
            converged = true;
            break;
        }
    }

    let (rho, _) = rho_from_t(&t_from_params(&theta));
    let rho = DensityMatrix::new(crate::analysis::density::hermitize(&rho))?;
    Ok(MleResult { rho, log_likelihood: value, iterations, converged })
}

/// Log-likelihood of `rho` for `data`.
pub fn log_likelihood(data: &TomoDataset, rho: &DensityMatrix) -> Result<f64> {
    Ok(Likelihood::new(data)?.value(rho.normalized().matrix()))
}
