//! Initial-state specifications accepted on the command line.

use anyhow::{bail, Context};
use qmt_core::io::parse_complex;
use qmt_core::{Complex64, StateVector};

/// Parses `zero`, `singlet`, `bell`, `demo`, `basis:X` or a comma-separated
/// amplitude list such as `0.6,0.8j`. Named states that fix a register size
/// must match `num_qubits`.
pub fn parse_state(spec: &str, num_qubits: usize) -> anyhow::Result<StateVector> {
    let spec = spec.trim();
    let state = match spec.to_ascii_lowercase().as_str() {
        "zero" => StateVector::zero(num_qubits)?,
        "singlet" => StateVector::singlet(),
        "bell" => StateVector::bell(),
        "demo" => demo_state(),
        s if s.starts_with("basis:") => {
            let x: usize = s[6..].parse().with_context(|| format!("bad basis index in {spec:?}"))?;
            StateVector::basis(x, num_qubits)?
        }
        _ => {
            let amps: Vec<Complex64> = spec
                .split(',')
                .map(|a| parse_complex(a.trim()).with_context(|| format!("bad amplitude {a:?}")))
                .collect::<anyhow::Result<_>>()?;
            StateVector::from_amplitudes(amps)?
        }
    };
    if state.num_qubits() != num_qubits {
        bail!("state {spec:?} has {} qubits, expected {num_qubits}", state.num_qubits());
    }
    Ok(state)
}

/// The two-qubit state used in the hardware demonstration.
pub fn demo_state() -> StateVector {
    let c = Complex64::new;
    StateVector::new(2, vec![c(0.6579, -0.2895), c(0.5385, 0.1383), c(-0.2280, 0.3953), c(-0.2460, -0.4277)])
        .expect("four amplitudes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_and_literal_states() {
        assert_eq!(parse_state("singlet", 2).unwrap(), StateVector::singlet());
        assert_eq!(parse_state("basis:5", 3).unwrap(), StateVector::basis(5, 3).unwrap());
        let s = parse_state("0.6, 0.8j", 1).unwrap();
        assert_eq!(s.amplitude(1), Complex64::new(0.0, 0.8));
        assert!(parse_state("singlet", 3).is_err());
        assert!(parse_state("0.5,0.5,0.5", 2).is_err());
        assert!(parse_state("basis:x", 2).is_err());
    }
}
