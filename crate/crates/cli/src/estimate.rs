//! Hardware cost of scaling the emulator to `n` qubits.

use anyhow::bail;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceEstimate {
    pub num_qubits: u32,
    pub f0_hz: f64,
    /// Band from `f0` up to `2^n f0`.
    pub bandwidth_hz: f64,
    /// One period of the base tone.
    pub gate_time_s: f64,
    /// Positive passbands of each comb filter, `2^n / 4`; undefined below
    /// two qubits.
    pub comb_passbands: Option<u64>,
    /// Distinct projections needed to support every two-qubit gate, `n(n-1)`.
    pub projection_ops_per_2q_gate: u64,
}

pub fn resource_estimate(num_qubits: u32, f0_hz: f64) -> anyhow::Result<ResourceEstimate> {
    if num_qubits == 0 || num_qubits > 62 {
        bail!("qubit count must be in 1..=62, got {num_qubits}");
    }
    if !(f0_hz > 0.0 && f0_hz.is_finite()) {
        bail!("base frequency must be positive, got {f0_hz}");
    }
    let n = num_qubits as u64;
    Ok(ResourceEstimate {
        num_qubits,
        f0_hz,
        bandwidth_hz: (1u64 << n) as f64 * f0_hz,
        gate_time_s: 1.0 / f0_hz,
        comb_passbands: (n >= 2).then(|| (1u64 << n) / 4),
        projection_ops_per_2q_gate: n * (n - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        let e = resource_estimate(3, 500.0).unwrap();
        assert_eq!(e.bandwidth_hz, 4000.0);
        assert_eq!(e.gate_time_s, 0.002);
        assert_eq!(e.comb_passbands, Some(2));
        assert_eq!(e.projection_ops_per_2q_gate, 6);
        assert_eq!(resource_estimate(1, 1.0).unwrap().comb_passbands, None);
        assert!(resource_estimate(0, 1.0).is_err());
        assert!(resource_estimate(2, 0.0).is_err());
    }
}
