use qmt_core::analysis::{haar_gate, random_state};
use qmt_core::rng::{stream_rng, Stream};
use qmt_core::{CircuitProgram, GateU2, Instruction, StateVector};

pub const SEED: u64 = 0x5eed;

pub fn state(n: usize) -> StateVector {
    random_state(n, &mut stream_rng(SEED, Stream::Dressing, n as u64)).unwrap()
}

pub fn gate() -> GateU2 {
    haar_gate(&mut stream_rng(SEED, Stream::Gates, 0))
}

/// Alternating random single-qubit gates and nearest-neighbour CNOTs.
pub fn layered_program(n: usize, layers: usize) -> CircuitProgram {
    let mut rng = stream_rng(SEED, Stream::Gates, 1);
    let mut p = CircuitProgram::new(n).unwrap();
    for layer in 0..layers {
        for q in 0..n {
            p.gate(haar_gate(&mut rng), q).unwrap();
        }
        for q in (layer % 2..n.saturating_sub(1)).step_by(2) {
            p.cnot(q, q + 1).unwrap();
        }
    }
    p.push(Instruction::MeasureAll).unwrap();
    p
}
