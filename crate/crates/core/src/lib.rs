//! Emulation of a gate-based quantum computer with quadrature modulated
//! tonal signals.
//!
//! A state of `n` qubits is a complex signal whose spectrum holds one tonal
//! per basis state. Gates act by down-conversion, comb filtering and
//! remodulation ([`projection`]); measurements compare subspace RMS power with
//! a uniform draw ([`measurement`]). A dense state-vector simulator
//! ([`oracle`]) serves as the reference for every signal-domain result, and
//! [`analysis`] provides fidelities and two-qubit state tomography.

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod io;
pub mod measurement;
pub mod noise;
pub mod oracle;
pub mod projection;
pub mod rng;
pub mod signal;

pub use num_complex::Complex64;

pub use circuit::{
    run_circuit, run_circuit_noisy, CircuitProgram, CircuitRun, Instruction, NamedGate, ParseError, ParseErrors,
};
pub use error::{Error, Result};
pub use measurement::{Histogram, MeasurementChain, MeasurementOrder, MeasurementShot};
pub use noise::NoiseConfig;
pub use oracle::{GateU2, StateVector};
pub use projection::{CombFilterSpec, FilterModel, PartialProjectionPair, ProjectionEngine};
pub use signal::{
    demodulate, synthesize, FrequencyLayout, SampledBackend, SampledSignal, Signal, SignalBackend, TonalBackend,
    TonalSignal,
};
