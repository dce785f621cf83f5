//! Circuit programs and their line-oriented text format.
//!
//! ```text
//! # Bell pair
//! qubits 2
//! h 1
//! cnot 1 0
//! gate1 0 [[0.1759+0.1836j, 0.4346+0.8640j], [-0.4346+0.8640j, 0.1759-0.1836j]]
//! cgate 1 0 [[0, 1], [1, 0]]
//! measure 0
//! measure_all
//! ```
//!
//! Grammar (one instruction per line, `#` starts a comment):
//!
//! ```text
//! program  := header { instr }
//! header   := "qubits" INT
//! instr    := named Q | "cnot" C T | "gate1" Q matrix | "cgate" C T matrix
//!           | "measure" Q | "measure_all"
//! named    := "h" | "x" | "y" | "z" | "s" | "t"
//! matrix   := "[[" cplx "," cplx "]" "," "[" cplx "," cplx "]]"
//! cplx     := REAL | REAL ("+"|"-") REAL? "j" | REAL? "j"
//! ```

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::io::{format_complex, parse_complex};
use crate::measurement::{MeasurementChain, MeasurementShot};
use crate::noise::{NoiseConfig, NoisyPipeline};
use crate::oracle::{GateU2, StateVector, DEFAULT_UNITARITY_TOLERANCE};
use crate::projection::ProjectionEngine;
use crate::signal::{FrequencyLayout, Signal, SignalBackend};

/// Largest register a program file may declare.
pub const MAX_PROGRAM_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGate {
    H,
    X,
    Y,
    Z,
    S,
    T,
}

impl NamedGate {
    pub fn matrix(self) -> GateU2 {
        match self {
            NamedGate::H => GateU2::hadamard(),
            NamedGate::X => GateU2::pauli_x(),
            NamedGate::Y => GateU2::pauli_y(),
            NamedGate::Z => GateU2::pauli_z(),
            NamedGate::S => GateU2::phase_s(),
            NamedGate::T => GateU2::phase_t(),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            NamedGate::H => "h",
            NamedGate::X => "x",
            NamedGate::Y => "y",
            NamedGate::Z => "z",
            NamedGate::S => "s",
            NamedGate::T => "t",
        }
    }

    fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "h" => NamedGate::H,
            "x" => NamedGate::X,
            "y" => NamedGate::Y,
            "z" => NamedGate::Z,
            "s" => NamedGate::S,
            "t" => NamedGate::T,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate { target: usize, gate: GateU2, name: Option<NamedGate> },
    Controlled { control: usize, target: usize, gate: GateU2, name: Option<NamedGate> },
    Measure(usize),
    MeasureAll,
}

impl Instruction {
    pub fn is_measurement(&self) -> bool {
        matches!(self, Instruction::Measure(_) | Instruction::MeasureAll)
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Instruction::Gate { target, .. } => vec![target],
            Instruction::Controlled { control, target, .. } => vec![control, target],
            Instruction::Measure(q) => vec![q],
            Instruction::MeasureAll => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    num_qubits: usize,
    instructions: Vec<Instruction>,
}

/// A positioned parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Every error found in a program text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

impl CircuitProgram {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Self { num_qubits, instructions: Vec::new() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Appends after validating qubit indices.
    pub fn push(&mut self, instruction: Instruction) -> Result<&mut Self> {
        for q in instruction.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
            }
        }
        if let Instruction::Controlled { control, target, .. } = instruction {
            if control == target {
                return Err(Error::ControlIsTarget(control));
            }
        }
        self.instructions.push(instruction);
        Ok(self)
    }

    pub fn named(&mut self, name: NamedGate, target: usize) -> Result<&mut Self> {
        self.push(Instruction::Gate { target, gate: name.matrix(), name: Some(name) })
    }

    pub fn gate(&mut self, gate: GateU2, target: usize) -> Result<&mut Self> {
        self.push(Instruction::Gate { target, gate, name: None })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Instruction::Controlled { control, target, gate: GateU2::pauli_x(), name: Some(NamedGate::X) })
    }

    pub fn controlled(&mut self, gate: GateU2, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Instruction::Controlled { control, target, gate, name: None })
    }

    pub fn layout(&self) -> Result<FrequencyLayout> {
        FrequencyLayout::octave(self.num_qubits)
    }

    pub fn has_measurements(&self) -> bool {
        self.instructions.iter().any(Instruction::is_measurement)
    }

    /// Splits before the first measurement instruction.
    pub fn split_at_first_measurement(&self) -> (CircuitProgram, CircuitProgram) {
        let at = self.instructions.iter().position(Instruction::is_measurement).unwrap_or(self.instructions.len());
        let (a, b) = self.instructions.split_at(at);
        (
            CircuitProgram { num_qubits: self.num_qubits, instructions: a.to_vec() },
            CircuitProgram { num_qubits: self.num_qubits, instructions: b.to_vec() },
        )
    }

    /// Folds the gates through the dense reference simulator. Measurements
    /// are rejected.
    pub fn apply_to_state(&self, state: &StateVector) -> Result<StateVector> {
        let mut s = state.clone();
        for ins in &self.instructions {
            s = match ins {
                Instruction::Gate { target, gate, .. } => s.apply_gate(gate, *target)?,
                Instruction::Controlled { control, target, gate, .. } => s.apply_controlled(gate, *control, *target)?,
                _ => return Err(Error::InvalidArgument("reference fold does not sample measurements".into())),
            };
        }
        Ok(s)
    }

    /// Folds the gates through the signal engine. Measurements are rejected.
    pub fn run_gates<S: Signal>(&self, initial: &S, layout: &FrequencyLayout, engine: &ProjectionEngine) -> Result<S> {
        let mut s = initial.clone();
        for ins in &self.instructions {
            s = match ins {
                Instruction::Gate { target, gate, .. } => engine.apply_gate(&s, layout, gate, *target)?,
                Instruction::Controlled { control, target, gate, .. } => {
                    engine.apply_controlled(&s, layout, gate, *control, *target)?
                }
                _ => return Err(Error::InvalidArgument("measurement needs comparator input".into())),
            };
        }
        Ok(s)
    }

    /// Executes every instruction on the signal engine. Comparator inputs are
    /// pulled from `draw` as measurements occur.
    pub fn run<S: Signal>(
        &self,
        initial: &S,
        layout: &FrequencyLayout,
        chain: &MeasurementChain,
        draw: &mut dyn FnMut() -> f64,
    ) -> Result<CircuitRun<S>> {
        let mut step = |signal: &S, ins: &Instruction| match ins {
            Instruction::Gate { target, gate, .. } => chain.engine.apply_gate(signal, layout, gate, *target),
            Instruction::Controlled { control, target, gate, .. } => {
                chain.engine.apply_controlled(signal, layout, gate, *control, *target)
            }
            _ => unreachable!("measurements are handled by the executor"),
        };
        self.execute(initial, layout, chain, draw, &mut step)
    }

    /// Like [`run`](Self::run), with gates passed through `pipeline` so
    /// coefficient jitter and waveform noise follow every gate. Noise draws
    /// come from `noise_rng`.
    pub fn run_noisy<B: SignalBackend>(
        &self,
        pipeline: &NoisyPipeline<'_, B>,
        initial: &B::Signal,
        chain: &MeasurementChain,
        draw: &mut dyn FnMut() -> f64,
        noise_rng: &mut dyn RngCore,
    ) -> Result<CircuitRun<B::Signal>> {
        let mut step = |signal: &B::Signal, ins: &Instruction| match ins {
            Instruction::Gate { target, gate, .. } => pipeline.apply_gate(signal, gate, *target, noise_rng),
            Instruction::Controlled { control, target, gate, .. } => {
                pipeline.apply_controlled(signal, gate, *control, *target, noise_rng)
            }
            _ => unreachable!("measurements are handled by the executor"),
        };
        self.execute(initial, &pipeline.layout, chain, draw, &mut step)
    }

    fn execute<S: Signal>(
        &self,
        initial: &S,
        layout: &FrequencyLayout,
        chain: &MeasurementChain,
        draw: &mut dyn FnMut() -> f64,
        step: &mut dyn FnMut(&S, &Instruction) -> Result<S>,
    ) -> Result<CircuitRun<S>> {
        if layout.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits, found: layout.dim() });
        }
        let mut signal = initial.clone();
        let mut measurements = Vec::new();
        let mut final_readout = None;
        for ins in &self.instructions {
            final_readout = None;
            match ins {
                Instruction::Measure(q) => {
                    let u = draw();
                    let m = chain.measure_qubit(&signal, layout, *q, u)?;
                    measurements.push(MeasurementShot {
                        order: vec![*q],
                        bits: vec![m.bit],
                        u_draws: vec![u],
                        probabilities: vec![m.probabilities.p0],
                    });
                    signal = m.collapsed;
                }
                Instruction::MeasureAll => {
                    let u: Vec<f64> = (0..self.num_qubits).map(|_| draw()).collect();
                    let (shot, collapsed) = chain.measure_sequence(&signal, layout, &u)?;
                    measurements.push(shot.clone());
                    final_readout = Some(shot);
                    signal = collapsed;
                }
                gate => signal = step(&signal, gate)?,
            }
        }
        Ok(CircuitRun { signal, measurements, final_readout })
    }

    /// Parses with [`DEFAULT_UNITARITY_TOLERANCE`].
    pub fn parse(text: &str) -> std::result::Result<Self, ParseErrors> {
        Self::parse_with_tolerance(text, DEFAULT_UNITARITY_TOLERANCE)
    }

    pub fn parse_with_tolerance(text: &str, tolerance: f64) -> std::result::Result<Self, ParseErrors> {
        let mut errors = Vec::new();
        let mut program: Option<CircuitProgram> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut err = |message: String| errors.push(ParseError { line: line_no, message });
            let Some(prog) = program.as_mut() else {
                match parse_header(line) {
                    Ok(n) => program = Some(CircuitProgram { num_qubits: n, instructions: Vec::new() }),
                    Err(m) => {
                        err(m);
                        // without a register size nothing else can be checked
                        return Err(ParseErrors(errors));
                    }
                }
                continue;
            };
            match parse_instruction(line, prog.num_qubits, tolerance) {
                Ok(ins) => {
                    if let Err(e) = prog.push(ins) {
                        err(e.to_string());
                    }
                }
                Err(m) => err(m),
            }
        }
        match program {
            Some(p) if errors.is_empty() => Ok(p),
            Some(_) => Err(ParseErrors(errors)),
            None => Err(ParseErrors(vec![ParseError { line: 1, message: "missing 'qubits N' header".into() }])),
        }
    }
}

fn parse_header(line: &str) -> std::result::Result<usize, String> {
    let words: Vec<&str> = line.split_whitespace().collect();
    match words.as_slice() {
        ["qubits", n] => {
            let n: usize = n.parse().map_err(|_| format!("bad qubit count '{n}'"))?;
            if n == 0 || n > MAX_PROGRAM_QUBITS {
                return Err(format!("qubit count {n} outside 1..={MAX_PROGRAM_QUBITS}"));
            }
            Ok(n)
        }
        _ => Err(format!("expected 'qubits N' header, found '{line}'")),
    }
}

fn parse_qubit(word: &str, num_qubits: usize) -> std::result::Result<usize, String> {
    let q: usize = word.parse().map_err(|_| format!("bad qubit index '{word}'"))?;
    if q >= num_qubits {
        return Err(format!("qubit {q} out of range for {num_qubits} qubits"));
    }
    Ok(q)
}

fn parse_matrix(text: &str, tolerance: f64) -> std::result::Result<GateU2, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|s| s.strip_suffix("]]"))
        .ok_or_else(|| format!("matrix must look like [[a, b], [c, d]], found '{text}'"))?;
    let rows: Vec<&str> = inner.split("],[").collect();
    if rows.len() != 2 {
        return Err(format!("matrix needs 2 rows, found {}", rows.len()));
    }
    let mut m = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 2 {
            return Err(format!("matrix row {r} needs 2 entries, found {}", cells.len()));
        }
        for (c, cell) in cells.iter().enumerate() {
            m[r][c] = parse_complex(cell).map_err(|e| e.to_string())?;
        }
    }
    GateU2::with_tolerance(m, tolerance).map_err(|e| e.to_string())
}

fn parse_instruction(line: &str, n: usize, tolerance: f64) -> std::result::Result<Instruction, String> {
    let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    let words: Vec<&str> = rest.split_whitespace().collect();
    let expect_args = |count: usize| -> std::result::Result<(), String> {
        if words.len() != count {
            return Err(format!("'{keyword}' takes {count} argument(s), found {}", words.len()));
        }
        Ok(())
    };
    if let Some(name) = NamedGate::from_keyword(keyword) {
        expect_args(1)?;
        return Ok(Instruction::Gate { target: parse_qubit(words[0], n)?, gate: name.matrix(), name: Some(name) });
    }
    match keyword {
        "cnot" => {
            expect_args(2)?;
            let (control, target) = (parse_qubit(words[0], n)?, parse_qubit(words[1], n)?);
            if control == target {
                return Err(format!("cnot control equals target ({control})"));
            }
            Ok(Instruction::Controlled { control, target, gate: GateU2::pauli_x(), name: Some(NamedGate::X) })
        }
        "gate1" => {
            let (q, matrix) = rest.split_once(char::is_whitespace).ok_or("gate1 needs a qubit and a matrix")?;
            Ok(Instruction::Gate { target: parse_qubit(q, n)?, gate: parse_matrix(matrix, tolerance)?, name: None })
        }
        "cgate" => {
            let mut parts = rest.splitn(3, char::is_whitespace);
            let (Some(c), Some(t), Some(matrix)) = (parts.next(), parts.next(), parts.next()) else {
                return Err("cgate needs control, target and a matrix".into());
            };
            let (control, target) = (parse_qubit(c, n)?, parse_qubit(t, n)?);
            if control == target {
                return Err(format!("cgate control equals target ({control})"));
            }
            Ok(Instruction::Controlled { control, target, gate: parse_matrix(matrix, tolerance)?, name: None })
        }
        "measure" => {
            expect_args(1)?;
            Ok(Instruction::Measure(parse_qubit(words[0], n)?))
        }
        "measure_all" => {
            expect_args(0)?;
            Ok(Instruction::MeasureAll)
        }
        other => Err(format!("unknown instruction '{other}'")),
    }
}

fn format_matrix(gate: &GateU2) -> String {
    let m = gate.matrix();
    format!(
        "[[{}, {}], [{}, {}]]",
        format_complex(m[0][0]),
        format_complex(m[0][1]),
        format_complex(m[1][0]),
        format_complex(m[1][1])
    )
}

impl fmt::Display for CircuitProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for ins in &self.instructions {
            match ins {
                Instruction::Gate { target, name: Some(name), .. } => writeln!(f, "{} {target}", name.keyword())?,
                Instruction::Gate { target, gate, name: None } => {
                    writeln!(f, "gate1 {target} {}", format_matrix(gate))?
                }
                Instruction::Controlled { control, target, name: Some(NamedGate::X), .. } => {
                    writeln!(f, "cnot {control} {target}")?
                }
                Instruction::Controlled { control, target, gate, .. } => {
                    writeln!(f, "cgate {control} {target} {}", format_matrix(gate))?
                }
                Instruction::Measure(q) => writeln!(f, "measure {q}")?,
                Instruction::MeasureAll => writeln!(f, "measure_all")?,
            }
        }
        Ok(())
    }
}

/// Outcome of [`CircuitProgram::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitRun<S> {
    pub signal: S,
    /// Every measurement in program order; single-qubit measurements are
    /// one-step shots.
    pub measurements: Vec<MeasurementShot>,
    /// The readout of a trailing `measure_all`, if the program ends with one.
    pub final_readout: Option<MeasurementShot>,
}

/// Synthesizes `initial` on `backend` and runs `program` on it.
pub fn run_circuit<B: SignalBackend>(
    backend: &B,
    program: &CircuitProgram,
    initial: &StateVector,
    chain: &MeasurementChain,
    draw: &mut dyn FnMut() -> f64,
) -> Result<CircuitRun<B::Signal>> {
    let layout = program.layout()?;
    let start = backend.synthesize(initial, &layout)?;
    program.run(&start, &layout, chain, draw)
}

/// [`run_circuit`] with hardware noise from `noise_rng`.
pub fn run_circuit_noisy<B: SignalBackend>(
    backend: &B,
    program: &CircuitProgram,
    initial: &StateVector,
    chain: &MeasurementChain,
    noise: &NoiseConfig,
    draw: &mut dyn FnMut() -> f64,
    noise_rng: &mut dyn RngCore,
) -> Result<CircuitRun<B::Signal>> {
    let pipeline = NoisyPipeline::new(backend, program.layout()?, *noise)?.with_engine(chain.engine);
    let start = pipeline.synthesize(initial, noise_rng)?;
    program.run_noisy(&pipeline, &start, chain, draw, noise_rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synthesize, TonalBackend};

    #[test]
    fn parses_bell_program() {
        let p = CircuitProgram::parse("qubits 2\nh 1\ncnot 1 0\nmeasure_all\n").unwrap();
        assert_eq!(p.num_qubits(), 2);
        assert_eq!(p.instructions().len(), 3);
        assert_eq!(p.instructions()[2], Instruction::MeasureAll);
    }

    #[test]
    fn parses_explicit_matrix() {
        let text = "qubits 2\ngate1 0 [[0.1759+0.1836j, 0.4346+0.8460j],[-0.4346+0.8640j, 0.1759-0.1836j]]";
        let p = CircuitProgram::parse(text).unwrap();
        let Instruction::Gate { target, gate, name } = &p.instructions()[0] else { panic!() };
        assert_eq!((*target, *name), (0, None));
        assert_eq!(gate.entry(0, 1), num_complex::Complex64::new(0.4346, 0.8460));
        assert_eq!(gate.entry(1, 0), num_complex::Complex64::new(-0.4346, 0.8640));
    }

    #[test]
    fn reports_line_numbers() {
        let errs =
            CircuitProgram::parse("qubits 2\n# fine\ncnot 0 0\nfoo 1\nh 7\ngate1 0 [[1, 1], [0, 1]]").unwrap_err();
        let lines: Vec<usize> = errs.0.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5, 6]);
        assert!(errs.0[0].message.contains("control equals target"));
        assert!(CircuitProgram::parse("h 0").is_err());
        assert!(CircuitProgram::parse("").is_err());
        assert!(CircuitProgram::parse("qubits 0").is_err());
    }

    #[test]
    fn format_parse_is_idempotent() {
        let text = "qubits 3 # header\nh 2\ncnot 2 0\ngate1 1 [[0.6+0.8j, 0], [0, 0.6-0.8j]]\ncgate 0 1 [[0, -j], [j, 0]]\nmeasure 1\nt 0\nmeasure_all\n";
        let p = CircuitProgram::parse(text).unwrap();
        let once = p.to_string();
        let twice = CircuitProgram::parse(&once).unwrap().to_string();
        assert_eq!(once, twice);
        assert_eq!(CircuitProgram::parse(&once).unwrap(), p);
    }

    #[test]
    fn empty_program_returns_initial_signal() {
        let p = CircuitProgram::new(2).unwrap();
        let init = StateVector::basis(1, 2).unwrap();
        let run = run_circuit(&TonalBackend, &p, &init, &MeasurementChain::default(), &mut || 0.5).unwrap();
        assert_eq!(run.signal, synthesize(&init, &p.layout().unwrap()).unwrap());
        assert!(run.measurements.is_empty());
    }

    #[test]
    fn bell_program_signal() {
        let mut p = CircuitProgram::new(2).unwrap();
        p.named(NamedGate::H, 1).unwrap().cnot(1, 0).unwrap();
        let run =
            run_circuit(&TonalBackend, &p, &StateVector::zero(2).unwrap(), &MeasurementChain::default(), &mut || 0.5)
                .unwrap();
        let want = synthesize(&StateVector::bell(), &p.layout().unwrap()).unwrap();
        assert!(run.signal.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn mid_circuit_measurement_collapses() {
        let p = CircuitProgram::parse("qubits 1\nh 0\nmeasure 0\nh 0\nmeasure_all").unwrap();
        let mut draws = [0.9, 0.1].into_iter();
        let run =
            run_circuit(&TonalBackend, &p, &StateVector::zero(1).unwrap(), &MeasurementChain::default(), &mut || {
                draws.next().unwrap()
            })
            .unwrap();
        assert_eq!(run.measurements.len(), 2);
        assert_eq!(run.measurements[0].bits, vec![1]);
        // H|1> measured with u = 0.1 < p0 = 0.5
        assert_eq!(run.final_readout.unwrap().bits, vec![0]);
    }

    #[test]
    fn builder_validates() {
        let mut p = CircuitProgram::new(2).unwrap();
        assert!(p.cnot(0, 0).is_err());
        assert!(p.named(NamedGate::X, 2).is_err());
        assert!(p.push(Instruction::Measure(5)).is_err());
    }
}
