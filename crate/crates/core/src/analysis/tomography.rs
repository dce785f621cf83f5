//! Two-qubit tomography data: measurement settings, the Pauli operator
//! basis, datasets and their collection through the signal pipeline.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::analysis::density::{CMatrix, DensityMatrix};
use crate::analysis::dressed::dress;
use crate::error::{Error, Result};
use crate::io::format_float;
use crate::measurement::{bitstring, MeasurementChain};
use crate::noise::{NoiseConfig, NoisyPipeline};
use crate::oracle::{GateU2, StateVector};
use crate::rng::{stream_rng, Stream};
use crate::signal::{FrequencyLayout, Signal, SignalBackend};

/// Local measurement axis of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Unitary taking the `+1` eigenvector of the axis to `|0>`: `H` for X,
    /// `H S^dagger` for Y, identity for Z.
    pub fn rotation(self) -> GateU2 {
        match self {
            PauliAxis::X => GateU2::hadamard(),
            PauliAxis::Y => GateU2::hadamard().compose(&GateU2::phase_s_dagger()),
            PauliAxis::Z => GateU2::identity(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// Index into `I, X, Y, Z`.
    pub fn pauli_index(self) -> usize {
        match self {
            PauliAxis::X => 1,
            PauliAxis::Y => 2,
            PauliAxis::Z => 3,
        }
    }
}

/// `I, X, Y, Z` for `index` 0 to 3.
pub fn pauli_matrix(index: usize) -> CMatrix {
    let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let entries = match index {
        0 => [l, o, o, l],
        1 => [o, l, l, o],
        2 => [o, -i, i, o],
        3 => [l, o, o, -l],
        _ => panic!("Pauli index {index} out of range"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// `sigma_i (x) sigma_j / 2` at position `4 i + j`, with `sigma_i` on qubit 1.
/// Orthonormal under the Hilbert-Schmidt inner product.
pub fn pauli_hs_basis() -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            out.push(pauli_matrix(i).kronecker(&pauli_matrix(j)).scale(0.5));
        }
    }
    out
}

/// Axis pair measured in one tomography setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TomoSetting {
    /// Axis of qubit 1.
    pub high: PauliAxis,
    /// Axis of qubit 0.
    pub low: PauliAxis,
}

impl TomoSetting {
    pub fn new(high: PauliAxis, low: PauliAxis) -> Self {
        Self { high, low }
    }

    /// The nine settings, qubit-1 axis major.
    pub fn all() -> Vec<TomoSetting> {
        PauliAxis::ALL.iter().flat_map(|&h| PauliAxis::ALL.iter().map(move |&l| TomoSetting::new(h, l))).collect()
    }

    /// Two letters, qubit 1 first (`"XZ"` measures X on qubit 1).
    pub fn label(&self) -> String {
        format!("{}{}", self.high.symbol(), self.low.symbol())
    }

    pub fn parse(label: &str) -> Result<Self> {
        let mut chars = label.trim().chars();
        match (
            chars.next().and_then(PauliAxis::from_symbol),
            chars.next().and_then(PauliAxis::from_symbol),
            chars.next(),
        ) {
            (Some(h), Some(l), None) => Ok(Self::new(h, l)),
            _ => Err(Error::InvalidArgument(format!("bad tomography setting {label:?}"))),
        }
    }

    /// Rotates a state into the setting's measurement basis.
    pub fn rotate(&self, state: &StateVector) -> Result<StateVector> {
        state.apply_gate(&self.high.rotation(), 1)?.apply_gate(&self.low.rotation(), 0)
    }

    /// `v_x` with outcome probability `<v_x| rho |v_x>`, for `x` in 0..4.
    pub fn measurement_vectors(&self) -> [Vec<Complex64>; 4] {
        let to_matrix = |g: GateU2| {
            let m = g.matrix();
            CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
        };
        let r = to_matrix(self.high.rotation()).kronecker(&to_matrix(self.low.rotation()));
        let r_dag = r.adjoint();
        std::array::from_fn(|x| r_dag.column(x).iter().copied().collect())
    }
}

/// `+1` for bit 0, `-1` for bit 1.
fn parity_sign(outcome: usize, bit: usize) -> f64 {
    if (outcome >> bit) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Outcome tallies of one setting, indexed by `x` (bit `q` is qubit `q`).
/// Counts are real so exact probabilities can be injected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoRecord {
    pub setting: TomoSetting,
    pub counts: [f64; 4],
}

impl TomoRecord {
    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomoDataset {
    pub records: Vec<TomoRecord>,
}

impl TomoDataset {
    pub fn new(records: Vec<TomoRecord>) -> Self {
        Self { records }
    }

    pub fn record(&self, setting: TomoSetting) -> Option<&TomoRecord> {
        self.records.iter().find(|r| r.setting == setting)
    }

    /// Every setting present exactly once with positive, finite counts.
    pub fn validate_complete(&self) -> Result<()> {
        for s in TomoSetting::all() {
            let matches: Vec<_> = self.records.iter().filter(|r| r.setting == s).collect();
            match matches.as_slice() {
                [] => return Err(Error::IncompleteDataset(format!("setting {} missing", s.label()))),
                [r] => {
                    if r.counts.iter().any(|c| !c.is_finite() || *c < 0.0) || r.total() <= 0.0 {
                        return Err(Error::IncompleteDataset(format!("setting {} has invalid counts", s.label())));
                    }
                }
                _ => return Err(Error::IncompleteDataset(format!("setting {} repeated", s.label()))),
            }
        }
        if self.records.len() != 9 {
            return Err(Error::IncompleteDataset(format!("{} records, expected 9", self.records.len())));
        }
        Ok(())
    }

    /// Empirical `<sigma_i (x) sigma_j>` at `[i][j]`, `sigma_i` on qubit 1.
    /// Single-qubit terms average over the three settings that contain them.
    pub fn pauli_expectations(&self) -> Result<[[f64; 4]; 4]> {
        self.validate_complete()?;
        let mut e = [[0.0; 4]; 4];
        e[0][0] = 1.0;
        for r in &self.records {
            let total = r.total();
            let (hi, lo) = (r.setting.high.pauli_index(), r.setting.low.pauli_index());
            for (x, &n) in r.counts.iter().enumerate() {
                let p = n / total;
                let (s1, s0) = (parity_sign(x, 1), parity_sign(x, 0));
                e[hi][lo] += p * s1 * s0;
                e[hi][0] += p * s1 / 3.0;
                e[0][lo] += p * s0 / 3.0;
            }
        }
        Ok(e)
    }

    /// CSV with header `setting,outcome,count`; outcome as bits of qubit 1
    /// then qubit 0.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["setting", "outcome", "count"])?;
        for r in &self.records {
            for (x, &n) in r.counts.iter().enumerate() {
                w.write_record([r.setting.label(), bitstring(x, 2), format_float(n)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let mut records: Vec<TomoRecord> = Vec::new();
        for row in reader.records() {
            let row = row?;
            if row.len() != 3 {
                return Err(Error::Csv(format!("expected 3 fields, found {}", row.len())));
            }
            let setting = TomoSetting::parse(&row[0])?;
            let x = usize::from_str_radix(row[1].trim(), 2)
                .ok()
                .filter(|&x| x < 4 && row[1].trim().len() == 2)
                .ok_or_else(|| Error::Csv(format!("bad outcome {:?}", &row[1])))?;
            let n: f64 = row[2].trim().parse().map_err(|_| Error::Csv(format!("bad count {:?}", &row[2])))?;
            match records.iter_mut().find(|r| r.setting == setting) {
                Some(r) => r.counts[x] += n,
                None => {
                    let mut counts = [0.0; 4];
                    counts[x] = n;
                    records.push(TomoRecord { setting, counts });
                }
            }
        }
        Ok(Self { records })
    }
}

/// Expected counts `weight * |<x| R psi>|^2 / ||psi||^2` for every setting.
pub fn exact_tomo_data(state: &StateVector, weight: f64) -> Result<TomoDataset> {
    require_two_qubits(state.num_qubits())?;
    let norm = state.norm_sqr();
    let records = TomoSetting::all()
        .into_iter()
        .map(|setting| {
            let rotated = setting.rotate(state)?;
            let counts = std::array::from_fn(|x| weight * rotated.amplitude(x).norm_sqr() / norm);
            Ok(TomoRecord { setting, counts })
        })
        .collect::<Result<_>>()?;
    Ok(TomoDataset::new(records))
}

/// Expected counts `weight * <v_x| rho |v_x> / Tr rho`.
pub fn exact_tomo_data_mixed(rho: &DensityMatrix, weight: f64) -> Result<TomoDataset> {
    require_two_qubits(rho.num_qubits())?;
    let trace = rho.trace();
    let records = TomoSetting::all()
        .into_iter()
        .map(|setting| {
            let vs = setting.measurement_vectors();
            TomoRecord { setting, counts: std::array::from_fn(|x| weight * rho.quadratic_form(&vs[x]) / trace) }
        })
        .collect();
    Ok(TomoDataset::new(records))
}

pub(crate) fn require_two_qubits(n: usize) -> Result<()> {
    if n != 2 {
        return Err(Error::InvalidArgument(format!("tomography is two-qubit only, got {n} qubits")));
    }
    Ok(())
}

/// Preparation of the state sent through the pipeline on each shot.
pub trait StateSource: Sync {
    fn num_qubits(&self) -> usize;

    fn prepare(&self, rng: &mut dyn RngCore) -> Result<StateVector>;

    /// True when `prepare` ignores its generator.
    fn is_deterministic(&self) -> bool {
        false
    }
}

/// The same pure state every shot.
#[derive(Debug, Clone)]
pub struct PureSource(pub StateVector);

impl StateSource for PureSource {
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn prepare(&self, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(self.0.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// A freshly dressed copy of the bare state each shot, renormalized.
#[derive(Debug, Clone)]
pub struct DressedSource(pub StateVector);

impl StateSource for DressedSource {
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn prepare(&self, rng: &mut dyn RngCore) -> Result<StateVector> {
        dress(&self.0, rng)?.amplitudes.normalized()
    }
}

/// A uniformly random computational basis state each shot.
#[derive(Debug, Clone, Copy)]
pub struct MaximallyMixedSource {
    pub num_qubits: usize,
}

impl StateSource for MaximallyMixedSource {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn prepare(&self, rng: &mut dyn RngCore) -> Result<StateVector> {
        StateVector::basis(rng.random_range(0..1usize << self.num_qubits), self.num_qubits)
    }
}

/// Turns a rotated signal into a register outcome.
pub trait DetectionStrategy: Sync {
    fn detect<S: Signal>(&self, signal: &S, layout: &FrequencyLayout, rng: &mut dyn RngCore) -> Result<usize>;
}

/// The power-comparator measurement chain with uniform draws.
#[derive(Debug, Clone, Default)]
pub struct BornComparator {
    pub chain: MeasurementChain,
}

impl DetectionStrategy for BornComparator {
    fn detect<S: Signal>(&self, signal: &S, layout: &FrequencyLayout, rng: &mut dyn RngCore) -> Result<usize> {
        let u: Vec<f64> = (0..layout.num_qubits()).map(|_| rng.random::<f64>()).collect();
        Ok(self.chain.measure_all(signal, layout, &u)?.outcome())
    }
}

/// Runs every setting `shots_per_setting` times: prepare, synthesize, rotate
/// with signal-domain gates, detect.
///
/// Shot `s` of setting `i` draws from stream `(seed, Tomography, i * shots + s)`.
/// Deterministic sources without noise are synthesized and rotated once per
/// setting.
pub fn collect_tomo_data<B: SignalBackend, D: DetectionStrategy>(
    backend: &B,
    source: &dyn StateSource,
    noise: &NoiseConfig,
    detector: &D,
    shots_per_setting: u64,
    seed: u64,
) -> Result<TomoDataset> {
    require_two_qubits(source.num_qubits())?;
    if shots_per_setting == 0 {
        return Err(Error::InvalidArgument("shots per setting must be at least 1".into()));
    }
    let pipeline = NoisyPipeline::new(backend, FrequencyLayout::octave(2)?, *noise)?;
    let layout = &pipeline.layout;
    let rotate = |signal: B::Signal, setting: TomoSetting, rng: &mut dyn RngCore| -> Result<B::Signal> {
        let mut out = signal;
        for (axis, qubit) in [(setting.high, 1), (setting.low, 0)] {
            if axis != PauliAxis::Z {
                out = pipeline.apply_gate(&out, &axis.rotation(), qubit, rng)?;
            }
        }
        Ok(out)
    };
    let shared = source.is_deterministic() && noise.is_ideal();

    let mut records = Vec::with_capacity(9);
    for (i, setting) in TomoSetting::all().into_iter().enumerate() {
        let prepared = if shared {
            let mut rng = stream_rng(seed, Stream::Tomography, u64::MAX - i as u64);
            let state = source.prepare(&mut rng)?;
            Some(rotate(pipeline.synthesize(&state, &mut rng)?, setting, &mut rng)?)
        } else {
            None
        };
        let outcomes: Vec<Result<usize>> = (0..shots_per_setting)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream_rng(seed, Stream::Tomography, i as u64 * shots_per_setting + s);
                match &prepared {
                    Some(signal) => detector.detect(signal, layout, &mut rng),
                    None => {
                        let state = source.prepare(&mut rng)?;
                        let signal = rotate(pipeline.synthesize(&state, &mut rng)?, setting, &mut rng)?;
                        detector.detect(&signal, layout, &mut rng)
                    }
                }
            })
            .collect();
        let mut counts = [0.0; 4];
        for x in outcomes {
            counts[x?] += 1.0;
        }
        records.push(TomoRecord { setting, counts });
    }
    Ok(TomoDataset::new(records))
}
