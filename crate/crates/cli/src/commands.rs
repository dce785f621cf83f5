//! Command implementations. Each writes its CSV artifacts into an output
//! directory and returns the computed values.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use qmt_core::analysis::{
    collect_tomo_data, exact_tomo_data, exact_tomo_data_mixed, fidelity_histogram, fidelity_mixed,
    qst_linear_inversion, qst_mle, BornComparator, DensityMatrix, DressedSource, Ensemble, FidelityEnsemble,
    FidelityExperiment, MaximallyMixedSource, MleOptions, MleResult, PureSource, StateSource, TomoDataset,
};
use qmt_core::io::{
    format_float, write_amplitudes_csv, write_complex_matrix, write_fidelity_csv, write_histogram_csv,
    write_shot_log_csv, write_signal_csv, write_spectrum_csv,
};
use qmt_core::measurement::sample_shots_with_noise;
use qmt_core::rng::{stream_rng, Stream};
use qmt_core::signal::oversampling_floor;
use qmt_core::{
    demodulate, run_circuit_noisy, CircuitProgram, Histogram, MeasurementShot, Signal, SignalBackend, StateVector,
    TonalBackend, TonalSignal,
};
use rand::Rng;

use crate::config::{BackendKind, RunConfig};
use crate::estimate::{resource_estimate, ResourceEstimate};

/// Calls `$body` with `$b` bound to the backend selected in `$cfg`.
macro_rules! with_backend {
    ($cfg:expr, |$b:ident| $body:expr) => {
        match $cfg.backend {
            BackendKind::Tonal => {
                let $b = &TonalBackend;
                $body
            }
            BackendKind::Sampled => {
                let $b = &$cfg.sampled_backend();
                $body
            }
        }
    };
}

fn create(dir: &Path, name: &str) -> anyhow::Result<(BufWriter<File>, PathBuf)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((BufWriter::new(file), path))
}

fn write_key_values(dir: &Path, name: &str, header: [&str; 2], rows: &[(&str, String)]) -> anyhow::Result<PathBuf> {
    let (out, path) = create(dir, name)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (k, v) in rows {
        w.write_record([*k, v.as_str()])?;
    }
    w.flush()?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub spectrum: TonalSignal,
    pub amplitudes: StateVector,
    /// Power outside the basis frequencies.
    pub residual: f64,
    pub measurements: Vec<MeasurementShot>,
    pub files: Vec<PathBuf>,
}

/// Runs `program` once from `initial` and writes `signal.csv`,
/// `spectrum.csv`, `amplitudes.csv` and, if the program measures,
/// `shots.csv`.
pub fn cmd_run(
    program: &CircuitProgram,
    initial: &StateVector,
    cfg: &RunConfig,
    out: &Path,
) -> anyhow::Result<RunReport> {
    cfg.validate()?;
    with_backend!(cfg, |backend| run_on(backend, program, initial, cfg, out))
}

fn run_on<B: SignalBackend>(
    backend: &B,
    program: &CircuitProgram,
    initial: &StateVector,
    cfg: &RunConfig,
    out: &Path,
) -> anyhow::Result<RunReport> {
    let layout = program.layout()?;
    let mut draws = stream_rng(cfg.seed, Stream::Shots, 0);
    let mut noise_rng = stream_rng(cfg.seed, Stream::Noise, 0);
    let run = run_circuit_noisy(
        backend,
        program,
        initial,
        &cfg.chain(),
        &cfg.noise,
        &mut || draws.random::<f64>(),
        &mut noise_rng,
    )?;

    let spectrum = run.signal.to_tonal();
    let demod = demodulate(&run.signal, &layout)?;
    let samples = cfg.samples_per_period.unwrap_or_else(|| oversampling_floor(layout.num_qubits()));
    let waveform = run.signal.waveform(samples, cfg.periods)?;

    let mut files = Vec::new();
    let (w, p) = create(out, "signal.csv")?;
    write_signal_csv(w, &waveform)?;
    files.push(p);
    let (w, p) = create(out, "spectrum.csv")?;
    write_spectrum_csv(w, &spectrum)?;
    files.push(p);
    let (w, p) = create(out, "amplitudes.csv")?;
    write_amplitudes_csv(w, demod.state.amplitudes(), layout.num_qubits())?;
    files.push(p);
    if !run.measurements.is_empty() {
        let (w, p) = create(out, "shots.csv")?;
        write_shot_log_csv(w, &run.measurements)?;
        files.push(p);
    }
    Ok(RunReport { spectrum, amplitudes: demod.state, residual: demod.residual, measurements: run.measurements, files })
}

/// Samples `cfg.shots` shots and writes `histogram.csv`.
pub fn cmd_sample(
    program: &CircuitProgram,
    initial: &StateVector,
    cfg: &RunConfig,
    out: &Path,
) -> anyhow::Result<Histogram> {
    cfg.validate()?;
    let chain = cfg.chain();
    let hist = with_backend!(cfg, |backend| sample_shots_with_noise(
        backend, program, initial, cfg.shots, cfg.seed, &chain, &cfg.noise
    ))?;
    let (w, _) = create(out, "histogram.csv")?;
    write_histogram_csv(w, &hist)?;
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SourceKind {
    /// The target state every shot.
    #[default]
    Pure,
    /// A freshly dressed copy of the target each shot.
    Dressed,
    /// A uniformly random basis state each shot.
    Mixed,
}

#[derive(Debug, Clone)]
pub struct TomoOptions {
    pub state: StateVector,
    pub source: SourceKind,
    /// Feed exact outcome probabilities, weighted by the shot count, instead
    /// of sampling.
    pub exact: bool,
    pub mle: MleOptions,
}

#[derive(Debug, Clone)]
pub struct TomoReport {
    pub data: TomoDataset,
    pub target: DensityMatrix,
    pub linear: DensityMatrix,
    pub mle: MleResult,
    pub fidelity_linear: f64,
    pub fidelity_mle: f64,
}

/// Two-qubit tomography: collects the nine-setting dataset, reconstructs by
/// linear inversion and MLE, and writes `tomo_data.csv`, `rho_hat.txt` and
/// `report.csv`.
pub fn cmd_tomo(options: &TomoOptions, cfg: &RunConfig, out: &Path) -> anyhow::Result<TomoReport> {
    let report = tomography(options, cfg)?;
    let (w, _) = create(out, "tomo_data.csv")?;
    report.data.write_csv(w)?;
    let (w, _) = create(out, "rho_hat.txt")?;
    let m = report.mle.rho.matrix();
    write_complex_matrix(w, m.nrows(), m.ncols(), |r, c| m[(r, c)])?;
    let source = match options.source {
        SourceKind::Pure => "pure",
        SourceKind::Dressed => "dressed",
        SourceKind::Mixed => "mixed",
    };
    write_key_values(
        out,
        "report.csv",
        ["metric", "value"],
        &[
            ("source", source.to_string()),
            ("mode", if options.exact { "exact" } else { "sampled" }.to_string()),
            ("shots_per_setting", cfg.shots.to_string()),
            ("fidelity_linear", format_float(report.fidelity_linear)),
            ("fidelity_mle", format_float(report.fidelity_mle)),
            ("log_likelihood", format_float(report.mle.log_likelihood)),
            ("iterations", report.mle.iterations.to_string()),
            ("converged", report.mle.converged.to_string()),
        ],
    )?;
    Ok(report)
}

/// [`cmd_tomo`] without file output.
pub fn tomography(options: &TomoOptions, cfg: &RunConfig) -> anyhow::Result<TomoReport> {
    cfg.validate()?;
    let n = options.state.num_qubits();
    let target = match options.source {
        SourceKind::Mixed => DensityMatrix::maximally_mixed(n),
        _ => DensityMatrix::from_pure(&options.state.normalized()?),
    };
    let weight = cfg.shots as f64;
    let data = match (options.exact, options.source) {
        (true, SourceKind::Pure) => exact_tomo_data(&options.state, weight)?,
        (true, SourceKind::Mixed) => exact_tomo_data_mixed(&target, weight)?,
        (true, SourceKind::Dressed) => anyhow::bail!("exact mode needs a pure or mixed source"),
        (false, kind) => {
            let source: Box<dyn StateSource> = match kind {
                SourceKind::Pure => Box::new(PureSource(options.state.clone())),
                SourceKind::Dressed => Box::new(DressedSource(options.state.clone())),
                SourceKind::Mixed => Box::new(MaximallyMixedSource { num_qubits: n }),
            };
            let detector = BornComparator { chain: cfg.chain() };
            with_backend!(cfg, |backend| collect_tomo_data(
                backend,
                source.as_ref(),
                &cfg.noise,
                &detector,
                cfg.shots,
                cfg.seed
            ))?
        }
    };
    let linear = qst_linear_inversion(&data)?;
    let mle = qst_mle(&data, &linear, &options.mle)?;
    let fidelity_linear = fidelity_mixed(&linear, &target)?;
    let fidelity_mle = fidelity_mixed(&mle.rho, &target)?;
    Ok(TomoReport { data, target, linear, mle, fidelity_linear, fidelity_mle })
}

/// Resource estimate for `num_qubits` at base frequency `f0_hz`, also
/// written to `estimate.csv` when `out` is given.
pub fn cmd_estimate(num_qubits: u32, f0_hz: f64, out: Option<&Path>) -> anyhow::Result<ResourceEstimate> {
    let e = resource_estimate(num_qubits, f0_hz)?;
    if let Some(dir) = out {
        write_key_values(dir, "estimate.csv", ["quantity", "value"], &estimate_rows(&e))?;
    }
    Ok(e)
}

pub fn estimate_rows(e: &ResourceEstimate) -> Vec<(&'static str, String)> {
    vec![
        ("num_qubits", e.num_qubits.to_string()),
        ("f0_hz", format_float(e.f0_hz)),
        ("bandwidth_hz", format_float(e.bandwidth_hz)),
        ("gate_time_s", format_float(e.gate_time_s)),
        ("comb_passbands", e.comb_passbands.map_or_else(|| "n/a".into(), |p| p.to_string())),
        ("projection_ops_per_2q_gate", e.projection_ops_per_2q_gate.to_string()),
    ]
}

/// Fidelity ensemble over `realizations` noisy runs of `ensemble`; writes
/// `fidelity.csv`.
pub fn cmd_fidelity(
    ensemble: Ensemble,
    realizations: usize,
    cfg: &RunConfig,
    out: &Path,
) -> anyhow::Result<FidelityEnsemble> {
    cfg.validate()?;
    let experiment = FidelityExperiment { ensemble, noise: cfg.noise, realizations, seed: cfg.seed };
    let result = with_backend!(cfg, |backend| fidelity_histogram(backend, &experiment))?;
    let (w, _) = create(out, "fidelity.csv")?;
    write_fidelity_csv(w, &result.fidelities)?;
    Ok(result)
}
