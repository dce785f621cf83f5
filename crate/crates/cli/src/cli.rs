//! Argument parsing and dispatch for the `emu` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmt_core::analysis::{Ensemble, MleOptions, STATE_SYNTHESIS_JITTER};
use qmt_core::io::format_float;
use qmt_core::CircuitProgram;

use crate::commands::{
    cmd_estimate, cmd_fidelity, cmd_run, cmd_sample, cmd_tomo, estimate_rows, SourceKind, TomoOptions,
};
use crate::config::{BackendKind, RunConfig};
use crate::state::parse_state;

#[derive(Debug, Parser)]
#[command(name = "emu", version, about = "Quantum circuit emulator on quadrature modulated tonal signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command that runs the emulator. Flags override
/// values from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long)]
    pub samples_per_period: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots; per measurement setting for `tomo`.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Additive white noise per sample (sampled backend only).
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Relative jitter on state coefficients and gate entries.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(b) = self.backend {
            cfg.backend = b;
        }
        if self.samples_per_period.is_some() {
            cfg.samples_per_period = self.samples_per_period;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(s) = self.noise_sigma {
            cfg.noise.awgn_sigma = s;
        }
        if let Some(j) = self.jitter {
            cfg.noise.coefficient_jitter = j;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    /// Synthesis followed by readout.
    State,
    /// Synthesis, a Haar-random gate, readout.
    Gates,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a circuit once; write waveform, spectrum and amplitudes.
    Run {
        #[arg(long)]
        circuit: PathBuf,
        /// Initial state: zero, singlet, bell, demo, basis:X or amplitudes `a,b,...`.
        #[arg(long, default_value = "zero")]
        init: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a circuit repeatedly; write the outcome histogram.
    Sample {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value = "zero")]
        init: String,
        #[command(flatten)]
        common: Common,
    },
    /// Two-qubit state tomography.
    Tomo {
        #[arg(long, default_value = "singlet")]
        state: String,
        #[arg(long, value_enum, default_value = "pure")]
        source: SourceKind,
        /// Use exact outcome probabilities instead of sampled shots.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Hardware resources for a register size.
    Estimate {
        /// Register size; taken from `--circuit` when omitted.
        #[arg(long)]
        qubits: Option<u32>,
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Base tone frequency in Hz.
        #[arg(long, default_value_t = 1000.0)]
        f0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity ensemble under hardware noise. Without any noise options the
    /// calibrated coefficient jitter is used.
    Fidelity {
        #[arg(long, value_enum, default_value = "state")]
        ensemble: EnsembleKind,
        #[arg(long, default_value = "singlet")]
        state: String,
        /// Target qubit of the random gates.
        #[arg(long, default_value_t = 1)]
        qubit: usize,
        #[arg(long, default_value_t = 500)]
        realizations: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn load_program(path: &Path) -> anyhow::Result<CircuitProgram> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CircuitProgram::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Executes `cli`, printing a summary to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { circuit, init, common } => {
            let cfg = common.resolve()?;
            let program = load_program(&circuit)?;
            let state = parse_state(&init, program.num_qubits())?;
            let report = cmd_run(&program, &state, &cfg, cfg.out_dir()?)?;
            for (x, a) in report.amplitudes.amplitudes().iter().enumerate() {
                writeln!(stdout, "{x}\t{}\t{}", format_float(a.re), format_float(a.im))?;
            }
            writeln!(stdout, "residual\t{}", format_float(report.residual))?;
            for shot in &report.measurements {
                writeln!(stdout, "measured\t{}", shot.bitstring())?;
            }
        }
        Command::Sample { circuit, init, common } => {
            let cfg = common.resolve()?;
            let program = load_program(&circuit)?;
            let state = parse_state(&init, program.num_qubits())?;
            let hist = cmd_sample(&program, &state, &cfg, cfg.out_dir()?)?;
            for (x, c) in hist.counts().iter().enumerate() {
                writeln!(stdout, "{}\t{c}", qmt_core::measurement::bitstring(x, hist.num_qubits()))?;
            }
        }
        Command::Tomo { state, source, exact, common } => {
            let cfg = common.resolve()?;
            let options = TomoOptions { state: parse_state(&state, 2)?, source, exact, mle: MleOptions::default() };
            let report = cmd_tomo(&options, &cfg, cfg.out_dir()?)?;
            writeln!(stdout, "fidelity_linear\t{}", format_float(report.fidelity_linear))?;
            writeln!(stdout, "fidelity_mle\t{}", format_float(report.fidelity_mle))?;
        }
        Command::Estimate { qubits, circuit, f0, out } => {
            let n = match (qubits, circuit) {
                (Some(n), _) => n,
                (None, Some(path)) => load_program(&path)?.num_qubits() as u32,
                (None, None) => bail!("pass --qubits N or --circuit FILE"),
            };
            let e = cmd_estimate(n, f0, out.as_deref())?;
            for (k, v) in estimate_rows(&e) {
                writeln!(stdout, "{k}\t{v}")?;
            }
        }
        Command::Fidelity { ensemble, state, qubit, realizations, common } => {
            let mut cfg = common.resolve()?;
            if cfg.noise.is_ideal() {
                cfg.noise.coefficient_jitter = STATE_SYNTHESIS_JITTER;
            }
            let state = parse_state(&state, 2)?;
            let ensemble = match ensemble {
                EnsembleKind::State => Ensemble::StateSynthesis { state },
                EnsembleKind::Gates => Ensemble::HaarGates { state, qubit },
            };
            let result = cmd_fidelity(ensemble, realizations, &cfg, cfg.out_dir()?)?;
            writeln!(stdout, "mean\t{}", format_float(result.mean))?;
            writeln!(stdout, "median\t{}", format_float(result.median()))?;
        }
    }
    Ok(())
}
