use std::process::Command;

use proptest::prelude::*;
use qmt_cli::{
    cmd_run, cmd_sample, parse_state, tomography, BackendKind, FirConfig, RunConfig, SourceKind, TomoOptions,
};
use qmt_core::analysis::{haar_gate, random_state, DensityMatrix, MleOptions};
use qmt_core::rng::{stream_rng, Stream};
use qmt_core::{CircuitProgram, Complex64, NoiseConfig, StateVector};
use rand::Rng;

fn sampled() -> RunConfig {
    RunConfig { backend: BackendKind::Sampled, ..RunConfig::default() }
}

fn bell() -> CircuitProgram {
    CircuitProgram::parse("qubits 2\nh 1\ncnot 1 0\n").unwrap()
}

#[test]
fn bell_amplitudes_on_both_backends() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected =
        StateVector::new(2, vec![Complex64::new(h, 0.0), 0.0.into(), 0.0.into(), Complex64::new(h, 0.0)]).unwrap();
    for cfg in [RunConfig::default(), sampled()] {
        let report = cmd_run(&bell(), &StateVector::zero(2).unwrap(), &cfg, dir.path()).unwrap();
        assert!(report.amplitudes.max_abs_diff(&expected) < 1e-12);
        assert!(report.residual < 1e-20);
        assert!(report.measurements.is_empty());
    }
    for name in ["signal.csv", "spectrum.csv", "amplitudes.csv"] {
        assert!(dir.path().join(name).exists());
    }
}

#[test]
fn bell_histogram_is_even_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { shots: 10_000, seed: 4, ..RunConfig::default() };
    let hist = cmd_sample(&bell(), &StateVector::zero(2).unwrap(), &cfg, dir.path()).unwrap();
    let c = hist.counts();
    assert_eq!(c[1] + c[2], 0);
    assert!((c[0] as f64 / 10_000.0 - 0.5).abs() < 0.02, "{c:?}");
    let csv = std::fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert!(csv.starts_with("outcome,count,frequency\n00,"));
}

#[test]
fn basis_program_gives_single_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let program = CircuitProgram::parse("qubits 3\nx 0\nx 2\nmeasure_all\n").unwrap();
    let cfg = RunConfig { shots: 500, ..sampled() };
    let hist = cmd_sample(&program, &StateVector::zero(3).unwrap(), &cfg, dir.path()).unwrap();
    assert_eq!(hist.counts()[0b101], 500);
}

fn random_program(n: usize, seed: u64) -> CircuitProgram {
    let mut rng = stream_rng(seed, Stream::Gates, 0);
    let mut p = CircuitProgram::new(n).unwrap();
    for _ in 0..6 {
        p.gate(haar_gate(&mut rng), rng.random_range(0..n)).unwrap();
        if n > 1 {
            let c = rng.random_range(0..n);
            let t = (c + 1 + rng.random_range(0..n - 1)) % n;
            p.controlled(haar_gate(&mut rng), c, t).unwrap();
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn backends_agree_on_amplitudes(n in 1usize..=4, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let program = random_program(n, seed);
        let init = random_state(n, &mut stream_rng(seed, Stream::Dressing, 0)).unwrap();
        let tonal = cmd_run(&program, &init, &RunConfig::default(), dir.path()).unwrap();
        let sampled = cmd_run(&program, &init, &sampled(), dir.path()).unwrap();
        prop_assert!(tonal.amplitudes.max_abs_diff(&sampled.amplitudes) <= 1e-8);
        prop_assert!(tonal.amplitudes.max_abs_diff(&program.apply_to_state(&init).unwrap()) <= 1e-12);
    }
}

#[test]
fn fir_filters_stay_close_to_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let program = random_program(2, 3);
    let init = StateVector::singlet();
    let cfg = RunConfig { fir: Some(FirConfig { taps: 257, grid: 16 }), ..sampled() };
    let report = cmd_run(&program, &init, &cfg, dir.path()).unwrap();
    let err = report.amplitudes.max_abs_diff(&program.apply_to_state(&init).unwrap());
    assert!(err > 0.0 && err < 1e-2, "{err}");
}

fn tomo(state: StateVector, source: SourceKind, exact: bool, cfg: RunConfig) -> qmt_cli::TomoReport {
    tomography(&TomoOptions { state, source, exact, mle: MleOptions::default() }, &cfg).unwrap()
}

#[test]
fn tomography_examples() {
    let zero = tomo(StateVector::zero(2).unwrap(), SourceKind::Pure, true, RunConfig::default());
    assert!(zero.fidelity_mle >= 1.0 - 1e-6);

    let singlet = tomo(
        StateVector::singlet(),
        SourceKind::Pure,
        false,
        RunConfig { shots: 1000, seed: 1, ..RunConfig::default() },
    );
    assert!(singlet.fidelity_mle >= 0.99);

    let mixed =
        tomo(StateVector::singlet(), SourceKind::Mixed, false, RunConfig { shots: 4000, ..RunConfig::default() });
    assert!(mixed.mle.rho.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 0.05);
    let eig = mixed.mle.rho.eigenvalues();
    assert!(eig[0] >= -1e-12 && (mixed.mle.rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn noisy_tomography_degrades() {
    let clean = tomo(StateVector::singlet(), SourceKind::Pure, false, RunConfig { shots: 500, ..RunConfig::default() });
    let noisy_cfg = RunConfig { shots: 500, noise: NoiseConfig::jitter(0.2), ..RunConfig::default() };
    let noisy = tomo(StateVector::singlet(), SourceKind::Pure, false, noisy_cfg);
    assert!(noisy.fidelity_mle < clean.fidelity_mle);
}

#[test]
fn exact_mode_rejects_dressed_source() {
    let options = TomoOptions {
        state: StateVector::singlet(),
        source: SourceKind::Dressed,
        exact: true,
        mle: MleOptions::default(),
    };
    assert!(tomography(&options, &RunConfig::default()).is_err());
}

#[test]
fn state_specs_parse() {
    assert_eq!(parse_state("bell", 2).unwrap(), StateVector::bell());
    assert!(parse_state("1,1,1", 2).is_err());
}

fn emu(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_emu")).args(args).output().unwrap()
}

#[test]
fn binary_reports_parse_errors_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "qubits 2\nh 0\ncnot 0 0\n").unwrap();
    let out = emu(&["run", "--circuit", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn binary_rejects_white_noise_on_tonal_backend() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "qubits 1\nh 0\n").unwrap();
    let out = emu(&[
        "run",
        "--circuit",
        path.to_str().unwrap(),
        "--noise-sigma",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let ok = emu(&[
        "run",
        "--circuit",
        path.to_str().unwrap(),
        "--backend",
        "sampled",
        "--noise-sigma",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.txt");
    std::fs::write(&circuit, "qubits 2\nh 1\ncnot 1 0\nmeasure_all\n").unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, format!("backend = \"sampled\"\nshots = 300\nout = {:?}\n", dir.path().join("a"))).unwrap();
    let c = circuit.to_str().unwrap();
    let out = emu(&["sample", "--circuit", c, "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hist = std::fs::read_to_string(dir.path().join("a/histogram.csv")).unwrap();
    let total: u64 = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 300);

    let b = dir.path().join("b");
    let out = emu(&[
        "sample",
        "--circuit",
        c,
        "--config",
        config.to_str().unwrap(),
        "--shots",
        "50",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let hist = std::fs::read_to_string(b.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum::<u64>(), 50);
}

#[test]
fn estimate_prints_quantities() {
    let out = emu(&["estimate", "--qubits", "2", "--f0", "1000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bandwidth_hz\t4000"));
    assert!(text.contains("comb_passbands\t1"));
    assert!(!emu(&["estimate"]).status.success());
}

#[test]
fn different_seeds_change_sampled_output() {
    let dir = tempfile::tempdir().unwrap();
    let a =
        cmd_sample(&bell(), &StateVector::zero(2).unwrap(), &RunConfig { seed: 1, ..RunConfig::default() }, dir.path())
            .unwrap();
    let b =
        cmd_sample(&bell(), &StateVector::zero(2).unwrap(), &RunConfig { seed: 2, ..RunConfig::default() }, dir.path())
            .unwrap();
    assert_ne!(a.counts(), b.counts());
}
