use criterion::{BenchmarkId, Criterion};
use qmt_core::projection::{apply_controlled_signal, apply_gate_signal};
use qmt_core::{FrequencyLayout, SampledBackend, SignalBackend, TonalBackend};

use crate::common;

fn single_qubit<B: SignalBackend>(c: &mut Criterion, backend: &B) {
    let mut group = c.benchmark_group(format!("gate/{}", backend.name()));
    let gate = common::gate();
    for n in [2, 4, 6, 8] {
        let layout = FrequencyLayout::octave(n).unwrap();
        let signal = backend.synthesize(&common::state(n), &layout).unwrap();
        group.bench_with_input(BenchmarkId::new("single", n), &n, |b, &n| {
            b.iter(|| apply_gate_signal(&signal, &layout, &gate, n - 1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("controlled", n), &n, |b, &n| {
            b.iter(|| apply_controlled_signal(&signal, &layout, &gate, n - 1, 0).unwrap())
        });
    }
    group.finish();
}

pub fn bench(c: &mut Criterion) {
    single_qubit(c, &TonalBackend);
    single_qubit(c, &SampledBackend::default());

    let mut group = c.benchmark_group("gate/oracle");
    let gate = common::gate();
    for n in [2, 4, 6, 8] {
        let state = common::state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| state.apply_gate(&gate, n - 1).unwrap())
        });
    }
    group.finish();
}
