mod common;
mod gates;

use criterion::{criterion_group, criterion_main};

criterion_group!(benches, gates::bench, sampling::bench, tomography::bench);
criterion_main!(benches);
