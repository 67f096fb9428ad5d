//! Engine throughput: full protocol runs on the free-fermion backend at
//! production scale, and the dense backends at oracle scale.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kzsim_core::dense::density::{DensityMatrix, PauliChannelRates};
use kzsim_core::dense::noisy::{run_noisy_circuit, NoiseModel};
use kzsim_core::dense::statevector::{apply_circuit_statevector, DenseState};
use kzsim_core::majorana;
use kzsim_core::{build_schedule, PerturbedSchedule};

fn ideal(l: usize, n: usize) -> PerturbedSchedule {
    let schedule = build_schedule(n).unwrap();
    PerturbedSchedule::ideal(&schedule, l).unwrap()
}

fn bench_majorana(c: &mut Criterion) {
    let mut group = c.benchmark_group("majorana_protocol");
    for (l, n) in [(64, 64), (256, 256)] {
        let perturbed = ideal(l, n);
        group.bench_with_input(
            BenchmarkId::new("run", format!("L{l}_N{n}")),
            &perturbed,
            |b, p| b.iter(|| majorana::defect_density(&majorana::run_protocol(p).unwrap())),
        );
    }
    group.finish();
}

fn bench_statevector(c: &mut Criterion) {
    let perturbed = ideal(10, 20);
    c.bench_function("statevector_protocol/L10_N20", |b| {
        b.iter(|| {
            let mut state = DenseState::plus_state(10).unwrap();
            apply_circuit_statevector(&mut state, &perturbed).unwrap();
            state.defect_density()
        })
    });
}

fn bench_density(c: &mut Criterion) {
    let perturbed = ideal(6, 10);
    let model = NoiseModel::Pauli(PauliChannelRates::uniform_with_fidelity(0.99).unwrap());
    c.bench_function("density_pauli_protocol/L6_N10", |b| {
        b.iter(|| run_noisy_circuit(&perturbed, &model).unwrap().defect_density())
    });
    c.bench_function("density_plus_state/L6", |b| {
        b.iter(|| DensityMatrix::plus_state(6).unwrap().defect_density())
    });
}

criterion_group!(benches, bench_majorana, bench_statevector, bench_density);
criterion_main!(benches);
