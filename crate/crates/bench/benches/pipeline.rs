use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qmsa_bench::{instance, model, INSTANCES};
use qmsa_core::encoding::enumerate_feasible;
use qmsa_core::{build_energy_diagonal, trial_state, QaoaParams};

fn energy_diagonal(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy_diagonal");
    for &(name, inline) in INSTANCES {
        let m = model(inline);
        group.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| {
            b.iter(|| build_energy_diagonal(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn trial_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_state");
    for &(name, inline) in INSTANCES {
        let m = model(inline);
        let diag = build_energy_diagonal(&m).unwrap();
        let n = m.num_vars();
        for p in [1usize, 3] {
            let params = QaoaParams::new(vec![0.4; p], vec![0.7; p]).unwrap();
            group.bench_with_input(BenchmarkId::new(name, p), &params, |b, params| {
                b.iter(|| trial_state(n, black_box(&diag), params).unwrap())
            });
        }
    }
    group.finish();
}

fn feasible_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_feasible");
    for inline in ["ACG,AC", "ACGTAC,ACG,AC", "ACGTACGT,ACGT,ACG"] {
        let seqs = instance(inline);
        group.bench_with_input(BenchmarkId::from_parameter(inline), &seqs, |b, s| {
            b.iter(|| enumerate_feasible(black_box(s)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, energy_diagonal, trial_states, feasible_enumeration);
criterion_main!(benches);
