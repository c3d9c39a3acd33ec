use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cstar_pmu::corpus::instance;
use cstar_pmu::groupoid_pmu::{assemble_bundle, build_bundle, identify_legs};
use cstar_pmu::pmu::check_pmu;

const TOL: f64 = 1e-9;

fn assemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_bundle");
    for id in ["z2", "z3", "pair2", "action-z2-ab"] {
        let inst = instance(id).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(id), &inst, |b, inst| {
            b.iter(|| assemble_bundle(&inst.groupoid, &inst.haar, &inst.mu, TOL).unwrap())
        });
    }
    group.finish();
}

fn pentagon(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_pmu");
    group.sample_size(10);
    for id in ["z3", "pair2", "bundle-z2-z3"] {
        let inst = instance(id).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(id), &inst, |b, inst| {
            b.iter(|| {
                let bundle = assemble_bundle(&inst.groupoid, &inst.haar, &inst.mu, TOL).unwrap();
                check_pmu(&bundle.v, TOL).unwrap()
            })
        });
    }
    group.finish();
}

fn legs(c: &mut Criterion) {
    let mut group = c.benchmark_group("identify_legs");
    group.sample_size(10);
    for id in ["z3", "pair2"] {
        let inst = instance(id).unwrap();
        let bundle = build_bundle(&inst.groupoid, &inst.haar, &inst.mu, TOL).unwrap();
        group.bench_function(id, |b| b.iter(|| identify_legs(&bundle, TOL).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, assemble, pentagon, legs);
criterion_main!(benches);
