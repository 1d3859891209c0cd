use criterion::{criterion_group, criterion_main, Criterion};
use plankton_qso::dynamics::{iterate, IterateOptions};
use plankton_qso::stability::{eigenvalues, jacobian};
use plankton_qso::{enumerate_fixed_points, Parameters, Qso, QsoTensor, SimplexPoint};
use std::hint::black_box;

fn qso() -> Qso {
    let rates = [
        0.6, 0.2, 0.15, 0.3, 0.25, 0.2, 0.4, 0.2, 0.15, 0.5, 0.45, 0.2,
    ];
    Qso::new(Parameters::new(rates).unwrap()).unwrap()
}

fn benches(c: &mut Criterion) {
    let q = qso();
    let x = SimplexPoint::new([0.2, 0.1, 0.1, 0.2, 0.2, 0.2]).unwrap();
    let t = QsoTensor::build(&q);

    c.bench_function("apply", |b| b.iter(|| q.apply(black_box(&x)).unwrap()));
    c.bench_function("tensor_apply", |b| {
        b.iter(|| t.apply(black_box(&x)).unwrap())
    });
    c.bench_function("tensor_build", |b| {
        b.iter(|| QsoTensor::build(black_box(&q)))
    });
    c.bench_function("enumerate_fixed_points", |b| {
        b.iter(|| enumerate_fixed_points(black_box(&q), None))
    });
    let j = jacobian(&q, x.coords());
    c.bench_function("eigenvalues", |b| {
        b.iter(|| eigenvalues(black_box(&j)).unwrap())
    });
    let opts = IterateOptions::default().without_history();
    c.bench_function("iterate_to_convergence", |b| {
        b.iter(|| iterate(&q, black_box(&x), &opts).unwrap())
    });
}

criterion_group!(operator, benches);
criterion_main!(operator);
