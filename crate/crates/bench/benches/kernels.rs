use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use uniqlab_core::uniqueness::{lattice_in_radius, scan_radius};
use uniqlab_core::{
    build_sampling_operator, product_eval, select_uniform_subsequence, smallest_singular_value,
    Complex64, HermiteBasis, InterpolantModel, PairSpec, ProductModel, TailMode, ZeroSet,
};

fn product(c: &mut Criterion) {
    let model = ProductModel::new(
        ZeroSet::arithmetic(1.0, 10_000).unwrap(),
        10_000,
        TailMode::Compensated,
    )
    .unwrap();
    let z = Complex64::new(3.3, 1.7);
    c.bench_function("product_eval_1e4_zeros", |b| {
        b.iter(|| product_eval(&model, black_box(z)).unwrap())
    });
}

fn sampling_svd(c: &mut Criterion) {
    let basis = HermiteBasis::new(41).unwrap();
    let r = scan_radius(2.0, 0.7, 40).unwrap();
    let lattice = lattice_in_radius(2.0, 0.5, r).unwrap();
    let pair = PairSpec::with_exponents(lattice.clone(), lattice, 2.0, 2.0, 1.0, 1.0, 0.0).unwrap();
    let op = build_sampling_operator(&pair, &basis, r, None).unwrap();
    c.bench_function("smallest_singular_value_n40", |b| {
        b.iter(|| smallest_singular_value(black_box(&op)).unwrap())
    });
}

fn interpolant(c: &mut Criterion) {
    let nodes: Vec<f64> = (1..=4000).map(f64::from).collect();
    let sel = select_uniform_subsequence(&nodes, 2.0, 1, 1.5, 1).unwrap();
    let eta = vec![Complex64::new(1.0, 0.0); 500];
    let model = InterpolantModel::build(sel, eta, None, 500).unwrap();
    let z = Complex64::new(17.25, 2.0);
    c.bench_function("interpolant_eval_500_terms", |b| {
        b.iter(|| model.eval(black_box(z)))
    });
}

criterion_group!(benches, product, sampling_svd, interpolant);
criterion_main!(benches);
