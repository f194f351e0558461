use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniqlab_core::numeric::linspace;
use uniqlab_core::products::TailMode;
use uniqlab_core::uniqueness::{lattice_in_radius, HardyReport};
use uniqlab_core::*;

fn sinc(z: Complex64) -> Complex64 {
    let w = z * PI;
    w.sin() / w
}

#[test]
fn product_over_integers_is_sinc() {
    let zeros = ZeroSet::arithmetic(1.0, 10_000).unwrap();
    let model = ProductModel::new(zeros, 10_000, TailMode::Compensated).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let z = Complex64::from_polar(rng.random_range(0.1..10.0), rng.random_range(0.0..2.0 * PI));
        let v = product_eval(&model, z).unwrap();
        let exact = sinc(z);
        assert!((v.value - exact).norm() <= 1e-6 * exact.norm(), "z={z}");
        assert!(v.certified);
    }
}

#[test]
fn lattice_density_drives_classification_and_scan() {
    let verdict = |alpha: f64| {
        let lam = make_power_lattice(2.0, alpha, 4000, 0.0).unwrap();
        let est = density_functional(&lam, 2.0, 1000).unwrap();
        let spec = PairSpec::new(lam.clone(), lam, 2.0, 1.0, 1.0, 0.0).unwrap();
        classify_pair(&spec, &est, &est).unwrap().kind
    };
    assert_eq!(verdict(0.35), CriticalityKind::Supercritical);
    assert_eq!(verdict(0.65), CriticalityKind::Subcritical);

    let r = uniqueness::scan_radius(2.0, 0.65, 20).unwrap();
    let scan = uniqueness_scan(2.0, &[0.35, 0.65], 20, r).unwrap();
    assert!(scan.sigma_min[0] > scan.sigma_min[1]);
    assert!(scan.rows_lambda.iter().all(|n| *n >= 60));
}

#[test]
fn interpolant_round_trip() {
    let t: Vec<f64> = (1..=4000).map(|j| 0.5 * j as f64).collect();
    let sel = select_uniform_subsequence(&t, 3.0, 2, 0.8, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eta: Vec<Complex64> = (0..300)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    let model = InterpolantModel::build(sel, eta, None, 300).unwrap();
    let rep = verify_interpolation(&model, 20, 1e-6);
    assert!(rep.pass, "{}", rep.max_residual);
    let fit = derivative_lower_bound_fit(&model);
    assert_eq!(fit.violations, 0);
    assert!(model.k() as f64 > fit.k0_fit.max(model.n0_fit()) + 2.0);

    let json = serde_json::to_string(&model.to_record()).unwrap();
    let back: interpolation::InterpolantRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, model.to_record());
}

#[test]
fn hermite_foundation() {
    let basis = HermiteBasis::new(21).unwrap();
    for c in basis.normalization_log() {
        assert!(c.norm_error <= 1e-8);
        assert!(c.ft_error <= 1e-6);
    }
    assert!((hermite_eval(&basis, 0, 0.0).unwrap() - 1.189_207_115_002_721).abs() < 1e-15);
}

#[test]
fn hardy_verdict_matches_degree() {
    let basis = HermiteBasis::new(11).unwrap();
    let lattice = lattice_in_radius(2.0, 0.4, 8.0).unwrap();
    for m in 0..=10 {
        for n in 0..=10 {
            let HardyReport { bounded, .. } = hardy_growth_test(&basis, m, n, &lattice).unwrap();
            assert_eq!(bounded, m <= n);
        }
    }
}

#[test]
fn transfer_reports_hermite_degree() {
    let lattice = lattice_in_radius(2.0, 0.4, 8.0).unwrap();
    let grid = linspace(-8.0, 8.0, 801);
    for n in 0..=6 {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let pair =
            PairSpec::new(lattice.clone(), lattice.clone(), 2.0, 1.0, 1.0, n as f64).unwrap();
        let rep = decay_transfer_experiment(&c, &pair, &grid, &grid).unwrap();
        assert_eq!(rep.weights.k_tilde, Some(n as u32));
    }
}

#[test]
fn sample_sequence_csv_round_trip() {
    let seq = make_power_lattice(1.5, 0.3, 50, 0.0).unwrap();
    let mut buf = Vec::new();
    seq.write_csv(&mut buf).unwrap();
    let back = SampleSequence::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.points(), seq.points());
}
