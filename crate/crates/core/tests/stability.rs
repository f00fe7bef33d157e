use phi4::lattice::LatticeSpec;
use phi4::stability::{
    average, effective_method, estimate_Z, full_basis, gauss_hermite, nongaussianity, series_by_order, ExperimentConfig,
    Manifest, Method, ModeBasis, Source, MANIFEST_FILE,
};

fn reference() -> LatticeSpec {
    LatticeSpec::new(2, 1.0, 1.0, std::f64::consts::SQRT_2, 2).unwrap()
}

fn table() -> Source {
    Source::Table(vec![1.0, 0.5, -0.5, 0.25])
}

#[test]
fn gauss_hermite_integrates_even_moments() {
    let (x, w) = gauss_hermite(32);
    let moment = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
    assert!((moment(0) - 1.0).abs() < 1e-13);
    assert!((moment(2) - 1.0).abs() < 1e-12);
    assert!((moment(4) - 3.0).abs() < 1e-11);
    assert!((moment(8) - 105.0).abs() < 1e-8);
    assert!(moment(3).abs() < 1e-12);
}

#[test]
fn quadrature_reproduces_the_covariance() {
    let spec = reference();
    let basis: ModeBasis = full_basis(&spec).unwrap();
    let avg = average(&basis, Method::ExactQuadrature, 32, 0, 0, 2, |phi, out| {
        out[0] = phi[0] * phi[0];
        out[1] = phi[0] * phi[3];
    })
    .unwrap();
    let pooled = avg.pooled();
    let kernel = phi4::lattice::covariance_cumulative::<f64>(&spec, 2).unwrap();
    assert!((pooled[0] - kernel.at_origin()).abs() < 1e-12);
    assert!((pooled[1] - kernel.between(0, 3)).abs() < 1e-12);
}

#[test]
fn monte_carlo_with_a_million_samples_matches_quadrature() {
    let mut cfg = ExperimentConfig::new(reference(), 0.05, table(), 1);
    let exact = estimate_Z(&cfg).unwrap();
    cfg.method = Method::MonteCarlo;
    cfg.samples = 1_000_000;
    cfg.seed = 2024;
    let mc = estimate_Z(&cfg).unwrap();
    assert!(mc.points >= 1_000_000);
    assert!(
        (mc.per_volume - exact.per_volume).abs() < 3.0 * mc.per_volume_err,
        "{} vs {} ± {}",
        mc.per_volume,
        exact.per_volume,
        mc.per_volume_err
    );
    assert!(mc.per_volume_err < 1e-2 * exact.per_volume.abs());
}

#[test]
fn sampling_is_reproducible() {
    let mut cfg = ExperimentConfig::new(reference(), 0.05, table(), 1);
    for method in [Method::MonteCarlo, Method::QuasiMonteCarlo] {
        cfg.method = method;
        cfg.samples = 4096;
        cfg.seed = 3;
        let a = estimate_Z(&cfg).unwrap();
        let b = estimate_Z(&cfg).unwrap();
        assert_eq!(a.per_volume.to_bits(), b.per_volume.to_bits());
        cfg.seed = 4;
        assert_ne!(estimate_Z(&cfg).unwrap().per_volume.to_bits(), a.per_volume.to_bits());
    }
}

#[test]
fn small_couplings_approach_the_series() {
    let cfg = |lambda| ExperimentConfig::new(reference(), lambda, table(), 1);
    let f = table().on(&reference()).unwrap();
    let gap = |lambda: f64| {
        let est = estimate_Z(&cfg(lambda)).unwrap().per_volume;
        let s: f64 = series_by_order(&reference(), lambda, &f, 1).unwrap().iter().sum();
        (est - s).abs()
    };
    let (a, b) = (gap(0.005), gap(0.01));
    assert!(b / a > 3.0 && b / a < 5.0, "{a} {b}");
}

#[test]
fn large_lattices_fall_back_or_refuse() {
    let spec = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
    let cfg = ExperimentConfig::new(spec, 0.05, Source::Zero, 1);
    assert_ne!(effective_method(&cfg, &full_basis(&cfg.spec).unwrap()), Method::ExactQuadrature);
    let huge = ExperimentConfig::new(LatticeSpec::new(2, 1.0, 1.0, 2.0, 6).unwrap(), 0.05, Source::Zero, 1);
    assert!(matches!(huge.validate(), Err(phi4::Error::SizeGuard(_))));
}

#[test]
fn cumulant_estimators_agree() {
    let c = nongaussianity(&ExperimentConfig::new(reference(), 0.01, table(), 1)).unwrap();
    assert!(c.stencil < 0.0 && c.prediction < 0.0);
    assert!((c.stencil - c.moments).abs() < 1e-2 * c.moments.abs());
}

#[test]
fn manifest_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let m = Manifest::new("stability", vec!["--lambda".into(), "0.05".into()], serde_json::json!({"lambda": 0.05}), None);
    m.write(dir.path()).unwrap();
    let back: Manifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(back.command, "stability");
    assert!(!back.rng_scheme.is_empty());
}
