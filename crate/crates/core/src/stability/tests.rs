use super::*;
use crate::lattice::LatticeSpec;

fn reference() -> LatticeSpec {
    LatticeSpec::new(2, 1.0, 1.0, std::f64::consts::SQRT_2, 2).unwrap()
}

fn table() -> Source {
    Source::Table(vec![1.0, 0.5, -0.5, 0.25])
}

#[test]
fn free_ratio_is_gaussian() {
    let cfg = ExperimentConfig::new(reference(), 0.0, table(), 1);
    let est = estimate_Z(&cfg).unwrap();
    let expected = series_by_order(&cfg.spec, 0.0, &cfg.source.on(&cfg.spec).unwrap(), 1).unwrap()[0];
    assert!((est.ratio - expected).abs() < 1e-11 * expected, "{} {}", est.ratio, expected);
    assert!(est.log_z0.abs() < 1e-12);
}

#[test]
fn zero_source_ratio_is_one() {
    let cfg = ExperimentConfig::new(reference(), 0.05, Source::Zero, 1);
    let est = estimate_Z(&cfg).unwrap();
    assert!(est.ratio.abs() < 1e-15);
}

#[test]
fn quadrature_tracks_series() {
    let cfg = ExperimentConfig::new(reference(), 0.05, table(), 2);
    let est = estimate_Z(&cfg).unwrap();
    let f = cfg.source.on(&cfg.spec).unwrap();
    let s3 = series_by_order(&cfg.spec, 0.05, &f, 3).unwrap();
    let s2: f64 = s3[..3].iter().sum();
    assert!((est.per_volume - s2).abs() <= 2.0 * s3[3].abs());
}

#[test]
fn free_sweep_is_flat() {
    let spec = LatticeSpec::new(2, 1.0, 1.0, 2.0, 1).unwrap();
    let cfg = ExperimentConfig::new(spec, 0.0, Source::Zero, 1);
    let sweep = stability_envelope(&cfg, &[1, 2, 3], None).unwrap();
    assert!(sweep.spread < 1e-10 && sweep.all_inside);
}

#[test]
fn free_cumulant_vanishes() {
    let cfg = ExperimentConfig::new(reference(), 0.0, table(), 1);
    let c = nongaussianity(&cfg).unwrap();
    assert!(c.stencil.abs() < 1e-9 && c.moments.abs() < 1e-12, "{c:?}");
}

#[test]
fn cumulant_approaches_first_order_linearly() {
    let at = |lambda: f64| nongaussianity(&ExperimentConfig::new(reference(), lambda, table(), 1)).unwrap();
    let (small, double) = (at(0.0025), at(0.005));
    assert!(small.stencil < 0.0 && small.relative_error < 0.05);
    assert!((small.stencil - small.moments).abs() < 1e-3 * small.moments.abs());
    let ratio = double.relative_error / small.relative_error;
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn sampling_agrees_with_quadrature() {
    let mut cfg = ExperimentConfig::new(reference(), 0.05, table(), 1);
    let exact = estimate_Z(&cfg).unwrap();
    for method in [Method::MonteCarlo, Method::QuasiMonteCarlo] {
        cfg.method = method;
        cfg.samples = 1 << 17;
        cfg.seed = 11;
        let mc = estimate_Z(&cfg).unwrap();
        assert!(mc.per_volume_err > 0.0);
        assert!((mc.per_volume - exact.per_volume).abs() < 3.0 * mc.per_volume_err);
        assert!((mc.ratio - exact.ratio).abs() < 3.0 * mc.ratio_err);
    }
}

#[test]
fn rejects_bad_configs() {
    let mut cfg = ExperimentConfig::new(reference(), -0.1, Source::Zero, 1);
    assert!(estimate_Z(&cfg).is_err());
    cfg.lambda = 0.1;
    cfg.source = Source::Constant(2.0);
    assert!(estimate_Z(&cfg).is_err());
}
