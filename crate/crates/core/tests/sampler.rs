use proptest::prelude::*;

use phi4::lattice::{covariance_band, LatticeSpec};
use phi4::sampler::{
    assemble, classify_regions, cube_norms, default_tau, layer_amplitude, read_snapshot, sample_layer, tail_stats,
    write_snapshot, FieldLayer,
};

fn spec(dim: usize, n: usize) -> LatticeSpec {
    LatticeSpec::new(dim, 1.0, 1.0, 2.0, n).unwrap()
}

fn field(spec: &LatticeSpec, seed: u64) -> phi4::sampler::MultiscaleField {
    assemble((1..=spec.cutoff).map(|h| sample_layer(spec, h, seed).unwrap()).collect()).unwrap()
}

#[test]
fn layers_are_deterministic_per_seed_and_scale() {
    let s = spec(3, 2);
    let a = sample_layer(&s, 2, 5).unwrap();
    let b = sample_layer(&s, 2, 5).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, sample_layer(&s, 2, 6).unwrap().values);
    assert_ne!(sample_layer(&s, 1, 5).unwrap().values, a.values);
}

#[test]
fn empirical_covariance_matches_the_band() {
    for dim in [2, 3] {
        let s = spec(dim, 2);
        let h = 2;
        let band = covariance_band::<f64>(&s, h).unwrap();
        let amp = layer_amplitude(&s, h);
        let n = 6000;
        let mut acc = vec![0.0; s.n_sites()];
        let mut sq = vec![0.0; s.n_sites()];
        for seed in 0..n {
            let l = sample_layer(&s, h, seed).unwrap();
            for x in 0..s.n_sites() {
                let p = amp * amp * l.values[0] * l.values[x];
                acc[x] += p;
                sq[x] += p * p;
            }
        }
        for x in 0..s.n_sites() {
            let mean = acc[x] / n as f64;
            let se = ((sq[x] / n as f64 - mean * mean) / n as f64).sqrt();
            assert!((mean - band.values()[x]).abs() < 5.0 * se + 1e-12, "d={dim} x={x} {mean} {}", band.values()[x]);
        }
    }
}

#[test]
fn assembly_sums_the_layers() {
    let s = spec(3, 3);
    let f = field(&s, 9);
    for x in 0..s.n_sites() {
        let direct: f64 = (1..=3).map(|h| layer_amplitude(&s, h) * f.layer(h).values[x]).sum();
        assert!((f.phi(3)[x] - direct).abs() < 1e-12);
    }
    assert!(f.phi(0).iter().all(|&v| v == 0.0));
    let x = f.x_field(2);
    assert!((x[3] * f.normalization(2) - f.phi(2)[3]).abs() < 1e-12);
    assert!(assemble(vec![sample_layer(&s, 1, 0).unwrap()]).is_err());
    let dup = vec![sample_layer(&s, 1, 0).unwrap(), sample_layer(&s, 1, 1).unwrap(), sample_layer(&s, 2, 0).unwrap()];
    assert!(assemble(dup).is_err());
}

#[test]
fn two_dimensional_normalization_is_square_root_of_scale() {
    let s = spec(2, 3);
    let f = field(&s, 1);
    assert!((f.normalization(3) - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn snapshot_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let l = sample_layer(&spec(2, 3), 3, 42).unwrap();
    write_snapshot(&l, dir.path(), "layer3").unwrap();
    let back = read_snapshot(dir.path(), "layer3").unwrap();
    assert_eq!(back.values, l.values);
    assert_eq!((back.h, back.seed), (3, 42));
    assert_eq!(back.spec, l.spec);
}

#[test]
fn zero_layer_has_zero_norms() {
    let s = spec(3, 2);
    let z = FieldLayer::zero(&s, 2);
    assert!(cube_norms(&z, default_tau(3)).iter().all(|&v| v == 0.0));
}

#[test]
fn tail_probabilities_are_monotone() {
    let s = spec(2, 2);
    let grid: Vec<f64> = (1..=12).map(|i| 0.5 * i as f64).collect();
    let t = tail_stats(&s, 1, &grid, 1000, 3).unwrap();
    assert!(t.rows.windows(2).all(|w| w[1].p_within >= w[0].p_within));
    assert!(t.rows.windows(2).all(|w| w[1].count <= w[0].count));
    assert!(tail_stats(&s, 1, &grid, 10, 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn regions_shrink_as_the_threshold_grows(seed in 0u64..1000, h in 1usize..=2, b in 0.01f64..2.0, factor in 1.0f64..10.0) {
        let s = spec(3, 2);
        let f = field(&s, seed);
        let small = classify_regions(&f, h, b);
        let large = classify_regions(&f, h, b * factor);
        prop_assert!(large.d1.iter().all(|x| small.d1.contains(x)));
        prop_assert!(large.d2.iter().all(|x| small.d2.contains(x)));
        prop_assert!(large.r.iter().all(|x| small.r.contains(x)));
        prop_assert!(!small.chi_b || large.chi_b);
    }
}
