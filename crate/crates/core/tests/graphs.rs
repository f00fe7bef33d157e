use proptest::prelude::*;

use phi4::graphs::{
    aggregate_topologies, counterterms, enumerate_all, enumerate_connected, graph_prefactor, graph_value,
    integrated_value, logZ_series, wick_oracle, ElementKind,
};
use phi4::lattice::{covariance_cumulative, LatticeSpec};

fn reference() -> LatticeSpec {
    LatticeSpec::new(2, 1.0, 1.0, std::f64::consts::SQRT_2, 2).unwrap()
}

fn shape_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..=2, 0usize..=4, 0usize..=8).prop_filter("at most 8 even half-lines", |&(n, p, r)| {
        let m = 4 * n + 2 * p + r;
        m > 0 && m <= 8 && m % 2 == 0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matchings_reproduce_gaussian_moments(shape in shape_strategy(), seeds in proptest::collection::vec(0usize..16, 12)) {
        let (n, p, r) = shape;
        let spec = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
        let kernel = covariance_cumulative::<f64>(&spec, 2).unwrap();
        let ct = counterterms(&spec, 0.2).unwrap();
        let ones = vec![1.0; spec.n_sites()];
        let graphs = enumerate_all(n, p, r).unwrap();
        let positions = &seeds[..graphs[0].elements.len()];
        let summed: f64 = graphs
            .iter()
            .map(|g| graph_value(g, &kernel, &ct, &ones, positions).unwrap() / graph_prefactor(g, &ct))
            .sum();
        let factors: Vec<(usize, usize)> =
            graphs[0].elements.iter().zip(positions).map(|(e, &x)| (x, e.kind.half_lines())).collect();
        let moment = wick_oracle(&factors, &kernel).unwrap();
        prop_assert!((summed - moment).abs() <= 1e-10 * moment.abs().max(1e-300));
    }

    #[test]
    fn source_series_is_even_and_quadratic_at_zeroth_order(scale in -1.0f64..1.0) {
        let spec = reference();
        let f: Vec<f64> = [1.0, 0.5, -0.5, 0.25].iter().map(|v| v * scale).collect();
        let g: Vec<f64> = f.iter().map(|v| -v).collect();
        let a = logZ_series(&spec, 0.05, &f, 2).unwrap();
        let b = logZ_series(&spec, 0.05, &g, 2).unwrap();
        for k in 0..=2 {
            prop_assert!((a.terms[k] - b.terms[k]).abs() <= 1e-13 * a.terms[k].abs().max(1e-12));
        }
        let unit = logZ_series(&spec, 0.05, &[1.0, 0.5, -0.5, 0.25], 0).unwrap().terms[0];
        prop_assert!((a.terms[0] - scale * scale * unit).abs() <= 1e-13 * unit.abs());
    }
}

#[test]
fn known_connected_counts() {
    assert_eq!(enumerate_all(2, 0, 0).unwrap().len(), 105);
    assert_eq!(enumerate_connected(2, 0, 0).unwrap().len(), 96);
    assert_eq!(enumerate_connected(1, 0, 2).unwrap().len(), 12);
    assert_eq!(enumerate_connected(0, 0, 2).unwrap().len(), 1);
    assert_eq!(enumerate_connected(0, 0, 0).unwrap().len(), 1);
    assert!(enumerate_all(1, 0, 1).is_err());
    assert!(matches!(enumerate_all(5, 0, 0), Err(phi4::Error::SizeGuard(_))));
}

#[test]
fn topologies_partition_the_labeled_graphs() {
    let graphs = enumerate_connected(2, 0, 2).unwrap();
    let tops = aggregate_topologies(&graphs);
    assert_eq!(tops.iter().map(|t| t.matchings).sum::<usize>(), graphs.len());
    let vacuum = aggregate_topologies(&enumerate_connected(2, 0, 0).unwrap());
    assert_eq!(vacuum.len(), 2);
}

#[test]
fn integrated_value_matches_brute_force() {
    let spec = reference();
    let kernel = covariance_cumulative::<f64>(&spec, 2).unwrap();
    let ct = counterterms(&spec, 0.1).unwrap();
    let f = vec![1.0, 0.5, -0.5, 0.25];
    let ad = spec.cell_volume();
    for g in enumerate_connected(1, 1, 2).unwrap().iter().take(6) {
        let k = g.elements.len();
        let mut brute = 0.0;
        for idx in 0..spec.n_sites().pow(k as u32) {
            let positions: Vec<usize> = (0..k).map(|i| idx / spec.n_sites().pow(i as u32) % spec.n_sites()).collect();
            brute += graph_value(g, &kernel, &ct, &f, &positions).unwrap() * ad.powi(k as i32);
        }
        let fast = integrated_value(g, &kernel, &ct, &f, false).unwrap();
        assert!((fast - brute).abs() <= 1e-12 * brute.abs().max(1e-14), "{fast} {brute}");
        assert_eq!(g.count(ElementKind::External), 2);
    }
}

#[test]
fn precision_generic_series() {
    let spec = reference();
    let f64_terms = logZ_series(&spec, 0.05f64, &[1.0, 0.5, -0.5, 0.25], 2).unwrap().terms;
    let f32_terms = logZ_series(&spec, 0.05f32, &[1.0, 0.5, -0.5, 0.25], 2).unwrap().terms;
    for (a, b) in f64_terms.iter().zip(&f32_terms) {
        assert!((a - *b as f64).abs() <= 1e-4 * a.abs().max(1e-6), "{a} {b}");
    }
}
