use super::*;
use crate::graphs::{counterterms, logZ_series};
use crate::lattice::LatticeSpec;

fn reference() -> LatticeSpec {
    LatticeSpec::new(2, 1.0, 1.0, std::f64::consts::SQRT_2, 2).unwrap()
}

fn source() -> Vec<f64> {
    vec![1.0, 0.5, -0.5, 0.25]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn martingale_at_every_scale() {
    let spec = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
    for h in 1..=spec.cutoff {
        let v = wick_quartic(&spec, h, 0.3, 1).unwrap();
        let down = truncated_integrate(&v, 1).unwrap();
        let expected = wick_quartic(&spec, h - 1, 0.3, 1).unwrap();
        assert!(down.distance(&expected) < 1e-10, "scale {h}");
    }
}

#[test]
fn constant_matches_series_and_graphs() {
    let spec = reference();
    for f in [vec![0.0; 4], source()] {
        for j in 1..=3 {
            let lambda = 0.05;
            let ct = counterterms(&spec, lambda).unwrap();
            let v = bare_potential(&spec, &ct, &f, j).unwrap();
            let chain = integrate_down(&v, j, 0).unwrap();
            let constant = chain.last().unwrap().constant();
            let series = logZ_series(&spec, lambda, &f, j).unwrap();
            let graphs = field_independent_part_with_source(&spec, j, 0, lambda, &f).unwrap();
            for k in 0..=j {
                let vol = spec.volume();
                let tol = 1e-8 * series.terms[k].abs() + 1e-14;
                assert!((constant[k] / vol - series.terms[k]).abs() < tol, "j={j} k={k} f={f:?} {} {}", constant[k] / vol, series.terms[k]);
                assert!((graphs.by_order[k] - series.terms[k]).abs() < tol, "j={j} k={k} {} {}", graphs.by_order[k], series.terms[k]);
            }
        }
    }
}

#[test]
fn constant_identity_in_three_dimensions() {
    let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap();
    let lambda = 0.05;
    let f: Vec<f64> = (0..8).map(|i| 0.1 * i as f64 - 0.3).collect();
    let ct = counterterms(&spec, lambda).unwrap();
    let v = bare_potential(&spec, &ct, &f, 2).unwrap();
    let out = truncated_integrate(&v, 2).unwrap();
    let series = logZ_series(&spec, lambda, &f, 2).unwrap();
    for k in 0..=2 {
        assert!(rel(out.constant()[k] / spec.volume(), series.terms[k]) < 1e-8 || series.terms[k].abs() < 1e-14);
    }
}

#[test]
fn truncation_is_consistent() {
    let spec = reference();
    let ct = counterterms(&spec, 0.1).unwrap();
    let v3 = bare_potential(&spec, &ct, &source(), 3).unwrap();
    let v1 = bare_potential(&spec, &ct, &source(), 1).unwrap();
    let a = truncated_integrate(&v3, 3).unwrap();
    let b = truncated_integrate(&v1, 1).unwrap();
    let a1 = PotentialFunctional { poly: a.poly.truncate(1), ..a };
    assert!(a1.distance(&b) < 1e-12);
}

#[test]
fn zero_potential_stays_zero() {
    let spec = reference();
    let v = PotentialFunctional::<f64>::zero(&spec, 2, 0.1, 2);
    assert!(truncated_integrate(&v, 2).unwrap().poly.is_empty());
}

#[test]
fn bare_split_reproduces_local_constants() {
    for spec in [reference(), LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap()] {
        let lambda = 0.2;
        let ct = counterterms(&spec, lambda).unwrap();
        let v = bare_potential(&spec, &ct, &source_for(&spec), 3).unwrap();
        let split = relevant_split(&v).unwrap();
        let r = split.rescaled.clone().unwrap();
        let bare = bare_constants(&spec, lambda).unwrap();
        assert!(rel(r.quartic, lambda) < 1e-12);
        assert!(rel(r.mass, bare.mass) < 1e-12);
        assert!(rel(r.vacuum, bare.vacuum) < 1e-12);
        assert!(split.irrelevant.is_empty() && split.gradient.is_empty());
        assert!(split.field_independent.iter().all(|e| e.abs() < 1e-12));
        assert!(split.recombine().add_scaled(&v.poly, -1.0).sup_norm() < 1e-12);
    }
}

fn source_for(spec: &LatticeSpec) -> Vec<f64> {
    (0..spec.n_sites()).map(|i| ((i * 3) % 5) as f64 / 4.0 - 0.5).collect()
}

#[test]
fn split_after_integration_recombines() {
    let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap();
    let ct = counterterms(&spec, 0.1).unwrap();
    let v = bare_potential(&spec, &ct, &source_for(&spec), 2).unwrap();
    let down = truncated_integrate(&v, 2).unwrap();
    let split = relevant_split(&down).unwrap();
    assert!(split.recombine().add_scaled(&down.poly, -1.0).sup_norm() < 1e-12);
}

#[test]
fn free_potential_has_only_source_and_constant() {
    let spec = reference();
    let mut v = PotentialFunctional::zero(&spec, 2, 0.0, 2);
    for (x, &fx) in source().iter().enumerate() {
        v.poly.add_term(vec![(x as u32, 1)], 0, -fx * spec.cell_volume());
    }
    let out = truncated_integrate(&v, 2).unwrap();
    let split = relevant_split(&out).unwrap();
    assert!(split.local.quartic.iter().chain(&split.local.quadratic).flatten().all(|&q| q == 0.0));
    assert!(split.irrelevant.is_empty() && split.gradient.is_empty());
    assert!(split.local.linear.iter().flatten().any(|&q| q != 0.0));
}

#[test]
fn field_independent_part_endpoints_and_growth() {
    let spec = reference();
    let lambda = 0.05f64;
    let top = field_independent_part(&spec, 2, spec.cutoff, lambda).unwrap();
    assert!(top.total().abs() < 1e-14);
    let mut last = 0.0f64;
    for h in (0..spec.cutoff).rev() {
        let e = field_independent_part(&spec, 2, h, lambda).unwrap().total().abs();
        assert!(e >= last - 1e-15, "h={h}");
        last = e;
    }
    let zero = field_independent_part(&spec, 2, 0, lambda).unwrap();
    let s = logZ_series(&spec, lambda, &[0.0; 4], 2).unwrap();
    assert!((zero.total() - s.total()).abs() <= 1e-8 * s.total().abs().max(1e-12));
}

#[test]
fn split_constant_matches_graphs_at_each_scale() {
    let spec = reference();
    let lambda = 0.05;
    let ct = counterterms(&spec, lambda).unwrap();
    let v = bare_potential(&spec, &ct, &vec![0.0; spec.n_sites()], 2).unwrap();
    for p in integrate_down(&v, 2, 0).unwrap() {
        let split = relevant_split(&p).unwrap();
        let e = field_independent_part(&spec, 2, p.scale, lambda).unwrap();
        for k in 0..=2 {
            let ours = split.field_independent[k] / spec.volume();
            assert!((ours - e.by_order[k]).abs() < 1e-10 * e.by_order[k].abs().max(1e-6), "h={} k={k}", p.scale);
        }
    }
}

#[test]
fn gradient_kernel_is_nonnegative() {
    let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 2).unwrap();
    for h in 0..spec.cutoff {
        let p = gradient_kernel_profile(&spec, h, 0.1).unwrap();
        assert!(p.min_value >= 0.0, "h={h} min {}", p.min_value);
        assert!(p.ratio_low > 0.0 && p.ratio_high.is_finite());
    }
}

#[test]
fn summability_matches_threshold() {
    for dim in [2, 3] {
        for j in 0..=4 {
            let c = summability_check(j, dim, 0.1, 1.0, 2.0, 1.0, 64).unwrap();
            assert_eq!(c.numerically_convergent, c.predicted_convergent, "d={dim} j={j}");
        }
    }
}

#[test]
fn size_guard_trips() {
    let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 2).unwrap();
    let ct = counterterms(&spec, 0.1).unwrap();
    let v = bare_potential(&spec, &ct, &vec![0.0; spec.n_sites()], 3).unwrap();
    assert!(matches!(truncated_integrate(&v, 3), Err(crate::Error::SizeGuard(_))));
}

#[test]
fn flow_report_round_trips() {
    let spec = reference();
    let report = run_flow(&spec, 0.05, &source(), 2, 1.0, 1.0).unwrap();
    assert_eq!(report.steps.len(), spec.cutoff + 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.json");
    report.write_json(&path).unwrap();
    let back: FlowReport = serde_json::from_reader(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.steps.len(), report.steps.len());
}
