use super::counterterms::Counterterms;
use super::element::{ElementKind, FeynmanGraph};
use crate::error::{Error, Result};
use crate::lattice::PropagatorKernel;
use crate::scalar::Real;

/// Largest number of coupling and mass vertices integrated without an override.
pub const INTEGRATION_VERTEX_CAP: usize = 4;

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * T::of_usize(i))
}

/// `(-1)^{n+p+r} λⁿ μᵖ / (n! p! r!)`.
pub fn graph_prefactor<T: Real>(g: &FeynmanGraph, ct: &Counterterms<T>) -> T {
    let (n, p, r) = g.shape();
    let sign = if (n + p + r) % 2 == 0 { T::one() } else { -T::one() };
    sign * ct.lambda.powi(n as i32) * ct.mu.powi(p as i32) / (factorial::<T>(n) * factorial::<T>(p) * factorial::<T>(r))
}

/// Value of a labeled graph at fixed vertex positions (one site per element).
pub fn graph_value<T: Real>(
    g: &FeynmanGraph,
    kernel: &PropagatorKernel<T>,
    ct: &Counterterms<T>,
    f: &[T],
    positions: &[usize],
) -> Result<T> {
    if g.is_trivial() {
        return Ok(ct.nu);
    }
    if positions.len() != g.elements.len() {
        return Err(Error::InvalidArgument(format!(
            "{} positions for {} graph elements",
            positions.len(),
            g.elements.len()
        )));
    }
    let mut v = graph_prefactor(g, ct);
    for (e, &x) in g.elements.iter().zip(positions) {
        if e.kind == ElementKind::External {
            v = v * f[x];
        }
    }
    for (a, b) in g.lines() {
        v = v * kernel.between(positions[a], positions[b]);
    }
    Ok(v)
}

/// `∫ W_G` over all element positions with weight `aᵈ` per vertex.
///
/// External elements are summed analytically into `aᵈ Σ_y C_{xy} f_y`;
/// vacuum graphs pin one vertex and multiply by the site count.
pub fn integrated_value<T: Real>(
    g: &FeynmanGraph,
    kernel: &PropagatorKernel<T>,
    ct: &Counterterms<T>,
    f: &[T],
    allow_large: bool,
) -> Result<T> {
    let spec = &kernel.spec;
    let ad = T::of(spec.cell_volume());
    if g.is_trivial() {
        return Ok(ct.nu * T::of(spec.volume()));
    }
    let internal: Vec<usize> = (0..g.elements.len())
        .filter(|&i| g.elements[i].kind != ElementKind::External)
        .collect();
    if internal.len() > INTEGRATION_VERTEX_CAP && !allow_large {
        return Err(Error::SizeGuard(format!(
            "{} internal vertices exceed the cap {INTEGRATION_VERTEX_CAP}",
            internal.len()
        )));
    }
    let n_sites = spec.n_sites();
    let source = smeared_source(kernel, f);
    let mut slot = vec![usize::MAX; g.elements.len()];
    for (j, &i) in internal.iter().enumerate() {
        slot[i] = j;
    }

    let mut constant = T::one();
    let mut internal_lines = Vec::new();
    let mut legs = Vec::new();
    for (a, b) in g.lines() {
        let ea = g.elements[a].kind == ElementKind::External;
        let eb = g.elements[b].kind == ElementKind::External;
        match (ea, eb) {
            (true, true) => {
                let fcf: T = (0..n_sites).map(|x| f[x] * source[x]).sum();
                constant = constant * fcf * ad;
            }
            (true, false) => legs.push(slot[b]),
            (false, true) => legs.push(slot[a]),
            (false, false) => internal_lines.push((slot[a], slot[b])),
        }
    }

    let k = internal.len();
    let pinned = g.count(ElementKind::External) == 0 && k > 0;
    let mut pos = vec![0usize; k];
    let mut total = T::zero();
    let free = if pinned { k - 1 } else { k };
    let count = n_sites.checked_pow(free as u32).ok_or_else(|| Error::SizeGuard("position count overflow".into()))?;
    for idx in 0..count {
        let mut rest = idx;
        for slot_pos in pos.iter_mut().skip(if pinned { 1 } else { 0 }) {
            *slot_pos = rest % n_sites;
            rest /= n_sites;
        }
        let mut v = T::one();
        for &(a, b) in &internal_lines {
            v = v * kernel.between(pos[a], pos[b]);
        }
        for &a in &legs {
            v = v * source[pos[a]];
        }
        total = total + v;
    }
    if pinned {
        total = total * T::of_usize(n_sites);
    }
    Ok(graph_prefactor(g, ct) * constant * total * ad.powi(k as i32))
}

/// `aᵈ Σ_y C_{xy} f_y` for every site `x`.
pub fn smeared_source<T: Real>(kernel: &PropagatorKernel<T>, f: &[T]) -> Vec<T> {
    let spec = &kernel.spec;
    let ad = T::of(spec.cell_volume());
    (0..spec.n_sites())
        .map(|x| (0..spec.n_sites()).map(|y| kernel.between(x, y) * f[y]).sum::<T>() * ad)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{counterterms, enumerate_connected, vacuum_sums};
    use crate::lattice::{covariance_cumulative, LatticeSpec};

    fn setup() -> (LatticeSpec, PropagatorKernel<f64>, Counterterms<f64>) {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
        let k = covariance_cumulative(&s, 2).unwrap();
        let ct = counterterms(&s, 0.1).unwrap();
        (s, k, ct)
    }

    #[test]
    fn single_vertex_vacuum_value() {
        let (_, k, ct) = setup();
        let c = k.at_origin();
        let f = vec![0.0; 16];
        let total: f64 = enumerate_connected(1, 0, 0)
            .unwrap()
            .iter()
            .map(|g| graph_value(g, &k, &ct, &f, &[7]).unwrap())
            .sum();
        assert!((total + 3.0 * 0.1 * c * c).abs() < 1e-14);
    }

    #[test]
    fn tadpole_chain_factor() {
        let (_, k, ct) = setup();
        let f = vec![1.0; 16];
        let (al, x, be) = (1, 6, 11);
        let total: f64 = enumerate_connected(1, 0, 2)
            .unwrap()
            .iter()
            .filter(|g| g.adjacency()[0][0] == 1)
            .map(|g| graph_value(g, &k, &ct, &f, &[x, al, be]).unwrap())
            .sum();
        let want = -6.0 * 0.1 * k.between(al, x) * k.between(x, x) * k.between(x, be);
        assert!((total - want).abs() < 1e-14);
    }

    #[test]
    fn zero_coupling_kills_coupling_graphs() {
        let (_, k, mut ct) = setup();
        ct.lambda = 0.0;
        let f = vec![1.0; 16];
        for g in enumerate_connected(1, 0, 2).unwrap() {
            assert_eq!(graph_value(&g, &k, &ct, &f, &[0, 1, 2]).unwrap(), 0.0);
        }
    }

    #[test]
    fn sunset_and_triangle_vacuum_integrals() {
        let (s, k, ct) = setup();
        let sums = vacuum_sums(&k);
        let f = vec![0.0; 16];
        let lam = ct.lambda;
        let two = enumerate_connected(2, 0, 0).unwrap();
        let sunset: f64 = two
            .iter()
            .filter(|g| g.adjacency()[0][1] == 4)
            .map(|g| integrated_value(g, &k, &ct, &f, false).unwrap())
            .sum();
        assert!((sunset - 12.0 * lam * lam * s.volume() * sums.quartic).abs() < 1e-12 * sunset.abs());
        let three = enumerate_connected(3, 0, 0).unwrap();
        let tri: f64 = three
            .iter()
            .filter(|g| {
                let a = g.adjacency();
                a[0][1] == 2 && a[1][2] == 2 && a[0][2] == 2
            })
            .map(|g| integrated_value(g, &k, &ct, &f, false).unwrap())
            .sum();
        let want = -288.0 * lam.powi(3) * s.volume() * sums.triangle;
        assert!((tri - want).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn external_graphs_vanish_without_source() {
        let (_, k, ct) = setup();
        let f = vec![0.0; 16];
        for g in enumerate_connected(1, 0, 2).unwrap() {
            assert_eq!(integrated_value(&g, &k, &ct, &f, false).unwrap(), 0.0);
        }
    }

    #[test]
    fn cost_guard() {
        let (_, k, ct) = setup();
        let g = FeynmanGraph {
            elements: (0..5)
                .map(|label| super::super::GraphElement { kind: ElementKind::Mass, label })
                .collect(),
            pairing: vec![(1, 2), (3, 4), (5, 6), (7, 8), (9, 0)],
            connected: true,
        };
        let f = vec![0.0; 16];
        assert!(matches!(integrated_value(&g, &k, &ct, &f, false), Err(Error::SizeGuard(_))));
        assert!(integrated_value(&g, &k, &ct, &f, true).is_ok());
    }
}
