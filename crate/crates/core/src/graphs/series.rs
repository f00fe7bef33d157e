use serde::{Deserialize, Serialize};

use super::counterterms::{counterterms_from_kernel, Counterterms};
use super::expansion::{SeriesExpansion, VertexKind};
use crate::error::{Error, Result};
use crate::lattice::{covariance_cumulative, LatticeSpec, PropagatorKernel};
use crate::scalar::Real;

pub const MAX_SERIES_ORDER: usize = 3;
/// Largest `tuples × n_sites^k` work for which a kernel table is filled.
pub const KERNEL_TABLE_CAP: usize = 1 << 16;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchwingerEntry<T> {
    pub order: usize,
    pub legs: usize,
    pub points: Vec<usize>,
    pub value: T,
}

/// Kernels `S^{(k)}_{2n}` on tuples whose first point is the origin.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SchwingerKernelTable<T> {
    pub entries: Vec<SchwingerEntry<T>>,
}

impl<T: Real> SchwingerKernelTable<T> {
    pub fn build(expansion: &SeriesExpansion<T>) -> Self {
        let n = expansion.kernel.spec.n_sites();
        let mut entries = Vec::new();
        for k in 0..=expansion.order {
            for legs in [2usize, 4] {
                let free = legs - 1;
                let Some(count) = n.checked_pow(free as u32) else {
                    continue;
                };
                if n.checked_pow(k as u32).and_then(|w| w.checked_mul(count)).is_none_or(|w| w > KERNEL_TABLE_CAP) {
                    continue;
                }
                for idx in 0..count {
                    let mut rest = idx;
                    let mut points = vec![0usize];
                    for _ in 0..free {
                        points.push(rest % n);
                        rest /= n;
                    }
                    let value = expansion.kernel_at(k, &points);
                    entries.push(SchwingerEntry { order: k, legs, points, value });
                }
            }
        }
        Self { entries }
    }

    pub fn get(&self, order: usize, points: &[usize]) -> Option<T> {
        self.entries
            .iter()
            .find(|e| e.order == order && e.points == points)
            .map(|e| e.value)
    }

    /// CSV rows `k,2n,points,value` with points joined by `;`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,legs,points,value")?;
        for e in &self.entries {
            let pts: Vec<String> = e.points.iter().map(|p| p.to_string()).collect();
            writeln!(w, "{},{},{},{}", e.order, e.legs, pts.join(";"), e.value)?;
        }
        Ok(())
    }
}

/// Truncated series of `(1/|Λ|) log Z` at fixed source.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogZSeries<T> {
    pub dim: usize,
    pub lambda: T,
    pub order: usize,
    /// Order-`k` contribution, `λ^k` included.
    pub terms: Vec<T>,
    /// `terms[k] / λ^k`.
    pub coefficients: Vec<T>,
    /// Per order: `(r, contribution)` for source-leg counts `r` with a nonzero pattern.
    pub by_legs: Vec<Vec<(usize, T)>>,
    pub counterterms: Counterterms<T>,
    pub kernels: SchwingerKernelTable<T>,
}

impl<T: Real> LogZSeries<T> {
    pub fn total(&self) -> T {
        self.terms.iter().copied().fold(T::zero(), |a, b| a + b)
    }

    /// Contribution of order `k` with `r` source legs (zero if absent).
    pub fn legs(&self, k: usize, r: usize) -> T {
        self.by_legs[k].iter().find(|(rr, _)| *rr == r).map(|(_, v)| *v).unwrap_or_else(T::zero)
    }
}

fn check_order(j: usize) -> Result<()> {
    if j > MAX_SERIES_ORDER {
        return Err(Error::InvalidArgument(format!("series order {j} above {MAX_SERIES_ORDER}")));
    }
    Ok(())
}

/// Renormalized expansion: Wick-ordered quartic vertices, the `δμ:φ²:` vertex
/// in `d = 3`, and the constant left over from `ν_N`.
pub fn renormalized_expansion<T: Real>(kernel: &PropagatorKernel<T>, ct: &Counterterms<T>, j: usize) -> Result<SeriesExpansion<T>> {
    check_order(j)?;
    let mut kinds = vec![VertexKind { legs: 4, weight: -ct.lambda, order: 1, self_lines: false }];
    if ct.dim == 3 {
        kinds.push(VertexKind { legs: 2, weight: -ct.delta_mu, order: 2, self_lines: false });
    }
    let constant = ct.wick_remainder_by_order().iter().map(|&v| -v).collect();
    SeriesExpansion::build(kernel, &kinds, constant, j)
}

/// Bare expansion with propagator `kernel`: plain quartic and mass vertices
/// (self-lines allowed) and the constant `-ν_N`, all counterterms taken from `ct`.
pub fn bare_expansion<T: Real>(kernel: &PropagatorKernel<T>, ct: &Counterterms<T>, j: usize) -> Result<SeriesExpansion<T>> {
    check_order(j)?;
    let mu = ct.mu_by_order();
    let mut kinds = vec![
        VertexKind { legs: 4, weight: -ct.lambda, order: 1, self_lines: true },
        VertexKind { legs: 2, weight: -mu[1], order: 1, self_lines: true },
    ];
    if ct.dim == 3 {
        kinds.push(VertexKind { legs: 2, weight: -mu[2], order: 2, self_lines: true });
    }
    let constant = ct.nu_by_order().iter().map(|&v| -v).collect();
    SeriesExpansion::build(kernel, &kinds, constant, j)
}

pub(crate) fn summarize<T: Real>(expansion: &SeriesExpansion<T>, ct: &Counterterms<T>, f: &[T], with_kernels: bool) -> LogZSeries<T> {
    let j = expansion.order;
    let mut terms = Vec::with_capacity(j + 1);
    let mut by_legs = Vec::with_capacity(j + 1);
    for k in 0..=j {
        let rows: Vec<(usize, T)> = (0..=4 * k.max(1)).step_by(2).map(|r| (r, expansion.legs(k, r, f))).collect();
        terms.push(rows.iter().map(|(_, v)| *v).fold(T::zero(), |a, b| a + b));
        by_legs.push(rows);
    }
    let coefficients = terms
        .iter()
        .enumerate()
        .map(|(k, &t)| t / ct.lambda.powi(k as i32))
        .collect();
    let kernels = if with_kernels { SchwingerKernelTable::build(expansion) } else { SchwingerKernelTable { entries: Vec::new() } };
    LogZSeries { dim: ct.dim, lambda: ct.lambda, order: j, terms, coefficients, by_legs, counterterms: *ct, kernels }
}

/// Renormalized series of `(1/|Λ|) log Z_N` through order `j ≤ 3`.
#[allow(non_snake_case)]
pub fn logZ_series<T: Real>(spec: &LatticeSpec, lambda: T, f: &[T], j: usize) -> Result<LogZSeries<T>> {
    if !(2..=3).contains(&spec.dim) {
        return Err(Error::UnsupportedDimension(spec.dim));
    }
    if f.len() != spec.n_sites() {
        return Err(Error::InvalidArgument(format!("source has {} entries, lattice {}", f.len(), spec.n_sites())));
    }
    let kernel = covariance_cumulative::<T>(spec, spec.cutoff)?;
    let ct = counterterms_from_kernel(&kernel, lambda)?;
    let expansion = renormalized_expansion(&kernel, &ct, j)?;
    Ok(summarize(&expansion, &ct, f, true))
}

/// Bare series with propagator `kernel` and the counterterms `ct` of the full cutoff.
pub fn bare_series<T: Real>(kernel: &PropagatorKernel<T>, ct: &Counterterms<T>, f: &[T], j: usize) -> Result<LogZSeries<T>> {
    let expansion = bare_expansion(kernel, ct, j)?;
    Ok(summarize(&expansion, ct, f, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::wick_oracle;

    fn reference() -> LatticeSpec {
        LatticeSpec::new(2, 1.0, 1.0, std::f64::consts::SQRT_2, 2).unwrap()
    }

    fn source() -> Vec<f64> {
        vec![1.0, 0.5, -0.5, 0.25]
    }

    #[test]
    fn order_one_vacuum_cancels() {
        for spec in [reference(), LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap()] {
            let f: Vec<f64> = vec![0.0; spec.n_sites()];
            let s = logZ_series(&spec, 0.1, &f, 1).unwrap();
            assert!(s.terms[1].abs() < 1e-14);
        }
    }

    #[test]
    fn quartic_source_term_at_order_one() {
        let spec = reference();
        let f = source();
        let s = logZ_series(&spec, 0.1, &f, 1).unwrap();
        let k = covariance_cumulative::<f64>(&spec, 2).unwrap();
        let ad = spec.cell_volume();
        let cf: Vec<f64> = (0..4).map(|z| (0..4).map(|x| k.between(z, x) * f[x]).sum::<f64>() * ad).collect();
        let want = -0.1 * cf.iter().map(|v| v.powi(4)).sum::<f64>() * ad / spec.volume();
        assert!((s.legs(1, 4) - want).abs() < 1e-14);
        assert!(s.legs(1, 2).abs() < 1e-15);
    }

    #[test]
    fn d3_vacuum_cancels_through_third_order() {
        let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap();
        let f: Vec<f64> = vec![0.0; spec.n_sites()];
        let s = logZ_series(&spec, 0.3, &f, 3).unwrap();
        let scale = s.counterterms.nu.abs();
        for k in 1..=3 {
            assert!(s.legs(k, 0).abs() < 1e-12 * scale, "order {k}: {}", s.legs(k, 0));
        }
    }

    #[test]
    fn kernels_reproduce_leg_sums() {
        let spec = reference();
        let f = source();
        let kernel = covariance_cumulative::<f64>(&spec, 2).unwrap();
        let ct = counterterms_from_kernel(&kernel, 0.2).unwrap();
        let ex = renormalized_expansion(&kernel, &ct, 2).unwrap();
        let ad = spec.cell_volume();
        for k in 0..=2 {
            for r in [2usize, 4] {
                let mut sum = 0.0;
                for idx in 0..4usize.pow(r as u32) {
                    let pts: Vec<usize> = (0..r).map(|i| (idx / 4usize.pow(i as u32)) % 4).collect();
                    sum += ex.kernel_at(k, &pts) * pts.iter().map(|&y| f[y]).product::<f64>();
                }
                sum *= ad.powi(r as i32);
                let direct = ex.legs(k, r, &f);
                assert!((sum - direct).abs() < 1e-12 * direct.abs().max(1e-12), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn kernels_are_symmetric() {
        let spec = reference();
        let f = source();
        let s = logZ_series(&spec, 0.2, &f, 2).unwrap();
        let kernel = covariance_cumulative::<f64>(&spec, 2).unwrap();
        let ex = renormalized_expansion(&kernel, &s.counterterms, 2).unwrap();
        let a = ex.kernel_at(2, &[0, 1, 2, 3]);
        let b = ex.kernel_at(2, &[2, 0, 3, 1]);
        assert!((a - b).abs() < 1e-14 * a.abs().max(1e-14));
        assert!(s.kernels.get(1, &[0, 1, 2, 3]).is_some());
    }

    #[test]
    fn second_order_matches_brute_force_moments() {
        // (1/|Λ|) log E exp(-a^d Σ (λφ⁴ + μφ² + ν + fφ)) expanded to λ² by moments
        let spec = reference();
        let f = source();
        let lam = 0.2;
        let kernel = covariance_cumulative::<f64>(&spec, 2).unwrap();
        let ct = counterterms_from_kernel(&kernel, lam).unwrap();
        let s = logZ_series(&spec, lam, &f, 2).unwrap();
        let ad = spec.cell_volume();
        let n = 4;
        let mu1 = ct.mu_by_order()[1] / lam;
        let nu1 = ct.nu_by_order()[1] / lam;
        // log E e^{-F - λ U1} = ½⟨F²⟩ - λ⟨U1⟩_F + ½λ²(⟨U1²⟩_F - ⟨U1⟩_F²), with ⟨·⟩_F the tilted mean;
        // evaluate moments of the tilted measure through shifted Wick sums.
        let s_vec: Vec<f64> = (0..n).map(|x| -(0..n).map(|y| kernel.between(x, y) * f[y]).sum::<f64>() * ad).collect();
        let shifted_moment = |pts: &[(usize, usize)]| -> f64 {
            // E[Π (φ + s)^k] by binomial expansion into centred moments
            let mut total = 0.0;
            fn rec(i: usize, pts: &[(usize, usize)], s: &[f64], acc: &mut Vec<(usize, usize)>, coef: f64, k: &PropagatorKernel<f64>, out: &mut f64) {
                if i == pts.len() {
                    *out += coef * wick_oracle(acc, k).unwrap();
                    return;
                }
                let (x, p) = pts[i];
                for q in 0..=p {
                    let binom = (1..=q).fold(1.0, |b, t| b * (p - t + 1) as f64 / t as f64);
                    acc.push((x, q));
                    rec(i + 1, pts, s, acc, coef * binom * s[x].powi((p - q) as i32), k, out);
                    acc.pop();
                }
            }
            rec(0, pts, &s_vec, &mut Vec::new(), 1.0, &kernel, &mut total);
            total
        };
        let u1 = |x: usize| vec![(x, 4)];
        let mean_u1: f64 = (0..n)
            .map(|x| shifted_moment(&u1(x)) + mu1 * shifted_moment(&[(x, 2)]) + nu1)
            .sum::<f64>()
            * ad;
        let mut second = 0.0;
        for x in 0..n {
            for y in 0..n {
                let terms_x = [(4usize, 1.0), (2, mu1), (0, nu1)];
                for &(px, cx) in &terms_x {
                    for &(py, cy) in &terms_x {
                        let mut pts = Vec::new();
                        if px > 0 {
                            pts.push((x, px));
                        }
                        if py > 0 {
                            pts.push((y, py));
                        }
                        second += cx * cy * shifted_moment(&pts);
                    }
                }
            }
        }
        second *= ad * ad;
        let fcf: f64 = (0..n).map(|x| f[x] * -s_vec[x]).sum::<f64>() * ad;
        let vol = spec.volume();
        let want = [0.5 * fcf / vol, -lam * mean_u1 / vol, 0.5 * lam * lam * (second - mean_u1 * mean_u1) / vol];
        for k in 0..=2 {
            let rel = (s.terms[k] - want[k]).abs() / want[k].abs().max(1e-300);
            assert!(rel < 1e-10, "order {k}: {} vs {}", s.terms[k], want[k]);
        }
    }

    #[test]
    fn bare_route_at_full_propagator_agrees() {
        let spec = LatticeSpec::new(3, 1.0, 1.0, 2.0, 1).unwrap();
        let f: Vec<f64> = (0..spec.n_sites()).map(|i| 0.6 + ((i * 7) % 5) as f64 / 10.0 - 0.2).collect();
        let s = logZ_series(&spec, 0.1, &f, 3).unwrap();
        let kernel = covariance_cumulative::<f64>(&spec, 1).unwrap();
        let b = bare_series(&kernel, &s.counterterms, &f, 3).unwrap();
        for k in 0..=3 {
            let rel = (s.terms[k] - b.terms[k]).abs() / s.terms[k].abs().max(1e-300);
            assert!(rel < 1e-9, "order {k}: {} vs {}", s.terms[k], b.terms[k]);
        }
    }

    #[test]
    fn order_and_dimension_guards() {
        let spec = reference();
        assert!(logZ_series(&spec, 0.1, &source(), 4).is_err());
        let s4 = LatticeSpec::new(4, 1.0, 1.0, 2.0, 1).unwrap();
        assert!(matches!(logZ_series(&s4, 0.1, &vec![0.0; s4.n_sites()], 1), Err(Error::UnsupportedDimension(4))));
    }
}
