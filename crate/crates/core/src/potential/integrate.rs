use super::functional::PotentialFunctional;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::lattice::covariance_band;
use crate::scalar::Real;

pub const MAX_RECURSION_ORDER: usize = 3;
/// Cap on the number of monomials of degree `≤ 4j` in the site fields.
pub const MONOMIAL_CAP: u128 = 200_000;

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn check_size(n_sites: usize, order: usize) -> Result<()> {
    if order > MAX_RECURSION_ORDER {
        return Err(Error::InvalidArgument(format!("truncation order {order} above {MAX_RECURSION_ORDER}")));
    }
    let deg = 4 * order.max(1) as u128;
    let count = binomial(n_sites as u128 + deg, deg);
    if count > MONOMIAL_CAP {
        return Err(Error::SizeGuard(format!(
            "{n_sites} sites at order {order} allow {count} monomials (cap {MONOMIAL_CAP})"
        )));
    }
    Ok(())
}

/// One step `V_{j;h} → V_{j;h-1}`: integrates the band `z^{(h)}` and keeps the
/// truncated cumulants through order `j`, everything truncated to `λ^j`.
///
/// The grade-zero affine part `c₀ + g·φ` is moved out exactly first: the
/// factor `e^{g·z}` becomes `e^{½ gDg}` and shifts the remaining polynomial
/// by `Dg`, after which the `k`-th cumulant is of order `λ^k`.
pub fn truncated_integrate<T: Real>(v: &PotentialFunctional<T>, j: usize) -> Result<PotentialFunctional<T>> {
    let h = v.scale;
    if h == 0 {
        return Err(Error::ScaleOutOfRange { h, n: v.spec.cutoff });
    }
    let n = v.spec.n_sites();
    check_size(n, j)?;
    let cov = covariance_band::<T>(&v.spec, h)?.dense();
    let order = j.min(v.order());
    let (c0, g, w) = v.poly.truncate(order).affine_ground(n)?;

    let shift: Vec<T> = (0..n).map(|x| (0..n).map(|y| cov[x][y] * g[y]).sum()).collect();
    let gdg = g.iter().zip(&shift).map(|(&a, &b)| a * b).sum::<T>() * T::of(0.5);

    let mut out = Poly::zero(order);
    out.add_term(Vec::new(), 0, c0 + gdg);
    for (x, &gx) in g.iter().enumerate() {
        out.add_term(vec![(x as u32, 1)], 0, gx);
    }
    if order > 0 && !w.is_empty() {
        let ws = w.shift(&shift);
        let m1 = ws.heat(&cov);
        out = out.add(&m1);
        if order >= 2 {
            let sq = ws.mul(&ws);
            let m2 = sq.heat(&cov);
            let k2 = m2.add_scaled(&m1.mul(&m1), -T::one());
            out = out.add_scaled(&k2, T::of(0.5));
            if order >= 3 {
                let m3 = sq.mul(&ws).heat(&cov);
                let m1_sq = m1.mul(&m1);
                let k3 = m3
                    .add_scaled(&m2.mul(&m1), -T::of(3.0))
                    .add_scaled(&m1_sq.mul(&m1), T::of(2.0));
                out = out.add_scaled(&k3, T::one() / T::of(6.0));
            }
        }
    }
    Ok(PotentialFunctional { spec: v.spec.clone(), scale: h - 1, lambda: v.lambda, poly: out })
}

/// Iterates [`truncated_integrate`] down to scale `target`, returning every
/// intermediate potential starting with `v` itself.
pub fn integrate_down<T: Real>(v: &PotentialFunctional<T>, j: usize, target: usize) -> Result<Vec<PotentialFunctional<T>>> {
    let mut chain = vec![v.clone()];
    while chain.last().expect("nonempty").scale > target {
        let next = truncated_integrate(chain.last().expect("nonempty"), j)?;
        chain.push(next);
    }
    Ok(chain)
}
