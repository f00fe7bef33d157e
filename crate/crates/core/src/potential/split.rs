use serde::{Deserialize, Serialize};

use super::functional::{locality, Locality, PotentialFunctional};
use super::poly::{degree, Poly};
use crate::error::Result;
use crate::graphs::counterterms_from_kernel;
use crate::lattice::{covariance_cumulative, LatticeSpec};
use crate::scalar::Real;

/// Local part in the rescaled variables `X = φ^{(≤h)}/n_h`, written as
/// `-Σ_Δ P_h ∫_Δ (λ X⁴ + μ̄ X² + ν̄ + f̃ X) dx/|Δ|` with `P_h = γ^{-h}` in
/// `d = 3` and `h² γ^{-2h}` in `d = 2`. Site-dependent values are averaged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RescaledCouplings {
    pub scale: usize,
    pub quartic: f64,
    pub mass: f64,
    pub vacuum: f64,
    pub source: Vec<f64>,
}

/// Graded per-site coefficients of the local block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalBlock<T> {
    pub quartic: Vec<Vec<T>>,
    pub quadratic: Vec<Vec<T>>,
    pub linear: Vec<Vec<T>>,
    /// `-ν_h |Λ|`, the vacuum counterterm of cutoff `h` (zero at `h = 0`).
    pub vacuum: Vec<T>,
}

/// `-w (φ_x - φ_y)²` summed over site pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradientPair<T> {
    pub x: usize,
    pub y: usize,
    pub weight: Vec<T>,
}

/// Irrelevant terms grouped by degree, locality and grade.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrelevantClass {
    pub degree: usize,
    pub locality: Locality,
    pub grade: usize,
    pub count: usize,
    pub kernel_norm: f64,
    /// Nominal scaling exponent `-d + (4-d) n + (d-2) k / 2` of the class.
    pub exponent: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelevantSplit<T> {
    pub dim: usize,
    pub scale: usize,
    pub local: LocalBlock<T>,
    pub rescaled: Option<RescaledCouplings>,
    pub gradient: Vec<GradientPair<T>>,
    pub irrelevant: Poly<T>,
    pub irrelevant_classes: Vec<IrrelevantClass>,
    /// `E(j,h) |Λ|` by order.
    pub field_independent: Vec<T>,
}

impl<T: Real> RelevantSplit<T> {
    /// Reassembles the polynomial the split was taken from.
    pub fn recombine(&self) -> Poly<T> {
        let mut p = self.irrelevant.clone();
        for x in 0..self.local.quartic.len() {
            let s = x as u32;
            for (g, ((&q4, &q2), &q1)) in self.local.quartic[x]
                .iter()
                .zip(&self.local.quadratic[x])
                .zip(&self.local.linear[x])
                .enumerate()
            {
                p.add_term(vec![(s, 4)], g, q4);
                p.add_term(vec![(s, 2)], g, q2);
                p.add_term(vec![(s, 1)], g, q1);
            }
        }
        for (g, (&v, &e)) in self.local.vacuum.iter().zip(&self.field_independent).enumerate() {
            p.add_term(Vec::new(), g, v + e);
        }
        for pair in &self.gradient {
            let (x, y) = (pair.x as u32, pair.y as u32);
            for (g, &w) in pair.weight.iter().enumerate() {
                p.add_term(vec![(x, 2)], g, -w);
                p.add_term(vec![(y, 2)], g, -w);
                p.add_term(vec![(x.min(y), 1), (x.max(y), 1)], g, T::of(2.0) * w);
            }
        }
        p
    }
}

/// Vacuum counterterm `ν_h` of cutoff `h`, split by order and truncated.
pub fn vacuum_counterterm<T: Real>(spec: &LatticeSpec, h: usize, lambda: T, order: usize) -> Result<Vec<T>> {
    let mut nu = vec![T::zero(); order + 1];
    if h == 0 || lambda == T::zero() {
        return Ok(nu);
    }
    let kernel = covariance_cumulative::<T>(spec, h)?;
    let ct = counterterms_from_kernel(&kernel, lambda)?;
    for (k, v) in ct.nu_by_order().into_iter().enumerate().take(order + 1) {
        nu[k] = v;
    }
    Ok(nu)
}

/// `n_h` with `φ^{(≤h)} = n_h X^{(h)}`.
pub fn field_normalization(spec: &LatticeSpec, h: usize) -> f64 {
    if spec.dim == 2 {
        (h as f64).sqrt()
    } else {
        spec.gamma.powf((spec.dim as f64 - 2.0) * h as f64 / 2.0)
    }
}

fn prefactor(spec: &LatticeSpec, h: usize) -> f64 {
    let g = spec.gamma.powi(h as i32);
    if spec.dim == 2 {
        (h * h) as f64 / (g * g)
    } else {
        g.powf(-(4.0 - spec.dim as f64))
    }
}

fn graded_sum<T: Real>(c: &[T]) -> f64 {
    c.iter().map(|v| v.as_f64()).sum()
}

/// Splits `V` at scale `h` into the local relevant block, the gradient block
/// from localizing two-site quadratic terms (`d = 3` only; in `d = 2` that
/// remainder stays irrelevant), the irrelevant rest and `E(j,h)|Λ|`.
pub fn relevant_split<T: Real>(v: &PotentialFunctional<T>) -> Result<RelevantSplit<T>> {
    let spec = &v.spec;
    let h = v.scale;
    let n = spec.n_sites();
    let order = v.order();
    let zeros = || vec![T::zero(); order + 1];
    let mut local = LocalBlock {
        quartic: vec![zeros(); n],
        quadratic: vec![zeros(); n],
        linear: vec![zeros(); n],
        vacuum: zeros(),
    };
    let mut gradient = Vec::new();
    let mut irrelevant = Poly::zero(order);
    let mut constant = zeros();
    let half = T::of(0.5);
    for (m, c) in &v.poly.terms {
        match (m.len(), degree(m)) {
            (0, _) => constant = c.clone(),
            (1, 4) => local.quartic[m[0].0 as usize] = c.clone(),
            (1, 2) => {
                let slot = &mut local.quadratic[m[0].0 as usize];
                for (s, &q) in slot.iter_mut().zip(c) {
                    *s = *s + q;
                }
            }
            (1, 1) => local.linear[m[0].0 as usize] = c.clone(),
            (2, 2) => {
                let (x, y) = (m[0].0 as usize, m[1].0 as usize);
                for g in 0..=order {
                    local.quadratic[x][g] = local.quadratic[x][g] + half * c[g];
                    local.quadratic[y][g] = local.quadratic[y][g] + half * c[g];
                }
                let weight: Vec<T> = c.iter().map(|&q| half * q).collect();
                if spec.dim == 3 {
                    gradient.push(GradientPair { x, y, weight });
                } else {
                    let (xs, ys) = (x as u32, y as u32);
                    for (g, &w) in weight.iter().enumerate() {
                        irrelevant.add_term(vec![(xs, 2)], g, -w);
                        irrelevant.add_term(vec![(ys, 2)], g, -w);
                        irrelevant.add_term(m.clone(), g, T::of(2.0) * w);
                    }
                }
            }
            _ => {
                for (g, &q) in c.iter().enumerate() {
                    irrelevant.add_term(m.clone(), g, q);
                }
            }
        }
    }
    let ad = T::of(spec.cell_volume());
    let volume = T::of_usize(n) * ad;
    let nu = vacuum_counterterm(spec, h, v.lambda, order)?;
    local.vacuum = nu.iter().map(|&x| -x * volume).collect();
    let field_independent = constant.iter().zip(&local.vacuum).map(|(&c, &r)| c - r).collect();

    let rescaled = (h > 0).then(|| {
        let nh = field_normalization(spec, h);
        let site_weight = prefactor(spec, h) * spec.cell_volume() * spec.gamma.powi((spec.dim * h) as i32);
        let avg = |rows: &[Vec<T>], p: i32| -> f64 {
            rows.iter().map(|c| -graded_sum(c) * nh.powi(p) / site_weight).sum::<f64>() / n as f64
        };
        RescaledCouplings {
            scale: h,
            quartic: avg(&local.quartic, 4),
            mass: avg(&local.quadratic, 2),
            vacuum: -graded_sum(&local.vacuum) / (n as f64 * site_weight),
            source: local.linear.iter().map(|c| -graded_sum(c) * nh / site_weight).collect(),
        }
    });

    let mut classes: std::collections::BTreeMap<(usize, Locality, usize), (usize, f64)> = Default::default();
    for (m, c) in &irrelevant.terms {
        for (g, &q) in c.iter().enumerate() {
            if q != T::zero() {
                let e = classes.entry((degree(m), locality(m), g)).or_default();
                e.0 += 1;
                e.1 += q.abs().as_f64();
            }
        }
    }
    let d = spec.dim as f64;
    let irrelevant_classes = classes
        .into_iter()
        .map(|((degree, locality, grade), (count, kernel_norm))| IrrelevantClass {
            degree,
            locality,
            grade,
            count,
            kernel_norm,
            exponent: -d + (4.0 - d) * grade as f64 + (d - 2.0) * degree as f64 / 2.0,
        })
        .collect();

    Ok(RelevantSplit {
        dim: spec.dim,
        scale: h,
        local,
        rescaled,
        gradient,
        irrelevant,
        irrelevant_classes,
        field_independent,
    })
}

/// The constants of the bare local part: `μ̄ = -6λ c_N + λ² N γ^{-N} c'_N`,
/// `ν̄ = 3λ c_N² + λ² γ^{-N} b_N + λ³ N γ^{-2N} b'_N` in `d = 3`, and
/// `μ̄ = -6λ c_N`, `ν̄ = 3λ c_N²` in `d = 2`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BareConstants {
    pub c: f64,
    pub c_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub mass: f64,
    pub vacuum: f64,
}

pub fn bare_constants(spec: &LatticeSpec, lambda: f64) -> Result<BareConstants> {
    let kernel = covariance_cumulative::<f64>(spec, spec.cutoff)?;
    let ct = counterterms_from_kernel(&kernel, lambda)?;
    let n = spec.cutoff as f64;
    let gn = spec.gamma.powi(spec.cutoff as i32);
    let c00 = ct.sums.origin;
    let (c, c_prime, b, b_prime) = if spec.dim == 3 {
        let nu = ct.nu_by_order();
        (c00 / gn, ct.delta_mu / (lambda * lambda * n), nu[2] / (lambda * lambda * gn), nu[3] / (lambda.powi(3) * n))
    } else {
        (c00 / n, 0.0, 0.0, 0.0)
    };
    let (mass, vacuum) = if spec.dim == 3 {
        (
            -6.0 * lambda * c + lambda * lambda * n * c_prime / gn,
            3.0 * lambda * c * c + lambda * lambda * b / gn + lambda.powi(3) * n * b_prime / (gn * gn),
        )
    } else {
        (-6.0 * lambda * c, 3.0 * lambda * c * c)
    };
    Ok(BareConstants { c, c_prime, b, b_prime, mass, vacuum })
}

/// `24 λ² (C^{(≤N)3} - C^{(≤h)3})` against distance, with the spread of its
/// ratio to `(γ^h r)^{-5/2}` over the nonzero lattice distances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradientKernelProfile {
    pub scale: usize,
    /// `(r, kernel)` per displacement class, sorted by `r`.
    pub points: Vec<(f64, f64)>,
    pub at_origin: f64,
    pub min_value: f64,
    pub ratio_low: f64,
    pub ratio_high: f64,
}

pub fn gradient_kernel_profile(spec: &LatticeSpec, h: usize, lambda: f64) -> Result<GradientKernelProfile> {
    let full = covariance_cumulative::<f64>(spec, spec.cutoff)?;
    let outer: Vec<f64> = if h == 0 {
        vec![0.0; spec.n_sites()]
    } else {
        covariance_cumulative::<f64>(spec, h)?.values().to_vec()
    };
    let w = 24.0 * lambda * lambda;
    let mut points: Vec<(f64, f64)> = full
        .values()
        .iter()
        .zip(&outer)
        .enumerate()
        .map(|(i, (&cn, &ch))| (spec.torus_length(i), w * (cn.powi(3) - ch.powi(3))))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() <= 1e-12 * b.1.abs().max(1e-300));
    let gh = spec.gamma.powi(h as i32);
    let ratios: Vec<f64> = points
        .iter()
        .filter(|(r, _)| *r > 0.0)
        .map(|&(r, k)| k / w * (gh * r).powf(2.5))
        .collect();
    Ok(GradientKernelProfile {
        scale: h,
        at_origin: points[0].1,
        min_value: points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        ratio_low: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratio_high: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        points,
    })
}
