use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Π φ_x^{k_x}` as `(x, k_x)` pairs sorted by site, no zero powers.
pub type Monomial = Vec<(u32, u8)>;

pub fn degree(m: &Monomial) -> usize {
    m.iter().map(|&(_, k)| k as usize).sum()
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(x, p)), Some(&(y, q))) if x == y => {
                out.push((x, p + q));
                i += 1;
                j += 1;
            }
            (Some(&(x, p)), Some(&(y, _))) if x < y => {
                out.push((x, p));
                i += 1;
            }
            (Some(&(x, p)), None) => {
                out.push((x, p));
                i += 1;
            }
            (_, Some(&(y, q))) => {
                out.push((y, q));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Lowers the power of site `x` by `by`, returning the falling-factorial factor.
fn derive(m: &Monomial, x: u32, by: u8) -> Option<(Monomial, u32)> {
    let pos = m.iter().position(|&(s, _)| s == x)?;
    let k = m[pos].1;
    if k < by {
        return None;
    }
    let factor = (0..by).map(|i| (k - i) as u32).product();
    let mut out = m.clone();
    if k == by {
        out.remove(pos);
    } else {
        out[pos].1 = k - by;
    }
    Some((out, factor))
}

/// Polynomial in the site fields whose coefficients are graded by the power
/// of `λ`: `coef[k]` is the value of the `λ^k` part, kept for `k ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly<T> {
    pub order: usize,
    pub terms: BTreeMap<Monomial, Vec<T>>,
}

impl<T: Real> Poly<T> {
    pub fn zero(order: usize) -> Self {
        Self { order, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, mono: Monomial, grade: usize, value: T) {
        if grade > self.order || value == T::zero() {
            return;
        }
        let order = self.order;
        let slot = self.terms.entry(mono).or_insert_with(|| vec![T::zero(); order + 1]);
        slot[grade] = slot[grade] + value;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, T::one())
    }

    pub fn add_scaled(&self, other: &Self, c: T) -> Self {
        let mut out = self.clone();
        for (m, coef) in &other.terms {
            for (g, &v) in coef.iter().enumerate() {
                out.add_term(m.clone(), g, c * v);
            }
        }
        out
    }

    pub fn scale(&self, c: T) -> Self {
        Self::zero(self.order).add_scaled(self, c)
    }

    /// Product truncated at `order` in `λ`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut prod: Option<Monomial> = None;
                for (ga, &va) in ca.iter().enumerate() {
                    if va == T::zero() {
                        continue;
                    }
                    for (gb, &vb) in cb.iter().enumerate().take(order + 1 - ga.min(order + 1)) {
                        if vb == T::zero() || ga + gb > order {
                            continue;
                        }
                        let m = prod.get_or_insert_with(|| mono_mul(ma, mb)).clone();
                        out.add_term(m, ga + gb, va * vb);
                    }
                }
            }
        }
        out
    }

    /// Drops grades above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::zero(order);
        for (m, c) in &self.terms {
            for (g, &v) in c.iter().enumerate().take(order + 1) {
                out.add_term(m.clone(), g, v);
            }
        }
        out
    }

    /// `½ Σ_{x,y} D_xy ∂_x ∂_y`.
    fn laplace(&self, cov: &[Vec<T>]) -> Self {
        let mut out = Self::zero(self.order);
        let half = T::of(0.5);
        for (m, c) in &self.terms {
            for (i, &(x, kx)) in m.iter().enumerate() {
                if kx >= 2 {
                    let (d, fac) = derive(m, x, 2).expect("power at least two");
                    let w = half * T::of(fac as f64) * cov[x as usize][x as usize];
                    for (g, &v) in c.iter().enumerate() {
                        out.add_term(d.clone(), g, w * v);
                    }
                }
                for &(y, ky) in &m[i + 1..] {
                    let (d1, _) = derive(m, x, 1).expect("site present");
                    let (d2, _) = derive(&d1, y, 1).expect("site present");
                    let w = T::of((kx as u32 * ky as u32) as f64) * cov[x as usize][y as usize];
                    for (g, &v) in c.iter().enumerate() {
                        out.add_term(d2.clone(), g, w * v);
                    }
                }
            }
        }
        out
    }

    /// Gaussian average over an added field with covariance `cov`:
    /// `P ↦ E[P(φ + ψ)] = exp(½ Σ D ∂∂) P`.
    pub fn heat(&self, cov: &[Vec<T>]) -> Self {
        let mut acc = self.clone();
        let mut cur = self.clone();
        let mut m = 1usize;
        while !cur.is_empty() {
            cur = cur.laplace(cov).scale(T::one() / T::of_usize(m));
            acc = acc.add(&cur);
            m += 1;
        }
        acc
    }

    /// `P(φ + s)` for a fixed shift vector.
    pub fn shift(&self, s: &[T]) -> Self {
        let mut out = Self::zero(self.order);
        for (m, c) in &self.terms {
            // expand Π (φ_x + s_x)^{k_x} factor by factor
            let mut parts: Vec<(Monomial, T)> = vec![(Vec::new(), T::one())];
            for &(x, k) in m {
                let mut next = Vec::new();
                for (base, w) in &parts {
                    let mut binom = T::one();
                    for q in 0..=k {
                        if q > 0 {
                            binom = binom * T::of((k - q + 1) as f64) / T::of(q as f64);
                        }
                        let mut mono = base.clone();
                        if q > 0 {
                            mono.push((x, q));
                        }
                        let sp = s[x as usize].powi((k - q) as i32);
                        next.push((mono, *w * binom * sp));
                    }
                }
                parts = next;
            }
            for (mono, w) in parts {
                for (g, &v) in c.iter().enumerate() {
                    out.add_term(mono.clone(), g, w * v);
                }
            }
        }
        out
    }

    pub fn evaluate(&self, phi: &[T]) -> T {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mv = m.iter().fold(T::one(), |acc, &(x, k)| acc * phi[x as usize].powi(k as i32));
                mv * c.iter().copied().fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// Graded value at `φ = 0`.
    pub fn constant(&self) -> Vec<T> {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(|| vec![T::zero(); self.order + 1])
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    /// Largest absolute coefficient over all terms and grades.
    pub fn sup_norm(&self) -> T {
        self.terms
            .values()
            .flat_map(|c| c.iter().map(|v| v.abs()))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Splits off the grade-0 part of degree ≤ 1 as `(constant, linear coefficients)`.
    pub fn affine_ground(&self, n_sites: usize) -> Result<(T, Vec<T>, Self)> {
        let mut c0 = T::zero();
        let mut g = vec![T::zero(); n_sites];
        let mut rest = Self::zero(self.order);
        for (m, c) in &self.terms {
            let deg = degree(m);
            for (grade, &v) in c.iter().enumerate() {
                if grade == 0 && v != T::zero() {
                    match deg {
                        0 => c0 = c0 + v,
                        1 => g[m[0].0 as usize] = g[m[0].0 as usize] + v,
                        _ => {
                            return Err(Error::InvalidArgument(
                                "coupling-free part of the potential is not affine".into(),
                            ))
                        }
                    }
                } else {
                    rest.add_term(m.clone(), grade, v);
                }
            }
        }
        Ok((c0, g, rest))
    }
}
