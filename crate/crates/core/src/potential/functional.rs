use serde::{Deserialize, Serialize};

use super::poly::{degree, Monomial, Poly};
use super::wick::wick_power;
use crate::error::{Error, Result};
use crate::graphs::Counterterms;
use crate::lattice::{origin_value, LatticeSpec};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    /// all legs on one site
    Local,
    /// two distinct sites
    Chain,
    General,
}

pub fn locality(m: &Monomial) -> Locality {
    match m.len() {
        0 | 1 => Locality::Local,
        2 => Locality::Chain,
        _ => Locality::General,
    }
}

/// Exponent `V` of `e^V` at scale `h`, a polynomial in the site values of `φ^{(≤h)}`.
///
/// Coefficients are graded by the power of `λ` up to `order`; the constant
/// monomial holds the field-independent part.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFunctional<T> {
    pub spec: LatticeSpec,
    pub scale: usize,
    pub lambda: T,
    pub poly: Poly<T>,
}

/// One row of the term inventory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermClass {
    pub degree: usize,
    pub locality: Locality,
    pub count: usize,
    /// `Σ |coefficient|` over the class, all grades.
    pub kernel_norm: f64,
}

impl<T: Real> PotentialFunctional<T> {
    pub fn zero(spec: &LatticeSpec, scale: usize, lambda: T, order: usize) -> Self {
        Self { spec: spec.clone(), scale, lambda, poly: Poly::zero(order) }
    }

    pub fn order(&self) -> usize {
        self.poly.order
    }

    pub fn evaluate(&self, phi: &[T]) -> T {
        self.poly.evaluate(phi)
    }

    /// Graded field-independent part.
    pub fn constant(&self) -> Vec<T> {
        self.poly.constant()
    }

    pub fn inventory(&self) -> Vec<TermClass> {
        let mut rows: std::collections::BTreeMap<(usize, Locality), (usize, f64)> = Default::default();
        for (m, c) in &self.poly.terms {
            let e = rows.entry((degree(m), locality(m))).or_default();
            e.0 += 1;
            e.1 += c.iter().map(|v| v.abs().as_f64()).sum::<f64>();
        }
        rows.into_iter()
            .map(|((degree, locality), (count, kernel_norm))| TermClass { degree, locality, count, kernel_norm })
            .collect()
    }

    /// Largest difference of coefficients against another potential.
    pub fn distance(&self, other: &Self) -> T {
        self.poly.add_scaled(&other.poly, -T::one()).sup_norm()
    }
}

fn check_source<T>(spec: &LatticeSpec, f: &[T]) -> Result<()> {
    if f.len() != spec.n_sites() {
        return Err(Error::InvalidArgument(format!("source has {} entries, lattice {}", f.len(), spec.n_sites())));
    }
    Ok(())
}

/// Bare interaction `V_N = -aᵈ Σ_x (λφ⁴ + μ_N φ² + ν_N + f φ)` with the
/// counterterms split by order and dropped above `order`.
pub fn bare_potential<T: Real>(spec: &LatticeSpec, ct: &Counterterms<T>, f: &[T], order: usize) -> Result<PotentialFunctional<T>> {
    check_source(spec, f)?;
    let ad = T::of(spec.cell_volume());
    let mut v = PotentialFunctional::zero(spec, spec.cutoff, ct.lambda, order);
    let mu = ct.mu_by_order();
    let nu = ct.nu_by_order();
    for x in 0..spec.n_sites() as u32 {
        v.poly.add_term(vec![(x, 4)], 1, -ad * ct.lambda);
        for (k, &m) in mu.iter().enumerate() {
            v.poly.add_term(vec![(x, 2)], k, -ad * m);
        }
        for (k, &n) in nu.iter().enumerate() {
            v.poly.add_term(Vec::new(), k, -ad * n);
        }
        v.poly.add_term(vec![(x, 1)], 0, -ad * f[x as usize]);
    }
    Ok(v)
}

/// `coupling · aᵈ Σ_x :φ_x⁴:` ordered with the variance `C^{(≤h)}_{00}`, at grade one.
pub fn wick_quartic<T: Real>(spec: &LatticeSpec, h: usize, coupling: T, order: usize) -> Result<PotentialFunctional<T>> {
    let c = if h == 0 { T::zero() } else { origin_value::<T>(spec, h)? };
    let ad = T::of(spec.cell_volume());
    let mut v = PotentialFunctional::zero(spec, h, coupling, order.max(1));
    for x in 0..spec.n_sites() {
        for (p, w) in wick_power(x, 4, c)?.expand() {
            let mono = if p == 0 { Vec::new() } else { vec![(x as u32, p as u8)] };
            v.poly.add_term(mono, 1, coupling * ad * w);
        }
    }
    Ok(v)
}
