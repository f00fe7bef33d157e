//! Regularized propagator and its single-scale bands.

use rustfft::num_complex::Complex;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::fft;
use super::spec::LatticeSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which piece of the covariance a kernel represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    /// `C^{(≤h)}`
    Cumulative(usize),
    /// `C^{(h)}`, the band between masses `γ^{h-1} m` and `γ^h m`.
    Single(usize),
}

impl Band {
    pub fn scale(self) -> usize {
        match self {
            Band::Cumulative(h) | Band::Single(h) => h,
        }
    }
}

/// `χ_N(p) = m²(γ^{2N}-1)/(p²+γ^{2N}m²)`.
pub fn regulator_chi<T: Real>(p_sq: T, spec: &LatticeSpec) -> T {
    regulator_chi_at(p_sq, spec, spec.cutoff)
}

pub(crate) fn regulator_chi_at<T: Real>(p_sq: T, spec: &LatticeSpec, n: usize) -> T {
    let m2 = T::of(spec.mass * spec.mass);
    let g2n = T::of(spec.gamma).powi(2 * n as i32);
    m2 * (g2n - T::one()) / (p_sq + g2n * m2)
}

/// Mode weight of `C^{(≤h)}`: `χ_h(p)/(p²+m²)`.
pub fn cumulative_weight<T: Real>(p_sq: T, spec: &LatticeSpec, h: usize) -> T {
    let m2 = T::of(spec.mass * spec.mass);
    regulator_chi_at(p_sq, spec, h) / (p_sq + m2)
}

/// Mode weight of `C^{(h)}`: `1/(p²+γ^{2(h-1)}m²) - 1/(p²+γ^{2h}m²)`.
pub fn band_weight<T: Real>(p_sq: T, spec: &LatticeSpec, h: usize) -> T {
    let m2 = T::of(spec.mass * spec.mass);
    let g = T::of(spec.gamma);
    let lo = g.powi(2 * (h as i32 - 1)) * m2;
    let hi = g.powi(2 * h as i32) * m2;
    T::one() / (p_sq + lo) - T::one() / (p_sq + hi)
}

/// Translation-invariant covariance on the periodic lattice.
///
/// `values[j]` is `C_{0,x_j}` for the displacement with flat index `j`;
/// `weights[k]` is the Fourier weight of the mode with flat index `k`.
#[derive(Clone, Debug)]
pub struct PropagatorKernel<T> {
    pub spec: LatticeSpec,
    pub band: Band,
    weights: Vec<T>,
    values: Vec<T>,
}

fn check_scale(spec: &LatticeSpec, h: usize) -> Result<()> {
    if h == 0 || h > spec.cutoff {
        return Err(Error::ScaleOutOfRange { h, n: spec.cutoff });
    }
    Ok(())
}

/// Position-space table `L^{-d} Σ_p w_p e^{ipx}` from mode weights.
pub fn weights_to_values<T: Real>(spec: &LatticeSpec, weights: &[T]) -> Vec<T> {
    let mut buf: Vec<Complex<T>> = weights.iter().map(|&w| Complex::new(w, T::zero())).collect();
    fft::transform(&mut buf, spec.side(), spec.dim, FftDirection::Inverse);
    let norm = T::of(spec.volume());
    buf.into_iter().map(|c| c.re / norm).collect()
}

/// Inverse of [`weights_to_values`].
pub fn values_to_weights<T: Real>(spec: &LatticeSpec, values: &[T]) -> Vec<T> {
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft::transform(&mut buf, spec.side(), spec.dim, FftDirection::Forward);
    let scale = T::of(spec.volume() / spec.n_sites() as f64);
    buf.into_iter().map(|c| c.re * scale).collect()
}

impl<T: Real> PropagatorKernel<T> {
    pub fn from_weights(spec: &LatticeSpec, band: Band, weights: Vec<T>) -> Self {
        let values = weights_to_values(spec, &weights);
        Self { spec: spec.clone(), band, weights, values }
    }

    pub(crate) fn from_parts(spec: &LatticeSpec, band: Band, weights: Vec<T>, values: Vec<T>) -> Self {
        Self { spec: spec.clone(), band, weights, values }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `C_{x,y}` for flat site indices.
    pub fn between(&self, x: usize, y: usize) -> T {
        self.values[self.spec.displacement_index(x, y)]
    }

    /// `C_{0,0}`.
    pub fn at_origin(&self) -> T {
        self.values[0]
    }

    /// Value at a signed displacement (wrapped onto the torus).
    pub fn at(&self, disp: &[i64]) -> T {
        let n = self.spec.side() as i64;
        let c: Vec<usize> = disp.iter().map(|&x| x.rem_euclid(n) as usize).collect();
        self.values[self.spec.index(&c)]
    }

    /// Dense `|Λ|×|Λ|` covariance matrix over sites.
    pub fn dense(&self) -> Vec<Vec<T>> {
        let n = self.spec.n_sites();
        (0..n).map(|x| (0..n).map(|y| self.between(x, y)).collect()).collect()
    }

    /// Entrywise combination with another kernel on the same lattice.
    pub fn zip_with(&self, other: &Self, band: Band, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.spec, other.spec, "kernels live on different lattices");
        let weights = self.weights.iter().zip(&other.weights).map(|(&a, &b)| f(a, b)).collect();
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { spec: self.spec.clone(), band, weights, values }
    }
}

/// `C^{(≤h)}` as a finite mode sum over the lattice momenta.
pub fn covariance_cumulative<T: Real>(spec: &LatticeSpec, h: usize) -> Result<PropagatorKernel<T>> {
    check_scale(spec, h)?;
    let weights = (0..spec.n_modes())
        .map(|k| cumulative_weight(T::of(spec.momentum_sq(k)), spec, h))
        .collect();
    Ok(PropagatorKernel::from_weights(spec, Band::Cumulative(h), weights))
}

/// Single-scale band `C^{(h)}` in the lattice coordinates.
pub fn covariance_band<T: Real>(spec: &LatticeSpec, h: usize) -> Result<PropagatorKernel<T>> {
    check_scale(spec, h)?;
    let weights = (0..spec.n_modes())
        .map(|k| band_weight(T::of(spec.momentum_sq(k)), spec, h))
        .collect();
    Ok(PropagatorKernel::from_weights(spec, Band::Single(h), weights))
}

/// `C^{(≤hi)} - C^{(≤lo)}` (with `C^{(≤0)} = 0`) as the sum of bands `lo+1..=hi`.
pub fn covariance_between<T: Real>(spec: &LatticeSpec, lo: usize, hi: usize) -> Result<PropagatorKernel<T>> {
    if lo > hi || hi > spec.cutoff {
        return Err(Error::InvalidArgument(format!("band range {lo}..{hi} invalid")));
    }
    let weights = (0..spec.n_modes())
        .map(|k| {
            let p2 = T::of(spec.momentum_sq(k));
            (lo + 1..=hi).map(|h| band_weight(p2, spec, h)).fold(T::zero(), |a, b| a + b)
        })
        .collect();
    Ok(PropagatorKernel::from_weights(spec, Band::Cumulative(hi), weights))
}

/// `C_{00}^{(≤h)}` directly from the mode sum (no transform).
pub fn origin_value<T: Real>(spec: &LatticeSpec, h: usize) -> Result<T> {
    check_scale(spec, h)?;
    let sum: T = (0..spec.n_modes())
        .map(|k| cumulative_weight(T::of(spec.momentum_sq(k)), spec, h))
        .sum();
    Ok(sum / T::of(spec.volume()))
}

/// Continuum band profile `C̄^{(0)}(r) = ∫ d^dp/(2π)^d e^{ipx} (1/(p²+γ^{-2}m²) - 1/(p²+m²))`
/// in `d = 2, 3`, evaluated in closed form through the Yukawa kernels.
pub fn continuum_band_profile(dim: usize, mass: f64, gamma: f64, r: f64) -> Result<f64> {
    let yukawa = |mu: f64| -> Result<f64> {
        match dim {
            3 => Ok(if r == 0.0 {
                -mu / (4.0 * std::f64::consts::PI)
            } else {
                (-mu * r).exp() / (4.0 * std::f64::consts::PI * r)
            }),
            2 => Ok(bessel_k0(mu * r) / (2.0 * std::f64::consts::PI)),
            d => Err(Error::UnsupportedDimension(d)),
        }
    };
    if dim == 2 && r == 0.0 {
        // K0(μ1 r) - K0(μ2 r) → ln(μ2/μ1) as r → 0
        return Ok(gamma.ln() / (2.0 * std::f64::consts::PI));
    }
    Ok(yukawa(mass / gamma)? - yukawa(mass)?)
}

/// Modified Bessel function `K_0` (Abramowitz & Stegun 9.8.5/9.8.6).
fn bessel_k0(x: f64) -> f64 {
    if x <= 2.0 {
        let t = x / 3.75;
        let t2 = t * t;
        let i0 = 1.0
            + t2 * (3.5156229
                + t2 * (3.0899424 + t2 * (1.2067492 + t2 * (0.2659732 + t2 * (0.0360768 + t2 * 0.0045813)))));
        let y = x * x / 4.0;
        -(x / 2.0).ln() * i0
            + (-0.57721566
                + y * (0.42278420
                    + y * (0.23069756 + y * (0.03488590 + y * (0.00262698 + y * (0.00010750 + y * 0.0000074))))))
    } else {
        let y = 2.0 / x;
        (-x).exp() / x.sqrt()
            * (1.25331414
                + y * (-0.07832358
                    + y * (0.02189568 + y * (-0.01062446 + y * (0.00587872 + y * (-0.00251540 + y * 0.00053208))))))
    }
}
