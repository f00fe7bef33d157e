use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::rng::layer_rng;
use crate::error::{Error, Result};
use crate::lattice::{band_weight, fft, LatticeSpec};

/// One Gaussian layer `z^{(h)}` sampled on the finest lattice.
///
/// Values are stored in the lattice coordinates `x`, i.e. they are the
/// sample of `z^{(h)}_{γ^h x}`, so that `γ^{(d-2)h/2} z^{(h)}` has the band
/// kernel `C^{(h)}` as its covariance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldLayer {
    pub h: usize,
    pub seed: u64,
    pub spec: LatticeSpec,
    pub values: Vec<f64>,
}

/// `γ^{(d-2)h/2}` (1 in `d = 2`).
pub fn layer_amplitude(spec: &LatticeSpec, h: usize) -> f64 {
    spec.gamma.powf((spec.dim as f64 - 2.0) * h as f64 / 2.0)
}

/// Exact sample: white noise filtered by the square root of the band's mode weights.
pub fn sample_layer(spec: &LatticeSpec, h: usize, seed: u64) -> Result<FieldLayer> {
    if h == 0 || h > spec.cutoff {
        return Err(Error::ScaleOutOfRange { h, n: spec.cutoff });
    }
    let n = spec.n_sites();
    let mut rng = layer_rng(seed, h);
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    fft::transform(&mut buf, spec.side(), spec.dim, FftDirection::Forward);
    let mode_scale = n as f64 / spec.volume();
    for (k, c) in buf.iter_mut().enumerate() {
        let w: f64 = band_weight(spec.momentum_sq(k), spec, h);
        *c *= (w * mode_scale).sqrt();
    }
    fft::transform(&mut buf, spec.side(), spec.dim, FftDirection::Inverse);
    let norm = n as f64 * layer_amplitude(spec, h);
    let values = buf.into_iter().map(|c| c.re / norm).collect();
    Ok(FieldLayer { h, seed, spec: spec.clone(), values })
}

impl FieldLayer {
    pub fn zero(spec: &LatticeSpec, h: usize) -> Self {
        Self { h, seed: 0, spec: spec.clone(), values: vec![0.0; spec.n_sites()] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let s = LatticeSpec::new(2, 2.0, 1.0, 2.0, 2).unwrap();
        let a = sample_layer(&s, 1, 42).unwrap();
        let b = sample_layer(&s, 1, 42).unwrap();
        let c = sample_layer(&s, 1, 43).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
        let other_scale = sample_layer(&s, 2, 42).unwrap();
        assert_ne!(a.values, other_scale.values);
    }

    #[test]
    fn rejects_scale_zero() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 1).unwrap();
        assert!(sample_layer(&s, 0, 1).is_err());
        assert!(sample_layer(&s, 2, 1).is_err());
    }
}
