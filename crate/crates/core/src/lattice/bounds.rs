//! Fitted decay and Hölder constants for a computed kernel.

use serde::Serialize;

use super::propagator::{Band, PropagatorKernel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stats::linear_fit;

/// Constants fitted to `|C| ≤ c γ^{(d-2)h} e^{-m r}` and
/// `|C_{0η} - C_{0η'}| ≤ c (m|η-η'|)^ε`, with distances in the kernel's
/// natural units (multiplied by `γ^h` for a single band, by `γ^N` for the
/// increment of a cumulative kernel).
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub band: Band,
    pub decay_rate: f64,
    pub decay_residual: f64,
    pub decay_points: usize,
    /// `γ^{(d-2)h}`, or `h` when `d = 2` and the kernel is cumulative.
    pub amplitude_scale: f64,
    pub amplitude: f64,
    /// `log_γ C_00 / h`; tends to `d - 2` for cumulative kernels in `d ≥ 3`.
    pub amplitude_exponent: f64,
    pub hoelder_eps: f64,
    pub hoelder_fitted: f64,
    pub hoelder_constant: f64,
    pub hoelder_residual: f64,
    pub hoelder_points: usize,
    /// Whether the axis profile decreases monotonically past the first few spacings.
    pub monotone_tail: bool,
}

pub fn bound_report<T: Real>(kernel: &PropagatorKernel<T>, eps: f64) -> Result<BoundReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("Hölder exponent {eps} outside (0,1)")));
    }
    let spec = &kernel.spec;
    let d = spec.dim;
    let g = spec.gamma;
    let m = spec.mass;
    let h = kernel.band.scale();
    let (decay_unit, incr_unit, amplitude_scale) = match kernel.band {
        Band::Single(h) => (g.powi(h as i32), g.powi(h as i32), g.powi(((d as i32) - 2) * h as i32)),
        Band::Cumulative(h) => {
            let amp = if d == 2 { h as f64 } else { g.powi(((d as i32) - 2) * h as i32) };
            (1.0, g.powi(spec.cutoff as i32), amp)
        }
    };

    let half = spec.side() / 2;
    let mut axis = Vec::with_capacity(half + 1);
    for j in 0..=half {
        let mut disp = vec![0i64; d];
        disp[0] = j as i64;
        axis.push((j as f64 * spec.spacing(), kernel.at(&disp).as_f64()));
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = axis
        .iter()
        .skip(1)
        .filter(|(_, v)| *v > 0.0)
        .map(|&(r, v)| (m * r * decay_unit, v.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} positive axis displacements for the decay fit",
            xs.len()
        )));
    }
    let decay = linear_fit(&xs, &ys).ok_or_else(|| Error::DegenerateFit("decay".into()))?;

    let amplitude = (0..spec.n_sites())
        .map(|i| kernel.values()[i].as_f64().abs() * (m * spec.torus_length(i) * decay_unit).exp())
        .fold(0.0, f64::max)
        / amplitude_scale;

    let c0 = kernel.at_origin().as_f64();
    let (hx, hy): (Vec<f64>, Vec<f64>) = (1..spec.n_sites())
        .filter_map(|i| {
            let r = m * spec.torus_length(i) * incr_unit;
            let inc = (c0 - kernel.values()[i].as_f64()).abs();
            (r < 1.0 && inc > 0.0).then_some((r, inc))
        })
        .unzip();
    if hx.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} displacements below 1/m for the Hölder fit",
            hx.len()
        )));
    }
    let lx: Vec<f64> = hx.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = hy.iter().map(|v| v.ln()).collect();
    let hfit = linear_fit(&lx, &ly).ok_or_else(|| Error::DegenerateFit("Hölder".into()))?;
    let hoelder_constant = hx
        .iter()
        .zip(&hy)
        .map(|(r, inc)| inc / (amplitude_scale * r.powf(eps)))
        .fold(0.0, f64::max);

    let skip = 2.min(axis.len());
    let monotone_tail = axis[skip..].windows(2).all(|w| w[1].1 <= w[0].1 + 1e-15);

    Ok(BoundReport {
        band: kernel.band,
        decay_rate: -decay.slope,
        decay_residual: decay.rms,
        decay_points: xs.len(),
        amplitude_scale,
        amplitude,
        amplitude_exponent: c0.ln() / (h as f64 * g.ln()),
        hoelder_eps: eps,
        hoelder_fitted: hfit.slope,
        hoelder_constant,
        hoelder_residual: hfit.rms,
        hoelder_points: hx.len(),
        monotone_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{covariance_band, covariance_cumulative, LatticeSpec};

    #[test]
    fn band_d3_decays_monotonically() {
        let s = LatticeSpec::new(3, 2.0, 1.0, 2.0, 3).unwrap();
        let k = covariance_band::<f64>(&s, 2).unwrap();
        let r = bound_report(&k, 0.5).unwrap();
        assert!(r.decay_rate > 0.0 && r.decay_rate.is_finite());
        assert!(r.monotone_tail);
        assert!(r.amplitude.is_finite() && r.hoelder_constant.is_finite());
    }

    #[test]
    fn too_small_lattice_fails_explicitly() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 1).unwrap();
        let k = covariance_cumulative::<f64>(&s, 1).unwrap();
        assert!(matches!(bound_report(&k, 0.5), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn rejects_bad_exponent() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 3).unwrap();
        let k = covariance_cumulative::<f64>(&s, 3).unwrap();
        assert!(bound_report(&k, 1.5).is_err());
    }
}
