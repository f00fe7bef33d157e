use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::estimate::{effective_method, full_basis, Interaction};
use super::quadrature::{average, ModeBasis};
use crate::error::{Error, Result};
use crate::graphs::smeared_source;
use crate::lattice::covariance_cumulative;

pub const DEFAULT_STENCIL_STEP: f64 = 0.5;
const MIN_STENCIL_STEP: f64 = 1e-3;

/// `∂_t⁴ log Z(t f)` at `t = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourthCumulant {
    pub step: f64,
    /// Five-point finite difference of `log Z(t f)`.
    pub stencil: f64,
    /// Fourth cumulant of `-aᵈ Σ f φ` under the interacting weight.
    pub moments: f64,
    /// `-4! λ aᵈ Σ_z (aᵈ Σ_x C_{zx} f_x)⁴`
    pub prediction: f64,
    pub relative_error: f64,
}

pub fn first_order_prediction(cfg: &ExperimentConfig) -> Result<f64> {
    let spec = &cfg.spec;
    let kernel = covariance_cumulative::<f64>(spec, spec.cutoff)?;
    let s = smeared_source(&kernel, &cfg.source.on(spec)?);
    Ok(-24.0 * cfg.lambda * spec.cell_volume() * s.iter().map(|v| v.powi(4)).sum::<f64>())
}

pub fn nongaussianity_with(cfg: &ExperimentConfig, basis: &ModeBasis, step: f64) -> Result<FourthCumulant> {
    if !(step >= MIN_STENCIL_STEP) {
        return Err(Error::InvalidArgument(format!("stencil step {step} below {MIN_STENCIL_STEP}")));
    }
    cfg.validate()?;
    let spec = &cfg.spec;
    let inter = Interaction::new(spec, cfg.lambda, cfg.source.on(spec)?)?;
    let method = effective_method(cfg, basis);
    let ts = [-2.0 * step, -step, 0.0, step, 2.0 * step];
    let avg = average(basis, method, cfg.nodes, cfg.samples, cfg.seed, 10, |phi, out| {
        let (v, x) = inter.parts(phi);
        for (o, t) in out.iter_mut().zip(ts) {
            *o = (v + t * x).exp();
        }
        let w = v.exp();
        let mut p = w;
        for o in out[5..].iter_mut() {
            *o = p;
            p *= x;
        }
    })?
    .pooled();
    let lz: Vec<f64> = avg[..5].iter().map(|v| v.ln()).collect();
    let stencil = (lz[0] - 4.0 * lz[1] + 6.0 * lz[2] - 4.0 * lz[3] + lz[4]) / step.powi(4);
    let m: Vec<f64> = (1..5).map(|p| avg[5 + p] / avg[5]).collect();
    let (m1, m2, m3, m4) = (m[0], m[1], m[2], m[3]);
    let moments = m4 - 4.0 * m3 * m1 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4);
    let prediction = first_order_prediction(cfg)?;
    let relative_error = if prediction != 0.0 { (stencil - prediction).abs() / prediction.abs() } else { stencil.abs() };
    Ok(FourthCumulant { step, stencil, moments, prediction, relative_error })
}

pub fn nongaussianity(cfg: &ExperimentConfig) -> Result<FourthCumulant> {
    nongaussianity_with(cfg, &full_basis(&cfg.spec)?, DEFAULT_STENCIL_STEP)
}
