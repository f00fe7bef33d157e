use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::quadrature::{average, check_quadrature, ModeBasis, SAMPLING_BATCHES};
use crate::error::{Error, Result};
use crate::graphs::{counterterms, logZ_series, smeared_source};
use crate::lattice::{covariance_cumulative, LatticeSpec};
use crate::stats::mean_stderr;

/// `-aᵈ Σ_x (λφ⁴ + μ_N φ² + ν_N + t f φ)` with the full counterterms.
#[derive(Clone, Debug)]
pub struct Interaction {
    pub cell: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub source: Vec<f64>,
}

impl Interaction {
    pub fn new(spec: &LatticeSpec, lambda: f64, source: Vec<f64>) -> Result<Self> {
        let (mu, nu) = if lambda > 0.0 {
            let ct = counterterms(spec, lambda)?;
            (ct.mu, ct.nu)
        } else {
            (0.0, 0.0)
        };
        Ok(Self { cell: spec.cell_volume(), lambda, mu, nu, source })
    }

    /// Exponent without the source, and `X = -aᵈ Σ f φ`.
    pub fn parts(&self, phi: &[f64]) -> (f64, f64) {
        let mut v = 0.0;
        let mut x = 0.0;
        for (&p, &f) in phi.iter().zip(&self.source) {
            let p2 = p * p;
            v += self.lambda * p2 * p2 + self.mu * p2 + self.nu;
            x += f * p;
        }
        (-self.cell * v, -self.cell * x)
    }
}

/// Dense eigendecomposition limit for the covariance.
pub const MAX_ESTIMATE_SITES: usize = 1024;

/// Covariance eigenbasis of `C^{(≤N)}`.
pub fn full_basis(spec: &LatticeSpec) -> Result<ModeBasis> {
    if spec.n_sites() > MAX_ESTIMATE_SITES {
        return Err(Error::SizeGuard(format!("{} sites exceed {MAX_ESTIMATE_SITES}", spec.n_sites())));
    }
    Ok(ModeBasis::from_covariance(&covariance_cumulative::<f64>(spec, spec.cutoff)?.dense()))
}

/// Quadrature if the mode and node caps allow it, otherwise quasi-Monte Carlo.
pub fn effective_method(cfg: &ExperimentConfig, basis: &ModeBasis) -> Method {
    match cfg.method {
        Method::ExactQuadrature if check_quadrature(basis, cfg.nodes).is_err() => Method::QuasiMonteCarlo,
        m => m,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZEstimate {
    pub method: Method,
    pub points: u64,
    /// `log Z(f)` and `log Z(0)`, not divided by the volume.
    pub log_z: f64,
    pub log_z0: f64,
    /// `(1/|Λ|) log Z(f)` and its error bar.
    pub per_volume: f64,
    pub per_volume_err: f64,
    /// `(1/|Λ|) log(Z(f)/Z(0))` and its error bar.
    pub ratio: f64,
    pub ratio_err: f64,
}

/// Estimates `Z_N(f)` and `Z_N(0)` from the same nodes or samples.
#[allow(non_snake_case)]
pub fn estimate_Z_with(cfg: &ExperimentConfig, basis: &ModeBasis) -> Result<ZEstimate> {
    cfg.validate()?;
    let spec = &cfg.spec;
    let inter = Interaction::new(spec, cfg.lambda, cfg.source.on(spec)?)?;
    let method = effective_method(cfg, basis);
    let avg = average(basis, method, cfg.nodes, cfg.samples, cfg.seed, 2, |phi, out| {
        let (v, x) = inter.parts(phi);
        out[0] = (v + x).exp();
        out[1] = v.exp();
    })?;
    let pooled = avg.pooled();
    let vol = spec.volume();
    let (log_z, log_z0) = (pooled[0].ln(), pooled[1].ln());
    let (mut per_volume_err, mut ratio_err) = (0.0, 0.0);
    if method != Method::ExactQuadrature {
        let rel_f: Vec<f64> = avg.means.iter().map(|m| m[0] / pooled[0]).collect();
        let rel_r: Vec<f64> = avg.means.iter().map(|m| m[0] / pooled[0] - m[1] / pooled[1]).collect();
        per_volume_err = mean_stderr(&rel_f).1 / vol;
        ratio_err = mean_stderr(&rel_r).1 / vol;
        debug_assert_eq!(avg.means.len(), SAMPLING_BATCHES);
    }
    Ok(ZEstimate {
        method,
        points: avg.points,
        log_z,
        log_z0,
        per_volume: log_z / vol,
        per_volume_err,
        ratio: (log_z - log_z0) / vol,
        ratio_err,
    })
}

#[allow(non_snake_case)]
pub fn estimate_Z(cfg: &ExperimentConfig) -> Result<ZEstimate> {
    estimate_Z_with(cfg, &full_basis(&cfg.spec)?)
}

/// Renormalized series of `(1/|Λ|) log Z(f)` by order; at `λ = 0` only the
/// Gaussian source term survives.
pub fn series_by_order(spec: &LatticeSpec, lambda: f64, f: &[f64], j: usize) -> Result<Vec<f64>> {
    if lambda > 0.0 {
        return Ok(logZ_series(spec, lambda, f, j)?.terms);
    }
    let kernel = covariance_cumulative::<f64>(spec, spec.cutoff)?;
    let s = smeared_source(&kernel, f);
    let mut out = vec![0.0; j + 1];
    out[0] = 0.5 * spec.cell_volume() * s.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() / spec.volume();
    Ok(out)
}
