use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::cumulant::{nongaussianity_with, FourthCumulant, DEFAULT_STENCIL_STEP};
use super::estimate::{estimate_Z_with, full_basis, series_by_order, ZEstimate};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::potential::remainder_bound;
use crate::sampler::tail_stats;

/// Fitted `c e^{-c' B² h²}` from the layer-norm tails at scale 1.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TailFit {
    pub prefactor: f64,
    pub rate: f64,
}

impl TailFit {
    pub fn term(&self, b: f64, h: usize) -> f64 {
        self.prefactor * (-self.rate * b * b * (h * h) as f64).exp()
    }
}

pub fn fit_tail(spec: &LatticeSpec, samples: usize, seed: u64) -> Result<TailFit> {
    let grid: Vec<f64> = (1..=24).map(|i| 0.25 * i as f64).collect();
    let stats = tail_stats(spec, 1, &grid, samples.max(1000), seed)?;
    match (stats.slope, stats.prefactor) {
        (Some(s), Some(p)) if s < 0.0 => Ok(TailFit { prefactor: p, rate: -s }),
        _ => Err(Error::DegenerateFit("layer-norm tail has no decaying fit".into())),
    }
}

/// `C_j` and `B` shared by every point of a sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnvelopeCalibration {
    pub order: usize,
    pub c_j: f64,
    pub b: f64,
    pub lambda_ref: f64,
    pub tail: TailFit,
}

/// Safety factor on the order-`(j+1)` term fixing `C_j`.
pub const CALIBRATION_SAFETY: f64 = 2.0;

/// Chooses `C_j` so that `Σ_h R(j,h)` at `λ_ref` is twice the exact
/// order-`(j+1)` series term there.
pub fn calibrate(cfg: &ExperimentConfig, lambda_ref: f64, tail: TailFit) -> Result<EnvelopeCalibration> {
    let j = cfg.order;
    if j + 1 > crate::graphs::MAX_SERIES_ORDER {
        return Err(Error::InvalidArgument(format!("calibration needs the order-{} series", j + 1)));
    }
    if lambda_ref <= 0.0 {
        return Err(Error::InvalidArgument("calibration needs a positive coupling".into()));
    }
    let f = cfg.source.on(&cfg.spec)?;
    let next = series_by_order(&cfg.spec, lambda_ref, &f, j + 1)?[j + 1].abs();
    let b = cfg.with_lambda(lambda_ref).threshold();
    let unit = remainder_sum(&cfg.spec, j, lambda_ref, b, 1.0)?;
    Ok(EnvelopeCalibration { order: j, c_j: CALIBRATION_SAFETY * next / unit, b, lambda_ref, tail })
}

pub fn remainder_sum(spec: &LatticeSpec, j: usize, lambda: f64, b: f64, c_j: f64) -> Result<f64> {
    (1..=spec.cutoff)
        .map(|h| remainder_bound(j, h, lambda, b, spec.dim, spec.gamma, c_j).map(|r| r.value))
        .sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub config: ExperimentConfig,
    pub estimate: ZEstimate,
    /// Series of `(1/|Λ|) log Z(f)` through order `j`, by order.
    pub series_by_order: Vec<f64>,
    pub series: f64,
    pub remainder: f64,
    pub tail: f64,
    pub half_width: f64,
    pub discrepancy: f64,
    pub inside: bool,
    pub fourth_cumulant: Option<FourthCumulant>,
}

/// Absolute slack for roundoff when the envelope collapses (`λ = 0`).
pub const ENVELOPE_FLOOR: f64 = 1e-12;

pub fn stability_report(cfg: &ExperimentConfig, cal: Option<&EnvelopeCalibration>, with_cumulant: bool) -> Result<StabilityReport> {
    let basis = full_basis(&cfg.spec)?;
    let estimate = estimate_Z_with(cfg, &basis)?;
    let f = cfg.source.on(&cfg.spec)?;
    let series_by_order = series_by_order(&cfg.spec, cfg.lambda, &f, cfg.order)?;
    let series: f64 = series_by_order.iter().sum();
    let (remainder, tail) = match (cal, cfg.lambda > 0.0) {
        (Some(c), true) => (
            remainder_sum(&cfg.spec, cfg.order, cfg.lambda, c.b, c.c_j)?,
            (1..=cfg.spec.cutoff).map(|h| c.tail.term(c.b, h)).sum(),
        ),
        _ => (0.0, 0.0),
    };
    let half_width = remainder + tail;
    let discrepancy = estimate.per_volume - series;
    let inside = discrepancy.abs() <= half_width + 3.0 * estimate.per_volume_err + ENVELOPE_FLOOR;
    let fourth_cumulant = if with_cumulant {
        Some(nongaussianity_with(cfg, &basis, DEFAULT_STENCIL_STEP)?)
    } else {
        None
    };
    Ok(StabilityReport {
        config: cfg.clone(),
        estimate,
        series_by_order,
        series,
        remainder,
        tail,
        half_width,
        discrepancy,
        inside,
        fourth_cumulant,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeSweep {
    pub rows: Vec<StabilityReport>,
    /// `max - min` of the estimates across cutoffs.
    pub spread: f64,
    pub max_half_width: f64,
    pub all_inside: bool,
}

/// `γ = 2` reaches `N = 3` in `d = 2` and `N = 2` in `d = 3`.
pub const MAX_SWEEP_SITES: usize = 64;

/// Runs the report at each cutoff in `cutoffs` at fixed physical volume,
/// calibrating `C_j` per cutoff at the configured coupling.
pub fn stability_envelope(cfg: &ExperimentConfig, cutoffs: &[usize], tail: Option<TailFit>) -> Result<EnvelopeSweep> {
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &n in cutoffs {
        let c = cfg.with_cutoff(n)?;
        if c.spec.n_sites() > MAX_SWEEP_SITES {
            return Err(Error::SizeGuard(format!("cutoff {n} gives {} sites (cap {MAX_SWEEP_SITES})", c.spec.n_sites())));
        }
        let cal = if cfg.lambda > 0.0 {
            let t = match tail {
                Some(t) => t,
                None => fit_tail(&c.spec, 2000, cfg.seed)?,
            };
            Some(calibrate(&c, cfg.lambda, t)?)
        } else {
            None
        };
        rows.push(stability_report(&c, cal.as_ref(), false)?);
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.estimate.per_volume), b.max(r.estimate.per_volume)));
    Ok(EnvelopeSweep {
        spread: hi - lo,
        max_half_width: rows.iter().map(|r| r.half_width).fold(0.0, f64::max),
        all_inside: rows.iter().all(|r| r.inside),
        rows,
    })
}
