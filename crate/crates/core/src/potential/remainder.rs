use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `R(j,h) = C_j B^{4j} (λ h² γ^{-(4-d)h})^{j+1} γ^{dh}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderBound {
    pub j: usize,
    pub h: usize,
    pub lambda: f64,
    pub b: f64,
    pub dim: usize,
    pub gamma: f64,
    pub c_j: f64,
    pub value: f64,
}

fn remainder_value(j: usize, h: usize, lambda: f64, b: f64, dim: usize, gamma: f64, c_j: f64) -> f64 {
    let hf = h as f64;
    let base = lambda * hf * hf * gamma.powf(-((4.0 - dim as f64) * hf));
    c_j * b.powi(4 * j as i32) * base.powi(j as i32 + 1) * gamma.powf(dim as f64 * hf)
}

pub fn remainder_bound(j: usize, h: usize, lambda: f64, b: f64, dim: usize, gamma: f64, c_j: f64) -> Result<RemainderBound> {
    if lambda < 0.0 || b < 0.0 || c_j < 0.0 || gamma <= 1.0 || dim == 0 {
        return Err(Error::InvalidArgument("remainder bound needs λ, B, C_j ≥ 0, γ > 1, d ≥ 1".into()));
    }
    let value = remainder_value(j, h, lambda, b, dim, gamma, c_j);
    Ok(RemainderBound { j, h, lambda, b, dim, gamma, c_j, value })
}

/// `(4-d)(j+1) > d`.
pub fn remainder_summable(j: usize, dim: usize) -> bool {
    (4 - dim.min(4) as i64) * (j as i64 + 1) > dim as i64
}

/// Partial sums `Σ_{h=1}^{n} R(j,h)` with a Cauchy test between `n/2` and `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummabilityCheck {
    pub j: usize,
    pub dim: usize,
    pub partial_sums: Vec<f64>,
    pub relative_tail: f64,
    pub numerically_convergent: bool,
    pub predicted_convergent: bool,
}

pub const CAUCHY_TOLERANCE: f64 = 0.05;

pub fn summability_check(j: usize, dim: usize, lambda: f64, b: f64, gamma: f64, c_j: f64, n_max: usize) -> Result<SummabilityCheck> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("need at least two partial sums".into()));
    }
    let mut acc = 0.0;
    let mut partial_sums = Vec::with_capacity(n_max);
    for h in 1..=n_max {
        acc += remainder_bound(j, h, lambda, b, dim, gamma, c_j)?.value;
        partial_sums.push(acc);
    }
    let full = partial_sums[n_max - 1];
    let half = partial_sums[n_max / 2 - 1];
    let relative_tail = if full > 0.0 { (full - half) / full } else { 0.0 };
    Ok(SummabilityCheck {
        j,
        dim,
        partial_sums,
        relative_tail,
        numerically_convergent: relative_tail < CAUCHY_TOLERANCE,
        predicted_convergent: remainder_summable(j, dim),
    })
}
