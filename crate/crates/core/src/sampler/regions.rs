use serde::{Deserialize, Serialize};

use super::hoelder::{cube_norm, default_tau, neighbourhood};
use super::multiscale::MultiscaleField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionClassification {
    pub h: usize,
    pub b: f64,
    /// Sites with `|X^{(h)}| > B h⁴`.
    pub d1: Vec<usize>,
    /// Pairs `η < η'` at distance below `1/m` with `|Y^{(h)}| > B h⁴` (d = 3 only).
    pub d2: Vec<(usize, usize)>,
    /// Cubes of `Q_h` (pavement order) with `‖z^{(h)}‖_Δ > B h²`.
    pub r: Vec<usize>,
    pub chi_b: bool,
}

/// `B = scale · log(e + 1/λ)`.
pub fn threshold_for_coupling(lambda: f64, scale: f64) -> f64 {
    scale * (std::f64::consts::E + 1.0 / lambda).ln()
}

pub fn classify_regions(field: &MultiscaleField, h: usize, b: f64) -> RegionClassification {
    let spec = &field.spec;
    let hf = h as f64;
    let big = b * hf.powi(4);

    let d1 = field
        .x_field(h)
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > big)
        .map(|(i, _)| i)
        .collect();

    let mut d2 = Vec::new();
    if spec.dim == 3 {
        let reach = 1.0 / spec.mass;
        for eta in 0..spec.n_sites() {
            for eta_p in eta + 1..spec.n_sites() {
                if spec.torus_distance(eta, eta_p) < reach && field.y(h, eta, eta_p).abs() > big {
                    d2.push((eta, eta_p));
                }
            }
        }
    }

    let layer = field.layer(h);
    let nb = neighbourhood(spec, h);
    let tau = default_tau(spec.dim);
    let r: Vec<usize> = spec
        .pavement(h)
        .iter()
        .enumerate()
        .filter(|(_, c)| cube_norm(spec, &layer.values, &nb, c, tau) > b * hf * hf)
        .map(|(i, _)| i)
        .collect();
    let chi_b = r.is_empty();
    RegionClassification { h, b, d1, d2, r, chi_b }
}
