use super::layer::FieldLayer;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Displacements of natural length `m γ^h |x-η| ≤ 1`, with that length.
pub(crate) fn neighbourhood(spec: &LatticeSpec, h: usize) -> Vec<(Vec<i64>, f64)> {
    let unit = spec.mass * spec.gamma.powi(h as i32);
    (0..spec.n_sites())
        .filter_map(|i| {
            let r = spec.torus_length(i) * unit;
            (r <= 1.0 + 1e-12).then(|| (spec.signed_displacement(i), r))
        })
        .collect()
}

fn shift(spec: &LatticeSpec, x: usize, disp: &[i64]) -> usize {
    let n = spec.side() as i64;
    let c: Vec<usize> = spec
        .coords(x)
        .iter()
        .zip(disp)
        .map(|(&a, &b)| (a as i64 + b).rem_euclid(n) as usize)
        .collect();
    spec.index(&c)
}

/// `max_{x∈Δ, |x-η|≤1} |z_x| + τ |z_x - z_η| / |x-η|^{1/4}` with distances in
/// the units of scale `h` (so `Δ` is a cube of `Q_h` in lattice coordinates).
pub fn hoelder_norm_at_scale(spec: &LatticeSpec, values: &[f64], h: usize, cube: &[usize], tau: f64) -> f64 {
    let nb = neighbourhood(spec, h);
    cube_norm(spec, values, &nb, cube, tau)
}

pub(crate) fn cube_norm(spec: &LatticeSpec, values: &[f64], nb: &[(Vec<i64>, f64)], cube: &[usize], tau: f64) -> f64 {
    let mut best = 0.0f64;
    for &x in cube {
        let zx = values[x];
        for (disp, r) in nb {
            let incr = if *r > 0.0 && tau != 0.0 {
                let eta = shift(spec, x, disp);
                tau * (zx - values[eta]).abs() / r.powf(0.25)
            } else {
                0.0
            };
            best = best.max(zx.abs() + incr);
        }
    }
    best
}

/// Default `τ`: 0 in `d = 2`, 1 otherwise.
pub fn default_tau(dim: usize) -> f64 {
    if dim == 2 {
        0.0
    } else {
        1.0
    }
}

/// Norm of a layer on the unit cube `delta` of its own pavement.
pub fn hoelder_norm(layer: &FieldLayer, delta: usize, tau: f64) -> Result<f64> {
    let cubes = layer.spec.pavement(layer.h);
    let cube = cubes
        .get(delta)
        .ok_or_else(|| Error::InvalidArgument(format!("cube {delta} out of {}", cubes.len())))?;
    Ok(hoelder_norm_at_scale(&layer.spec, &layer.values, layer.h, cube, tau))
}

/// Norms of every cube of the layer's pavement.
pub fn cube_norms(layer: &FieldLayer, tau: f64) -> Vec<f64> {
    let nb = neighbourhood(&layer.spec, layer.h);
    layer
        .spec
        .pavement(layer.h)
        .iter()
        .map(|c| cube_norm(&layer.spec, &layer.values, &nb, c, tau))
        .collect()
}
