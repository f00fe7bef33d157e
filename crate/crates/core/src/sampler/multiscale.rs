use super::layer::{layer_amplitude, FieldLayer};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Layers `z^{(1)}..z^{(N)}` of one lattice with the partial sums
/// `φ^{(≤h)} = Σ_{k≤h} γ^{(d-2)k/2} z^{(k)}` precomputed.
#[derive(Clone, Debug)]
pub struct MultiscaleField {
    pub spec: LatticeSpec,
    layers: Vec<FieldLayer>,
    partial: Vec<Vec<f64>>,
}

pub fn assemble(layers: Vec<FieldLayer>) -> Result<MultiscaleField> {
    let first = layers
        .first()
        .ok_or_else(|| Error::InvalidArgument("no layers given".into()))?;
    let spec = first.spec.clone();
    let n = spec.cutoff;
    let mut slots: Vec<Option<FieldLayer>> = vec![None; n];
    for layer in layers {
        if layer.spec != spec {
            return Err(Error::InvalidArgument("layers come from different lattices".into()));
        }
        if layer.h == 0 || layer.h > n {
            return Err(Error::ScaleOutOfRange { h: layer.h, n });
        }
        let h = layer.h;
        if slots[h - 1].replace(layer).is_some() {
            return Err(Error::InvalidArgument(format!("scale {h} given twice")));
        }
    }
    let layers: Vec<FieldLayer> = slots
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::InvalidArgument(format!("missing scale {}", i + 1))))
        .collect::<Result<_>>()?;

    let mut partial = Vec::with_capacity(n + 1);
    let mut acc = vec![0.0; spec.n_sites()];
    partial.push(acc.clone());
    for layer in &layers {
        let amp = layer_amplitude(&spec, layer.h);
        for (a, z) in acc.iter_mut().zip(&layer.values) {
            *a += amp * z;
        }
        partial.push(acc.clone());
    }
    Ok(MultiscaleField { spec, layers, partial })
}

impl MultiscaleField {
    pub fn layer(&self, h: usize) -> &FieldLayer {
        &self.layers[h - 1]
    }

    pub fn layers(&self) -> &[FieldLayer] {
        &self.layers
    }

    /// `φ^{(≤h)}`; `h = 0` gives the zero field.
    pub fn phi(&self, h: usize) -> &[f64] {
        &self.partial[h]
    }

    /// Normalization `γ^{(d-2)h/2}`, read as `h^{1/2}` in `d = 2`.
    pub fn normalization(&self, h: usize) -> f64 {
        if self.spec.dim == 2 {
            (h as f64).sqrt()
        } else {
            layer_amplitude(&self.spec, h)
        }
    }

    /// `X^{(h)} = φ^{(≤h)} / normalization(h)`.
    pub fn x_field(&self, h: usize) -> Vec<f64> {
        let s = self.normalization(h);
        self.phi(h).iter().map(|v| v / s).collect()
    }

    /// `Y^{(h)}_{ηη'} = (φ_η - φ_η') / (γ^h |η-η'|)^{1/4}`, zero on the diagonal.
    pub fn y(&self, h: usize, eta: usize, eta_p: usize) -> f64 {
        if eta == eta_p {
            return 0.0;
        }
        let r = self.spec.gamma.powi(h as i32) * self.spec.mass * self.spec.torus_distance(eta, eta_p);
        (self.phi(h)[eta] - self.phi(h)[eta_p]) / r.powf(0.25)
    }
}
