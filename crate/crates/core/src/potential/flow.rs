use std::path::Path;

use serde::{Deserialize, Serialize};

use super::functional::{bare_potential, TermClass};
use super::integrate::integrate_down;
use super::remainder::{remainder_bound, RemainderBound};
use super::split::{relevant_split, RescaledCouplings};
use crate::error::Result;
use crate::graphs::counterterms;
use crate::lattice::LatticeSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowStep {
    pub scale: usize,
    pub inventory: Vec<TermClass>,
    pub couplings: Option<RescaledCouplings>,
    /// `E(j,h)` per unit volume, by order.
    pub field_independent: Vec<f64>,
    pub remainder: Option<RemainderBound>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowReport {
    pub spec: LatticeSpec,
    pub lambda: f64,
    pub order: usize,
    pub steps: Vec<FlowStep>,
}

impl FlowReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}

/// Runs the truncated recursion from the bare potential down to scale 0 and
/// records each scale; remainder bounds use the given `B` and `C_j`.
pub fn run_flow(spec: &LatticeSpec, lambda: f64, f: &[f64], j: usize, b: f64, c_j: f64) -> Result<FlowReport> {
    let ct = counterterms(spec, lambda)?;
    let v = bare_potential(spec, &ct, f, j)?;
    let volume = spec.volume();
    let steps = integrate_down(&v, j, 0)?
        .iter()
        .map(|p| {
            let split = relevant_split(p)?;
            let remainder = (p.scale > 0)
                .then(|| remainder_bound(j, p.scale, lambda, b, spec.dim, spec.gamma, c_j))
                .transpose()?;
            Ok(FlowStep {
                scale: p.scale,
                inventory: p.inventory(),
                couplings: split.rescaled,
                field_independent: split.field_independent.iter().map(|e| e / volume).collect(),
                remainder,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FlowReport { spec: spec.clone(), lambda, order: j, steps })
}
