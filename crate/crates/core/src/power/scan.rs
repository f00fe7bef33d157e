use serde::{Deserialize, Serialize};

use super::exponent::{rho, Half, NodeStats};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Remedy {
    /// Absorbed by the constant `ν_N`.
    VacuumConstant,
    /// Absorbed by the first (order `λ`) term of `μ_N`.
    MassFirstOrder,
    /// Needs the `δμ_N` subtraction of the chain; gains `½` afterwards.
    ChainSubtraction,
    /// Needs a running coupling `λ_N = λ + λ² ℓ_N + …`.
    CouplingCounterterm,
    /// Needs `μ_N` together with a field-strength term `α_N`.
    MassAndFieldStrength,
    /// Needs a renormalization of the source coupling.
    SourceCounterterm,
    /// No finite set of formal counterterm series suffices.
    NonRenormalizable,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivergentClass {
    pub stats: NodeStats,
    pub rho: Half,
    pub rho_bar: Half,
    /// `γ^{k N}` growth written as `"gamma^(kN)"`, or `"N"` when marginal.
    pub growth: String,
    pub remedy: Remedy,
    /// Cured by the `d ≤ 3` counterterms `μ_N`, `ν_N` (with the chain subtraction).
    pub cured_by_superrenormalizable_set: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivergenceCatalog {
    pub dim: usize,
    pub max_vertices: usize,
    pub classes: Vec<DivergentClass>,
    /// Divergent classes appear at every order scanned.
    pub recurs_at_every_order: bool,
    pub verdict: String,
}

fn feasible(n: usize, r: usize, ne: usize) -> bool {
    let half = 4 * n + r;
    if ne > half || (half - ne) % 2 == 1 {
        return false;
    }
    let lines = (half - ne) / 2;
    // a cluster carries at least one line and is connected
    lines >= 1 && lines + 1 >= n + r && n + r >= 1 && r <= 2 * n + 2
}

fn remedy(dim: usize, s: NodeStats) -> Remedy {
    if dim >= 5 {
        return Remedy::NonRenormalizable;
    }
    match (s.externals, s.external_lines) {
        (0, 0) => Remedy::VacuumConstant,
        (0, 2) if dim == 3 && s.couplings == 2 => Remedy::ChainSubtraction,
        (0, 2) if dim == 4 => Remedy::MassAndFieldStrength,
        (0, 2) => Remedy::MassFirstOrder,
        (0, 4) => Remedy::CouplingCounterterm,
        _ => Remedy::SourceCounterterm,
    }
}

/// Cluster classes with `ρ ≤ 0` among clusters of at most `max_vertices` coupling elements.
pub fn divergence_scan(dim: usize, max_vertices: usize) -> Result<DivergenceCatalog> {
    if !(2..=5).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut classes = Vec::new();
    for n in 1..=max_vertices {
        for r in 0..=2 {
            for ne in 0..=4 * n + r {
                if !feasible(n, r, ne) {
                    continue;
                }
                let stats = NodeStats { couplings: n, externals: r, external_lines: ne };
                let (rho_v, rho_bar) = rho(stats, dim);
                if rho_v.0 > 0 {
                    continue;
                }
                let growth = if rho_v.0 == 0 {
                    "N".to_string()
                } else {
                    format!("gamma^({}N)", Half(-rho_v.0))
                };
                let remedy = remedy(dim, stats);
                let cured = dim <= 3
                    && matches!(remedy, Remedy::VacuumConstant | Remedy::MassFirstOrder | Remedy::ChainSubtraction);
                classes.push(DivergentClass { stats, rho: rho_v, rho_bar, growth, remedy, cured_by_superrenormalizable_set: cured });
            }
        }
    }
    let orders: std::collections::BTreeSet<usize> = classes.iter().map(|c| c.stats.couplings).collect();
    let recurs = (1..=max_vertices).all(|n| orders.contains(&n));
    let verdict = match dim {
        2 | 3 => "superrenormalizable: finitely many divergent classes, all removed by mu_N, nu_N",
        4 => "renormalizable: divergent classes recur at every order; lambda_N, mu_N, alpha_N, nu_N needed as formal series",
        _ => "non-renormalizable: divergent classes with growing numbers of external lines at every order",
    }
    .to_string();
    Ok(DivergenceCatalog { dim, max_vertices, classes, recurs_at_every_order: recurs, verdict })
}
