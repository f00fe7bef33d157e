use num_rational::BigRational;
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};

use super::clusters::ClusterTree;
use super::exponent::{rational_to_f64, rho, Half, NodeStats};
use crate::error::{Error, Result};

/// Tree shape with per-node statistics and no scale labels.
/// Node `i` has parent `parents[i]` (`None` = root); parents precede children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeTopology {
    pub parents: Vec<Option<usize>>,
    pub stats: Vec<NodeStats>,
}

impl TreeTopology {
    pub fn new(parents: Vec<Option<usize>>, stats: Vec<NodeStats>) -> Result<Self> {
        if parents.len() != stats.len() {
            return Err(Error::InvalidArgument("parents and stats differ in length".into()));
        }
        if parents.iter().enumerate().any(|(i, p)| p.is_some_and(|p| p >= i)) {
            return Err(Error::InvalidArgument("parents must precede children".into()));
        }
        Ok(Self { parents, stats })
    }

    /// A single cluster.
    pub fn single(stats: NodeStats) -> Self {
        Self { parents: vec![None], stats: vec![stats] }
    }

    pub fn from_tree(tree: &ClusterTree) -> Self {
        let parents = tree
            .nodes
            .iter()
            .skip(1)
            .map(|n| n.parent.and_then(|p| p.checked_sub(1)))
            .collect();
        let stats = tree
            .nodes
            .iter()
            .skip(1)
            .map(|n| NodeStats { couplings: n.couplings, externals: n.externals, external_lines: n.external_lines })
            .collect();
        Self { parents, stats }
    }

    pub fn exponents(&self, dim: usize, improved: bool) -> Vec<Half> {
        self.stats
            .iter()
            .map(|&s| {
                let (r, rb) = rho(s, dim);
                if improved {
                    rb
                } else {
                    r
                }
            })
            .collect()
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parents.len()];
        for (i, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(i);
            }
        }
        ch
    }
}

/// `Σ_{h_v} Π_v γ^{-e_v (h_v - h_{v'})}` over `0 = h_root < h_v < h_child ≤ n_max`.
pub fn finite_scale_sum<T: Float>(topo: &TreeTopology, exponents: &[T], gamma: T, n_max: usize) -> T {
    let ch = topo.children();
    // table[v][h] = Σ over the subtree of v with v's parent at scale h
    let mut table: Vec<Vec<T>> = vec![Vec::new(); topo.parents.len()];
    for v in (0..topo.parents.len()).rev() {
        let mut row = vec![T::zero(); n_max + 1];
        for (hp, slot) in row.iter_mut().enumerate() {
            let mut acc = T::zero();
            for h in hp + 1..=n_max {
                let mut term = gamma.powf(-exponents[v] * T::from(h - hp).expect("small integer"));
                for &c in &ch[v] {
                    term = term * table[c][h];
                }
                acc = acc + term;
            }
            *slot = acc;
        }
        table[v] = row;
    }
    topo.parents
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_none())
        .fold(T::one(), |acc, (v, _)| acc * table[v][0])
}

/// `N → ∞` limit: `Π_v 1/(γ^{e_v} - 1)` when every exponent is positive.
pub fn infinite_scale_sum<T: Float>(exponents: &[T], gamma: T) -> Option<T> {
    if exponents.iter().any(|&e| e <= T::zero()) {
        return None;
    }
    Some(exponents.iter().fold(T::one(), |acc, &e| acc / (gamma.powf(e) - T::one())))
}

fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

fn integer_exponents(exps: &[Half]) -> Result<Vec<i64>> {
    exps.iter()
        .map(|e| e.as_integer().ok_or_else(|| Error::InvalidArgument(format!("exponent {e} is not an integer"))))
        .collect()
}

/// Exact finite sum for integer exponents and rational `γ`.
pub fn finite_scale_sum_exact(topo: &TreeTopology, exponents: &[Half], gamma: &BigRational, n_max: usize) -> Result<BigRational> {
    let exps = integer_exponents(exponents)?;
    let ch = topo.children();
    let mut table: Vec<Vec<BigRational>> = vec![Vec::new(); topo.parents.len()];
    for v in (0..topo.parents.len()).rev() {
        let mut row = vec![BigRational::zero(); n_max + 1];
        for (hp, slot) in row.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for h in hp + 1..=n_max {
                let mut term = rational_pow(gamma, -exps[v] * (h - hp) as i64);
                for &c in &ch[v] {
                    term *= &table[c][h];
                }
                acc += term;
            }
            *slot = acc;
        }
        table[v] = row;
    }
    Ok(topo
        .parents
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_none())
        .fold(BigRational::one(), |acc, (v, _)| acc * &table[v][0]))
}

/// Exact `N → ∞` sum; `None` when some exponent is not positive.
pub fn infinite_scale_sum_exact(exponents: &[Half], gamma: &BigRational) -> Result<Option<BigRational>> {
    let exps = integer_exponents(exponents)?;
    if exps.iter().any(|&e| e <= 0) {
        return Ok(None);
    }
    Ok(Some(exps.iter().fold(BigRational::one(), |acc, &e| {
        acc / (rational_pow(gamma, e) - BigRational::one())
    })))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    Convergent,
    Marginal,
    Divergent,
}

pub fn classify(exponents: &[Half]) -> Convergence {
    match exponents.iter().min() {
        Some(e) if e.0 < 0 => Convergence::Divergent,
        Some(e) if e.0 == 0 => Convergence::Marginal,
        _ => Convergence::Convergent,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeVerdict {
    pub stats: NodeStats,
    pub rho: Half,
    pub rho_bar: Half,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerCountingVerdict {
    pub dim: usize,
    pub gamma: f64,
    pub improved: bool,
    pub topology: TreeTopology,
    pub nodes: Vec<NodeVerdict>,
    pub class: Convergence,
    /// `(N_max, sum)`
    pub finite_sums: Vec<(usize, f64)>,
    pub infinite_sum: Option<f64>,
    /// Exact limit as a fraction, when the exponents are integers and `γ` is rational.
    pub infinite_sum_exact: Option<String>,
}

/// Full verdict for a topology; `improved = false` uses `ρ` in place of `ρ̄`.
pub fn scale_sum(topo: &TreeTopology, dim: usize, gamma: f64, n_max: &[usize], improved: bool) -> PowerCountingVerdict {
    let nodes: Vec<NodeVerdict> = topo
        .stats
        .iter()
        .map(|&s| {
            let (rho, rho_bar) = rho(s, dim);
            NodeVerdict { stats: s, rho, rho_bar }
        })
        .collect();
    let exps = topo.exponents(dim, improved);
    let fexps: Vec<f64> = exps.iter().map(|e| e.to_f64()).collect();
    let finite_sums = n_max.iter().map(|&n| (n, finite_scale_sum(topo, &fexps, gamma, n))).collect();
    let infinite_sum = infinite_scale_sum(&fexps, gamma);
    let infinite_sum_exact = BigRational::from_float(gamma)
        .filter(|g| rational_to_f64(g) == gamma && gamma.fract() == 0.0)
        .and_then(|g| infinite_scale_sum_exact(&exps, &g).ok().flatten())
        .map(|r| r.to_string());
    PowerCountingVerdict {
        dim,
        gamma,
        improved,
        topology: topo.clone(),
        nodes,
        class: classify(&exps),
        finite_sums,
        infinite_sum,
        infinite_sum_exact,
    }
}
