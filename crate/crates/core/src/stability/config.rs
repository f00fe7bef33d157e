use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::sampler::threshold_for_coupling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactQuadrature,
    QuasiMonteCarlo,
    MonteCarlo,
}

/// External source on the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Zero,
    /// Same value on every site, any cutoff.
    Constant(f64),
    /// One value per site; tied to a single lattice.
    Table(Vec<f64>),
}

impl Source {
    pub fn on(&self, spec: &LatticeSpec) -> Result<Vec<f64>> {
        let n = spec.n_sites();
        match self {
            Source::Zero => Ok(vec![0.0; n]),
            Source::Constant(c) => Ok(vec![*c; n]),
            Source::Table(t) if t.len() == n => Ok(t.clone()),
            Source::Table(t) => Err(Error::InvalidArgument(format!("source table has {} entries, lattice {n}", t.len()))),
        }
    }

    fn max_abs(&self) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant(c) => c.abs(),
            Source::Table(t) => t.iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: LatticeSpec,
    pub lambda: f64,
    pub source: Source,
    pub order: usize,
    /// `B = b_scale · ln(e + 1/λ)`.
    pub b_scale: f64,
    pub method: Method,
    pub seed: u64,
    /// Points for the sampling methods.
    pub samples: usize,
    /// Gauss–Hermite nodes per retained mode.
    pub nodes: usize,
}

pub const MIN_NODES: usize = 32;

impl ExperimentConfig {
    pub fn new(spec: LatticeSpec, lambda: f64, source: Source, order: usize) -> Self {
        Self {
            spec,
            lambda,
            source,
            order,
            b_scale: 1.0,
            method: Method::ExactQuadrature,
            seed: 0,
            samples: 1 << 16,
            nodes: MIN_NODES,
        }
    }

    /// `λ = 0` is accepted as the free reference point; negative or `λ ≥ 1` is not.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("coupling {} outside [0, 1)", self.lambda)));
        }
        if self.source.max_abs() > 1.0 {
            return Err(Error::InvalidArgument("source values must satisfy |f| ≤ 1".into()));
        }
        if self.b_scale <= 0.0 {
            return Err(Error::InvalidArgument("B scale must be positive".into()));
        }
        if self.method == Method::ExactQuadrature && self.nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!("quadrature needs at least {MIN_NODES} nodes per mode")));
        }
        if self.method != Method::ExactQuadrature && self.samples < 64 {
            return Err(Error::InvalidArgument("sampling methods need at least 64 points".into()));
        }
        if self.spec.n_sites() > super::MAX_ESTIMATE_SITES {
            return Err(Error::SizeGuard(format!(
                "{} sites exceed {}",
                self.spec.n_sites(),
                super::MAX_ESTIMATE_SITES
            )));
        }
        self.source.on(&self.spec).map(|_| ())
    }

    pub fn threshold(&self) -> f64 {
        threshold_for_coupling(self.lambda.max(f64::MIN_POSITIVE), self.b_scale)
    }

    pub fn with_cutoff(&self, n: usize) -> Result<Self> {
        Ok(Self { spec: self.spec.with_cutoff(n)?, ..self.clone() })
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }
}
