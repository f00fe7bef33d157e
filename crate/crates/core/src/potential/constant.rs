use serde::{Deserialize, Serialize};

use super::split::vacuum_counterterm;
use crate::error::{Error, Result};
use crate::graphs::{bare_series, counterterms_from_kernel};
use crate::lattice::{covariance_between, covariance_cumulative, LatticeSpec};
use crate::scalar::Real;

/// `E(j,h)` per unit volume, by order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldIndependentPart<T> {
    pub order: usize,
    pub scale: usize,
    pub by_order: Vec<T>,
}

impl<T: Real> FieldIndependentPart<T> {
    pub fn total(&self) -> T {
        self.by_order.iter().copied().fold(T::zero(), |a, b| a + b)
    }
}

/// Perturbative `(1/|Λ|) log Z` through order `j` with propagator
/// `C^{(≤N)} - C^{(≤h)}` and the bare counterterms of cutoff `N`, with the
/// vacuum constant referred to scale `h` (`+ν_h`, `ν_0 = 0`).
pub fn field_independent_part<T: Real>(spec: &LatticeSpec, j: usize, h: usize, lambda: T) -> Result<FieldIndependentPart<T>> {
    let f = vec![T::zero(); spec.n_sites()];
    field_independent_part_with_source(spec, j, h, lambda, &f)
}

/// As [`field_independent_part`] with an external source.
pub fn field_independent_part_with_source<T: Real>(
    spec: &LatticeSpec,
    j: usize,
    h: usize,
    lambda: T,
    f: &[T],
) -> Result<FieldIndependentPart<T>> {
    if h > spec.cutoff {
        return Err(Error::ScaleOutOfRange { h, n: spec.cutoff });
    }
    if f.len() != spec.n_sites() {
        return Err(Error::InvalidArgument(format!("source has {} entries, lattice {}", f.len(), spec.n_sites())));
    }
    let ct = counterterms_from_kernel(&covariance_cumulative::<T>(spec, spec.cutoff)?, lambda)?;
    let diff = covariance_between::<T>(spec, h, spec.cutoff)?;
    let series = bare_series(&diff, &ct, f, j)?;
    let nu = vacuum_counterterm(spec, h, lambda, j)?;
    let by_order = series.terms.iter().zip(&nu).map(|(&t, &n)| t + n).collect();
    Ok(FieldIndependentPart { order: j, scale: h, by_order })
}
