use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{covariance_cumulative, values_to_weights, weights_to_values, LatticeSpec, PropagatorKernel};
use crate::scalar::Real;

/// Lattice sums of powers of `C^{(≤N)}` entering the counterterms.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VacuumSums<T> {
    /// `C_{00}`
    pub origin: T,
    /// `Σ_η C_{0η}³ aᵈ`
    pub cubic: T,
    /// `Σ_η C_{0η}⁴ aᵈ`
    pub quartic: T,
    /// `Σ_{η,η'} C_{0η}² C_{ηη'}² C_{η'0}² a^{2d}`
    pub triangle: T,
}

pub fn vacuum_sums<T: Real>(kernel: &PropagatorKernel<T>) -> VacuumSums<T> {
    let spec = &kernel.spec;
    let ad = T::of(spec.cell_volume());
    let vals = kernel.values();
    let cubic = vals.iter().map(|&c| c * c * c).sum::<T>() * ad;
    let quartic = vals.iter().map(|&c| c * c * c * c).sum::<T>() * ad;
    // the weights of a product kernel turn lattice convolutions into mode products
    let sq: Vec<T> = vals.iter().map(|&c| c * c).collect();
    let w = values_to_weights(spec, &sq);
    let cubed: Vec<T> = w.iter().map(|&x| x * x * x).collect();
    let triangle = weights_to_values(spec, &cubed)[0];
    VacuumSums { origin: kernel.at_origin(), cubic, quartic, triangle }
}

/// Bare couplings `μ_N`, `ν_N` fixed by the subtraction rules.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Counterterms<T> {
    pub dim: usize,
    pub lambda: T,
    pub mu: T,
    pub nu: T,
    pub delta_mu: T,
    pub sums: VacuumSums<T>,
}

/// Values of the four divergent vacuum graphs: tadpole pair, sunset, triangle, mass loop.
pub fn vacuum_graph_values<T: Real>(sums: &VacuumSums<T>, lambda: T, mu: T) -> [T; 4] {
    let l = lambda;
    [
        -T::of(3.0) * l * sums.origin * sums.origin,
        T::of(12.0) * l * l * sums.quartic,
        -T::of(288.0) * l * l * l * sums.triangle,
        -mu * sums.origin,
    ]
}

pub fn counterterms_from_kernel<T: Real>(kernel: &PropagatorKernel<T>, lambda: T) -> Result<Counterterms<T>> {
    let dim = kernel.spec.dim;
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if lambda <= T::zero() {
        return Err(Error::InvalidArgument("coupling must be positive".into()));
    }
    let sums = vacuum_sums(kernel);
    let delta_mu = if dim == 3 { T::of(48.0) * lambda * lambda * sums.cubic } else { T::zero() };
    let mu = -T::of(6.0) * lambda * sums.origin + delta_mu;
    let v = vacuum_graph_values(&sums, lambda, mu);
    let nu = if dim == 3 { v[0] + v[1] + v[2] + v[3] } else { v[0] + v[3] };
    Ok(Counterterms { dim, lambda, mu, nu, delta_mu, sums })
}

pub fn counterterms<T: Real>(spec: &LatticeSpec, lambda: T) -> Result<Counterterms<T>> {
    let kernel = covariance_cumulative::<T>(spec, spec.cutoff)?;
    counterterms_from_kernel(&kernel, lambda)
}

impl<T: Real> Counterterms<T> {
    /// `μ_N` split by powers of `λ`: index `k` holds the `λ^k` part.
    pub fn mu_by_order(&self) -> [T; 4] {
        [T::zero(), -T::of(6.0) * self.lambda * self.sums.origin, self.delta_mu, T::zero()]
    }

    /// `ν_N` split by powers of `λ`.
    pub fn nu_by_order(&self) -> [T; 4] {
        let l = self.lambda;
        let c = self.sums.origin;
        let first = T::of(3.0) * l * c * c;
        if self.dim == 3 {
            [
                T::zero(),
                first,
                T::of(12.0) * l * l * self.sums.quartic - self.delta_mu * c,
                -T::of(288.0) * l * l * l * self.sums.triangle,
            ]
        } else {
            [T::zero(), first, T::zero(), T::zero()]
        }
    }

    /// Constant left once `λφ⁴ + μφ² + ν` is rewritten as `λ:φ⁴: + δμ:φ²: + const`.
    pub fn wick_remainder_by_order(&self) -> [T; 4] {
        let mut k = self.nu_by_order();
        let c = self.sums.origin;
        k[1] = k[1] - T::of(3.0) * self.lambda * c * c;
        k[2] = k[2] + self.delta_mu * c;
        k
    }
}

/// Sunset chain between `α` and `β`, plain and with the inner line subtracted.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChainValues<T> {
    /// `∫ C_{αx} C³_{xη} C_{ηβ}`
    pub unsubtracted: T,
    /// `∫ C_{αx} C³_{xη} (C_{ηβ} - C_{xβ})`
    pub subtracted: T,
}

/// Subtracted sunset chain; the outer lines use `outer` when given.
pub fn renormalized_chain_value<T: Real>(
    kernel: &PropagatorKernel<T>,
    outer: Option<&PropagatorKernel<T>>,
    alpha: usize,
    beta: usize,
) -> Result<ChainValues<T>> {
    let spec = &kernel.spec;
    if spec.dim != 3 {
        return Err(Error::InvalidArgument(format!(
            "chain subtraction is only defined for d = 3, got d = {}",
            spec.dim
        )));
    }
    let outer = outer.unwrap_or(kernel);
    if outer.spec != *spec {
        return Err(Error::InvalidArgument("outer kernel on a different lattice".into()));
    }
    let cube: Vec<T> = kernel.values().iter().map(|&c| c * c * c).collect();
    let w_cube = values_to_weights(spec, &cube);
    let w_out = outer.weights();
    let chain_w: Vec<T> = w_out.iter().zip(&w_cube).map(|(&a, &b)| a * a * b).collect();
    let pair_w: Vec<T> = w_out.iter().map(|&a| a * a).collect();
    let disp = spec.displacement_index(beta, alpha);
    let unsubtracted = weights_to_values(spec, &chain_w)[disp];
    let pair = weights_to_values(spec, &pair_w)[disp];
    let cubic = cube.iter().copied().sum::<T>() * T::of(spec.cell_volume());
    Ok(ChainValues { unsubtracted, subtracted: unsubtracted - cubic * pair })
}
