//! Discretized box, regularized propagator and its exact band decomposition.

mod bounds;
pub mod fft;
mod io;
mod propagator;
mod spec;

pub use bounds::{bound_report, BoundReport};
pub use io::{write_kernel_csv, KernelCache};
pub use propagator::{
    band_weight, continuum_band_profile, covariance_band, covariance_between, covariance_cumulative,
    cumulative_weight, origin_value, regulator_chi, values_to_weights, weights_to_values, Band,
    PropagatorKernel,
};
pub use spec::LatticeSpec;
