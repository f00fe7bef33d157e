//! Desk-scale workbench for the ultraviolet-regularized φ⁴ Euclidean field.
//!
//! The crate covers the multiscale free field (propagator bands and exact
//! Gaussian layers), renormalized perturbation theory by labeled Wick
//! contractions, cluster-tree power counting, the truncated
//! effective-potential recursion and small-lattice stability experiments.
//! Numerical cores are generic over [`Real`]; the aliases below fix `f64`.

pub mod error;
pub mod graphs;
pub mod lattice;
pub mod potential;
pub mod power;
pub mod sampler;
pub mod scalar;
pub mod stability;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Kernel = lattice::PropagatorKernel<f64>;
pub type Potential = potential::PotentialFunctional<f64>;
pub type Counterterms = graphs::Counterterms<f64>;
