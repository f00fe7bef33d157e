//! Gaussian scale layers, multiscale assembly, field norms and region classification.

mod hoelder;
mod layer;
mod multiscale;
mod regions;
pub mod rng;
mod snapshot;
mod tails;

pub use hoelder::{cube_norms, default_tau, hoelder_norm, hoelder_norm_at_scale};
pub use layer::{layer_amplitude, sample_layer, FieldLayer};
pub use multiscale::{assemble, MultiscaleField};
pub use regions::{classify_regions, threshold_for_coupling, RegionClassification};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
pub use tails::{layer_norm_samples, tail_stats, TailRow, TailStats};
