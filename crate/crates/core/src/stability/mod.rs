//! Small-lattice experiments: direct estimates of `Z_N(f)`, comparison with
//! the truncated series inside remainder envelopes, and the quartic
//! response to the source.

mod config;
mod cumulant;
mod envelope;
mod estimate;
mod manifest;
mod quadrature;

pub use config::{ExperimentConfig, Method, Source, MIN_NODES};
pub use cumulant::{first_order_prediction, nongaussianity, nongaussianity_with, FourthCumulant, DEFAULT_STENCIL_STEP};
pub use envelope::{
    calibrate, fit_tail, remainder_sum, stability_envelope, stability_report, EnvelopeCalibration, EnvelopeSweep,
    StabilityReport, TailFit, CALIBRATION_SAFETY, ENVELOPE_FLOOR, MAX_SWEEP_SITES,
};
pub use estimate::{effective_method, estimate_Z, estimate_Z_with, full_basis, MAX_ESTIMATE_SITES, series_by_order, Interaction, ZEstimate};
pub use manifest::{Manifest, MANIFEST_FILE};
pub use quadrature::{
    average, check_quadrature, gauss_hermite, Averages, ModeBasis, MAX_QUADRATURE_MODES, QUADRATURE_POINT_CAP,
    SAMPLING_BATCHES,
};

#[cfg(test)]
mod tests;
