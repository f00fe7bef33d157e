//! Effective potentials as graded polynomials in the site fields and the
//! truncated-cumulant recursion between scales.

mod constant;
mod flow;
mod functional;
mod integrate;
mod poly;
mod remainder;
mod split;
mod wick;

pub use constant::{field_independent_part, field_independent_part_with_source, FieldIndependentPart};
pub use flow::{run_flow, FlowReport, FlowStep};
pub use functional::{bare_potential, locality, wick_quartic, Locality, PotentialFunctional, TermClass};
pub use integrate::{integrate_down, truncated_integrate, MAX_RECURSION_ORDER, MONOMIAL_CAP};
pub use poly::{degree, Monomial, Poly};
pub use remainder::{remainder_bound, remainder_summable, summability_check, RemainderBound, SummabilityCheck, CAUCHY_TOLERANCE};
pub use split::{
    bare_constants, field_normalization, gradient_kernel_profile, relevant_split, vacuum_counterterm, BareConstants,
    GradientKernelProfile, GradientPair, IrrelevantClass, LocalBlock, RelevantSplit, RescaledCouplings,
};
pub use wick::{wick_power, WickMonomial, MAX_WICK_DEGREE};

#[cfg(test)]
mod tests;
