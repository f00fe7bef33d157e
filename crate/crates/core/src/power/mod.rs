//! Cluster trees of scale-labeled graphs and power counting of their scale sums.

mod clusters;
mod exponent;
mod scan;
mod sums;

pub use clusters::{build_clusters, nine_vertex_example, verify_identities, ClusterNode, ClusterTree, IdentityReport, ScaledGraph};
pub use exponent::{rho, Half, NodeStats};
pub use scan::{divergence_scan, DivergenceCatalog, DivergentClass, Remedy};
pub use sums::{
    classify, finite_scale_sum, finite_scale_sum_exact, infinite_scale_sum, infinite_scale_sum_exact, scale_sum,
    Convergence, NodeVerdict, PowerCountingVerdict, TreeTopology,
};
