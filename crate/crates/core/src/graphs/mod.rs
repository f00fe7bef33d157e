//! Labeled Feynman graphs, counterterms and the renormalized `log Z` series.

mod counterterms;
mod element;
mod expansion;
mod series;
mod value;
mod wick;

pub(crate) use element::is_connected;

pub use counterterms::{
    counterterms, counterterms_from_kernel, renormalized_chain_value, vacuum_graph_values, vacuum_sums, ChainValues,
    Counterterms, VacuumSums,
};
pub use element::{
    aggregate_topologies, canonical_adjacency, double_factorial_odd, enumerate_all, enumerate_connected, ElementKind,
    FeynmanGraph, GraphElement, Topology, MAX_HALF_LINES,
};
pub use expansion::{SeriesExpansion, VertexKind};
pub use series::{
    bare_expansion, bare_series, logZ_series, renormalized_expansion, LogZSeries, SchwingerEntry,
    SchwingerKernelTable, KERNEL_TABLE_CAP, MAX_SERIES_ORDER,
};
pub use value::{graph_prefactor, graph_value, integrated_value, smeared_source, INTEGRATION_VERTEX_CAP};
pub use wick::{wick_oracle, WICK_DEGREE_CAP};
