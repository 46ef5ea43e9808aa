//! Material networks as weighted digraphs: construction, the mass-flow
//! matrix, balance completion, cycle enumeration and the circularity
//! indicator.

pub mod circularity;
pub mod cycles;
pub mod flows;
pub mod io;
pub mod matrix;
pub mod network;
pub mod reference;

pub use circularity::{circularity, circularity_with_budget, cycle_mean, CircularityReport, LeakArc};
pub use cycles::{elementary_circuits, enumerate_directed_cycles, DirectedCycle, DEFAULT_CYCLE_BUDGET};
pub use flows::{solve_consistent_flows, CompletedFlows, FlowAssignment, FlowSolution, InversionCandidate};
pub use matrix::{mass_flow_matrix, vertex_balance_residual, MassFlowMatrix};
pub use network::{
    build_network, ArcCompartment, ArcSpec, Material, NetworkSpec, TmnNetwork, VertexCompartment, VertexSpec,
};
pub use io::{network_to_json, parse_network, read_network, report_to_json};
pub use reference::{five_vertex_lambda, five_vertex_network, five_vertex_network_uninverted, hub_truck_plant};
