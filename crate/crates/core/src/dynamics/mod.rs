//! Per-compartment dynamics: hub stock, truck transport, plant reservoir and
//! digester.

pub mod digester;
pub mod hub;
pub mod reservoir;
pub mod truck;

pub use digester::{
    digester_drift, digester_rates, equilibrium_seed, find_equilibrium, haldane_mu2, methane_flow,
    monod_mu1, operating_equilibrium, DigesterParams, DigesterState, Dilution,
};
pub use hub::{hub_step, kronecker, HubParams};
pub use reservoir::{reservoir_drain_rate, reservoir_fill_step, ReservoirState};
pub use truck::{
    straight_line_accel, truck_b_matrix, truck_forward_dynamics, truck_passive_rates, truck_rates,
    TruckParams, TruckState,
};
