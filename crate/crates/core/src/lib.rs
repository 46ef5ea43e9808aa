//! Thermodynamical material networks: circularity analysis of mass-flow
//! digraphs, compartment models of a biomass supply chain (hub, truck,
//! reservoir, anaerobic digester), their controllers, and a deterministic
//! hybrid simulator.
//!
//! Graph code is generic over [`Scalar`] (`f32`, `f64`, exact
//! [`BigRational`]); the dynamical models and controllers over [`Real`]. The
//! aliases below fix the common choices.

// `!(x > 0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod control;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod graph;
pub(crate) mod linalg;
pub mod params;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use scalar::{ratio, Real, Scalar};

pub type Network = graph::TmnNetwork<f64>;
pub type Network32 = graph::TmnNetwork<f32>;
pub type ExactNetwork = graph::TmnNetwork<BigRational>;
pub type Report = graph::CircularityReport<f64>;
pub type ExactReport = graph::CircularityReport<BigRational>;
pub type Gamma = graph::MassFlowMatrix<f64>;

pub type Hub = dynamics::HubParams<f64>;
pub type Truck = dynamics::TruckParams<f64>;
pub type TruckState = dynamics::TruckState<f64>;
pub type Digester = dynamics::DigesterParams<f64>;
pub type DigesterState = dynamics::DigesterState<f64>;
pub type Plan = control::BangBangPlan<f64>;
pub type Gains = control::FiniteTimeGains<f64>;
pub type Params = params::ParameterSet<f64>;
