//! Controllers: open-loop bang-bang torque for the truck and finite-time
//! state feedback for the digester.

pub mod bang_bang;
pub mod finite_time;

pub use bang_bang::{bang_bang_torque, tau_bar, BangBangPlan};
pub use finite_time::{
    finite_time_feedback, gradient_flow_rate, input_matrix_g, lyapunov_grad, lyapunov_v, settling_time_bound,
    translated_drift, FiniteTimeGains, Translated,
};
