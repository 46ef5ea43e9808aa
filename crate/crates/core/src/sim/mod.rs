//! Deterministic hybrid simulation of the hub → truck → reservoir → digester
//! chain.

pub mod energy;
pub mod engine;
pub mod integrator;
pub mod ledger;
pub mod scenario;
pub mod trajectory;

pub use energy::{check_energy_balance, energy_balance_residuals, EnergyResidual};
pub use engine::{run_scenario, EventRecord, SimulationOutput, Summary};
pub use integrator::{rk4_guarded_step, rk4_step, step_boundaries, OriginGuard, INTEGRATOR};
pub use ledger::{MassLedger, Transfer};
pub use scenario::{
    parse_scenario, read_scenario, DigesterController, DigesterInitial, DigestionMode, EventAction, ScenarioFile,
    Scenario, ScheduledEvent, TruckController,
};
pub use trajectory::{Channel, Trajectory, TrajectoryMeta};
