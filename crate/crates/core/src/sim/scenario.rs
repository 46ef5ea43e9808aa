use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::digester::{DigesterState, Dilution};
use crate::error::{Error, Result};
use crate::graph::{read_network, TmnNetwork};
use crate::params::{params_from_value, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventAction {
    /// Hub → truck transfer; the truck departs.
    Load,
    /// Truck → reservoir transfer on arrival.
    Unload,
    /// Reservoir starts feeding the digester.
    StartDigestion,
}

/// Discrete event placed at a step index of the master schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledEvent {
    pub step: u64,
    pub action: EventAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruckController {
    /// Accelerate then brake; `tau_bar` defaults to the value that covers
    /// the hub-plant distance in the delivery time.
    BangBang {
        #[serde(default)]
        tau_bar: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DigesterController {
    /// Fixed dilution rates, 1/day.
    Constant { u: Dilution<f64> },
    /// Finite-time regulation to the working point at `control.d_bar`.
    FiniteTime {
        #[serde(default)]
        p: Option<f64>,
    },
}

/// Digester state at the start of digestion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigesterInitial {
    Absolute(DigesterState<f64>),
    /// Offset from the working point.
    Offset(DigesterState<f64>),
}

/// Open- or closed-loop digestion in the biomethane demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigestionMode {
    Open,
    Closed,
}

/// A complete, resolved simulation input.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ParameterSet<f64>,
    pub network: Option<TmnNetwork<f64>>,
    pub events: Vec<ScheduledEvent>,
    pub truck_controller: TruckController,
    pub digester_controller: DigesterController,
    pub digester_initial: DigesterInitial,
    /// Length of the digestion phase, days.
    pub horizon_day: f64,
    pub saturate_inputs: bool,
}

impl Scenario {
    /// Events implied by the parameter file: load at `hub.n_l`, unload at
    /// `schedule.n_u`, digestion from `schedule.n_d`.
    pub fn default_events(params: &ParameterSet<f64>) -> Vec<ScheduledEvent> {
        vec![
            ScheduledEvent { step: params.hub.n_l, action: EventAction::Load },
            ScheduledEvent { step: params.schedule.n_u, action: EventAction::Unload },
            ScheduledEvent { step: params.schedule.n_d, action: EventAction::StartDigestion },
        ]
    }

    /// Hub → truck → reservoir → digester chain with the demo settings.
    pub fn biomethane(params: ParameterSet<f64>, mode: DigestionMode) -> Self {
        let (digester_controller, digester_initial, horizon_day, name) = match mode {
            DigestionMode::Open => (
                DigesterController::Constant { u: [params.control.d_bar; 4] },
                DigesterInitial::Absolute(params.open_loop.x_0),
                params.schedule.open_horizon_day,
                "biomethane-open",
            ),
            DigestionMode::Closed => (
                DigesterController::FiniteTime { p: None },
                DigesterInitial::Offset(params.control.x_tilde_0),
                params.schedule.closed_horizon_day,
                "biomethane-closed",
            ),
        };
        Scenario {
            name: name.to_string(),
            events: Self::default_events(&params),
            saturate_inputs: params.control.saturate,
            params,
            network: None,
            truck_controller: TruckController::BangBang { tau_bar: None },
            digester_controller,
            digester_initial,
            horizon_day,
        }
    }

    /// Step of the unique event with `action`, if any.
    pub fn event_step(&self, action: EventAction) -> Result<Option<u64>> {
        let mut steps = self.events.iter().filter(|e| e.action == action).map(|e| e.step);
        let first = steps.next();
        if steps.next().is_some() {
            return Err(Error::InvalidScenario(format!("{action:?} is scheduled more than once")));
        }
        Ok(first)
    }
}

/// Parameters given by path or inline.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamsSource {
    Path(PathBuf),
    Inline(Value),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerBindings {
    #[serde(default)]
    pub truck: Option<TruckController>,
    #[serde(default)]
    pub digester: Option<DigesterController>,
}

/// On-disk scenario. Relative paths resolve against the scenario file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub params: ParamsSource,
    /// Dotted-key overrides applied to the parameters.
    #[serde(default)]
    pub set: serde_json::Map<String, Value>,
    #[serde(default)]
    pub network: Option<PathBuf>,
    /// Defaults to the biomethane mode's settings.
    #[serde(default)]
    pub mode: Option<DigestionMode>,
    #[serde(default)]
    pub events: Option<Vec<ScheduledEvent>>,
    #[serde(default)]
    pub controllers: Option<ControllerBindings>,
    #[serde(default)]
    pub digester_initial: Option<DigesterInitial>,
    #[serde(default)]
    pub horizon_day: Option<f64>,
    #[serde(default)]
    pub saturate_inputs: Option<bool>,
}

impl ScenarioFile {
    pub fn resolve(self, base: &Path, default_params: Option<&Path>) -> Result<Scenario> {
        let doc = match self.params {
            ParamsSource::Inline(v) => v,
            ParamsSource::Path(p) => {
                let path = if p.is_relative() { base.join(p) } else { p };
                let path = if path.exists() { path } else { default_params.map(|d| d.join(&path)).unwrap_or(path) };
                let text =
                    std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)?
            }
        };
        let overrides: Vec<(String, String)> = self.set.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
        let params = params_from_value(doc, &overrides)?;
        let mut scn = Scenario::biomethane(params, self.mode.unwrap_or(DigestionMode::Closed));
        scn.name = self.name;
        if let Some(net) = self.network {
            let path = if net.is_relative() { base.join(net) } else { net };
            scn.network = Some(read_network(&path)?);
        }
        if let Some(events) = self.events {
            scn.events = events;
        }
        if let Some(bindings) = self.controllers {
            if let Some(t) = bindings.truck {
                scn.truck_controller = t;
            }
            if let Some(d) = bindings.digester {
                scn.digester_initial = match d {
                    DigesterController::Constant { .. } => DigesterInitial::Absolute(scn.params.open_loop.x_0),
                    DigesterController::FiniteTime { .. } => DigesterInitial::Offset(scn.params.control.x_tilde_0),
                };
                scn.digester_controller = d;
            }
        }
        if let Some(init) = self.digester_initial {
            scn.digester_initial = init;
        }
        if let Some(h) = self.horizon_day {
            scn.horizon_day = h;
        }
        if let Some(s) = self.saturate_inputs {
            scn.saturate_inputs = s;
        }
        Ok(scn)
    }
}

pub fn parse_scenario(text: &str, base: &Path, default_params: Option<&Path>) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    file.resolve(base, default_params)
}

pub fn read_scenario(path: &Path, default_params: Option<&Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base, default_params)
}
