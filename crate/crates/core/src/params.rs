//! Parameter files: the hub, truck, digester, controller and schedule
//! parameters of the biomethane chain, with dotted-key overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::digester::{DigesterParams, DigesterState};
use crate::dynamics::hub::{invalid, HubParams};
use crate::dynamics::truck::TruckParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Digester controller settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlParams<T> {
    /// Finite-time gain.
    pub p: T,
    /// Dilution rate of every channel at the working point, 1/day.
    pub d_bar: T,
    /// Closed-loop initial offset from the working point.
    pub x_tilde_0: DigesterState<T>,
    /// Clip dilution rates at zero.
    #[serde(default)]
    pub saturate: bool,
}

/// Open-loop run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenLoopParams<T> {
    pub x_0: DigesterState<T>,
}

/// Placement of the discrete steps on the master clock and the integration
/// settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams<T> {
    /// Duration of one discrete step, s.
    pub step_period_s: T,
    /// Step during which the truck unloads into the reservoir.
    pub n_u: u64,
    /// Step at which digestion starts.
    pub n_d: u64,
    /// Truck integration step, s.
    pub h_truck_s: T,
    /// Digester integration step, days.
    pub h_digester_day: T,
    /// Digestion span in open loop, days.
    pub open_horizon_day: T,
    /// Digestion span in closed loop, days.
    pub closed_horizon_day: T,
    /// Keep every n-th truck step in the trajectory.
    pub truck_record_every: usize,
    /// Keep every n-th digester step in the trajectory.
    pub digester_record_every: usize,
}

/// Full parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSet<T> {
    pub hub: HubParams<T>,
    pub truck: TruckParams<T>,
    pub digester: DigesterParams<T>,
    pub control: ControlParams<T>,
    pub open_loop: OpenLoopParams<T>,
    pub schedule: ScheduleParams<T>,
}

impl<T: Real> ParameterSet<T> {
    pub fn validate(&self) -> Result<()> {
        self.hub.validate()?;
        self.truck.validate()?;
        self.digester.validate()?;
        if !(self.control.p > T::zero()) {
            return Err(invalid("control.p", "must be positive"));
        }
        if !(self.control.d_bar > T::zero()) {
            return Err(invalid("control.d_bar", "must be positive"));
        }
        let s = &self.schedule;
        let positive = [
            ("schedule.step_period_s", s.step_period_s),
            ("schedule.h_truck_s", s.h_truck_s),
            ("schedule.h_digester_day", s.h_digester_day),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive"));
            }
        }
        for (name, v) in [("schedule.open_horizon_day", s.open_horizon_day), ("schedule.closed_horizon_day", s.closed_horizon_day)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be nonnegative"));
            }
        }
        if s.truck_record_every == 0 || s.digester_record_every == 0 {
            return Err(invalid("schedule.*_record_every", "must be at least 1"));
        }
        Ok(())
    }
}

/// Parses a value given on the command line: JSON if it parses as JSON,
/// otherwise a string.
fn override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Replaces `key` (dotted path) in `doc`. Only existing keys can be set.
pub fn set_dotted(doc: &mut Value, key: &str, raw: &str) -> Result<()> {
    let unknown = || Error::InvalidParameter { name: key.to_string(), reason: "unknown key".into() };
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part).ok_or_else(unknown)?,
            Value::Array(items) => {
                let i: usize = part.parse().map_err(|_| unknown())?;
                items.get_mut(i).ok_or_else(unknown)?
            }
            _ => return Err(unknown()),
        };
    }
    *node = override_value(raw);
    Ok(())
}

/// Splits `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::InvalidParameter { name: s.to_string(), reason: "expected key=value".into() }),
    }
}

/// Builds a validated parameter set from a JSON document and overrides.
pub fn params_from_value(mut doc: Value, overrides: &[(String, String)]) -> Result<ParameterSet<f64>> {
    for (k, v) in overrides {
        set_dotted(&mut doc, k, v)?;
    }
    let set: ParameterSet<f64> = serde_json::from_value(doc).map_err(|e| Error::InvalidParameter {
        name: "parameter file".into(),
        reason: e.to_string(),
    })?;
    set.validate()?;
    Ok(set)
}

pub fn parse_params(text: &str, overrides: &[(String, String)]) -> Result<ParameterSet<f64>> {
    params_from_value(serde_json::from_str(text)?, overrides)
}

pub fn read_params(path: &Path, overrides: &[(String, String)]) -> Result<ParameterSet<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_params(&text, overrides)
}
