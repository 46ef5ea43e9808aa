use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig17;

/// Named output channel with its unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Channel {
    pub name: String,
    pub unit: String,
}

impl Channel {
    pub fn new(name: &str, unit: &str) -> Self {
        Channel { name: name.to_string(), unit: unit.to_string() }
    }
}

/// Descriptive data written next to a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub model: String,
    pub time_unit: String,
    /// Offset of the model clock on the master clock, seconds.
    pub t0_s: f64,
    pub step: f64,
    pub integrator: String,
}

/// Time series of one model. Time is the model-local clock in its native unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    meta: TrajectoryMeta,
    channels: Vec<Channel>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(meta: TrajectoryMeta, channels: Vec<Channel>) -> Self {
        Trajectory { meta, channels, times: Vec::new(), rows: Vec::new() }
    }

    /// Appends a row. Times must increase strictly.
    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.channels.len() {
            return Err(Error::InvalidScenario(format!(
                "{} row has {} values for {} channels",
                self.meta.model,
                values.len(),
                self.channels.len()
            )));
        }
        if let Some(last) = self.times.last() {
            if !(t > *last) {
                return Err(Error::InvalidScenario(format!("{} time {t} does not follow {last}", self.meta.model)));
            }
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels.iter().position(|c| c.name == name).ok_or_else(|| Error::MissingChannel(name.to_string()))
    }

    /// Column of values for `name`.
    pub fn channel(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.channel_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn last_row(&self) -> Option<(f64, &[f64])> {
        Some((*self.times.last()?, self.rows.last()?.as_slice()))
    }

    /// Comma-separated text: header `time_<unit>,<name>_<unit>,...`, then one
    /// line per row at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("time_{}", self.meta.time_unit);
        for c in &self.channels {
            out.push(',');
            out.push_str(&c.name);
            out.push('_');
            out.push_str(&c.unit);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            out.push_str(&sig17(*t));
            for v in row {
                out.push(',');
                out.push_str(&sig17(*v));
            }
            out.push('\n');
        }
        out
    }
}
