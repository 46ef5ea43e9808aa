//! JSON network files and circularity reports.

use std::path::Path;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::Result;
use crate::format::sig17;
use crate::graph::circularity::CircularityReport;
use crate::graph::network::{build_network, NetworkSpec, TmnNetwork};

pub fn parse_network(text: &str) -> Result<TmnNetwork<f64>> {
    let spec: NetworkSpec<f64> = serde_json::from_str(text)?;
    build_network(&spec)
}

pub fn read_network(path: &Path) -> Result<TmnNetwork<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

pub fn network_to_json(net: &TmnNetwork<f64>) -> String {
    let mut s = serde_json::to_string_pretty(&net.to_spec()).expect("network specs always serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ReportFile<'a> {
    lambda: Option<Box<RawValue>>,
    n_phi: usize,
    cycles: Vec<CycleEntry>,
    leak_set: Vec<LeakEntry<'a>>,
}

#[derive(Serialize)]
struct CycleEntry {
    vertices: Vec<usize>,
    length: usize,
    cycle_mean: Box<RawValue>,
}

#[derive(Serialize)]
struct LeakEntry<'a> {
    tail: usize,
    head: usize,
    flow: Box<RawValue>,
    compartments: &'a [usize],
}

fn number(x: f64) -> Box<RawValue> {
    if x.is_finite() {
        RawValue::from_string(sig17(x)).expect("sig17 output is a JSON number")
    } else {
        RawValue::from_string("null".into()).expect("null is JSON")
    }
}

/// Serializes a report with every real printed at 17 significant digits.
/// An undefined λ is written as `null`.
pub fn report_to_json(report: &CircularityReport<f64>) -> String {
    let file = ReportFile {
        lambda: report.lambda.map(number),
        n_phi: report.n_phi(),
        cycles: report
            .cycles
            .iter()
            .map(|(c, cm)| CycleEntry { vertices: c.vertices().to_vec(), length: c.len(), cycle_mean: number(*cm) })
            .collect(),
        leak_set: report
            .leak_set
            .iter()
            .map(|q| LeakEntry { tail: q.tail, head: q.head, flow: number(q.flow), compartments: &q.compartments })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("report serializes");
    s.push('\n');
    s
}
