//! Command implementations behind the `tmn` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use tmn_core::format::sig17;
use tmn_core::graph::{circularity, five_vertex_network, read_network, report_to_json};
use tmn_core::params::{parse_assignment, read_params};
use tmn_core::sim::{read_scenario, run_scenario, DigestionMode, Scenario, SimulationOutput, Trajectory};
use tmn_core::{Error, Result};

/// Environment variable naming the directory of default parameter files.
pub const PARAMS_DIR_ENV: &str = "TMN_PARAMS_DIR";
/// Parameter file used by the biomethane demo.
pub const DEFAULT_PARAMS_FILE: &str = "biomethane.json";

#[derive(Debug, Parser)]
#[command(name = "tmn", version, about = "Material-network circularity analysis and biomass supply-chain simulation")]
pub struct Cli {
    /// Log more (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circularity report of a network file.
    Analyze {
        #[arg(long)]
        network: PathBuf,
        /// Directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in examples.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Run a scenario file.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// λ(α) of the five-vertex split network.
    Circularity {
        /// Comma-separated values or `start:stop:step`.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        alphas: String,
        /// Write the table to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hub → truck → reservoir → digester chain.
    Biomethane {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Parameter override `dotted.key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Parameter file; defaults to $TMN_PARAMS_DIR/biomethane.json, then
        /// data/params/biomethane.json.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Open,
    Closed,
}

/// Runs a command and returns what goes to standard output.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Analyze { network, out } => cmd_analyze(network, out.as_deref()),
        Command::Demo { demo: Demo::Circularity { alphas, out } } => cmd_demo_circularity(alphas, out.as_deref()),
        Command::Demo { demo: Demo::Biomethane { mode, set, params, out } } => {
            cmd_demo_biomethane(*mode, set, params.as_deref(), out.as_deref())
        }
        Command::Simulate { scenario, out } => cmd_simulate(scenario, out),
    }
}

/// Shortest decimal that agrees with `x` to 12 significant digits.
fn short(x: f64) -> String {
    let s = format!("{:.12e}", x);
    let v: f64 = s.parse().expect("formatted float");
    format!("{v}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

pub fn cmd_analyze(network: &Path, out: Option<&Path>) -> Result<String> {
    let net = read_network(network)?;
    let report = circularity(&net)?;
    let mut text = String::new();
    match report.lambda {
        Some(l) => writeln!(text, "lambda = {}", short(l)),
        None => writeln!(text, "lambda = undefined (no flow)"),
    }
    .expect("write to string");
    writeln!(text, "cycles ({}):", report.cycles.len()).expect("write to string");
    for (cycle, cm) in &report.cycles {
        let mut path: Vec<String> = cycle.vertices().iter().map(|v| v.to_string()).collect();
        path.push(cycle.vertices()[0].to_string());
        writeln!(text, "  {}  CM = {}", path.join(" -> "), short(*cm)).expect("write to string");
    }
    writeln!(text, "leak set ({}):", report.leak_set.len()).expect("write to string");
    for q in &report.leak_set {
        let arcs: Vec<String> = q.compartments.iter().map(|k| format!("c{k}")).collect();
        writeln!(text, "  {} -> {}  flow = {}  [{}]", q.tail, q.head, short(q.flow), arcs.join(", "))
            .expect("write to string");
    }
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join("report.json"), &report_to_json(&report))?;
    }
    Ok(text)
}

/// Parses `a,b,c` or `start:stop:step` (stop included).
pub fn parse_alphas(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let bad = |s: &str| Error::InvalidParameter { name: "alphas".into(), reason: format!("cannot read `{s}`") };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    if let [start, stop, step] = spec.split(':').collect::<Vec<_>>()[..] {
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step.is_finite() && step > 0.0 && stop.is_finite() && stop >= start) {
            return Err(bad(spec));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    spec.split(',').map(num).collect()
}

pub fn cmd_demo_circularity(alphas: &str, out: Option<&Path>) -> Result<String> {
    let mut table = String::from("alpha,lambda\n");
    for alpha in parse_alphas(alphas)? {
        let net = five_vertex_network(alpha, 1.0, 1.0)?;
        let lambda = circularity(&net)?.lambda.map(sig17).unwrap_or_default();
        writeln!(table, "{},{}", sig17(alpha), lambda).expect("write to string");
    }
    match out {
        Some(path) => {
            write_file(path, &table)?;
            Ok(String::new())
        }
        None => Ok(table),
    }
}

/// `--params`, else `$TMN_PARAMS_DIR/biomethane.json`, else
/// `data/params/biomethane.json`.
pub fn default_params_path(given: Option<&Path>) -> PathBuf {
    if let Some(p) = given {
        return p.to_path_buf();
    }
    match std::env::var_os(PARAMS_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(DEFAULT_PARAMS_FILE),
        None => Path::new("data").join("params").join(DEFAULT_PARAMS_FILE),
    }
}

pub fn cmd_demo_biomethane(mode: Mode, set: &[String], params: Option<&Path>, out: Option<&Path>) -> Result<String> {
    let overrides = set.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>>>()?;
    let params = read_params(&default_params_path(params), &overrides)?;
    let mode = match mode {
        Mode::Open => DigestionMode::Open,
        Mode::Closed => DigestionMode::Closed,
    };
    let output = run_scenario(&Scenario::biomethane(params, mode))?;
    if let Some(dir) = out {
        write_outputs(dir, &output)?;
    }
    Ok(summary_text(&output))
}

pub fn cmd_simulate(scenario: &Path, out: &Path) -> Result<String> {
    let dir = std::env::var_os(PARAMS_DIR_ENV).map(PathBuf::from);
    let scn = read_scenario(scenario, dir.as_deref())?;
    let output = run_scenario(&scn)?;
    write_outputs(out, &output)?;
    Ok(summary_text(&output))
}

fn trajectory_meta(t: &Trajectory) -> serde_json::Value {
    serde_json::json!({ "meta": t.meta(), "channels": t.channels(), "rows": t.len() })
}

/// Writes hub.csv, truck.csv, digester.csv, ledger.csv, metadata.json and
/// summary.json into `dir`.
pub fn write_outputs(dir: &Path, output: &SimulationOutput) -> Result<()> {
    create_dir(dir)?;
    let mut meta = serde_json::Map::new();
    let trajectories = [Some(&output.hub), output.truck.as_ref(), output.digester.as_ref()];
    for t in trajectories.into_iter().flatten() {
        let model = &t.meta().model;
        write_file(&dir.join(format!("{model}.csv")), &t.to_csv())?;
        meta.insert(model.clone(), trajectory_meta(t));
    }
    write_file(&dir.join("ledger.csv"), &output.ledger.to_csv())?;
    let metadata = serde_json::to_string_pretty(&serde_json::Value::Object(meta)).expect("serializable");
    write_file(&dir.join("metadata.json"), &(metadata + "\n"))?;
    let summary = serde_json::to_string_pretty(&output.summary).expect("serializable");
    write_file(&dir.join("summary.json"), &(summary + "\n"))?;
    Ok(())
}

/// Human summary of a run.
pub fn summary_text(output: &SimulationOutput) -> String {
    let s = &output.summary;
    let mut text = String::new();
    let mut line = |l: String| text.push_str(&(l + "\n"));
    line(format!("scenario: {}", s.scenario));
    line(format!("hub final stock: {} kg", s.hub_final_kg));
    if let Some(t) = &s.truck {
        line(format!(
            "truck: x_G(t_u) = {} m, delivery error {:.3e} m, final speed {:.3e} m/s",
            t.x_g_final_m, t.delivery_position_error_m, t.delivery_speed_m_per_s
        ));
    }
    line(format!("delivered: {} kg; reservoir left: {} kg; fed to digester: {} kg", s.truck_delivered_kg, s.reservoir_final_kg, s.digester_fed_kg));
    if let Some(d) = &s.digester {
        match (d.settling_time_day, d.settling_bound_day) {
            (Some(t), Some(b)) => line(format!("digester: settled at {t} day (bound {} day)", short(b))),
            (None, Some(b)) => line(format!("digester: not settled (bound {} day)", short(b))),
            _ => line(format!("digester: distance to working point {:.3e}", d.final_distance_to_working_point)),
        }
        line(format!("methane flow at end: {}", short(d.methane_flow_final)));
    }
    if let Some(l) = s.circularity {
        line(format!("lambda = {}", short(l)));
    }
    line(format!("ledger: total {} kg, max drift {:.3e} kg", s.ledger_closing_total_kg, s.ledger_max_drift_kg));
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_lists_and_ranges() {
        assert_eq!(parse_alphas("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_alphas("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_alphas("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_alphas("0:1:0.05").unwrap().len(), 21);
        assert!(parse_alphas("a,b").is_err());
        assert!(parse_alphas("1:0:0.1").is_err());
        assert!(parse_alphas("0:1:0").is_err());
    }

    #[test]
    fn short_numbers() {
        assert_eq!(short(0.4000000000000001), "0.4");
        assert_eq!(short(0.0), "0");
        assert_eq!(short(2.0 / 3.0), "0.6666666666667");
    }
}
