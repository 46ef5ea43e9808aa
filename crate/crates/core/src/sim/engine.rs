use log::{debug, warn};
use serde::Serialize;

use crate::control::bang_bang::{bang_bang_torque, tau_bar, BangBangPlan};
use crate::control::finite_time::{finite_time_feedback, settling_time_bound, FiniteTimeGains, DEAD_ZONE};
use crate::dynamics::digester::{
    digester_rates, methane_flow, operating_equilibrium, DigesterState, Dilution,
};
use crate::dynamics::hub::{hub_step, HubParams};
use crate::dynamics::reservoir::reservoir_drain_rate;
use crate::dynamics::truck::{truck_rates, TruckState};
use crate::error::{Error, Result};
use crate::graph::circularity;
use crate::sim::energy::check_energy_balance;
use crate::sim::integrator::{rk4_guarded_step, rk4_step, step_boundaries, OriginGuard, INTEGRATOR};
use crate::sim::ledger::MassLedger;
use crate::sim::scenario::{DigesterController, DigesterInitial, EventAction, Scenario, TruckController};
use crate::sim::trajectory::{Channel, Trajectory, TrajectoryMeta};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Distance to the working point that counts as settled.
pub const SETTLED: f64 = 1e-6;
/// Allowed ledger drift relative to the total mass.
pub const LEDGER_TOLERANCE: f64 = 1e-9;

const HUB: &str = "hub";
const TRUCK: &str = "truck";
const RESERVOIR: &str = "reservoir";
const DIGESTER: &str = "digester";

/// Something that happened during the run, on the master clock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time_s: f64,
    pub event: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruckSummary {
    pub departure_s: f64,
    pub arrival_s: f64,
    pub tau_bar_n_m: f64,
    pub x_g_final_m: f64,
    pub x_g_target_m: f64,
    pub delivery_position_error_m: f64,
    pub delivery_speed_m_per_s: f64,
    pub energy_residual_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigesterSummary {
    pub start_s: f64,
    pub horizon_day: f64,
    pub controller: String,
    pub working_point: DigesterState<f64>,
    pub working_input: Dilution<f64>,
    pub initial_state: DigesterState<f64>,
    pub final_state: DigesterState<f64>,
    pub final_distance_to_working_point: f64,
    /// First time after which the distance to the working point stays at or
    /// below 1e-6, days from the start of digestion.
    pub settling_time_day: Option<f64>,
    pub settling_bound_day: Option<f64>,
    pub methane_flow_final: f64,
    pub negative_concentration_steps: usize,
    pub reservoir_empty_day: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub hub_final_kg: f64,
    pub truck_delivered_kg: f64,
    pub reservoir_final_kg: f64,
    pub digester_fed_kg: f64,
    pub ledger_opening_total_kg: f64,
    pub ledger_closing_total_kg: f64,
    pub ledger_max_drift_kg: f64,
    pub circularity: Option<f64>,
    pub truck: Option<TruckSummary>,
    pub digester: Option<DigesterSummary>,
    pub events: Vec<EventRecord>,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub hub: Trajectory,
    pub truck: Option<Trajectory>,
    pub digester: Option<Trajectory>,
    pub ledger: MassLedger,
    pub summary: Summary,
}

struct Timeline {
    load: Option<u64>,
    unload: Option<u64>,
    start: Option<u64>,
    last_step: u64,
    arrival_s: Option<f64>,
}

fn timeline(scn: &Scenario) -> Result<Timeline> {
    let p = &scn.params;
    let dt = p.schedule.step_period_s;
    let load = scn.event_step(EventAction::Load)?;
    let unload = scn.event_step(EventAction::Unload)?;
    let start = scn.event_step(EventAction::StartDigestion)?;
    let arrival_s = load.map(|n| n as f64 * dt + p.truck.t_u);
    match (unload, arrival_s) {
        (Some(_), None) => return Err(Error::InvalidScenario("unload without a prior load".into())),
        (Some(n_u), Some(arr)) => {
            let (lo, hi) = (n_u as f64 * dt, (n_u + 1) as f64 * dt);
            if !(arr >= lo && arr < hi) {
                return Err(Error::InvalidScenario(format!(
                    "truck arrives at {arr} s, outside unloading step {n_u} = [{lo}, {hi}) s"
                )));
            }
        }
        _ => {}
    }
    if let Some(n_d) = start {
        let start_s = n_d as f64 * dt;
        if let Some(arr) = arrival_s.filter(|_| unload.is_some()) {
            if start_s < arr {
                return Err(Error::InvalidScenario(format!(
                    "digestion starts at {start_s} s, before the delivery at {arr} s"
                )));
            }
        }
    }
    let last_step = [load, unload, start].iter().flatten().copied().max().unwrap_or(0);
    Ok(Timeline { load, unload, start, last_step, arrival_s })
}

fn meta(model: &str, unit: &str, t0_s: f64, step: f64) -> TrajectoryMeta {
    TrajectoryMeta {
        model: model.to_string(),
        time_unit: unit.to_string(),
        t0_s,
        step,
        integrator: INTEGRATOR.to_string(),
    }
}

/// Runs the scenario: hub steps, truck transport, reservoir fill and the
/// digestion phase, in time order.
pub fn run_scenario(scn: &Scenario) -> Result<SimulationOutput> {
    let p = &scn.params;
    p.validate()?;
    if p.hub.m_l != p.truck.m_l {
        return Err(Error::InvalidScenario("hub and truck truckloads differ".into()));
    }
    let tl = timeline(scn)?;
    let dt = p.schedule.step_period_s;
    let mut events = Vec::new();
    let mut ledger = MassLedger::new(
        &[(HUB, p.hub.m_1_0), (TRUCK, 0.0), (RESERVOIR, 0.0), (DIGESTER, 0.0)],
        LEDGER_TOLERANCE,
    );
    ledger.snapshot(0.0)?;

    let hub = run_hub(scn, &tl, &mut ledger, &mut events).map_err(|e| e.in_phase("hub"))?;

    let mut truck_summary = None;
    let mut truck_traj = None;
    if let Some(n_l) = tl.load {
        let (traj, summary) = run_truck(scn, n_l as f64 * dt).map_err(|e| e.in_phase("truck"))?;
        let arrival = tl.arrival_s.expect("load implies arrival");
        events.push(EventRecord {
            time_s: arrival,
            event: "arrive".into(),
            detail: format!("x_G = {} m", summary.x_g_final_m),
        });
        if tl.unload.is_some() {
            ledger.transfer(arrival, TRUCK, RESERVOIR, p.truck.m_l)?;
            events.push(EventRecord { time_s: arrival, event: "unload".into(), detail: format!("{} kg", p.truck.m_l) });
        }
        ledger.snapshot(arrival)?;
        truck_summary = Some(summary);
        truck_traj = Some(traj);
    }

    let mut digester_summary = None;
    let mut digester_traj = None;
    if let Some(n_d) = tl.start {
        let start_s = n_d as f64 * dt;
        events.push(EventRecord { time_s: start_s, event: "start_digestion".into(), detail: String::new() });
        let (traj, summary) =
            run_digester(scn, start_s, &mut ledger, &mut events).map_err(|e| e.in_phase("digestion"))?;
        digester_summary = Some(summary);
        digester_traj = Some(traj);
    }

    let lambda = match &scn.network {
        Some(net) => circularity(net)?.lambda,
        None => None,
    };
    let summary = Summary {
        scenario: scn.name.clone(),
        hub_final_kg: ledger.balance(HUB)?,
        truck_delivered_kg: if tl.unload.is_some() { p.truck.m_l } else { 0.0 },
        reservoir_final_kg: ledger.balance(RESERVOIR)?,
        digester_fed_kg: ledger.balance(DIGESTER)?,
        ledger_opening_total_kg: ledger.opening_total(),
        ledger_closing_total_kg: ledger.total(),
        ledger_max_drift_kg: ledger.max_drift(),
        circularity: lambda,
        truck: truck_summary,
        digester: digester_summary,
        events,
    };
    Ok(SimulationOutput { hub, truck: truck_traj, digester: digester_traj, ledger, summary })
}

fn run_hub(scn: &Scenario, tl: &Timeline, ledger: &mut MassLedger, events: &mut Vec<EventRecord>) -> Result<Trajectory> {
    let p = &scn.params;
    let dt = p.schedule.step_period_s;
    let hub = HubParams { n_l: tl.load.unwrap_or(u64::MAX), ..p.hub.clone() };
    let mut traj = Trajectory::new(meta(HUB, "step", 0.0, 1.0), vec![Channel::new("m_1", "kg")]);
    let mut m1 = hub.m_1_0;
    traj.push(0.0, vec![m1])?;
    for n in 0..=tl.last_step {
        m1 = hub_step(m1, n, &hub)?;
        if Some(n) == tl.load {
            let t = n as f64 * dt;
            ledger.transfer(t, HUB, TRUCK, hub.m_l)?;
            ledger.snapshot(t)?;
            events.push(EventRecord { time_s: t, event: "load".into(), detail: format!("{} kg", hub.m_l) });
        }
        traj.push((n + 1) as f64, vec![m1])?;
    }
    Ok(traj)
}

fn truck_channels() -> Vec<Channel> {
    [
        ("x_G", "m"),
        ("x_G_dot", "m/s"),
        ("theta1", "rad"),
        ("theta2", "rad"),
        ("theta1_dot", "rad/s"),
        ("theta2_dot", "rad/s"),
        ("theta3", "rad"),
        ("psi", "rad"),
        ("tau1", "N*m"),
        ("tau2", "N*m"),
    ]
    .iter()
    .map(|(n, u)| Channel::new(n, u))
    .collect()
}

fn truck_row(x: &[f64; 6], tau: f64, p: &crate::dynamics::truck::TruckParams<f64>) -> Vec<f64> {
    let s = TruckState::from_array(x);
    vec![s.x_g(p), s.x_g_dot(p), s.theta1, s.theta2, s.theta1_dot, s.theta2_dot, s.theta3, s.psi, tau, tau]
}

/// Truck transport on its own clock, which starts at departure.
fn run_truck(scn: &Scenario, departure_s: f64) -> Result<(Trajectory, TruckSummary)> {
    let p = &scn.params.truck;
    let h = scn.params.schedule.h_truck_s;
    let every = scn.params.schedule.truck_record_every;
    let TruckController::BangBang { tau_bar: given } = scn.truck_controller;
    let plan = BangBangPlan::new(given.unwrap_or_else(|| tau_bar(p)), 0.0, p.t_u)?;
    let bounds = step_boundaries(0.0, p.t_u, h, &plan.switching_times())?;
    let mut traj = Trajectory::new(meta(TRUCK, "s", departure_s, h), truck_channels());
    let mut x = TruckState::at_rest().to_array();
    traj.push(0.0, truck_row(&x, bang_bang_torque(0.0, &plan), p))?;
    for (k, w) in bounds.windows(2).enumerate() {
        let (ta, tb) = (w[0], w[1]);
        // torque is constant on every step since steps end at the switches
        let tau = bang_bang_torque(ta, &plan);
        let next = rk4_step(
            |_, y: &[f64]| {
                let y: &[f64; 6] = y.try_into().expect("six truck states");
                Ok(truck_rates(y, tau, tau, p)?.to_vec())
            },
            &x,
            ta,
            tb - ta,
        )?;
        x = next.try_into().expect("six truck states");
        if (k + 1) % every == 0 || k + 2 == bounds.len() {
            traj.push(tb, truck_row(&x, bang_bang_torque(tb, &plan), p))?;
        }
    }
    let s = TruckState::from_array(&x);
    let target = p.distance + p.a;
    let summary = TruckSummary {
        departure_s,
        arrival_s: departure_s + p.t_u,
        tau_bar_n_m: plan.tau_bar,
        x_g_final_m: s.x_g(p),
        x_g_target_m: target,
        delivery_position_error_m: s.x_g(p) - target,
        delivery_speed_m_per_s: s.x_g_dot(p),
        energy_residual_w: check_energy_balance(&traj, p)?,
    };
    debug!("truck arrives at x_G = {} m", summary.x_g_final_m);
    Ok((traj, summary))
}

fn digester_channels() -> Vec<Channel> {
    [
        ("X1", "g/L"),
        ("S1", "g/L"),
        ("X2", "g/L"),
        ("S2", "mmol/L"),
        ("D1", "1/day"),
        ("D2", "1/day"),
        ("D3", "1/day"),
        ("D4", "1/day"),
        ("q_M", "mmol/(L*day)"),
        ("m_r", "kg"),
    ]
    .iter()
    .map(|(n, u)| Channel::new(n, u))
    .collect()
}

struct Feed<'a> {
    scn: &'a Scenario,
    gains: Option<FiniteTimeGains<f64>>,
    feeding: bool,
}

impl Feed<'_> {
    fn input(&self, x: &DigesterState<f64>) -> Result<Dilution<f64>> {
        if !self.feeding {
            return Ok([0.0; 4]);
        }
        let u = match (&self.scn.digester_controller, &self.gains) {
            (DigesterController::Constant { u }, _) => *u,
            (DigesterController::FiniteTime { .. }, Some(g)) => {
                finite_time_feedback(&g.translate(x), g, &self.scn.params.digester)?
            }
            (DigesterController::FiniteTime { .. }, None) => unreachable!("gains are built for feedback"),
        };
        Ok(if self.scn.saturate_inputs { u.map(|d| d.max(0.0)) } else { u })
    }

    /// Rates of `[X1, S1, X2, S2, m_r]` per day.
    fn rates(&self, y: &[f64]) -> Result<Vec<f64>> {
        let x = DigesterState::from_array([y[0], y[1], y[2], y[3]]);
        let u = self.input(&x)?;
        let r = digester_rates(&x, &u, &self.scn.params.digester);
        Ok(vec![r[0], r[1], r[2], r[3], reservoir_drain_rate(&u, &self.scn.params.digester)])
    }

    fn step(&self, y: &[f64], t: f64, h: f64, guard: Option<&OriginGuard<f64>>) -> Result<Vec<f64>> {
        let f = |_: f64, y: &[f64]| self.rates(y);
        match guard {
            Some(g) => rk4_guarded_step(f, y, t, h, g),
            None => rk4_step(f, y, t, h),
        }
    }
}

fn run_digester(
    scn: &Scenario,
    start_s: f64,
    ledger: &mut MassLedger,
    events: &mut Vec<EventRecord>,
) -> Result<(Trajectory, DigesterSummary)> {
    let p = &scn.params;
    let dp = &p.digester;
    let h = p.schedule.h_digester_day;
    let every = p.schedule.digester_record_every;
    let u_star = [p.control.d_bar; 4];
    let (gains, controller) = match &scn.digester_controller {
        DigesterController::FiniteTime { p: gain } => {
            let g = FiniteTimeGains::at_working_point(gain.unwrap_or(p.control.p), p.control.d_bar, dp)?;
            (Some(g), "finite_time")
        }
        DigesterController::Constant { .. } => (None, "constant"),
    };
    let x_star = match &gains {
        Some(g) => g.x_star,
        None => operating_equilibrium(&u_star, dp)?,
    };
    let x0 = match scn.digester_initial {
        DigesterInitial::Absolute(x) => x,
        DigesterInitial::Offset(d) => {
            let (a, b) = (x_star.to_array(), d.to_array());
            DigesterState::from_array([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
        }
    };
    let guard = gains.as_ref().map(|g| OriginGuard::new(g.x_star.to_array().to_vec(), DEAD_ZONE));
    let distance = |y: &[f64]| {
        let a = x_star.to_array();
        (0..4).map(|i| (y[i] - a[i]) * (y[i] - a[i])).sum::<f64>().sqrt()
    };
    let mut feed = Feed { scn, gains, feeding: true };

    let mut traj = Trajectory::new(meta(DIGESTER, "day", start_s, h), digester_channels());
    let mut y = x0.to_array().to_vec();
    y.push(ledger.balance(RESERVOIR)?);
    let row = |feed: &Feed, y: &[f64]| -> Result<Vec<f64>> {
        let x = DigesterState::from_array([y[0], y[1], y[2], y[3]]);
        let u = feed.input(&x)?;
        Ok(vec![y[0], y[1], y[2], y[3], u[0], u[1], u[2], u[3], methane_flow(y[3], y[2], dp), y[4]])
    };
    traj.push(0.0, row(&feed, &y)?)?;

    let mut settled_at = if distance(&y) <= SETTLED { Some(0.0) } else { None };
    let mut negative_steps = 0usize;
    let mut empty_at = None;
    let bounds = step_boundaries(0.0, scn.horizon_day, h, &[])?;
    for (k, w) in bounds.windows(2).enumerate() {
        let (ta, tb) = (w[0], w[1]);
        if y[..4].iter().any(|v| *v < 0.0) {
            if negative_steps == 0 {
                warn!("digester kinetics evaluated at negative concentrations at t = {ta} day");
            }
            negative_steps += 1;
        }
        let mut next = feed.step(&y, ta, tb - ta, guard.as_ref())?;
        if feed.feeding && next[4] < 0.0 {
            // locate the moment the reservoir runs dry, then coast without feed
            let (mut lo, mut hi) = (0.0, tb - ta);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if feed.step(&y, ta, mid, guard.as_ref())?[4] >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut at_empty = feed.step(&y, ta, lo, guard.as_ref())?;
            ledger.flow(RESERVOIR, DIGESTER, ledger.balance(RESERVOIR)?)?;
            at_empty[4] = 0.0;
            feed.feeding = false;
            let t_empty = ta + lo;
            empty_at = Some(t_empty);
            warn!("reservoir empty at t = {t_empty} day; feed stops");
            events.push(EventRecord {
                time_s: start_s + t_empty * SECONDS_PER_DAY,
                event: "reservoir_empty".into(),
                detail: "feed stops".into(),
            });
            next = if tb - t_empty > 0.0 { feed.step(&at_empty, t_empty, tb - t_empty, guard.as_ref())? } else { at_empty };
        } else {
            // keeps the reservoir account equal to the integrated stock
            ledger.flow(RESERVOIR, DIGESTER, ledger.balance(RESERVOIR)? - next[4])?;
        }
        y = next;
        let d = distance(&y);
        if d <= SETTLED {
            settled_at.get_or_insert(tb);
        } else {
            settled_at = None;
        }
        if (k + 1) % every == 0 || k + 2 == bounds.len() {
            traj.push(tb, row(&feed, &y)?)?;
            let t_s = start_s + tb * SECONDS_PER_DAY;
            ledger.flush(t_s);
            ledger.snapshot(t_s)?;
        }
    }
    let final_state = DigesterState::from_array([y[0], y[1], y[2], y[3]]);
    let settling_bound = feed.gains.as_ref().map(|g| settling_time_bound(&g.translate(&x0), g.p));
    let summary = DigesterSummary {
        start_s,
        horizon_day: scn.horizon_day,
        controller: controller.to_string(),
        working_point: x_star,
        working_input: feed.gains.map(|g| g.u_star).unwrap_or(u_star),
        initial_state: x0,
        final_state,
        final_distance_to_working_point: distance(&y),
        settling_time_day: settled_at,
        settling_bound_day: settling_bound,
        methane_flow_final: methane_flow(y[3], y[2], dp),
        negative_concentration_steps: negative_steps,
        reservoir_empty_day: empty_at,
    };
    Ok((traj, summary))
}
