use crate::dynamics::truck::TruckParams;
use crate::error::Result;
use crate::sim::trajectory::Trajectory;

/// Power balance at one interior trajectory row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResidual {
    pub time: f64,
    /// |d/dt(½ m_vl ẋ_G²) − (τ1θ̇1 + τ2θ̇2)|, W.
    pub residual: f64,
    /// The centred stencil spans a torque jump.
    pub switching: bool,
}

/// Residual of the straight-line power balance at every interior row, with
/// the kinetic-energy derivative taken by centred differences.
pub fn energy_balance_residuals(traj: &Trajectory, p: &TruckParams<f64>) -> Result<Vec<EnergyResidual>> {
    let v = traj.channel("x_G_dot")?;
    let tau1 = traj.channel("tau1")?;
    let tau2 = traj.channel("tau2")?;
    let w1 = traj.channel("theta1_dot")?;
    let w2 = traj.channel("theta2_dot")?;
    let t = traj.times();
    let m = p.m_vl();
    let mut out = Vec::new();
    for i in 1..t.len().saturating_sub(1) {
        let kinetic = |j: usize| 0.5 * m * v[j] * v[j];
        let d_kinetic = (kinetic(i + 1) - kinetic(i - 1)) / (t[i + 1] - t[i - 1]);
        let power = tau1[i] * w1[i] + tau2[i] * w2[i];
        let switching = tau1[i - 1] != tau1[i + 1] || tau2[i - 1] != tau2[i + 1] || tau1[i] != tau1[i - 1];
        out.push(EnergyResidual { time: t[i], residual: (d_kinetic - power).abs(), switching });
    }
    Ok(out)
}

/// Largest power-balance residual away from torque switches, W.
pub fn check_energy_balance(traj: &Trajectory, p: &TruckParams<f64>) -> Result<f64> {
    Ok(energy_balance_residuals(traj, p)?
        .iter()
        .filter(|r| !r.switching)
        .fold(0.0, |m, r| m.max(r.residual)))
}
