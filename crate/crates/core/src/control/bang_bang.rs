use serde::{Deserialize, Serialize};

use crate::dynamics::hub::invalid;
use crate::dynamics::truck::TruckParams;
use crate::error::Result;
use crate::scalar::Real;

/// Open-loop accelerate/decelerate plan on the truck clock, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BangBangPlan<T> {
    /// Torque magnitude per wheel, N·m.
    pub tau_bar: T,
    pub t_l: T,
    pub t_u: T,
}

impl<T: Real> BangBangPlan<T> {
    pub fn new(tau_bar: T, t_l: T, t_u: T) -> Result<Self> {
        let plan = BangBangPlan { tau_bar, t_l, t_u };
        plan.validate()?;
        Ok(plan)
    }

    /// Plan that covers the hub-plant distance in `t_u`, starting at `t_l`.
    pub fn for_truck(p: &TruckParams<T>, t_l: T) -> Result<Self> {
        Self::new(tau_bar(p), t_l, p.t_u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_bar > T::zero()) || !self.tau_bar.is_finite() {
            return Err(invalid("bang_bang.tau_bar", "must be positive"));
        }
        if !(self.t_l >= T::zero() && self.t_l < self.t_u) || !self.t_u.is_finite() {
            return Err(invalid("bang_bang.t_l", "must satisfy 0 <= t_l < t_u"));
        }
        Ok(())
    }

    /// Times where the torque jumps.
    pub fn switching_times(&self) -> [T; 3] {
        [self.t_l, self.t_u / T::lit(2.0), self.t_u]
    }
}

/// τ̄ = 2(m_v + m_l) r H / t_u², N·m.
pub fn tau_bar<T: Real>(p: &TruckParams<T>) -> T {
    T::lit(2.0) * p.m_vl() * p.r * p.distance / (p.t_u * p.t_u)
}

/// +τ̄ on [t_l, t_u/2), −τ̄ on [t_u/2, t_u), zero elsewhere.
pub fn bang_bang_torque<T: Real>(t: T, plan: &BangBangPlan<T>) -> T {
    let half = plan.t_u / T::lit(2.0);
    if t >= plan.t_l && t < half {
        plan.tau_bar
    } else if t >= half && t < plan.t_u {
        -plan.tau_bar
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::truck::tests::table;

    #[test]
    fn tau_bar_table_values() {
        let p = table();
        assert!((tau_bar(&p) - 2.0 * 3700.0 * 0.4 * 8000.0 / 360000.0).abs() < 1e-12);
        assert!((tau_bar(&p) - 65.777_777_777_777_78).abs() < 1e-10);
        let mut q = p.clone();
        q.distance = 0.0;
        assert_eq!(tau_bar(&q), 0.0);
        q.distance = 16000.0;
        assert!((tau_bar(&q) - 2.0 * tau_bar(&p)).abs() < 1e-12);
    }

    #[test]
    fn piecewise() {
        let plan = BangBangPlan::new(65.0, 0.0, 600.0).unwrap();
        assert_eq!(bang_bang_torque(0.0, &plan), 65.0);
        assert_eq!(bang_bang_torque(299.999_999, &plan), 65.0);
        assert_eq!(bang_bang_torque(300.0, &plan), -65.0);
        assert_eq!(bang_bang_torque(599.999, &plan), -65.0);
        assert_eq!(bang_bang_torque(600.0, &plan), 0.0);
        assert_eq!(bang_bang_torque(1e4, &plan), 0.0);
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(BangBangPlan::new(0.0, 0.0, 600.0).is_err());
        assert!(BangBangPlan::new(1.0, 600.0, 600.0).is_err());
    }
}
