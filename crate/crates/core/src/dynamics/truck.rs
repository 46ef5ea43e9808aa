//! Three-wheel truck with two actuated rear wheels and a passive steered
//! front wheel.

use serde::{Deserialize, Serialize};

use crate::dynamics::hub::invalid;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruckParams<T> {
    /// Vehicle mass without load, kg.
    pub m_v: T,
    /// Load mass, kg.
    pub m_l: T,
    /// Yaw moment of inertia, kg·m².
    #[serde(rename = "I_z")]
    pub i_z: T,
    /// Chassis posterior length, m.
    pub a: T,
    /// Chassis anterior length, m.
    pub b: T,
    /// Wheel radius, m.
    pub r: T,
    /// Chassis width, m.
    pub l: T,
    /// Interaxis, m.
    pub d: T,
    /// Hub-plant distance, m.
    #[serde(rename = "H")]
    pub distance: T,
    /// Delivery time, s.
    pub t_u: T,
}

impl<T: Real> TruckParams<T> {
    /// Loaded mass m_v + m_l.
    pub fn m_vl(&self) -> T {
        self.m_v + self.m_l
    }

    /// ε = I_z r²/l².
    pub fn epsilon(&self) -> T {
        self.i_z * self.r * self.r / (self.l * self.l)
    }

    /// Geometry and masses must be positive; `I_z`, `a`, `b` and the load may
    /// be zero so that degenerate limits can be studied.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("truck.m_v", self.m_v),
            ("truck.r", self.r),
            ("truck.l", self.l),
            ("truck.d", self.d),
            ("truck.H", self.distance),
            ("truck.t_u", self.t_u),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive"));
            }
        }
        let nonnegative = [("truck.m_l", self.m_l), ("truck.I_z", self.i_z), ("truck.a", self.a), ("truck.b", self.b)];
        for (name, v) in nonnegative {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Modal masses of B: `B (1,1)ᵀ = common·(1,1)ᵀ` and
    /// `B (1,−1)ᵀ = differential·(1,−1)ᵀ`.
    fn modes(&self) -> (T, T) {
        let two = T::lit(2.0);
        let r2 = self.r * self.r;
        let common = self.m_vl() * r2 / two;
        let differential = self.m_vl() * two * (self.a * self.a * r2 / (self.l * self.l) + self.epsilon());
        (common, differential)
    }

    fn check_modes(&self) -> Result<(T, T)> {
        let (common, differential) = self.modes();
        if !(differential > T::epsilon() * common) || !(common > T::zero()) {
            return Err(Error::SingularB);
        }
        Ok((common, differential))
    }
}

/// Wheel and steering coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruckState<T> {
    pub theta1: T,
    pub theta2: T,
    pub theta3: T,
    pub psi: T,
    pub theta1_dot: T,
    pub theta2_dot: T,
}

impl<T: Real> TruckState<T> {
    pub fn at_rest() -> Self {
        TruckState {
            theta1: T::zero(),
            theta2: T::zero(),
            theta3: T::zero(),
            psi: T::zero(),
            theta1_dot: T::zero(),
            theta2_dot: T::zero(),
        }
    }

    /// `[θ1, θ2, θ̇1, θ̇2, θ3, ψ]`, the integration state.
    pub fn to_array(&self) -> [T; 6] {
        [self.theta1, self.theta2, self.theta1_dot, self.theta2_dot, self.theta3, self.psi]
    }

    pub fn from_array(x: &[T; 6]) -> Self {
        TruckState { theta1: x[0], theta2: x[1], theta1_dot: x[2], theta2_dot: x[3], theta3: x[4], psi: x[5] }
    }

    /// Centre-of-mass coordinate for straight-line motion, x_G = rθ1 + a.
    pub fn x_g(&self, p: &TruckParams<T>) -> T {
        p.r * self.theta1 + p.a
    }

    /// Centre-of-mass speed for straight-line motion, ẋ_G = rθ̇1.
    pub fn x_g_dot(&self, p: &TruckParams<T>) -> T {
        p.r * self.theta1_dot
    }
}

/// Inertia matrix B of the actuated wheels.
pub fn truck_b_matrix<T: Real>(p: &TruckParams<T>) -> Result<[[T; 2]; 2]> {
    p.check_modes()?;
    let quarter = T::lit(0.25);
    let r2 = p.r * p.r;
    let lever = p.a * p.a * r2 / (p.l * p.l);
    let diagonal = p.m_vl() * ((lever + r2 * quarter) + p.epsilon());
    let coupling = p.m_vl() * ((-lever + r2 * quarter) - p.epsilon());
    Ok([[diagonal, coupling], [coupling, diagonal]])
}

/// Wheel accelerations `B⁻¹ (τ1, τ2)ᵀ`.
///
/// B has equal diagonal entries, so it is solved in its common and
/// differential modes. The common mode does not involve `I_z`, which keeps
/// straight-line motion bit-for-bit independent of the yaw inertia.
pub fn truck_forward_dynamics<T: Real>(_state: &TruckState<T>, tau1: T, tau2: T, p: &TruckParams<T>) -> Result<(T, T)> {
    let (common, differential) = p.check_modes()?;
    let half = T::lit(0.5);
    let sum = (tau1 + tau2) / common;
    let diff = (tau1 - tau2) / differential;
    Ok((half * (sum + diff), half * (sum - diff)))
}

/// Rates of the passive joints, `(θ̇3, ψ̇) = F(ψ) (θ̇1, θ̇2)ᵀ`.
pub fn truck_passive_rates<T: Real>(psi: T, theta1_dot: T, theta2_dot: T, p: &TruckParams<T>) -> (T, T) {
    let half = T::lit(0.5);
    let (sin, cos) = psi.sin_cos();
    let wheelbase = (p.a + p.b) / p.l;
    let rho = p.r / p.d;
    let delta_minus = sin * half - p.d / p.l;
    let delta_plus = sin * half + p.d / p.l;
    let f11 = cos * half - wheelbase * sin;
    let f12 = cos * half + wheelbase * sin;
    let f21 = rho * (-delta_minus - wheelbase * cos);
    let f22 = rho * (-delta_plus + wheelbase * cos);
    (f11 * theta1_dot + f12 * theta2_dot, f21 * theta1_dot + f22 * theta2_dot)
}

/// Centre-of-mass acceleration for straight-line motion, 2τ/(m_vl r).
pub fn straight_line_accel<T: Real>(tau: T, p: &TruckParams<T>) -> T {
    T::lit(2.0) * tau / (p.m_vl() * p.r)
}

/// Time derivative of `[θ1, θ2, θ̇1, θ̇2, θ3, ψ]`.
pub fn truck_rates<T: Real>(x: &[T; 6], tau1: T, tau2: T, p: &TruckParams<T>) -> Result<[T; 6]> {
    let state = TruckState::from_array(x);
    let (acc1, acc2) = truck_forward_dynamics(&state, tau1, tau2, p)?;
    let (theta3_dot, psi_dot) = truck_passive_rates(state.psi, state.theta1_dot, state.theta2_dot, p);
    Ok([state.theta1_dot, state.theta2_dot, acc1, acc2, theta3_dot, psi_dot])
}
