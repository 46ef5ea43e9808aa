use serde::{Deserialize, Serialize};

use crate::dynamics::digester::{digester_rates, operating_equilibrium, DigesterParams, DigesterState, Dilution};
use crate::dynamics::hub::invalid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radius of the ball around the working point where the feedback holds u*.
pub const DEAD_ZONE: f64 = 1e-9;
/// Magnitude below which a channel of G counts as lost.
pub const SINGULAR_G_TOL: f64 = 1e-9;

/// Translated digester state x̃ = x − x*, order `[X1, S1, X2, S2]`.
pub type Translated<T> = [T; 4];

fn sq_norm<T: Real>(v: &[T; 4]) -> T {
    v.iter().fold(T::zero(), |acc, e| acc + *e * *e)
}

/// Euclidean norm of a translated state.
pub fn norm<T: Real>(v: &[T; 4]) -> T {
    sq_norm(v).sqrt()
}

/// V(x̃) = p^{2/3}(x̃ᵀx̃)^{2/3}.
pub fn lyapunov_v<T: Real>(xt: &Translated<T>, p: T) -> T {
    let c = (p * sq_norm(xt)).cbrt();
    c * c
}

/// V′(x̃) = (4/3)p^{2/3}(x̃ᵀx̃)^{−1/3}x̃ᵀ.
pub fn lyapunov_grad<T: Real>(xt: &Translated<T>, p: T) -> Result<Translated<T>> {
    let s = sq_norm(xt);
    if s == T::zero() {
        return Err(Error::OriginSingularity);
    }
    let p23 = p.cbrt() * p.cbrt();
    let k = T::lit(4.0) / T::lit(3.0) * p23 / s.cbrt();
    Ok(xt.map(|e| k * e))
}

/// Closed-loop vector field −½V′(x̃)ᵀ, zero inside the dead zone.
pub fn gradient_flow_rate<T: Real>(xt: &Translated<T>, p: T) -> Translated<T> {
    if norm(xt) <= T::lit(DEAD_ZONE) {
        return [T::zero(); 4];
    }
    let g = lyapunov_grad(xt, p).expect("nonzero state");
    g.map(|e| -e / T::lit(2.0))
}

/// Input matrix of the control-affine form ẋ = f(x) + G(x)u with
/// u = `[D1, D2, D3, D4]` and the state order `[X1, S1, X2, S2]`.
pub fn input_matrix_g<T: Real>(x: &DigesterState<T>, p: &DigesterParams<T>) -> Result<[[T; 4]; 4]> {
    let entries = [
        ("X1", -p.alpha * x.x1),
        ("X2", -p.alpha * x.x2),
        ("S1_in - S1", p.s1_in - x.s1),
        ("S2_in - S2", p.s2_in - x.s2),
    ];
    for (channel, value) in entries {
        if value.abs() < T::lit(SINGULAR_G_TOL) || !value.is_finite() {
            return Err(Error::SingularG { channel, value: value.to_f64_lossy() });
        }
    }
    let mut g = [[T::zero(); 4]; 4];
    g[0][0] = entries[0].1;
    g[2][1] = entries[1].1;
    g[1][2] = entries[2].1;
    g[3][3] = entries[3].1;
    Ok(g)
}

/// Solves G(x)u = w for the permuted-diagonal G.
fn solve_g<T: Real>(g: &[[T; 4]; 4], w: &[T; 4]) -> Dilution<T> {
    [w[0] / g[0][0], w[2] / g[2][1], w[1] / g[1][2], w[3] / g[3][3]]
}

/// Finite-time regulator around a working point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteTimeGains<T> {
    pub p: T,
    pub x_star: DigesterState<T>,
    pub u_star: Dilution<T>,
}

impl<T: Real> FiniteTimeGains<T> {
    /// Checks that `x_star` is an equilibrium under `u_star`.
    pub fn new(p: T, x_star: DigesterState<T>, u_star: Dilution<T>, params: &DigesterParams<T>) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(invalid("control.p", "must be positive"));
        }
        let r = digester_rates(&x_star, &u_star, params);
        let scale = T::one().max(norm(&x_star.to_array()));
        if norm(&r) > T::lit(1e-8) * scale {
            return Err(invalid("control.x_star", "not an equilibrium under u_star"));
        }
        Ok(FiniteTimeGains { p, x_star, u_star })
    }

    /// Working point with every channel at `d_bar`, located by root finding.
    pub fn at_working_point(p: T, d_bar: T, params: &DigesterParams<T>) -> Result<Self> {
        let u_star = [d_bar; 4];
        let x_star = operating_equilibrium(&u_star, params)?;
        Self::new(p, x_star, u_star, params)
    }

    pub fn translate(&self, x: &DigesterState<T>) -> Translated<T> {
        let (a, b) = (x.to_array(), self.x_star.to_array());
        [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
    }

    pub fn untranslate(&self, xt: &Translated<T>) -> DigesterState<T> {
        let b = self.x_star.to_array();
        DigesterState::from_array([xt[0] + b[0], xt[1] + b[1], xt[2] + b[2], xt[3] + b[3]])
    }
}

/// Translated drift f̃(x̃) = f(x*+x̃) + G(x*+x̃)u*, zero at x̃ = 0.
pub fn translated_drift<T: Real>(xt: &Translated<T>, gains: &FiniteTimeGains<T>, p: &DigesterParams<T>) -> Translated<T> {
    digester_rates(&gains.untranslate(xt), &gains.u_star, p)
}

/// u = u* + G(x*+x̃)⁻¹(−½V′(x̃)ᵀ − f̃(x̃)); holds u* inside the dead zone.
pub fn finite_time_feedback<T: Real>(
    xt: &Translated<T>,
    gains: &FiniteTimeGains<T>,
    p: &DigesterParams<T>,
) -> Result<Dilution<T>> {
    if norm(xt) <= T::lit(DEAD_ZONE) {
        return Ok(gains.u_star);
    }
    let x = gains.untranslate(xt);
    let g = input_matrix_g(&x, p)?;
    let target = gradient_flow_rate(xt, gains.p);
    let drift = translated_drift(xt, gains, p);
    let w = [target[0] - drift[0], target[1] - drift[1], target[2] - drift[2], target[3] - drift[3]];
    let du = solve_g(&g, &w);
    Ok([
        gains.u_star[0] + du[0],
        gains.u_star[1] + du[1],
        gains.u_star[2] + du[2],
        gains.u_star[3] + du[3],
    ])
}

/// T* = (9/4)(x̃0ᵀx̃0)^{1/3}/p^{2/3}, the time the gradient flow reaches 0.
pub fn settling_time_bound<T: Real>(xt0: &Translated<T>, p: T) -> T {
    let p23 = p.cbrt() * p.cbrt();
    T::lit(9.0) / T::lit(4.0) * sq_norm(xt0).cbrt() / p23
}
