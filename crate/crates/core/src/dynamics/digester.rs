//! Two-step (acidogenesis / methanogenesis) anaerobic digester in a
//! continuous stirred tank, with one dilution channel per state.

use serde::{Deserialize, Serialize};

use crate::dynamics::hub::invalid;
use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigesterParams<T> {
    /// Fraction of bacteria in the liquid phase.
    pub alpha: T,
    /// Inlet organic substrate, g/L.
    #[serde(rename = "S1_in")]
    pub s1_in: T,
    /// Inlet volatile fatty acids, mmol/L.
    #[serde(rename = "S2_in")]
    pub s2_in: T,
    /// Substrate consumed per unit acidogenic growth, g/g.
    pub k1: T,
    /// VFA produced per unit acidogenic growth, mmol/g.
    pub k2: T,
    /// VFA consumed per unit methanogenic growth, mmol/g.
    pub k3: T,
    /// 1/day.
    pub mu1_max: T,
    /// 1/day.
    pub mu2_max: T,
    /// g/L.
    #[serde(rename = "K_S1")]
    pub k_s1: T,
    /// mmol/L.
    #[serde(rename = "K_S2")]
    pub k_s2: T,
    /// Haldane inhibition constant, mmol/L.
    #[serde(rename = "K_I2")]
    pub k_i2: T,
    /// Methane yield, mmol/g.
    pub k6: T,
    /// Biomass density, kg/m³.
    pub rho_b: T,
    /// Working volume, m³.
    #[serde(rename = "V_d")]
    pub v_d: T,
    /// Where the values come from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl<T: Real> DigesterParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("digester.alpha", self.alpha),
            ("digester.S1_in", self.s1_in),
            ("digester.S2_in", self.s2_in),
            ("digester.k1", self.k1),
            ("digester.k2", self.k2),
            ("digester.k3", self.k3),
            ("digester.mu1_max", self.mu1_max),
            ("digester.mu2_max", self.mu2_max),
            ("digester.K_S1", self.k_s1),
            ("digester.K_S2", self.k_s2),
            ("digester.K_I2", self.k_i2),
            ("digester.k6", self.k6),
            ("digester.rho_b", self.rho_b),
            ("digester.V_d", self.v_d),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive"));
            }
        }
        if self.alpha > T::one() {
            return Err(invalid("digester.alpha", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Digester concentrations. Translated coordinates may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigesterState<T> {
    /// Acidogenic biomass, g/L.
    #[serde(rename = "X1")]
    pub x1: T,
    /// Organic substrate, g/L.
    #[serde(rename = "S1")]
    pub s1: T,
    /// Methanogenic biomass, g/L.
    #[serde(rename = "X2")]
    pub x2: T,
    /// Volatile fatty acids, mmol/L.
    #[serde(rename = "S2")]
    pub s2: T,
}

impl<T: Real> DigesterState<T> {
    /// State order `[X1, S1, X2, S2]`.
    pub fn to_array(&self) -> [T; 4] {
        [self.x1, self.s1, self.x2, self.s2]
    }

    pub fn from_array(x: [T; 4]) -> Self {
        DigesterState { x1: x[0], s1: x[1], x2: x[2], s2: x[3] }
    }

    /// Names of the concentrations that are negative.
    pub fn negative_concentrations(&self) -> Vec<&'static str> {
        let named = [("X1", self.x1), ("S1", self.s1), ("X2", self.x2), ("S2", self.s2)];
        named.iter().filter(|(_, v)| *v < T::zero()).map(|(n, _)| *n).collect()
    }
}

/// Dilution rates `[D1, D2, D3, D4]`, 1/day. D1 acts on X1, D2 on X2, D3 on S1
/// and D4 on S2.
pub type Dilution<T> = [T; 4];

/// Monod rate μ1(S1) = μ1max S1/(S1 + K_S1), 1/day.
pub fn monod_mu1<T: Real>(s1: T, p: &DigesterParams<T>) -> T {
    p.mu1_max * s1 / (s1 + p.k_s1)
}

/// Haldane rate μ2(S2) = μ2max S2/(S2 + K_S2 + (S2/K_I2)²), 1/day.
pub fn haldane_mu2<T: Real>(s2: T, p: &DigesterParams<T>) -> T {
    let inhibition = s2 / p.k_i2;
    p.mu2_max * s2 / (s2 + p.k_s2 + inhibition * inhibition)
}

/// Time derivative `(Ẋ1, Ṡ1, Ẋ2, Ṡ2)`, per day.
pub fn digester_rates<T: Real>(x: &DigesterState<T>, u: &Dilution<T>, p: &DigesterParams<T>) -> [T; 4] {
    let mu1 = monod_mu1(x.s1, p);
    let mu2 = haldane_mu2(x.s2, p);
    [
        (mu1 - p.alpha * u[0]) * x.x1,
        u[2] * (p.s1_in - x.s1) - p.k1 * mu1 * x.x1,
        (mu2 - p.alpha * u[1]) * x.x2,
        u[3] * (p.s2_in - x.s2) + p.k2 * mu1 * x.x1 - p.k3 * mu2 * x.x2,
    ]
}

/// Input-free part f(x) of the rates.
pub fn digester_drift<T: Real>(x: &DigesterState<T>, p: &DigesterParams<T>) -> [T; 4] {
    let mu1 = monod_mu1(x.s1, p);
    let mu2 = haldane_mu2(x.s2, p);
    [mu1 * x.x1, -p.k1 * mu1 * x.x1, mu2 * x.x2, p.k2 * mu1 * x.x1 - p.k3 * mu2 * x.x2]
}

/// Methane flow q_M = k6 μ2(S2) X2, mmol/(L·day).
pub fn methane_flow<T: Real>(s2: T, x2: T, p: &DigesterParams<T>) -> T {
    p.k6 * haldane_mu2(s2, p) * x2
}

/// Closed-form operating equilibrium with both bacterial populations
/// present, for positive dilutions. Takes the low-VFA branch of the Haldane
/// equation.
pub fn equilibrium_seed<T: Real>(u: &Dilution<T>, p: &DigesterParams<T>) -> Result<DigesterState<T>> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let m1 = p.alpha * u[0];
    let m2 = p.alpha * u[1];
    if !(m1 > T::zero() && m1 < p.mu1_max && m2 > T::zero() && m2 < p.mu2_max) {
        return Err(Error::NoConvergence("dilution outside the range with a coexistence equilibrium".into()));
    }
    let s1 = p.k_s1 * m1 / (p.mu1_max - m1);
    // m2 (S2 + K_S2 + S2²/K_I2²) = μ2max S2, smaller root in cancellation-free form
    let gap = p.mu2_max - m2;
    let disc = gap * gap - four * m2 * m2 * p.k_s2 / (p.k_i2 * p.k_i2);
    if disc < T::zero() {
        return Err(Error::NoConvergence("methanogenic growth cannot match the dilution".into()));
    }
    let s2 = two * m2 * p.k_s2 / (gap + disc.sqrt());
    let x1 = u[2] * (p.s1_in - s1) / (p.k1 * m1);
    let x2 = (u[3] * (p.s2_in - s2) + p.k2 * m1 * x1) / (p.k3 * m2);
    Ok(DigesterState { x1, s1, x2, s2 })
}

/// Newton iteration on `digester_rates(x, u) = 0` from `seed`, with a
/// central-difference Jacobian.
pub fn find_equilibrium<T: Real>(u: &Dilution<T>, p: &DigesterParams<T>, seed: DigesterState<T>) -> Result<DigesterState<T>> {
    let tol = T::lit(1e-13);
    let mut x = seed.to_array();
    let norm = |v: &[T; 4]| v.iter().fold(T::zero(), |m, e| m.max(e.abs()));
    let eval = |x: &[T; 4]| digester_rates(&DigesterState::from_array(*x), u, p);
    for _ in 0..50 {
        let f = eval(&x);
        let scale = T::one().max(norm(&x));
        if norm(&f) <= tol * scale * T::lit(100.0) {
            return Ok(DigesterState::from_array(x));
        }
        let mut jac = vec![vec![T::zero(); 4]; 4];
        for j in 0..4 {
            let h = T::lit(1e-6) * T::one().max(x[j].abs());
            let mut plus = x;
            let mut minus = x;
            plus[j] = plus[j] + h;
            minus[j] = minus[j] - h;
            let (fp, fm) = (eval(&plus), eval(&minus));
            for i in 0..4 {
                jac[i][j] = (fp[i] - fm[i]) / (h + h);
            }
        }
        let step = solve_square(jac, f.iter().map(|v| -*v).collect())
            .ok_or_else(|| Error::NoConvergence("singular Jacobian".into()))?;
        for i in 0..4 {
            x[i] = x[i] + step[i];
        }
        if norm(&[step[0], step[1], step[2], step[3]]) <= tol * scale {
            return Ok(DigesterState::from_array(x));
        }
    }
    Err(Error::NoConvergence("Newton iteration on the digester equilibrium".into()))
}

/// Operating equilibrium under `u`: closed-form seed polished by Newton.
pub fn operating_equilibrium<T: Real>(u: &Dilution<T>, p: &DigesterParams<T>) -> Result<DigesterState<T>> {
    find_equilibrium(u, p, equilibrium_seed(u, p)?)
}
