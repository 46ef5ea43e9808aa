//! Plant reservoir between truck delivery and digester feed.

use crate::dynamics::digester::{DigesterParams, Dilution};
use crate::dynamics::hub::kronecker;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Discrete fill: adds `m_l` at `n == n_u`.
pub fn reservoir_fill_step<T: Real>(m_r: T, n: u64, n_u: u64, m_l: T) -> T {
    m_r + kronecker::<T>(n, n_u) * m_l
}

/// Drain rate of the reservoir, kg/day, with the four dilution channels fed
/// in parallel.
pub fn reservoir_drain_rate<T: Real>(u: &Dilution<T>, p: &DigesterParams<T>) -> T {
    let total = u.iter().fold(T::zero(), |acc, d| acc + *d);
    -(p.rho_b * p.v_d * total)
}

/// Reservoir stock with a running record of what left it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirState<T> {
    pub mass: T,
    pub drained: T,
}

impl<T: Real> ReservoirState<T> {
    pub fn new(mass: T) -> Self {
        ReservoirState { mass, drained: T::zero() }
    }

    pub fn fill(&mut self, amount: T) {
        self.mass = self.mass + amount;
    }

    /// Removes `amount`; refuses to go negative.
    pub fn drain(&mut self, amount: T) -> Result<()> {
        if amount > self.mass {
            return Err(Error::ReservoirEmpty);
        }
        self.mass = self.mass - amount;
        self.drained = self.drained + amount;
        Ok(())
    }
}
