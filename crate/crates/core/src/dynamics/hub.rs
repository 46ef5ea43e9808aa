use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Biomass hub: a stock that releases one truckload at the loading step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubParams<T> {
    /// Truckload, kg.
    pub m_l: T,
    /// Initial hub stock, kg.
    pub m_1_0: T,
    /// Loading step index.
    pub n_l: u64,
}

impl<T: Scalar> HubParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_l >= T::zero()) {
            return Err(invalid("hub.m_l", "must be nonnegative"));
        }
        if !(self.m_1_0 >= self.m_l) {
            return Err(invalid("hub.m_1_0", "must be at least the truckload"));
        }
        Ok(())
    }
}

pub(crate) fn invalid(name: &str, reason: &str) -> Error {
    Error::InvalidParameter { name: name.to_string(), reason: reason.to_string() }
}

/// Kronecker delta δ_{n0}(n).
pub fn kronecker<T: Scalar>(n: u64, n0: u64) -> T {
    if n == n0 {
        T::one()
    } else {
        T::zero()
    }
}

/// Hub stock after step `n`: `m1(n+1) = m1(n) − δ_{n_l}(n)·m_l`.
pub fn hub_step<T: Scalar>(m1: T, n: u64, p: &HubParams<T>) -> Result<T> {
    let next = m1 - kronecker::<T>(n, p.n_l) * p.m_l.clone();
    if next < T::zero() {
        return Err(Error::StockUnderflow { stock: next.to_f64_lossy() });
    }
    Ok(next)
}
