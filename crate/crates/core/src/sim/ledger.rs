use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig17;

/// One logged movement of mass between accounts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transfer {
    pub time_s: f64,
    pub from: String,
    pub to: String,
    pub amount_kg: f64,
}

/// Per-compartment mass accounts with a transfer log. Mass only moves
/// between accounts, so the total stays at its opening value.
#[derive(Debug, Clone, PartialEq)]
pub struct MassLedger {
    names: Vec<String>,
    balances: Vec<f64>,
    opening_total: f64,
    /// Allowed drift relative to the opening total.
    rel_tol: f64,
    snapshots: Vec<(f64, Vec<f64>)>,
    transfers: Vec<Transfer>,
    /// Continuous movements not yet written to the log, keyed by account pair.
    pending: Vec<((usize, usize), f64)>,
    max_drift: f64,
}

impl MassLedger {
    pub fn new(accounts: &[(&str, f64)], rel_tol: f64) -> Self {
        let balances: Vec<f64> = accounts.iter().map(|(_, m)| *m).collect();
        let opening_total = balances.iter().sum();
        MassLedger {
            names: accounts.iter().map(|(n, _)| n.to_string()).collect(),
            balances,
            opening_total,
            rel_tol,
            snapshots: Vec::new(),
            transfers: Vec::new(),
            pending: Vec::new(),
            max_drift: 0.0,
        }
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidScenario(format!("no ledger account `{name}`")))
    }

    fn shift(&mut self, from: usize, to: usize, amount: f64) -> Result<()> {
        if !amount.is_finite() {
            return Err(Error::InvalidScenario("non-finite transfer".into()));
        }
        self.balances[from] -= amount;
        self.balances[to] += amount;
        Ok(())
    }

    /// Moves `amount` and logs it immediately.
    pub fn transfer(&mut self, time_s: f64, from: &str, to: &str, amount: f64) -> Result<()> {
        let (i, j) = (self.index(from)?, self.index(to)?);
        self.shift(i, j, amount)?;
        self.transfers.push(Transfer { time_s, from: from.into(), to: to.into(), amount_kg: amount });
        Ok(())
    }

    /// Moves `amount` as part of a continuous flow; logged by the next `flush`.
    pub fn flow(&mut self, from: &str, to: &str, amount: f64) -> Result<()> {
        let key = (self.index(from)?, self.index(to)?);
        self.shift(key.0, key.1, amount)?;
        match self.pending.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => *acc += amount,
            None => self.pending.push((key, amount)),
        }
        Ok(())
    }

    /// Logs accumulated continuous flows as transfers stamped `time_s`.
    pub fn flush(&mut self, time_s: f64) {
        for ((i, j), amount) in std::mem::take(&mut self.pending) {
            let (from, to) = (self.names[i].clone(), self.names[j].clone());
            self.transfers.push(Transfer { time_s, from, to, amount_kg: amount });
        }
    }

    /// Records the balances and checks the total against the opening value.
    pub fn snapshot(&mut self, time_s: f64) -> Result<()> {
        let drift = self.total() - self.opening_total;
        self.max_drift = self.max_drift.max(drift.abs());
        self.snapshots.push((time_s, self.balances.clone()));
        if drift.abs() > self.rel_tol * self.opening_total.abs().max(1.0) {
            return Err(Error::LedgerViolation { time_s, drift });
        }
        Ok(())
    }

    pub fn balance(&self, name: &str) -> Result<f64> {
        Ok(self.balances[self.index(name)?])
    }

    pub fn total(&self) -> f64 {
        self.balances.iter().sum()
    }

    pub fn opening_total(&self) -> f64 {
        self.opening_total
    }

    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn accounts(&self) -> &[String] {
        &self.names
    }

    pub fn snapshots(&self) -> &[(f64, Vec<f64>)] {
        &self.snapshots
    }

    pub fn transfers(&self) -> &[Transfer] {
        &self.transfers
    }

    /// Balance table followed by the transfer log, both comma-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s");
        for n in &self.names {
            out.push_str(&format!(",{n}_kg"));
        }
        out.push_str(",total_kg\n");
        for (t, row) in &self.snapshots {
            out.push_str(&sig17(*t));
            for v in row {
                out.push(',');
                out.push_str(&sig17(*v));
            }
            out.push(',');
            out.push_str(&sig17(row.iter().sum()));
            out.push('\n');
        }
        out.push_str("\ntime_s,from,to,amount_kg\n");
        for tr in &self.transfers {
            out.push_str(&format!("{},{},{},{}\n", sig17(tr.time_s), tr.from, tr.to, sig17(tr.amount_kg)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfers_conserve() {
        let mut l = MassLedger::new(&[("hub", 5000.0), ("truck", 0.0)], 1e-12);
        l.snapshot(0.0).unwrap();
        l.transfer(10.0, "hub", "truck", 200.0).unwrap();
        l.snapshot(10.0).unwrap();
        assert_eq!(l.balance("hub").unwrap(), 4800.0);
        assert_eq!(l.total(), 5000.0);
        assert_eq!(l.transfers().len(), 1);
        assert!(l.transfer(0.0, "hub", "nowhere", 1.0).is_err());
    }

    #[test]
    fn flows_are_aggregated() {
        let mut l = MassLedger::new(&[("a", 1.0), ("b", 0.0)], 1e-12);
        l.flow("a", "b", 0.25).unwrap();
        l.flow("a", "b", 0.25).unwrap();
        l.flush(2.0);
        assert_eq!(l.transfers()[0].amount_kg, 0.5);
        l.flush(3.0);
        assert_eq!(l.transfers().len(), 1);
    }

    #[test]
    fn csv_has_both_tables() {
        let mut l = MassLedger::new(&[("a", 1.0), ("b", 0.0)], 1e-12);
        l.snapshot(0.0).unwrap();
        l.transfer(1.0, "a", "b", 1.0).unwrap();
        let csv = l.to_csv();
        assert!(csv.starts_with("time_s,a_kg,b_kg,total_kg\n"));
        assert!(csv.contains("\ntime_s,from,to,amount_kg\n1.0000000000000000e0,a,b,1.0000000000000000e0\n"));
    }
}
