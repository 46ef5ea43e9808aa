//! Completing partially known flows from the vertex balances.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::network::TmnNetwork;
use crate::linalg::gauss_jordan;
use crate::scalar::Scalar;

/// Known quantities. Every arc flow or vertex stock rate not listed is an
/// unknown of the balance system.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment<T> {
    /// Arc index → flow, kg/s.
    pub flows: BTreeMap<usize, T>,
    /// Vertex index → stock rate dm/dt, kg/s.
    pub stock_rates: BTreeMap<usize, T>,
}

impl<T> Default for FlowAssignment<T> {
    fn default() -> Self {
        FlowAssignment { flows: BTreeMap::new(), stock_rates: BTreeMap::new() }
    }
}

impl<T: Scalar> FlowAssignment<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn flow(mut self, arc: usize, value: T) -> Self {
        self.flows.insert(arc, value);
        self
    }

    pub fn stock_rate(mut self, vertex: usize, value: T) -> Self {
        self.stock_rates.insert(vertex, value);
        self
    }
}

/// Every flow and stock rate of the network, satisfying all vertex balances.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedFlows<T> {
    pub flows: BTreeMap<usize, T>,
    pub stock_rates: BTreeMap<usize, T>,
}

impl<T: Scalar> CompletedFlows<T> {
    /// Writes the completed arc flows into a copy of `net`.
    pub fn apply(&self, net: &TmnNetwork<T>) -> Result<TmnNetwork<T>> {
        self.flows.iter().try_fold(net.clone(), |n, (&k, f)| n.with_arc_flow(k, f.clone()))
    }
}

/// An arc whose balance-consistent flow is negative: material would have to
/// move against the arc's direction.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionCandidate<T> {
    pub arc: usize,
    pub tail: usize,
    pub head: usize,
    pub required_flow: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowSolution<T> {
    /// Unique nonnegative completion.
    Consistent(CompletedFlows<T>),
    /// The unique completion needs negative flows on the listed arcs. The
    /// signed completion is kept for inspection.
    NeedsInversion { candidates: Vec<InversionCandidate<T>>, signed: CompletedFlows<T> },
}

enum Unknown {
    Flow(usize),
    StockRate(usize),
}

/// Solves the vertex balances `Σ in − Σ out − dm/dt = 0` for every quantity
/// not fixed by `fixed`.
///
/// Negative required flows are reported as inversion candidates rather than
/// repaired; the caller decides whether to flip the arc with
/// [`TmnNetwork::invert_arc`].
pub fn solve_consistent_flows<T: Scalar>(net: &TmnNetwork<T>, fixed: &FlowAssignment<T>) -> Result<FlowSolution<T>> {
    for (&k, value) in &fixed.flows {
        if net.arc(k).is_none() {
            return Err(Error::UnknownArc(k));
        }
        if *value < T::zero() {
            return Err(Error::NegativeWeight { k, value: value.to_f64_lossy() });
        }
    }
    if let Some(&k) = fixed.stock_rates.keys().find(|&&k| net.vertex(k).is_none()) {
        return Err(Error::UnknownVertex(k));
    }

    let mut unknowns = Vec::new();
    let mut column = BTreeMap::new();
    for a in net.arcs() {
        if !fixed.flows.contains_key(&a.k) {
            column.insert(('a', a.k), unknowns.len());
            unknowns.push(Unknown::Flow(a.k));
        }
    }
    for v in net.vertices() {
        if !fixed.stock_rates.contains_key(&v.k) {
            column.insert(('v', v.k), unknowns.len());
            unknowns.push(Unknown::StockRate(v.k));
        }
    }

    let n = net.n_v();
    let mut a = vec![vec![T::zero(); unknowns.len()]; n];
    let mut b = vec![T::zero(); n];
    let mut scale = T::zero();
    for (row, v) in net.vertices().iter().enumerate() {
        // known part of the balance, moved to the right-hand side
        let mut known = T::zero();
        let mut magnitude = T::zero();
        for arc in net.arcs() {
            let sign = if arc.head == v.k {
                T::one()
            } else if arc.tail == v.k {
                -T::one()
            } else {
                continue;
            };
            match fixed.flows.get(&arc.k) {
                Some(f) => {
                    known = known + sign * f.clone();
                    magnitude = magnitude + f.magnitude();
                }
                None => a[row][column[&('a', arc.k)]] = sign,
            }
        }
        match fixed.stock_rates.get(&v.k) {
            Some(r) => {
                known = known - r.clone();
                magnitude = magnitude + r.magnitude();
            }
            None => a[row][column[&('v', v.k)]] = -T::one(),
        }
        b[row] = -known;
        if magnitude > scale {
            scale = magnitude;
        }
    }

    let red = gauss_jordan(a, b, &scale);
    if let Some((row, residual)) = red.inconsistent {
        return Err(Error::Inconsistent { vertex: net.vertices()[row].k, residual: residual.to_f64_lossy() });
    }
    if !red.free.is_empty() {
        return Err(Error::Underdetermined { free: red.free.len() });
    }

    let mut signed = CompletedFlows { flows: fixed.flows.clone(), stock_rates: fixed.stock_rates.clone() };
    let mut candidates = Vec::new();
    for (unknown, value) in unknowns.iter().zip(red.solution) {
        match *unknown {
            Unknown::Flow(k) => {
                let value = if T::is_negligible(&value, &scale) { T::zero() } else { value };
                if value < T::zero() {
                    let arc = net.arc(k).expect("column built from arcs");
                    candidates.push(InversionCandidate {
                        arc: k,
                        tail: arc.tail,
                        head: arc.head,
                        required_flow: value.clone(),
                    });
                }
                signed.flows.insert(k, value);
            }
            Unknown::StockRate(k) => {
                signed.stock_rates.insert(k, value);
            }
        }
    }

    Ok(if candidates.is_empty() {
        FlowSolution::Consistent(signed)
    } else {
        FlowSolution::NeedsInversion { candidates, signed }
    })
}
