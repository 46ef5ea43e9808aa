//! Elementary directed cycles of the mass-flow digraph (Johnson, 1975).

use crate::error::{Error, Result};
use crate::graph::matrix::{mass_flow_matrix, MassFlowMatrix};
use crate::graph::network::TmnNetwork;
use crate::scalar::Scalar;

/// Cycle budget used when callers do not pass one.
pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// An elementary directed cycle, stored as its vertex sequence starting at
/// the smallest vertex index. The closing arc back to the first vertex is
/// implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedCycle {
    vertices: Vec<usize>,
}

impl DirectedCycle {
    /// Builds a cycle from any rotation of its vertex sequence.
    ///
    /// Returns `None` for an empty sequence or one that repeats a vertex.
    pub fn from_vertices(mut vertices: Vec<usize>) -> Option<Self> {
        let mut seen = vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        if vertices.is_empty() || seen.len() != vertices.len() {
            return None;
        }
        let start = vertices.iter().enumerate().min_by_key(|&(_, v)| *v).map(|(i, _)| i)?;
        vertices.rotate_left(start);
        Some(DirectedCycle { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Cycle length l, the number of arcs.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The `(tail, head)` vertex pairs of the cycle's arcs, in traversal order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs().any(|a| a == (tail, head))
    }
}

/// Adjacency lists over matrix positions: `j ∈ adj[i]` when γ_ij > 0, i ≠ j.
pub(crate) fn positive_flow_adjacency<T: Scalar>(gamma: &MassFlowMatrix<T>) -> Vec<Vec<usize>> {
    let n = gamma.dim();
    (0..n)
        .map(|i| (0..n).filter(|&j| j != i && *gamma.at(i, j) > T::zero()).collect())
        .collect()
}

/// Enumerates the elementary cycles of the mass-flow digraph.
///
/// Arcs are the ordered vertex pairs with positive aggregated flow in Γ; an
/// arc compartment carrying no mass is not part of the digraph. Cycles come
/// back sorted by their canonical vertex sequence.
pub fn enumerate_directed_cycles<T: Scalar>(net: &TmnNetwork<T>, max_cycles: usize) -> Result<Vec<DirectedCycle>> {
    let gamma = mass_flow_matrix(net);
    let adj = positive_flow_adjacency(&gamma);
    let order = gamma.order();
    let mut cycles: Vec<DirectedCycle> = elementary_circuits(&adj, max_cycles)?
        .into_iter()
        .map(|c| DirectedCycle { vertices: c.into_iter().map(|p| order[p]).collect() })
        .collect();
    cycles.sort();
    Ok(cycles)
}

/// Johnson's algorithm on a dense digraph without self-loops. Each circuit is
/// returned once, starting at its smallest vertex.
pub fn elementary_circuits(adj: &[Vec<usize>], max_cycles: usize) -> Result<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut search = Search {
        adj,
        allowed: vec![false; n],
        blocked: vec![false; n],
        b: vec![Vec::new(); n],
        stack: Vec::new(),
        found: Vec::new(),
        budget: max_cycles,
    };
    for s in 0..n {
        let component = strong_component(adj, s);
        if component.iter().filter(|&&m| m).count() < 2 {
            continue;
        }
        search.allowed = component;
        for v in 0..n {
            search.blocked[v] = false;
            search.b[v].clear();
        }
        search.circuit(s, s)?;
    }
    Ok(search.found)
}

/// Members of the strongly connected component of `s` within the subgraph
/// induced by vertices `>= s`.
fn strong_component(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
    let n = adj.len();
    let forward = reach(n, s, |v| adj[v].iter().copied().filter(|&w| w >= s).collect());
    let mut reverse = vec![Vec::new(); n];
    for (v, ws) in adj.iter().enumerate().filter(|(v, _)| *v >= s) {
        for &w in ws.iter().filter(|&&w| w >= s) {
            reverse[w].push(v);
        }
    }
    let backward = reach(n, s, |v| reverse[v].clone());
    forward.iter().zip(&backward).map(|(&f, &b)| f && b).collect()
}

fn reach(n: usize, s: usize, next: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut todo = vec![s];
    seen[s] = true;
    while let Some(v) = todo.pop() {
        for w in next(v) {
            if !seen[w] {
                seen[w] = true;
                todo.push(w);
            }
        }
    }
    seen
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    b: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Vec<usize>>,
    budget: usize,
}

impl Search<'_> {
    fn unblock(&mut self, u: usize) {
        let mut todo = vec![u];
        while let Some(u) = todo.pop() {
            self.blocked[u] = false;
            for w in std::mem::take(&mut self.b[u]) {
                if self.blocked[w] {
                    todo.push(w);
                }
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> Result<bool> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if !self.allowed[w] {
                continue;
            }
            if w == s {
                if self.found.len() == self.budget {
                    return Err(Error::CycleBudgetExceeded { budget: self.budget });
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, s)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.allowed[w] && !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }
}
