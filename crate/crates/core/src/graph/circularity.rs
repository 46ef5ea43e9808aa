use crate::error::Result;
use crate::graph::cycles::{enumerate_directed_cycles, DirectedCycle, DEFAULT_CYCLE_BUDGET};
use crate::graph::matrix::{mass_flow_matrix, MassFlowMatrix};
use crate::graph::network::TmnNetwork;
use crate::scalar::Scalar;

/// A mass-flow arc (aggregated over parallel arc compartments) that lies on
/// no directed cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakArc<T> {
    pub tail: usize,
    pub head: usize,
    /// Aggregated flow γ_ij, kg/s.
    pub flow: T,
    /// Arc compartments realising this vertex pair.
    pub compartments: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircularityReport<T> {
    /// Circularity indicator in [0, 1]; `None` when the network carries no
    /// flow at all and the ratio is 0/0.
    pub lambda: Option<T>,
    /// Each cycle with its cycle mean, kg/s.
    pub cycles: Vec<(DirectedCycle, T)>,
    /// The non-cycle flows Q.
    pub leak_set: Vec<LeakArc<T>>,
}

impl<T: Scalar> CircularityReport<T> {
    /// Number of directed cycles n_φ.
    pub fn n_phi(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycle_mean_sum(&self) -> T {
        self.cycles.iter().fold(T::zero(), |acc, (_, cm)| acc + cm.clone())
    }

    pub fn leak_sum(&self) -> T {
        self.leak_set.iter().fold(T::zero(), |acc, q| acc + q.flow.clone())
    }
}

/// Mean of γ over the arcs of `cycle`. Arcs missing from Γ count as zero.
pub fn cycle_mean<T: Scalar>(cycle: &DirectedCycle, gamma: &MassFlowMatrix<T>) -> T {
    let total = cycle
        .arcs()
        .fold(T::zero(), |acc, (i, j)| acc + gamma.get(i, j).cloned().unwrap_or_else(T::zero));
    total / T::from_count(cycle.len())
}

/// Graph-based circularity indicator with the default cycle budget.
pub fn circularity<T: Scalar>(net: &TmnNetwork<T>) -> Result<CircularityReport<T>> {
    circularity_with_budget(net, DEFAULT_CYCLE_BUDGET)
}

/// λ = Σ CM(φ) / (Σ CM(φ) + Σ_Q γ).
///
/// An arc shared by several cycles contributes to each of their cycle means
/// and is never part of Q. Stocks do not enter λ.
pub fn circularity_with_budget<T: Scalar>(net: &TmnNetwork<T>, max_cycles: usize) -> Result<CircularityReport<T>> {
    let gamma = mass_flow_matrix(net);
    let cycles = enumerate_directed_cycles(net, max_cycles)?;

    let order = gamma.order();
    let mut leak_set = Vec::new();
    for (p, &i) in order.iter().enumerate() {
        for (q, &j) in order.iter().enumerate() {
            let flow = gamma.at(p, q);
            if p == q || *flow <= T::zero() || cycles.iter().any(|c| c.contains_arc(i, j)) {
                continue;
            }
            let compartments = net.arcs().iter().filter(|a| a.tail == i && a.head == j).map(|a| a.k).collect();
            leak_set.push(LeakArc { tail: i, head: j, flow: flow.clone(), compartments });
        }
    }

    let cycles: Vec<_> = cycles
        .into_iter()
        .map(|c| {
            let cm = cycle_mean(&c, &gamma);
            (c, cm)
        })
        .collect();

    let mut report = CircularityReport { lambda: None, cycles, leak_set };
    let circular = report.cycle_mean_sum();
    let denominator = circular.clone() + report.leak_sum();
    if denominator > T::zero() {
        report.lambda = Some(circular / denominator);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::network::{build_network, ArcSpec, Material, NetworkSpec, VertexSpec};

    fn net(n: usize, arcs: &[(usize, usize, f64)]) -> TmnNetwork<f64> {
        build_network(&NetworkSpec {
            materials: vec![Material { id: "b".into(), label: "b".into() }],
            vertices: (1..=n).map(|k| VertexSpec { k, stock: 1.0, initial_stock: None }).collect(),
            arcs: arcs
                .iter()
                .enumerate()
                .map(|(i, &(tail, head, flow))| ArcSpec { k: 100 + i, tail, head, flow, material: "b".into() })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn cycle_means() {
        let n = net(3, &[(1, 2, 4.0), (2, 3, 4.0), (3, 1, 4.0)]);
        let g = mass_flow_matrix(&n);
        let c = DirectedCycle::from_vertices(vec![1, 2, 3]).unwrap();
        assert_eq!(cycle_mean(&c, &g), 4.0);

        let n = net(2, &[(1, 2, 1.0), (2, 1, 3.0)]);
        let g = mass_flow_matrix(&n);
        assert_eq!(cycle_mean(&DirectedCycle::from_vertices(vec![1, 2]).unwrap(), &g), 2.0);
    }

    #[test]
    fn pure_cycle_is_fully_circular() {
        let r = circularity(&net(3, &[(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0)])).unwrap();
        assert_eq!(r.lambda, Some(1.0));
        assert!(r.leak_set.is_empty());
    }

    #[test]
    fn chain_is_linear() {
        let r = circularity(&net(3, &[(1, 2, 1.0), (2, 3, 1.0)])).unwrap();
        assert_eq!(r.lambda, Some(0.0));
        assert_eq!(r.n_phi(), 0);
        assert_eq!(r.leak_set.len(), 2);
    }

    #[test]
    fn no_flow_is_undefined() {
        let r = circularity(&net(3, &[(1, 2, 0.0)])).unwrap();
        assert_eq!(r.lambda, None);
        assert_eq!(circularity(&TmnNetwork::<f64>::empty()).unwrap().lambda, None);
    }

    #[test]
    fn shared_arc_counts_in_every_cycle() {
        // cycles 1→2→1 and 1→2→3→1 share arc 1→2
        let r = circularity(&net(3, &[(1, 2, 6.0), (2, 1, 2.0), (2, 3, 3.0), (3, 1, 3.0)])).unwrap();
        assert_eq!(r.n_phi(), 2);
        assert_eq!(r.cycle_mean_sum(), 4.0 + 4.0);
        assert_eq!(r.lambda, Some(1.0));
    }

    #[test]
    fn parallel_arcs_are_aggregated_in_leaks() {
        let r = circularity(&net(2, &[(1, 2, 1.0), (1, 2, 2.0)])).unwrap();
        assert_eq!(r.leak_set.len(), 1);
        assert_eq!(r.leak_set[0].flow, 3.0);
        assert_eq!(r.leak_set[0].compartments, vec![100, 101]);
    }
}
