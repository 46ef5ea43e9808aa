use crate::error::{Error, Result};
use crate::graph::network::TmnNetwork;
use crate::scalar::Scalar;

/// Square matrix Γ with vertex stocks on the diagonal and aggregated flow
/// rates off the diagonal. Rows and columns follow ascending vertex index.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFlowMatrix<T> {
    order: Vec<usize>,
    entries: Vec<Vec<T>>,
}

/// Builds Γ; parallel arcs between the same ordered pair are summed.
pub fn mass_flow_matrix<T: Scalar>(net: &TmnNetwork<T>) -> MassFlowMatrix<T> {
    let n = net.n_v();
    let mut entries = vec![vec![T::zero(); n]; n];
    for (i, v) in net.vertices().iter().enumerate() {
        entries[i][i] = v.stock.clone();
    }
    for a in net.arcs() {
        // endpoints were validated when the network was built
        let i = net.vertex_position(a.tail).expect("validated tail");
        let j = net.vertex_position(a.head).expect("validated head");
        entries[i][j] = entries[i][j].clone() + a.flow.clone();
    }
    MassFlowMatrix { order: net.vertices().iter().map(|v| v.k).collect(), entries }
}

impl<T: Scalar> MassFlowMatrix<T> {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Vertex indices labelling rows and columns.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.entries
    }

    /// γ for the vertex pair `(i, j)`, addressed by vertex index.
    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        let p = self.order.binary_search(&i).ok()?;
        let q = self.order.binary_search(&j).ok()?;
        Some(&self.entries[p][q])
    }

    /// γ by matrix position.
    pub fn at(&self, p: usize, q: usize) -> &T {
        &self.entries[p][q]
    }

    /// Stock rates implied by the flows: inflow minus outflow per vertex,
    /// the vector form of the mass balance.
    pub fn balance_rates(&self) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                (0..n).filter(|&i| i != k).fold(T::zero(), |acc, i| {
                    acc + self.entries[i][k].clone() - self.entries[k][i].clone()
                })
            })
            .collect()
    }
}

/// Inflow minus outflow minus `stock_rate` at vertex `k`; zero when the
/// vertex balance holds.
pub fn vertex_balance_residual<T: Scalar>(net: &TmnNetwork<T>, k: usize, stock_rate: T) -> Result<T> {
    if net.vertex(k).is_none() {
        return Err(Error::UnknownVertex(k));
    }
    let mut residual = -stock_rate;
    for a in net.arcs() {
        if a.head == k {
            residual = residual + a.flow.clone();
        }
        if a.tail == k {
            residual = residual - a.flow.clone();
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::network::{build_network, ArcSpec, Material, NetworkSpec, VertexSpec};

    fn net(vertices: &[(usize, f64)], arcs: &[(usize, usize, usize, f64)]) -> TmnNetwork<f64> {
        build_network(&NetworkSpec {
            materials: vec![Material { id: "b".into(), label: "b".into() }],
            vertices: vertices.iter().map(|&(k, stock)| VertexSpec { k, stock, initial_stock: None }).collect(),
            arcs: arcs
                .iter()
                .map(|&(k, tail, head, flow)| ArcSpec { k, tail, head, flow, material: "b".into() })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn two_vertex_structure() {
        let g = mass_flow_matrix(&net(&[(1, 7.0), (2, 3.0)], &[(3, 1, 2, 0.5)]));
        assert_eq!(g.rows(), &[vec![7.0, 0.5], vec![0.0, 3.0]]);
    }

    #[test]
    fn no_arcs_gives_diagonal() {
        let g = mass_flow_matrix(&net(&[(1, 1.0), (2, 2.0), (3, 3.0)], &[]));
        for p in 0..3 {
            for q in 0..3 {
                let expected = if p == q { (p + 1) as f64 } else { 0.0 };
                assert_eq!(*g.at(p, q), expected);
            }
        }
    }

    #[test]
    fn parallel_arcs_aggregate() {
        let n = net(&[(1, 0.0), (2, 0.0)], &[(3, 1, 2, 2.0), (4, 1, 2, 3.0)]);
        let g = mass_flow_matrix(&n);
        let by_list: f64 = n.arcs().iter().filter(|a| a.tail == 1 && a.head == 2).map(|a| a.flow).sum();
        assert_eq!(*g.get(1, 2).unwrap(), 5.0);
        assert_eq!(*g.get(1, 2).unwrap(), by_list);
    }

    #[test]
    fn residuals() {
        let n = net(&[(1, 0.0), (2, 0.0), (3, 0.0), (9, 4.0)], &[(4, 1, 2, 1.0), (5, 2, 3, 1.0)]);
        assert_eq!(vertex_balance_residual(&n, 2, 0.0).unwrap(), 0.0);
        assert_eq!(vertex_balance_residual(&n, 9, 0.0).unwrap(), 0.0);
        assert_eq!(vertex_balance_residual(&n, 3, 1.0).unwrap(), 0.0);
        assert_eq!(vertex_balance_residual(&n, 42, 0.0), Err(Error::UnknownVertex(42)));
        let g = mass_flow_matrix(&n);
        assert_eq!(g.balance_rates(), vec![-1.0, 0.0, 1.0, 0.0]);
    }
}
