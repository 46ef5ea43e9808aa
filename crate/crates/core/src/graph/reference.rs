//! Reference networks used by the demos and tests.

use crate::error::{Error, Result};
use crate::graph::network::{build_network, ArcSpec, Material, NetworkSpec, TmnNetwork, VertexSpec};
use crate::scalar::Scalar;

/// Arc whose direction the five-vertex example gets wrong at first.
pub const RETURN_ARC: usize = 10;

fn biomass() -> Vec<Material> {
    vec![Material { id: "beta1".into(), label: "material".into() }]
}

/// Hub → truck → plant: vertices 1 and 2 joined by arc 3.
pub fn hub_truck_plant<T: Scalar>(hub_stock: T, plant_stock: T, truck_flow: T) -> Result<TmnNetwork<T>> {
    build_network(&NetworkSpec {
        materials: biomass(),
        vertices: vec![
            VertexSpec { k: 1, stock: hub_stock, initial_stock: None },
            VertexSpec { k: 2, stock: plant_stock, initial_stock: None },
        ],
        arcs: vec![ArcSpec { k: 3, tail: 1, head: 2, flow: truck_flow, material: "beta1".into() }],
    })
}

fn five_vertex<T: Scalar>(alpha: T, m_alpha: T, m5_0: T, return_flow: T, inverted: bool) -> Result<TmnNetwork<T>> {
    if alpha < T::zero() || alpha > T::one() {
        return Err(Error::AlphaOutOfRange(alpha.to_f64_lossy()));
    }
    let kept = (T::one() - alpha.clone()) * m_alpha.clone();
    let split = alpha * m_alpha.clone();
    let arc = |k, tail, head, flow| ArcSpec { k, tail, head, flow, material: "beta1".to_string() };
    let (tail, head) = if inverted { (5, 3) } else { (3, 5) };
    build_network(&NetworkSpec {
        materials: biomass(),
        vertices: (1..=5)
            .map(|k| VertexSpec { k, stock: if k == 5 { m5_0.clone() } else { T::zero() }, initial_stock: None })
            .collect(),
        arcs: vec![
            arc(6, 2, 3, kept.clone()),
            arc(7, 3, 4, m_alpha),
            arc(8, 4, 2, kept),
            arc(9, 4, 1, split),
            arc(RETURN_ARC, tail, head, return_flow),
        ],
    })
}

/// Five-vertex split network with the return arc running 5 → 3.
///
/// A fraction α of the flow `m_alpha` leaving vertex 4 is diverted to vertex
/// 1; the rest recirculates through 2 → 3 → 4, and vertex 5 resupplies 3 at
/// α·m_alpha. λ(α) = (3 − 2α)/(3 + 4α) for α < 1 and 0 at α = 1.
pub fn five_vertex_network<T: Scalar>(alpha: T, m_alpha: T, m5_0: T) -> Result<TmnNetwork<T>> {
    let ret = alpha.clone() * m_alpha.clone();
    five_vertex(alpha, m_alpha, m5_0, ret, true)
}

/// The same network drawn with the return arc as 3 → 5 and its flow not yet
/// known (stored as zero).
pub fn five_vertex_network_uninverted<T: Scalar>(alpha: T, m_alpha: T, m5_0: T) -> Result<TmnNetwork<T>> {
    five_vertex(alpha, m_alpha, m5_0, T::zero(), false)
}

/// Closed form of λ for the five-vertex network.
pub fn five_vertex_lambda(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        0.0
    } else {
        (3.0 - 2.0 * alpha) / (3.0 + 4.0 * alpha)
    }
}
