use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A material carried by the network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Material {
    pub id: String,
    pub label: String,
}

/// Compartment that stores, transforms or uses material. Its vertex index is `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCompartment<T> {
    pub k: usize,
    /// Current stock, kg.
    pub stock: T,
    /// Stock at the start of the horizon, kg.
    pub initial_stock: T,
}

/// Compartment that moves material from vertex `tail` to vertex `head`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCompartment<T> {
    pub k: usize,
    pub tail: usize,
    pub head: usize,
    /// Mass flow rate, kg/s.
    pub flow: T,
    pub material: String,
}

/// Serialized form of a network, as read from and written to JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec<T> {
    #[serde(default)]
    pub materials: Vec<Material>,
    #[serde(default)]
    pub vertices: Vec<VertexSpec<T>>,
    #[serde(default)]
    pub arcs: Vec<ArcSpec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec<T> {
    pub k: usize,
    pub stock: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_stock: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec<T> {
    pub k: usize,
    pub tail: usize,
    pub head: usize,
    pub flow: T,
    pub material: String,
}

/// A validated thermodynamical material network.
///
/// Vertices and arcs are kept sorted by compartment index, so two networks
/// built from the same compartments compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq)]
pub struct TmnNetwork<T> {
    materials: Vec<Material>,
    vertices: Vec<VertexCompartment<T>>,
    arcs: Vec<ArcCompartment<T>>,
}

fn check_weight<T: Scalar>(k: usize, value: &T) -> Result<()> {
    // `!(v >= 0)` also rejects NaN
    if !(*value >= T::zero()) {
        return Err(Error::NegativeWeight { k, value: value.to_f64_lossy() });
    }
    Ok(())
}

/// Validates a network description and builds the network.
pub fn build_network<T: Scalar>(spec: &NetworkSpec<T>) -> Result<TmnNetwork<T>> {
    let mut material_ids = BTreeSet::new();
    for m in &spec.materials {
        if !material_ids.insert(m.id.as_str()) {
            return Err(Error::DuplicateId { kind: "material", id: m.id.clone() });
        }
    }

    let mut ks = BTreeSet::new();
    let ids = spec.vertices.iter().map(|v| v.k).chain(spec.arcs.iter().map(|a| a.k));
    for k in ids {
        if !ks.insert(k) {
            return Err(Error::DuplicateId { kind: "compartment", id: k.to_string() });
        }
    }

    let mut vertices = Vec::with_capacity(spec.vertices.len());
    for v in &spec.vertices {
        check_weight(v.k, &v.stock)?;
        let initial_stock = v.initial_stock.clone().unwrap_or_else(|| v.stock.clone());
        check_weight(v.k, &initial_stock)?;
        vertices.push(VertexCompartment { k: v.k, stock: v.stock.clone(), initial_stock });
    }
    vertices.sort_by_key(|v| v.k);
    let vertex_ks: BTreeSet<usize> = vertices.iter().map(|v| v.k).collect();

    let mut arcs = Vec::with_capacity(spec.arcs.len());
    for a in &spec.arcs {
        if a.tail == a.head {
            return Err(Error::SelfLoopArc { arc: a.k, vertex: a.tail });
        }
        for end in [a.tail, a.head] {
            if !vertex_ks.contains(&end) {
                return Err(Error::DanglingEndpoint { arc: a.k, vertex: end });
            }
        }
        check_weight(a.k, &a.flow)?;
        if !material_ids.contains(a.material.as_str()) {
            return Err(Error::UnknownMaterial { arc: a.k, material: a.material.clone() });
        }
        arcs.push(ArcCompartment {
            k: a.k,
            tail: a.tail,
            head: a.head,
            flow: a.flow.clone(),
            material: a.material.clone(),
        });
    }
    arcs.sort_by_key(|a| a.k);

    let mut materials = spec.materials.clone();
    materials.sort();
    Ok(TmnNetwork { materials, vertices, arcs })
}

impl<T: Scalar> TmnNetwork<T> {
    pub fn empty() -> Self {
        TmnNetwork { materials: Vec::new(), vertices: Vec::new(), arcs: Vec::new() }
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn vertices(&self) -> &[VertexCompartment<T>] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[ArcCompartment<T>] {
        &self.arcs
    }

    pub fn n_v(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_a(&self) -> usize {
        self.arcs.len()
    }

    /// Number of compartments, `n_v + n_a`.
    pub fn n_c(&self) -> usize {
        self.n_v() + self.n_a()
    }

    /// Position of vertex `k` in the sorted vertex list (and in Γ).
    pub fn vertex_position(&self, k: usize) -> Option<usize> {
        self.vertices.binary_search_by_key(&k, |v| v.k).ok()
    }

    pub fn vertex(&self, k: usize) -> Option<&VertexCompartment<T>> {
        self.vertex_position(k).map(|i| &self.vertices[i])
    }

    pub fn arc(&self, k: usize) -> Option<&ArcCompartment<T>> {
        self.arc_position(k).map(|i| &self.arcs[i])
    }

    fn arc_position(&self, k: usize) -> Option<usize> {
        self.arcs.binary_search_by_key(&k, |a| a.k).ok()
    }

    /// Returns a copy with arc `k` pointing the other way.
    pub fn invert_arc(&self, k: usize) -> Result<Self> {
        let i = self.arc_position(k).ok_or(Error::UnknownArc(k))?;
        let mut net = self.clone();
        let arc = &mut net.arcs[i];
        std::mem::swap(&mut arc.tail, &mut arc.head);
        Ok(net)
    }

    /// Returns a copy with the flow of arc `k` replaced.
    pub fn with_arc_flow(&self, k: usize, flow: T) -> Result<Self> {
        let i = self.arc_position(k).ok_or(Error::UnknownArc(k))?;
        check_weight(k, &flow)?;
        let mut net = self.clone();
        net.arcs[i].flow = flow;
        Ok(net)
    }

    /// Returns a copy with every arc flow multiplied by `factor`.
    pub fn scaled_flows(&self, factor: T) -> Result<Self> {
        check_weight(0, &factor)?;
        let mut net = self.clone();
        for a in &mut net.arcs {
            a.flow = a.flow.clone() * factor.clone();
        }
        Ok(net)
    }

    /// Sum of all arc flows.
    pub fn total_flow(&self) -> T {
        self.arcs.iter().fold(T::zero(), |acc, a| acc + a.flow.clone())
    }

    pub fn to_spec(&self) -> NetworkSpec<T> {
        NetworkSpec {
            materials: self.materials.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexSpec {
                    k: v.k,
                    stock: v.stock.clone(),
                    initial_stock: (v.initial_stock != v.stock).then(|| v.initial_stock.clone()),
                })
                .collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcSpec {
                    k: a.k,
                    tail: a.tail,
                    head: a.head,
                    flow: a.flow.clone(),
                    material: a.material.clone(),
                })
                .collect(),
        }
    }
}
