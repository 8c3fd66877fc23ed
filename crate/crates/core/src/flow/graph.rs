use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::FlowError;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    /// The endpoint opposite `w`.
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Loopless multigraph on vertices `0..vertex_count`.
///
/// Edges are kept sorted by id. Ids need not be contiguous: a restriction to
/// a subgraph keeps the host's ids (and its vertex numbering, with unused
/// vertices left isolated).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MultiGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for MultiGraph {
    type Error = FlowError;
    fn try_from(raw: RawGraph) -> Result<Self, FlowError> {
        MultiGraph::new(raw.vertex_count, raw.edges)
    }
}

impl From<MultiGraph> for RawGraph {
    fn from(g: MultiGraph) -> Self {
        RawGraph {
            vertex_count: g.vertex_count,
            edges: g.edges,
        }
    }
}

impl MultiGraph {
    pub fn new(vertex_count: usize, mut edges: Vec<Edge>) -> Result<Self, FlowError> {
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(FlowError::InvalidGraph(format!(
                    "duplicate edge id {}",
                    w[0].id
                )));
            }
        }
        for e in &edges {
            if e.u == e.v {
                return Err(FlowError::InvalidGraph(format!("edge {} is a loop", e.id)));
            }
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(FlowError::InvalidGraph(format!(
                    "edge {} leaves the vertex range",
                    e.id
                )));
            }
        }
        Ok(MultiGraph {
            vertex_count,
            edges,
        })
    }

    /// Builds a graph from endpoint pairs, numbering edges `0..`.
    pub fn from_pairs(vertex_count: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self, FlowError> {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(id, &(u, v))| Edge { id, u, v })
            .collect();
        Self::new(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edge(id).is_some()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    /// Incident edges of every vertex, in edge-id order.
    pub fn incidence(&self) -> Vec<Vec<Edge>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            inc[e.u].push(*e);
            inc[e.v].push(*e);
        }
        inc
    }

    /// Vertices of positive degree.
    pub fn support(&self) -> BTreeSet<Vertex> {
        self.edges.iter().flat_map(|e| [e.u, e.v]).collect()
    }

    /// Component label of every vertex (the least vertex of its component).
    pub fn components(&self) -> Vec<Vertex> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for e in &self.edges {
            let a = find(&mut parent, e.u);
            let b = find(&mut parent, e.v);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.vertex_count)
            .map(|v| find(&mut parent, v))
            .collect()
    }

    pub fn component_count(&self) -> usize {
        let c = self.components();
        (0..self.vertex_count).filter(|&v| c[v] == v).count()
    }

    /// `|E| - |V| + c`, counting isolated vertices as components.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertex_count
    }

    /// Same vertex numbering, only the listed edges.
    pub fn restrict_edges(&self, ids: &BTreeSet<EdgeId>) -> MultiGraph {
        MultiGraph {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .filter(|e| ids.contains(&e.id))
                .copied()
                .collect(),
        }
    }

    pub fn restrict(&self, sub: &Subgraph) -> MultiGraph {
        self.restrict_edges(&sub.edges)
    }

    /// The whole graph viewed as a subgraph of itself.
    pub fn as_subgraph(&self) -> Subgraph {
        Subgraph {
            vertices: (0..self.vertex_count).collect(),
            edges: self.edge_ids().collect(),
        }
    }

    /// Proper 2-colouring (`true` = second side), if one exists. Isolated
    /// vertices go to the first side.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let inc = self.incidence();
        let mut side: Vec<Option<bool>> = vec![None; self.vertex_count];
        for s in 0..self.vertex_count {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                let sx = side[x].unwrap();
                for e in &inc[x] {
                    let y = e.other(x);
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            stack.push(y);
                        }
                        Some(sy) if sy == sx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }
}

/// A subgraph of some host, sharing the host's vertex and edge ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    /// Spanned by a set of host edges (vertices = their endpoints).
    pub fn from_edges(host: &MultiGraph, edges: impl IntoIterator<Item = EdgeId>) -> Subgraph {
        let edges: BTreeSet<EdgeId> = edges.into_iter().collect();
        let vertices = edges
            .iter()
            .filter_map(|&id| host.edge(id))
            .flat_map(|e| [e.u, e.v])
            .collect();
        Subgraph { vertices, edges }
    }

    pub fn union(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn common_edges(&self, other: &Subgraph) -> BTreeSet<EdgeId> {
        self.edges.intersection(&other.edges).copied().collect()
    }

    /// Every edge exists in the host with both endpoints selected.
    pub fn check(&self, host: &MultiGraph) -> Result<(), FlowError> {
        for &id in &self.edges {
            let e = host.edge(id).ok_or_else(|| {
                FlowError::InvalidGraph(format!("subgraph edge {id} not in host"))
            })?;
            if !self.vertices.contains(&e.u) || !self.vertices.contains(&e.v) {
                return Err(FlowError::InvalidGraph(format!(
                    "subgraph edge {id} has an unselected endpoint"
                )));
            }
        }
        Ok(())
    }
}
