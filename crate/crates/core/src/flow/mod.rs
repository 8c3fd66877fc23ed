//! Multigraphs with stable edge ids, integer flows and the operations that
//! combine them.
//!
//! Every constructor in this module verifies its output before returning it.

mod cubic;
mod even;
mod graph;
mod subdivide;
mod z3;

pub use cubic::{
    cubic_bipartite_3flow, extend_odd_regular, find_3flow, structural_3flow, FlowSearch,
};
pub use even::even_2_flow;
pub use graph::{Edge, EdgeId, MultiGraph, Subgraph, Vertex};
pub use subdivide::{
    restrict_to_core, suppress, transfer_across_subdivision, SubPath, Suppression,
};
pub use z3::{z3_oracle, z3_to_integer, Z3Flow};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("flow does not cover the graph (missing {missing:?}, extra {extra:?})")]
    Coverage {
        missing: Vec<EdgeId>,
        extra: Vec<EdgeId>,
    },
    #[error("arc on edge {0} does not match the edge's endpoints")]
    EndpointMismatch(EdgeId),
    #[error("subgraphs share {0} edges, at most one allowed")]
    TooManySharedEdges(usize),
    #[error("input flow is not a nowhere-zero {k}-flow: {reason}")]
    InvalidInput { k: i64, reason: String },
    #[error("vertex {0} has odd degree")]
    OddDegree(Vertex),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotCubic { vertex: Vertex, degree: usize },
    #[error("edge {0} does not cross the bipartition")]
    InvalidBipartition(EdgeId),
    #[error("no perfect matching found in a cubic bipartite graph")]
    NoPerfectMatching,
    #[error("inconsistent subdivision correspondence: {0}")]
    InconsistentCorrespondence(String),
    #[error("suppressing degree-2 vertices creates a loop at vertex {0}")]
    SuppressionLoop(Vertex),
    #[error("regularity precondition violated: {0}")]
    NotOddRegular(String),
    #[error("cycle rank {rank} exceeds the cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("not a nowhere-zero Z3-flow: {0}")]
    NotZ3Flow(String),
    #[error("no excess-reducing path found")]
    NoReducingPath,
    #[error("constructed flow failed verification: {0}")]
    Unverified(String),
}

/// An oriented edge carrying an integer value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    pub value: i64,
}

impl Arc {
    pub fn reversed(self) -> Arc {
        Arc {
            tail: self.head,
            head: self.tail,
            value: -self.value,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ArcRecord {
    edge_id: EdgeId,
    tail: Vertex,
    head: Vertex,
    value: i64,
}

/// Orientation plus integer value for each edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<ArcRecord>", into = "Vec<ArcRecord>")]
pub struct FlowAssignment {
    arcs: BTreeMap<EdgeId, Arc>,
}

impl From<Vec<ArcRecord>> for FlowAssignment {
    fn from(records: Vec<ArcRecord>) -> Self {
        FlowAssignment {
            arcs: records
                .into_iter()
                .map(|r| {
                    (
                        r.edge_id,
                        Arc {
                            tail: r.tail,
                            head: r.head,
                            value: r.value,
                        },
                    )
                })
                .collect(),
        }
    }
}

impl From<FlowAssignment> for Vec<ArcRecord> {
    fn from(f: FlowAssignment) -> Self {
        f.arcs
            .into_iter()
            .map(|(edge_id, a)| ArcRecord {
                edge_id,
                tail: a.tail,
                head: a.head,
                value: a.value,
            })
            .collect()
    }
}

impl FromIterator<(EdgeId, Arc)> for FlowAssignment {
    fn from_iter<I: IntoIterator<Item = (EdgeId, Arc)>>(iter: I) -> Self {
        FlowAssignment {
            arcs: iter.into_iter().collect(),
        }
    }
}

impl FlowAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, edge: EdgeId, arc: Arc) -> Option<Arc> {
        self.arcs.insert(edge, arc)
    }

    pub fn get(&self, edge: EdgeId) -> Option<&Arc> {
        self.arcs.get(&edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Arc)> {
        self.arcs.iter().map(|(&e, a)| (e, a))
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn edge_ids(&self) -> BTreeSet<EdgeId> {
        self.arcs.keys().copied().collect()
    }

    /// Value on `edge` measured in the direction `tail -> head`.
    pub fn value_along(&self, edge: EdgeId, tail: Vertex) -> Option<i64> {
        self.arcs
            .get(&edge)
            .map(|a| if a.tail == tail { a.value } else { -a.value })
    }

    /// Same flow expressed in the graph's own `u -> v` orientation.
    pub fn oriented_to(&self, g: &MultiGraph) -> FlowAssignment {
        let target: BTreeMap<EdgeId, (Vertex, Vertex)> =
            g.edges().iter().map(|e| (e.id, (e.u, e.v))).collect();
        reorient(self, &target)
    }

    pub fn negated(&self) -> FlowAssignment {
        self.arcs
            .iter()
            .map(|(&e, a)| {
                (
                    e,
                    Arc {
                        value: -a.value,
                        ..*a
                    },
                )
            })
            .collect()
    }

    /// Restriction to a set of edges.
    pub fn restricted(&self, edges: &BTreeSet<EdgeId>) -> FlowAssignment {
        self.arcs
            .iter()
            .filter(|(e, _)| edges.contains(e))
            .map(|(&e, a)| (e, *a))
            .collect()
    }

    /// Union of flows on disjoint edge sets. Panics on overlap.
    pub fn disjoint_union(&self, other: &FlowAssignment) -> FlowAssignment {
        let mut out = self.clone();
        for (e, a) in other.iter() {
            assert!(out.insert(e, *a).is_none(), "edge {e} assigned twice");
        }
        out
    }

    /// Largest absolute value (0 for the empty flow).
    pub fn max_abs(&self) -> i64 {
        self.arcs.values().map(|a| a.value.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroValue { edge: EdgeId },
    OutOfRange { edge: EdgeId, value: i64 },
    Conservation { vertex: Vertex, net_outflow: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks that `f` is a nowhere-zero `k`-flow on `g`.
///
/// A flow that does not cover exactly the edges of `g`, or whose arcs do not
/// match the edge endpoints, is an error rather than a violation.
pub fn verify_flow(g: &MultiGraph, f: &FlowAssignment, k: i64) -> Result<FlowReport, FlowError> {
    let ids: BTreeSet<EdgeId> = g.edge_ids().collect();
    let fids = f.edge_ids();
    if ids != fids {
        return Err(FlowError::Coverage {
            missing: ids.difference(&fids).copied().collect(),
            extra: fids.difference(&ids).copied().collect(),
        });
    }
    let mut violations = Vec::new();
    let mut net = vec![0i64; g.vertex_count()];
    for e in g.edges() {
        let a = f.get(e.id).unwrap();
        if !((a.tail == e.u && a.head == e.v) || (a.tail == e.v && a.head == e.u)) {
            return Err(FlowError::EndpointMismatch(e.id));
        }
        if a.value == 0 {
            violations.push(Violation::ZeroValue { edge: e.id });
        } else if a.value.abs() >= k {
            violations.push(Violation::OutOfRange {
                edge: e.id,
                value: a.value,
            });
        }
        net[a.tail] += a.value;
        net[a.head] -= a.value;
    }
    for (vertex, &n) in net.iter().enumerate() {
        if n != 0 {
            violations.push(Violation::Conservation {
                vertex,
                net_outflow: n,
            });
        }
    }
    Ok(FlowReport {
        ok: violations.is_empty(),
        violations,
    })
}

/// `verify_flow` folded into an error, used on every constructed flow.
pub(crate) fn ensure_flow(g: &MultiGraph, f: &FlowAssignment, k: i64) -> Result<(), FlowError> {
    let report = verify_flow(g, f, k).map_err(|e| FlowError::Unverified(e.to_string()))?;
    if report.ok {
        Ok(())
    } else {
        Err(FlowError::Unverified(format!("{:?}", report.violations)))
    }
}

fn check_input(g: &MultiGraph, f: &FlowAssignment, k: i64) -> Result<(), FlowError> {
    let report = verify_flow(g, f, k)?;
    if report.ok {
        Ok(())
    } else {
        Err(FlowError::InvalidInput {
            k,
            reason: format!("{:?}", report.violations),
        })
    }
}

/// Re-expresses `f` in a target orientation, negating every edge whose
/// direction flips. Edges absent from `target` keep their arcs.
pub fn reorient(f: &FlowAssignment, target: &BTreeMap<EdgeId, (Vertex, Vertex)>) -> FlowAssignment {
    f.iter()
        .map(|(e, a)| match target.get(&e) {
            Some(&(t, _)) if t == a.head && a.head != a.tail => (e, a.reversed()),
            _ => (e, *a),
        })
        .collect()
}

/// Combines nowhere-zero 3-flows on two subgraphs sharing at most one edge.
///
/// Without a shared edge the flows are simply united. With a shared edge
/// `e0` the second flow is negated when `f1(e0) = -f2(e0) (mod 3)`, and the
/// two are added, so `e0` carries `f1(e0) +- f2(e0)`, which is nonzero mod 3.
/// That sum can reach 4 in absolute value; in that case the result is
/// brought back into `{+-1, +-2}` by the Z3 -> integer conversion. The
/// output is in the host's `u -> v` orientation.
pub fn glue(
    host: &MultiGraph,
    g1: &Subgraph,
    f1: &FlowAssignment,
    g2: &Subgraph,
    f2: &FlowAssignment,
) -> Result<FlowAssignment, FlowError> {
    g1.check(host)?;
    g2.check(host)?;
    let h1 = host.restrict(g1);
    let h2 = host.restrict(g2);
    check_input(&h1, f1, 3)?;
    check_input(&h2, f2, 3)?;
    let shared = g1.common_edges(g2);
    if shared.len() > 1 {
        return Err(FlowError::TooManySharedEdges(shared.len()));
    }
    let f1 = f1.oriented_to(host);
    let mut f2 = f2.oriented_to(host);
    let union = host.restrict(&g1.union(g2));
    let mut out = FlowAssignment::new();
    match shared.first() {
        None => {
            out = f1.disjoint_union(&f2);
        }
        Some(&e0) => {
            let p1 = f1.get(e0).unwrap().value;
            let p2 = f2.get(e0).unwrap().value;
            if (p1 - p2).rem_euclid(3) != 0 {
                f2 = f2.negated();
            }
            for (e, a) in f1.iter() {
                out.insert(e, *a);
            }
            for (e, a) in f2.iter() {
                match out.get(e).copied() {
                    Some(prev) => {
                        out.insert(
                            e,
                            Arc {
                                value: prev.value + a.value,
                                ..prev
                            },
                        );
                    }
                    None => {
                        out.insert(e, *a);
                    }
                }
            }
        }
    }
    if out.max_abs() >= 3 {
        let z = Z3Flow::from_integer(&out);
        out = z3_to_integer(&union, &z)?;
    }
    ensure_flow(&union, &out, 3)?;
    Ok(out)
}
