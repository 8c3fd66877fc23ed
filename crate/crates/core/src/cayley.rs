//! Cayley graphs over connection multisets, quotients and covering lifts.
//!
//! Each vertex `g` has one half-edge per *slot* `(x, c)`: `x` a connection
//! element and `c < mult(x)` a copy index. The half-edge `(g, (x, c))` is
//! joined to `(gx, (x^-1, c))`; for an involution `x` that is the same slot
//! at the other end. An edge is materialized once, from its lesser
//! endpoint, and edge ids follow the order `(from, x, c)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::flow::{
    ensure_flow, Arc, Edge, EdgeId, FlowAssignment, FlowError, MultiGraph, Subgraph, Vertex,
};
use crate::group::{quotient_group, Element, FiniteGroup, GroupError, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error("invalid connection multiset: {}", .0.join("; "))]
    InvalidConnection(Vec<String>),
    #[error("connection element {0} lies in the normal subgroup")]
    IntersectsNormal(Element),
    #[error("not a sub-multiset of the connection multiset")]
    NotSubMultiset,
    #[error("invalid covering: {0}")]
    InvalidCovering(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// An inverse-closed multiset of non-identity elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConnectionMultiset {
    multiplicity: BTreeMap<Element, usize>,
}

pub type Slot = (Element, usize);

impl ConnectionMultiset {
    pub fn multiplicity(&self, x: Element) -> usize {
        self.multiplicity.get(&x).copied().unwrap_or(0)
    }

    pub fn cardinality(&self) -> usize {
        self.multiplicity.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicity.is_empty()
    }

    /// Distinct elements, increasing.
    pub fn support(&self) -> Vec<Element> {
        self.multiplicity.keys().copied().collect()
    }

    /// Elements with repetition, increasing.
    pub fn elements(&self) -> Vec<Element> {
        self.multiplicity
            .iter()
            .flat_map(|(&x, &m)| std::iter::repeat_n(x, m))
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Element, usize)> + '_ {
        self.multiplicity.iter().map(|(&x, &m)| (x, m))
    }

    /// All slots `(x, c)`, in increasing order.
    pub fn slots(&self) -> Vec<Slot> {
        self.multiplicity
            .iter()
            .flat_map(|(&x, &m)| (0..m).map(move |c| (x, c)))
            .collect()
    }

    pub fn is_submultiset_of(&self, other: &ConnectionMultiset) -> bool {
        self.multiplicity
            .iter()
            .all(|(&x, &m)| other.multiplicity(x) >= m)
    }

    /// Multiset sum.
    pub fn plus(&self, other: &ConnectionMultiset) -> ConnectionMultiset {
        let mut multiplicity = self.multiplicity.clone();
        for (&x, &m) in &other.multiplicity {
            *multiplicity.entry(x).or_insert(0) += m;
        }
        ConnectionMultiset { multiplicity }
    }

    /// Multiset difference; `other` must be contained in `self`.
    pub fn minus(&self, other: &ConnectionMultiset) -> Result<ConnectionMultiset, CayleyError> {
        if !other.is_submultiset_of(self) {
            return Err(CayleyError::NotSubMultiset);
        }
        let multiplicity = self
            .multiplicity
            .iter()
            .map(|(&x, &m)| (x, m - other.multiplicity(x)))
            .filter(|&(_, m)| m > 0)
            .collect();
        Ok(ConnectionMultiset { multiplicity })
    }

    /// The elements lying in a subgroup (or outside it).
    pub fn split_by(&self, h: &Subgroup) -> (ConnectionMultiset, ConnectionMultiset) {
        let (inside, outside): (BTreeMap<_, _>, BTreeMap<_, _>) = self
            .multiplicity
            .iter()
            .map(|(&x, &m)| (x, m))
            .partition(|&(x, _)| h.contains(x));
        (
            ConnectionMultiset {
                multiplicity: inside,
            },
            ConnectionMultiset {
                multiplicity: outside,
            },
        )
    }
}

/// Validates `(element, multiplicity)` pairs (repeated elements add up).
pub fn validate_connection(
    group: &FiniteGroup,
    raw: &[(Element, usize)],
) -> Result<ConnectionMultiset, CayleyError> {
    let mut multiplicity: BTreeMap<Element, usize> = BTreeMap::new();
    let mut problems = Vec::new();
    for &(x, m) in raw {
        if x >= group.order() {
            problems.push(format!("element {x} out of range"));
        } else if x == group.identity() {
            problems.push("identity included".to_string());
        } else if m > 0 {
            *multiplicity.entry(x).or_insert(0) += m;
        }
    }
    for (&x, &m) in &multiplicity {
        let xi = group.inv(x);
        let mi = multiplicity.get(&xi).copied().unwrap_or(0);
        // report each unbalanced pair once, from its lesser present member
        if m != mi && (x < xi || !multiplicity.contains_key(&xi)) {
            problems.push(format!(
                "element {x} has multiplicity {m} but its inverse {xi} has {mi}"
            ));
        }
    }
    if problems.is_empty() {
        Ok(ConnectionMultiset { multiplicity })
    } else {
        Err(CayleyError::InvalidConnection(problems))
    }
}

/// Validates a list with repetition, e.g. `[y, z, z]`.
pub fn connection_from_list(
    group: &FiniteGroup,
    elements: &[Element],
) -> Result<ConnectionMultiset, CayleyError> {
    let raw: Vec<(Element, usize)> = elements.iter().map(|&x| (x, 1)).collect();
    validate_connection(group, &raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeLabel {
    /// Lesser endpoint.
    pub from: Element,
    pub element: Element,
    pub copy: usize,
}

#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: FiniteGroup,
    connection: ConnectionMultiset,
    graph: MultiGraph,
    labels: Vec<EdgeLabel>,
    half_edges: BTreeMap<(Vertex, Slot), EdgeId>,
}

fn partner_slot(group: &FiniteGroup, (x, c): Slot) -> Slot {
    (group.inv(x), c)
}

pub fn build_cayley(group: &FiniteGroup, connection: &ConnectionMultiset) -> CayleyGraph {
    let slots = connection.slots();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut half_edges = BTreeMap::new();
    for g in group.elements() {
        for &s in &slots {
            let h = group.mul(g, s.0);
            if h < g {
                continue;
            }
            let id = edges.len();
            edges.push(Edge { id, u: g, v: h });
            labels.push(EdgeLabel {
                from: g,
                element: s.0,
                copy: s.1,
            });
            half_edges.insert((g, s), id);
            half_edges.insert((h, partner_slot(group, s)), id);
        }
    }
    let graph = MultiGraph::new(group.order(), edges).expect("connection excludes the identity");
    debug_assert!(graph
        .degrees()
        .iter()
        .all(|&d| d == connection.cardinality()));
    CayleyGraph {
        group: group.clone(),
        connection: connection.clone(),
        graph,
        labels,
        half_edges,
    }
}

impl CayleyGraph {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn connection(&self) -> &ConnectionMultiset {
        &self.connection
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn label(&self, e: EdgeId) -> EdgeLabel {
        self.labels[e]
    }

    pub fn labels(&self) -> &[EdgeLabel] {
        &self.labels
    }

    /// The edge leaving `g` through slot `(x, c)`.
    pub fn edge_at(&self, g: Vertex, slot: Slot) -> Option<EdgeId> {
        self.half_edges.get(&(g, slot)).copied()
    }

    /// The edge `{g, gx}` using copy 0 of `x`.
    pub fn edge_between(&self, g: Vertex, x: Element) -> Option<EdgeId> {
        self.edge_at(g, (x, 0))
    }

    pub fn edge_by_label(&self, label: EdgeLabel) -> Option<EdgeId> {
        self.edge_at(label.from, (label.element, label.copy))
    }

    /// Edges whose slots belong to a sub-multiset (copies `0..mult` of each
    /// element), i.e. the spanning subgraph `Cay(G, sub)`.
    pub fn edges_of(&self, sub: &ConnectionMultiset) -> Result<BTreeSet<EdgeId>, CayleyError> {
        if !sub.is_submultiset_of(&self.connection) {
            return Err(CayleyError::NotSubMultiset);
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.copy < sub.multiplicity(l.element))
            .map(|(id, _)| id)
            .collect())
    }

    /// Edges using any of the given slots. The slot set must be closed under
    /// the pairing `(x, c) <-> (x^-1, c)`.
    pub fn edges_of_slots(&self, slots: &BTreeSet<Slot>) -> Result<BTreeSet<EdgeId>, CayleyError> {
        for &(x, c) in slots {
            if c >= self.connection.multiplicity(x) {
                return Err(CayleyError::NotSubMultiset);
            }
            if !slots.contains(&partner_slot(&self.group, (x, c))) {
                return Err(CayleyError::InvalidConnection(vec![format!(
                    "slot ({x}, {c}) lacks its partner"
                )]));
            }
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| slots.contains(&(l.element, l.copy)))
            .map(|(id, _)| id)
            .collect())
    }

    /// Spanning subgraph `Cay(G, sub)` inside this graph.
    pub fn spanning(&self, sub: &ConnectionMultiset) -> Result<Subgraph, CayleyError> {
        Ok(Subgraph {
            vertices: self.group.elements().collect(),
            edges: self.edges_of(sub)?,
        })
    }

    /// Connected components of the spanning subgraph on `edges`, each with
    /// its least vertex.
    pub fn components_of(&self, edges: &BTreeSet<EdgeId>) -> Vec<(Subgraph, Element)> {
        components(&self.graph, edges)
    }
}

fn components(graph: &MultiGraph, edges: &BTreeSet<EdgeId>) -> Vec<(Subgraph, Element)> {
    let part = graph.restrict_edges(edges);
    let label = part.components();
    let mut by_rep: BTreeMap<Vertex, Subgraph> = BTreeMap::new();
    for v in 0..graph.vertex_count() {
        by_rep.entry(label[v]).or_default().vertices.insert(v);
    }
    for e in part.edges() {
        by_rep.get_mut(&label[e.u]).unwrap().edges.insert(e.id);
    }
    by_rep.into_iter().map(|(rep, sub)| (sub, rep)).collect()
}

/// Components of `Cay(G, sub)`, each a left translate `g Cay(<sub>, sub)`
/// recorded with its least element `g`. The representatives form a left
/// transversal of `<sub>`.
pub fn subgroup_components(
    group: &FiniteGroup,
    sub: &ConnectionMultiset,
) -> Vec<(Subgraph, Element)> {
    let cay = build_cayley(group, sub);
    let all: BTreeSet<EdgeId> = cay.graph.edge_ids().collect();
    components(&cay.graph, &all)
}

/// A graph covering `upstairs -> base`, stored explicitly.
#[derive(Debug, Clone)]
pub struct Covering {
    pub upstairs: MultiGraph,
    pub base: MultiGraph,
    pub vertex_map: Vec<Vertex>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl Covering {
    /// Edge map respects endpoints and is bijective on every vertex star.
    pub fn check(&self) -> Result<(), CayleyError> {
        let bad = |s: String| CayleyError::InvalidCovering(s);
        let base_inc = self.base.incidence();
        let mut star: Vec<BTreeSet<EdgeId>> = vec![BTreeSet::new(); self.upstairs.vertex_count()];
        for e in self.upstairs.edges() {
            let q = *self
                .edge_map
                .get(&e.id)
                .ok_or_else(|| bad(format!("edge {} unmapped", e.id)))?;
            let be = self
                .base
                .edge(q)
                .ok_or_else(|| bad(format!("image {q} missing")))?;
            let (a, b) = (self.vertex_map[e.u], self.vertex_map[e.v]);
            if !((be.u, be.v) == (a, b) || (be.u, be.v) == (b, a)) {
                return Err(bad(format!("edge {} maps to a non-incident edge", e.id)));
            }
            for w in [e.u, e.v] {
                if !star[w].insert(q) {
                    return Err(bad(format!("two edges at vertex {w} share image {q}")));
                }
            }
        }
        for (v, s) in star.iter().enumerate() {
            if s.len() != base_inc[self.vertex_map[v]].len() {
                return Err(bad(format!("star of vertex {v} is not onto")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub graph: CayleyGraph,
    pub projection: Vec<Element>,
    pub covering: Covering,
}

/// `Cay(G/N, X/N)` with the covering `Cay(G, X) -> Cay(G/N, X/N)`.
///
/// The slot `(x, c)` of `X` goes to the slot `(Nx, r)` of `X/N`, where `r`
/// is the rank of `(x, c)` among the slots of `X` in the coset `Nx`. This
/// induces a pairing on quotient slots that can differ from the canonical
/// one, so the induced graph is matched to the canonical `Cay(G/N, X/N)`
/// edge by edge within each vertex pair (parallel edges in id order).
pub fn quotient_cayley(
    group: &FiniteGroup,
    x: &ConnectionMultiset,
    n: &Subgroup,
) -> Result<Quotient, CayleyError> {
    if let Some(&bad) = x.support().iter().find(|&&s| n.contains(s)) {
        return Err(CayleyError::IntersectsNormal(bad));
    }
    let (q, projection) = quotient_group(group, n)?;
    let up = build_cayley(group, x);
    let raw: Vec<(Element, usize)> = x.entries().map(|(s, m)| (projection[s], m)).collect();
    let qx = validate_connection(&q, &raw)?;
    let base = build_cayley(&q, &qx);

    let mut sigma: BTreeMap<Slot, Slot> = BTreeMap::new();
    let mut next_rank: BTreeMap<Element, usize> = BTreeMap::new();
    for s in x.slots() {
        let coset = projection[s.0];
        let r = next_rank.entry(coset).or_insert(0);
        sigma.insert(s, (coset, *r));
        *r += 1;
    }
    // induced quotient edges, keyed by their lesser half-edge
    let mut induced: BTreeMap<(Vertex, Slot), (Vertex, Vertex)> = BTreeMap::new();
    let mut image_key: Vec<(Vertex, Slot)> = Vec::with_capacity(up.graph.edge_count());
    for l in &up.labels {
        let s = (l.element, l.copy);
        let a = (projection[l.from], sigma[&s]);
        let b = (
            projection[group.mul(l.from, l.element)],
            sigma[&partner_slot(group, s)],
        );
        let key = a.min(b);
        induced.insert(key, (a.0.min(b.0), a.0.max(b.0)));
        image_key.push(key);
    }
    let mut by_pair: BTreeMap<(Vertex, Vertex), Vec<(Vertex, Slot)>> = BTreeMap::new();
    for (key, pair) in &induced {
        by_pair.entry(*pair).or_default().push(*key);
    }
    let mut canonical: BTreeMap<(Vertex, Vertex), Vec<EdgeId>> = BTreeMap::new();
    for e in base.graph.edges() {
        canonical
            .entry((e.u.min(e.v), e.u.max(e.v)))
            .or_default()
            .push(e.id);
    }
    let mut key_to_edge: BTreeMap<(Vertex, Slot), EdgeId> = BTreeMap::new();
    for (pair, keys) in &by_pair {
        let ids = canonical
            .get(pair)
            .filter(|ids| ids.len() == keys.len())
            .ok_or_else(|| {
                CayleyError::InvalidCovering(format!("edge count mismatch at {pair:?}"))
            })?;
        for (k, &id) in keys.iter().zip(ids) {
            key_to_edge.insert(*k, id);
        }
    }
    let edge_map = image_key
        .iter()
        .enumerate()
        .map(|(id, k)| (id, key_to_edge[k]))
        .collect();
    let covering = Covering {
        upstairs: up.graph.clone(),
        base: base.graph.clone(),
        vertex_map: projection.clone(),
        edge_map,
    };
    covering.check()?;
    Ok(Quotient {
        graph: base,
        projection,
        covering,
    })
}

/// Pulls a flow on the base back along a covering.
pub fn lift_flow(covering: &Covering, f: &FlowAssignment) -> Result<FlowAssignment, CayleyError> {
    let k = f.max_abs() + 1;
    let report = crate::flow::verify_flow(&covering.base, f, k)?;
    if !report.ok {
        return Err(FlowError::InvalidInput {
            k,
            reason: format!("{:?}", report.violations),
        }
        .into());
    }
    let mut out = FlowAssignment::new();
    for e in covering.upstairs.edges() {
        let q = covering.edge_map[&e.id];
        let a = f.get(q).unwrap();
        let (tail, head) = if covering.vertex_map[e.u] == a.tail {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        out.insert(
            e.id,
            Arc {
                tail,
                head,
                value: a.value,
            },
        );
    }
    ensure_flow(&covering.upstairs, &out, k)?;
    Ok(out)
}
