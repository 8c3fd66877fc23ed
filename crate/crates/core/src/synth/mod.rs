//! Inductive synthesis of nowhere-zero 3-flows on Cayley graphs of
//! supersolvable groups that are nilpotent, have a noncyclic Sylow
//! 2-subgroup, or have a derived subgroup of square-free order.
//!
//! Every branch produces an explicit flow, checked by the verifier, and a
//! trace node naming the construction used. Quotient steps recurse on a
//! strictly smaller group.

mod index;
mod rotation;

pub use index::{index_construction, lambda_pieces, LambdaPiece, LambdaShape};
pub use rotation::rotation_pair_3flow;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cayley::{
    build_cayley, lift_flow, quotient_cayley, CayleyError, CayleyGraph, ConnectionMultiset, Slot,
};
use crate::flow::{
    cubic_bipartite_3flow, even_2_flow, extend_odd_regular, verify_flow, FlowAssignment, FlowError,
    Subgraph,
};
use crate::group::{
    derived_subgroup, has_noncyclic_sylow2, has_squarefree_derived, is_nilpotent, is_supersolvable,
    minimal_normal_in, Element, FiniteGroup, GroupError, Subgroup,
};
use crate::ladders::{classify_cubic, classify_preferring, two_ladder_core, LadderError, SlotPair};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("the Cayley graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("valency {0} is below four")]
    ValencyTooLow(usize),
    #[error("group {0} is not supersolvable with a nilpotent, noncyclic-Sylow-2 or square-free-derived structure")]
    Hypothesis(String),
    #[error("{step}: precondition failed: {reason}")]
    Precondition { step: String, reason: String },
    #[error("{step}: internal contradiction: {reason}")]
    Contradiction { step: String, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

pub(crate) fn contradiction(step: &str, reason: impl Into<String>) -> SynthError {
    SynthError::Contradiction {
        step: step.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn precondition(step: &str, reason: impl Into<String>) -> SynthError {
    SynthError::Precondition {
        step: step.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub nilpotent: bool,
    pub supersolvable: bool,
    pub noncyclic_sylow2: bool,
    pub squarefree_derived: bool,
    pub applicable: bool,
}

pub fn hypothesis_report(group: &FiniteGroup) -> HypothesisReport {
    let supersolvable = is_supersolvable(group);
    let nilpotent = is_nilpotent(group);
    let noncyclic_sylow2 = has_noncyclic_sylow2(group);
    let squarefree_derived = has_squarefree_derived(group);
    assert!(
        !squarefree_derived || supersolvable,
        "square-free derived subgroup without supersolvability"
    );
    assert!(
        !nilpotent || supersolvable,
        "nilpotent but not supersolvable"
    );
    HypothesisReport {
        nilpotent,
        supersolvable,
        noncyclic_sylow2,
        squarefree_derived,
        applicable: supersolvable && (nilpotent || noncyclic_sylow2 || squarefree_derived),
    }
}

/// One construction step of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    /// The construction applied.
    pub step: String,
    /// The dispatch branch that led here.
    pub case: String,
    pub data: Map<String, Value>,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub(crate) fn new(step: &str, case: &str) -> Self {
        TraceNode {
            step: step.to_string(),
            case: case.to_string(),
            data: Map::new(),
            children: Vec::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.data.insert(
            key.to_string(),
            serde_json::to_value(value).expect("trace data serializes"),
        );
        self
    }

    pub(crate) fn child(mut self, node: TraceNode) -> Self {
        self.children.push(node);
        self
    }

    /// All nodes in pre-order.
    pub fn nodes(&self) -> Vec<&TraceNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub group: String,
    pub order: usize,
    /// `(element, multiplicity)` pairs.
    pub connection: Vec<(Element, usize)>,
    pub flow: FlowAssignment,
    pub trace: TraceNode,
}

/// Builds a verified nowhere-zero 3-flow on `Cay(G, X)` with its trace.
pub fn synthesize(group: &FiniteGroup, x: &ConnectionMultiset) -> Result<Certificate, SynthError> {
    if x.cardinality() < 4 {
        return Err(SynthError::ValencyTooLow(x.cardinality()));
    }
    let cay = build_cayley(group, x);
    let components = cay.graph().component_count();
    if components > 1 {
        return Err(SynthError::Disconnected(components));
    }
    if !hypothesis_report(group).applicable {
        return Err(SynthError::Hypothesis(group.name().to_string()));
    }
    let (flow, trace) = solve(&cay)?;
    let report = verify_flow(cay.graph(), &flow, 3)?;
    if !report.ok {
        return Err(contradiction(
            "final verification",
            format!("{:?}", report.violations),
        ));
    }
    Ok(Certificate {
        group: group.name().to_string(),
        order: group.order(),
        connection: x.entries().collect(),
        flow,
        trace,
    })
}

fn elements_json(h: &Subgroup) -> Value {
    json!(h.elements())
}

/// The dispatcher. `cay` is connected, of valency at least four, over a
/// group satisfying the hypotheses.
pub(crate) fn solve(cay: &CayleyGraph) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let x = cay.connection();
    let head = |node: TraceNode| {
        node.with("group", group.name())
            .with("order", group.order())
    };
    if x.cardinality().is_multiple_of(2) {
        let f = even_2_flow(cay.graph())?;
        return Ok((
            f,
            head(TraceNode::new("closed-trail 2-flow", "even-valency")),
        ));
    }
    if let Some(z) = x
        .support()
        .into_iter()
        .find(|&s| group.is_involution(s) && group.is_central(s))
    {
        let (f, node) = central_involution_3flow(cay, z)?;
        return Ok((f, head(node)));
    }
    let derived = derived_subgroup(group);
    let minimal = minimal_normal_in(group, &derived);
    let Some(n) = minimal.first() else {
        return Err(contradiction(
            "partition",
            "no minimal normal subgroup inside the derived subgroup",
        ));
    };
    let (w, y) = x.split_by(n);
    let base = |step: &str, case: &str| {
        head(TraceNode::new(step, case))
            .with("normal_subgroup", elements_json(n))
            .with("outside", y.elements())
            .with("inside", w.elements())
    };
    match y.cardinality() {
        k if k % 2 == 0 => Err(contradiction(
            "partition",
            "even part outside N although no central involution is present",
        )),
        k if k >= 5 => {
            let (f, child) = quotient_step(cay, &y, n, true)?;
            Ok((f, base("quotient lift", "quotient").child(child)))
        }
        1 => {
            let yy = y.support()[0];
            let pairs = inverse_closed_pairs(group, &slots_of(x, &w), None);
            let (u, v) = ladder_pairs(group, &pairs, yy).ok_or_else(|| {
                contradiction("dihedral 2p", "fewer than two ladder pairs inside N")
            })?;
            let (f, rep) = two_ladder_core(cay, u, v, (yy, 0), true)?;
            Ok((
                f,
                base("two ladders", "dihedral-2p")
                    .with("rung", yy)
                    .with("pairs", [u, v])
                    .with("composition", rep),
            ))
        }
        3 => {
            if let Some(l) = minimal.iter().find(|l| *l != n) {
                let node = base("two ladders", "second-minimal-normal")
                    .with("second_normal_subgroup", elements_json(l));
                if !x.support().iter().any(|&s| l.contains(s)) {
                    let (f, child) = quotient_step(cay, x, l, true)?;
                    return Ok((
                        f,
                        node.with("step_variant", "quotient by the second subgroup")
                            .child(child),
                    ));
                }
                let class = classify_cubic(group, &y)?;
                let Some(z) = class.rung_involution() else {
                    return Err(contradiction(
                        "second minimal normal",
                        format!("outside part is not a closed ladder: {class:?}"),
                    ));
                };
                let mut ys: Vec<Slot> = slots_of(x, &y);
                ys.retain(|&s| s != (z, 0));
                let u: SlotPair = [ys[0], ys[1]];
                let pairs = inverse_closed_pairs(group, &slots_of(x, &w), None);
                let v = pairs
                    .iter()
                    .copied()
                    .find(|&p| is_ladder_pair(group, p, z))
                    .ok_or_else(|| {
                        contradiction("second minimal normal", "no ladder pair inside N")
                    })?;
                let (f, rep) = two_ladder_core(cay, u, v, (z, 0), true)?;
                return Ok((
                    f,
                    node.with("rung", z)
                        .with("pairs", [u, v])
                        .with("composition", rep),
                ));
            }
            unique_minimal_normal(cay, n, &y, &w).map(|(f, node)| {
                let node = node
                    .with("group", group.name())
                    .with("order", group.order())
                    .with("normal_subgroup", elements_json(n))
                    .with("outside", y.elements())
                    .with("inside", w.elements());
                (f, node)
            })
        }
        k => Err(contradiction(
            "partition",
            format!("outside part of cardinality {k}"),
        )),
    }
}

fn unique_minimal_normal(
    cay: &CayleyGraph,
    n: &Subgroup,
    y: &ConnectionMultiset,
    w: &ConnectionMultiset,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let x = cay.connection();
    if x.cardinality() >= 7 {
        let pairs = inverse_closed_pairs(group, &slots_of(x, w), None);
        for z in y.support().into_iter().filter(|&s| group.is_involution(s)) {
            if let Some((u, v)) = ladder_pairs(group, &pairs, z) {
                let (f, rep) = two_ladder_core(cay, u, v, (z, 0), true)?;
                let node = TraceNode::new("two ladders", "unique-minimal-normal")
                    .with("rung", z)
                    .with("pairs", [u, v])
                    .with("composition", rep);
                return Ok((f, node));
            }
        }
        return Err(contradiction(
            "unique minimal normal",
            "no rung involution with two ladder pairs inside N",
        ));
    }
    if n.order() == 2 {
        return Err(contradiction(
            "unique minimal normal",
            "N of order 2 without a central involution in X",
        ));
    }
    let Some(&b) = w.support().iter().find(|&&s| !group.is_involution(s)) else {
        return Err(contradiction(
            "unique minimal normal",
            "no element of N in X",
        ));
    };
    let ys = y.elements();
    if ys.iter().all(|&s| group.is_involution(s)) {
        index::three_involutions(cay, [ys[0], ys[1], ys[2]], b)
    } else {
        let yy = ys
            .iter()
            .copied()
            .find(|&s| !group.is_involution(s))
            .unwrap();
        let z = ys
            .iter()
            .copied()
            .find(|&s| group.is_involution(s))
            .unwrap();
        rotation_pair_3flow(cay, yy, z, b)
    }
}

/// Flow on `Cay(G, X)` from a flow on `Cay(G/N, Y/N)` for a sub-multiset
/// `Y` of odd cardinality avoiding `N`: recurse, lift along the covering,
/// and extend over the remaining even-valency part.
pub(crate) fn quotient_step(
    cay: &CayleyGraph,
    y: &ConnectionMultiset,
    n: &Subgroup,
    inside_derived: bool,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let step = "quotient";
    let q = quotient_cayley(group, y, n)?;
    let qg = q.graph.group();
    if qg.order() >= group.order() {
        return Err(contradiction(step, "quotient is not smaller"));
    }
    let up = hypothesis_report(group);
    let down = hypothesis_report(qg);
    if !down.applicable {
        return Err(contradiction(
            step,
            format!("{} loses the hypotheses", qg.name()),
        ));
    }
    if up.nilpotent && !down.nilpotent {
        return Err(contradiction(
            step,
            "quotient of a nilpotent group is not nilpotent",
        ));
    }
    if inside_derived && up.noncyclic_sylow2 && !down.noncyclic_sylow2 {
        return Err(contradiction(
            step,
            "quotient lost the noncyclic Sylow 2-subgroup",
        ));
    }
    if up.squarefree_derived && !down.squarefree_derived {
        return Err(contradiction(
            step,
            "quotient lost the square-free derived subgroup",
        ));
    }
    if q.graph.graph().component_count() != 1 {
        return Err(contradiction(step, "quotient graph is disconnected"));
    }
    let (qf, child) = solve(&q.graph)?;
    let lifted = lift_flow(&q.covering, &qf)?;
    let ycay = build_cayley(group, y);
    let mut mapped = FlowAssignment::new();
    for (e, arc) in lifted.iter() {
        let id = cay
            .edge_by_label(ycay.label(e))
            .ok_or_else(|| contradiction(step, "sub-multiset edge missing from the full graph"))?;
        mapped.insert(id, *arc);
    }
    let full = if y.cardinality() == cay.connection().cardinality() {
        mapped
    } else {
        let sub = Subgraph {
            vertices: group.elements().collect(),
            edges: mapped.edge_ids(),
        };
        extend_odd_regular(cay.graph(), &sub, &mapped)?
    };
    let node = TraceNode::new("lift along covering", "covering-lift")
        .with("normal_subgroup", elements_json(n))
        .with("quotient", qg.name())
        .with("quotient_order", qg.order())
        .child(child);
    Ok((full, node))
}

/// Slots of `x` whose element lies in the sub-multiset `part` (which holds
/// every copy of its elements).
pub(crate) fn slots_of(x: &ConnectionMultiset, part: &ConnectionMultiset) -> Vec<Slot> {
    x.slots()
        .into_iter()
        .filter(|s| part.multiplicity(s.0) > 0)
        .collect()
}

/// Disjoint inverse-closed pairs from a slot list, in order of preference:
/// `{x, x^-1}` pairs, then two copies of one involution, then two distinct
/// involutions. A leftover copy of `avoid` is paired last.
pub(crate) fn inverse_closed_pairs(
    group: &FiniteGroup,
    slots: &[Slot],
    avoid: Option<Element>,
) -> Vec<SlotPair> {
    let set: BTreeSet<Slot> = slots.iter().copied().collect();
    let mut pairs = Vec::new();
    for &(x, c) in &set {
        let xi = group.inv(x);
        if x < xi && set.contains(&(xi, c)) {
            pairs.push([(x, c), (xi, c)]);
        }
    }
    let mut singles = Vec::new();
    let involutions: BTreeSet<Element> = set
        .iter()
        .map(|s| s.0)
        .filter(|&x| group.is_involution(x))
        .collect();
    for w in involutions {
        let copies: Vec<Slot> = set.iter().copied().filter(|s| s.0 == w).collect();
        for chunk in copies.chunks(2) {
            if chunk.len() == 2 {
                pairs.push([chunk[0], chunk[1]]);
            } else {
                singles.push(chunk[0]);
            }
        }
    }
    singles.sort_by_key(|s| (Some(s.0) == avoid, *s));
    for chunk in singles.chunks(2) {
        if chunk.len() == 2 {
            pairs.push([chunk[0], chunk[1]]);
        }
    }
    pairs
}

/// Whether `p + z` is a closed ladder with rung involution `z`.
fn is_ladder_pair(group: &FiniteGroup, p: SlotPair, z: Element) -> bool {
    let Ok(m) = crate::cayley::connection_from_list(group, &[p[0].0, p[1].0, z]) else {
        return false;
    };
    classify_preferring(group, &m, Some(z)).is_ok_and(|c| c.rung_involution() == Some(z))
}

/// The first two pairs that form closed ladders with rung involution `z`.
fn ladder_pairs(
    group: &FiniteGroup,
    pairs: &[SlotPair],
    z: Element,
) -> Option<(SlotPair, SlotPair)> {
    let mut good = pairs
        .iter()
        .copied()
        .filter(|&p| is_ladder_pair(group, p, z));
    Some((good.next()?, good.next()?))
}

/// Constructive central-involution route: one copy of `z` becomes the rung
/// slot, two disjoint inverse-closed pairs of the rest give two ladder
/// families, and everything else carries a 2-flow.
pub fn central_involution_3flow(
    cay: &CayleyGraph,
    z: Element,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let x = cay.connection();
    let step = "central involution";
    if x.cardinality() < 5 || x.cardinality().is_multiple_of(2) {
        return Err(precondition(
            step,
            format!("cardinality {} is not odd and at least 5", x.cardinality()),
        ));
    }
    if x.multiplicity(z) == 0 || !group.is_involution(z) || !group.is_central(z) {
        return Err(precondition(
            step,
            format!("{z} is not a central involution in X"),
        ));
    }
    let rest: Vec<Slot> = x.slots().into_iter().filter(|&s| s != (z, 0)).collect();
    let pairs = inverse_closed_pairs(group, &rest, Some(z));
    let laddered: Vec<SlotPair> = pairs
        .iter()
        .copied()
        .filter(|&p| is_ladder_pair(group, p, z))
        .collect();
    let mut chosen: Vec<SlotPair> = laddered.iter().copied().take(2).collect();
    for &p in &pairs {
        if chosen.len() == 2 {
            break;
        }
        if !chosen.contains(&p) {
            chosen.push(p);
        }
    }
    if chosen.len() < 2 {
        return Err(contradiction(step, "fewer than two inverse-closed pairs"));
    }
    let (f, rep) = two_ladder_core(cay, chosen[0], chosen[1], (z, 0), false)?;
    let node = TraceNode::new("two ladders", "central-involution")
        .with("rung", z)
        .with("pairs", [chosen[0], chosen[1]])
        .with("composition", rep);
    Ok((f, node))
}

/// Spanning cubic bipartite subgraph `Cay(G, S)` with a prescribed side
/// function, extended to the whole graph.
pub(crate) fn bipartite_spanning(
    cay: &CayleyGraph,
    s: &ConnectionMultiset,
    second_side: &[bool],
    step: &str,
) -> Result<FlowAssignment, SynthError> {
    let sub = cay.spanning(s)?;
    let graph = cay.graph().restrict(&sub);
    let f = cubic_bipartite_3flow(&graph, second_side)
        .map_err(|e| contradiction(step, e.to_string()))?;
    Ok(extend_odd_regular(cay.graph(), &sub, &f)?)
}
