use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::classify::classify_preferring;
use super::{piece_flow, recognize_ladder, CubicClass, LadderError};
use crate::cayley::{CayleyGraph, ConnectionMultiset, Slot};
use crate::flow::{
    ensure_flow, extend_odd_regular, glue, EdgeId, FlowAssignment, MultiGraph, Subgraph,
};

/// A piece of a composition: a subgraph with its designated rungs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub subgraph: Subgraph,
    pub rungs: BTreeSet<EdgeId>,
}

impl Member {
    fn minus(&self, drop: &BTreeSet<EdgeId>) -> Member {
        Member {
            subgraph: Subgraph {
                vertices: self.subgraph.vertices.clone(),
                edges: self.subgraph.edges.difference(drop).copied().collect(),
            },
            rungs: self.rungs.difference(drop).copied().collect(),
        }
    }

    fn flow(&self, host: &MultiGraph) -> Result<Option<FlowAssignment>, LadderError> {
        piece_flow(host, &self.subgraph, &self.rungs)
    }

    fn is_ladder(&self, host: &MultiGraph) -> bool {
        recognize_ladder(host, &self.subgraph, &self.rungs).is_ok()
    }
}

/// Glues `sigma` onto a valid `lambda` one component at a time.
///
/// A component disjoint from what has been built so far must carry a flow
/// of its own. Otherwise all its shared rungs but the least one `e` are
/// dropped (they are already covered) and either the rest is glued along
/// `e`, or, when that piece has no flow, the piece minus `e` is added
/// disjointly.
pub fn cup_compose(
    host: &MultiGraph,
    lambda: &Subgraph,
    f_lambda: &FlowAssignment,
    sigma: &[Member],
) -> Result<(Subgraph, FlowAssignment), LadderError> {
    lambda.check(host)?;
    ensure_flow(&host.restrict(lambda), f_lambda, 3)?;
    let mut acc = lambda.clone();
    let mut f = f_lambda.clone();
    for (idx, theta) in sigma.iter().enumerate() {
        theta.subgraph.check(host)?;
        f = cup_one(host, &acc, &f, theta).map_err(|e| match e {
            LadderError::Precondition(s) => {
                LadderError::Precondition(format!("component {idx}: {s}"))
            }
            other => other,
        })?;
        acc = acc.union(&theta.subgraph);
    }
    Ok((acc, f))
}

fn cup_one(
    host: &MultiGraph,
    acc: &Subgraph,
    f: &FlowAssignment,
    theta: &Member,
) -> Result<FlowAssignment, LadderError> {
    let common = acc.common_edges(&theta.subgraph);
    if let Some(e) = common.iter().find(|e| !theta.rungs.contains(e)) {
        return Err(LadderError::Precondition(format!(
            "shared edge {e} is not a rung"
        )));
    }
    let Some(&e) = common.first() else {
        let ft = theta
            .flow(host)?
            .ok_or_else(|| LadderError::Precondition("disjoint component has no 3-flow".into()))?;
        return Ok(glue(host, acc, f, &theta.subgraph, &ft)?);
    };
    let drop: BTreeSet<EdgeId> = common.iter().copied().filter(|&x| x != e).collect();
    let kept = theta.minus(&drop);
    if let Some(fk) = kept.flow(host)? {
        return Ok(glue(host, acc, f, &kept.subgraph, &fk)?);
    }
    let bare = kept.minus(&BTreeSet::from([e]));
    let fb = bare.flow(host)?.ok_or_else(|| {
        LadderError::Contradiction(format!("neither side of rung {e} admits a 3-flow"))
    })?;
    Ok(glue(host, acc, f, &bare.subgraph, &fb)?)
}

/// One step of the ladder-family composition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CladderStep {
    pub member: usize,
    /// `cup` (glued whole) or `split` (added without one rung).
    pub action: &'static str,
    /// The rung left out after this step, if any.
    pub pending_rung: Option<EdgeId>,
    pub recognized: bool,
}

/// Builds a 3-flow on the union of a family of ladders whose designated
/// rungs `e_set` are shared between members.
///
/// Members are taken in a deterministic order: the least unused one, or,
/// while a rung is pending, the least unused one containing it. A member
/// is glued whole when it shares an edge with the part built so far or is
/// valid on its own; otherwise it is added without its least other rung.
pub fn cladder_compose(
    host: &MultiGraph,
    members: &[Member],
    e_set: &BTreeSet<EdgeId>,
) -> Result<(FlowAssignment, Vec<CladderStep>), LadderError> {
    let pre = |s: String| Err(LadderError::Precondition(s));
    if members.is_empty() {
        return pre("empty family".into());
    }
    let mut owners: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        m.subgraph.check(host)?;
        for &e in &m.subgraph.edges {
            *owners.entry(e).or_insert(0) += 1;
            if e_set.contains(&e) && !m.rungs.contains(&e) {
                return pre(format!("member {i}: E-edge {e} is not one of its rungs"));
            }
        }
    }
    for (&e, &k) in &owners {
        if e_set.contains(&e) && k < 2 {
            return pre(format!("E-edge {e} lies in only {k} member"));
        }
        if !e_set.contains(&e) && k != 1 {
            return pre(format!("edge {e} lies in {k} members"));
        }
    }
    if let Some(e) = e_set.iter().find(|e| !owners.contains_key(e)) {
        return pre(format!("E-edge {e} lies in no member"));
    }
    let e_rungs = |m: &Member| -> Vec<EdgeId> { m.rungs.intersection(e_set).copied().collect() };

    let mut used = vec![false; members.len()];
    let mut built: Option<(Subgraph, FlowAssignment)> = None;
    let mut covered = Subgraph::default();
    let mut pending: Option<EdgeId> = None;
    let mut steps = Vec::new();
    for _ in 0..members.len() {
        let pick = match pending {
            None => used.iter().position(|u| !u),
            Some(e) => {
                (0..members.len()).find(|&i| !used[i] && members[i].subgraph.edges.contains(&e))
            }
        };
        let Some(i) = pick else {
            return Err(LadderError::Contradiction(format!(
                "no unused member carries the pending rung {pending:?}"
            )));
        };
        used[i] = true;
        let sigma = &members[i];
        let shares = built
            .as_ref()
            .is_some_and(|(g, _)| !g.common_edges(&sigma.subgraph).is_empty());
        let own = if shares { None } else { sigma.flow(host)? };
        let recognized = sigma.is_ladder(host);
        if shares || own.is_some() {
            let next = match built.take() {
                None => (sigma.subgraph.clone(), own.unwrap()),
                Some((g, f)) => cup_compose(host, &g, &f, std::slice::from_ref(sigma))?,
            };
            built = Some(next);
            pending = None;
            steps.push(CladderStep {
                member: i,
                action: "cup",
                pending_rung: None,
                recognized,
            });
        } else {
            let Some(&e) = e_rungs(sigma).iter().find(|&&e| Some(e) != pending) else {
                return pre(format!("member {i} has no 3-flow and too few E-rungs"));
            };
            let rest = sigma.minus(&BTreeSet::from([e]));
            let fr = rest.flow(host)?.ok_or_else(|| {
                LadderError::Contradiction(format!("member {i} minus rung {e} has no 3-flow"))
            })?;
            let next = match built.take() {
                None => (rest.subgraph.clone(), fr),
                Some((g, f)) => {
                    let h = glue(host, &g, &f, &rest.subgraph, &fr)?;
                    (g.union(&rest.subgraph), h)
                }
            };
            built = Some(next);
            pending = Some(e);
            steps.push(CladderStep {
                member: i,
                action: "split",
                pending_rung: Some(e),
                recognized,
            });
        }
        covered = covered.union(&sigma.subgraph);
        let (g, _) = built.as_ref().unwrap();
        let mut expect = covered.edges.clone();
        if let Some(e) = pending {
            expect.remove(&e);
        }
        if g.edges != expect {
            return Err(LadderError::Contradiction(format!(
                "after member {i} the built part is neither the union nor the union minus the pending rung"
            )));
        }
    }
    if let Some(e) = pending {
        return Err(LadderError::Contradiction(format!(
            "rung {e} still pending at the end"
        )));
    }
    let (g, f) = built.unwrap();
    ensure_flow(&host.restrict(&g), &f, 3)?;
    Ok((f, steps))
}

/// An inverse-closed pair of slots: `{(x, c), (x^-1, c)}` or two involution
/// slots.
pub type SlotPair = [Slot; 2];

#[derive(Debug, Clone, Serialize)]
pub struct TwoLadderReport {
    pub u_class: CubicClass,
    pub v_class: CubicClass,
    pub members: usize,
    pub steps: Vec<CladderStep>,
}

/// 3-flow on `Cay(G, X)` from two inverse-closed pairs `U`, `V` whose
/// cubic Cayley graphs with `z` are closed ladders with rung involution
/// `z`: the components of `Cay(G, U + z)` and `Cay(G, V + z)` share exactly
/// the `z`-edges, which makes them a ladder family on `Cay(G, U + V + z)`;
/// the remaining even-valency part gets a 2-flow.
pub fn two_ladder_3flow(
    cay: &CayleyGraph,
    u: SlotPair,
    v: SlotPair,
    z: Slot,
) -> Result<(FlowAssignment, TwoLadderReport), LadderError> {
    two_ladder_core(cay, u, v, z, true)
}

/// `strict = false` accepts members that are not closed ladders with rung
/// involution `z` (e.g. the theta graph of `{z, z, z}`); each piece is then
/// checked for validity directly.
pub(crate) fn two_ladder_core(
    cay: &CayleyGraph,
    u: SlotPair,
    v: SlotPair,
    z: Slot,
    strict: bool,
) -> Result<(FlowAssignment, TwoLadderReport), LadderError> {
    let group = cay.group();
    let x = cay.connection();
    let pre = |s: String| Err(LadderError::Precondition(s));
    if x.cardinality() < 5 || x.cardinality().is_multiple_of(2) {
        return pre(format!(
            "connection multiset of cardinality {}",
            x.cardinality()
        ));
    }
    if !group.is_involution(z.0) {
        return pre(format!("rung element {} is not an involution", z.0));
    }
    let all = [u[0], u[1], v[0], v[1], z];
    let distinct: BTreeSet<Slot> = all.iter().copied().collect();
    if distinct.len() != 5 {
        return pre("the five slots are not distinct".into());
    }
    if let Some(s) = all.iter().find(|s| s.1 >= x.multiplicity(s.0)) {
        return pre(format!("slot {s:?} is not in the connection multiset"));
    }
    for p in [u, v] {
        let (a, b) = (p[0], p[1]);
        let closed = if group.is_involution(a.0) {
            group.is_involution(b.0)
        } else {
            b == (group.inv(a.0), a.1)
        };
        if !closed {
            return pre(format!("pair {p:?} is not inverse-closed"));
        }
    }
    let multiset = |p: SlotPair| -> Result<ConnectionMultiset, LadderError> {
        Ok(crate::cayley::connection_from_list(
            group,
            &[p[0].0, p[1].0, z.0],
        )?)
    };
    let u_class = classify_preferring(group, &multiset(u)?, Some(z.0))?;
    let v_class = classify_preferring(group, &multiset(v)?, Some(z.0))?;
    if strict {
        for (name, c) in [("U", u_class), ("V", v_class)] {
            if c.rung_involution() != Some(z.0) {
                return pre(format!(
                    "{name} + z is not a closed ladder with rung involution z: {c:?}"
                ));
            }
        }
    }
    let slot_set = |ss: &[Slot]| -> BTreeSet<Slot> { ss.iter().copied().collect() };
    let e_set = cay.edges_of_slots(&slot_set(&[z]))?;
    let mut members = Vec::new();
    for p in [u, v] {
        let edges = cay.edges_of_slots(&slot_set(&[p[0], p[1], z]))?;
        for (sub, _) in cay.components_of(&edges) {
            let rungs = sub.edges.intersection(&e_set).copied().collect();
            members.push(Member {
                subgraph: sub,
                rungs,
            });
        }
    }
    let (f, steps) = cladder_compose(cay.graph(), &members, &e_set)?;
    let y_sub = Subgraph {
        vertices: group.elements().collect(),
        edges: cay.edges_of_slots(&distinct)?,
    };
    let full = extend_odd_regular(cay.graph(), &y_sub, &f)?;
    ensure_flow(cay.graph(), &full, 3)?;
    Ok((
        full,
        TwoLadderReport {
            u_class,
            v_class,
            members: members.len(),
            steps,
        },
    ))
}
