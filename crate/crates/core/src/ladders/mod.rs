//! Closed and generalized closed ladders: builders, a recognizer, explicit
//! flows and the composition engines that glue ladders together.
//!
//! Canonical numbering of the closed ladders:
//! - `CL_n`: vertex `(i, s)` is `s*n + i`; rail edges `i` and `n + i` run
//!   `(i, s) -> (i+1, s)`, rung `2n + i` joins `(i, 0)` and `(i, 1)`.
//! - `M_n`: vertices `0..2n`; rail edge `i` joins `i` and `i+1 mod 2n`, rung
//!   `2n + i` joins `i` and `i + n`.
//! - `L_n`: vertex `(i, s)` is `s*n + i`; rail edges `i` and `(n-1) + i`,
//!   rungs `2(n-1) + i`.

mod classify;
mod compose;

pub(crate) use classify::classify_preferring;
pub use classify::{classify_cubic, CubicCase, CubicClass};
pub(crate) use compose::two_ladder_core;
pub use compose::{
    cladder_compose, cup_compose, two_ladder_3flow, CladderStep, Member, SlotPair, TwoLadderReport,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::CayleyError;
use crate::flow::{
    ensure_flow, even_2_flow, find_3flow, transfer_across_subdivision, Arc, Edge, EdgeId,
    FlowAssignment, FlowError, FlowSearch, MultiGraph, SubPath, Subgraph, Vertex,
};

/// Cycle-rank cap for the oracle fallback on small non-ladder pieces.
pub(crate) const MEMBER_RANK_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("invalid ladder parameters: {0}")]
    InvalidParameter(String),
    #[error("not a generalized closed ladder: {0}")]
    NotALadder(String),
    #[error("edge {0} is not a rung")]
    NotARung(EdgeId),
    #[error("outside the rung-deletion dichotomy: {0}")]
    OutOfScope(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal contradiction: {0}")]
    Contradiction(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LadderKind {
    Path {
        n: usize,
    },
    Circular {
        n: usize,
    },
    Mobius {
        n: usize,
    },
    /// Circular ladder with no rung left: `C_m + C_n`.
    TwoCycles {
        m: usize,
        n: usize,
    },
    /// Circular ladder with one rung: two cycles joined by an edge.
    BridgedCycles {
        m: usize,
        n: usize,
    },
    /// Mobius ladder with no rung left.
    Cycle {
        n: usize,
    },
    /// Mobius ladder with one rung: a cycle plus a chord.
    ChordedCycle {
        n: usize,
    },
}

impl LadderKind {
    /// Whether ladders of this kind admit a nowhere-zero 3-flow.
    pub fn admits_flow(self) -> bool {
        match self {
            LadderKind::Path { n } => n >= 2,
            LadderKind::Circular { n } => n % 2 == 0,
            LadderKind::Mobius { n } => n % 2 == 1,
            LadderKind::TwoCycles { .. }
            | LadderKind::Cycle { .. }
            | LadderKind::ChordedCycle { .. } => true,
            LadderKind::BridgedCycles { .. } => false,
        }
    }

    pub fn rung_count(self) -> usize {
        match self {
            LadderKind::Path { n } | LadderKind::Circular { n } | LadderKind::Mobius { n } => n,
            LadderKind::TwoCycles { .. } | LadderKind::Cycle { .. } => 0,
            LadderKind::BridgedCycles { .. } | LadderKind::ChordedCycle { .. } => 1,
        }
    }
}

/// A generalized ladder inside some host graph.
///
/// For circular, Mobius and path ladders `corner[i]` is the host vertex
/// playing canonical vertex `i`, and `paths[e]` is the host walk replacing
/// canonical edge `e` (a single edge for rungs). Degenerate kinds leave
/// both empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedLadder {
    pub subgraph: Subgraph,
    pub kind: LadderKind,
    pub rungs: BTreeSet<EdgeId>,
    pub rails: Vec<Vec<EdgeId>>,
    pub corner: Vec<Vertex>,
    pub paths: BTreeMap<EdgeId, SubPath>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderDescriptor {
    #[serde(flatten)]
    pub kind: LadderKind,
    pub rungs: Vec<EdgeId>,
}

impl GeneralizedLadder {
    pub fn descriptor(&self) -> LadderDescriptor {
        LadderDescriptor {
            kind: self.kind,
            rungs: self.rungs.iter().copied().collect(),
        }
    }
}

/// Vertex count, edges in id order, index of the first rung.
type CanonicalLayout = (usize, Vec<(Vertex, Vertex)>, usize);

fn canonical_pairs(kind: LadderKind) -> Result<CanonicalLayout, LadderError> {
    let bad = |s: &str| Err(LadderError::InvalidParameter(format!("{kind:?}: {s}")));
    Ok(match kind {
        LadderKind::Circular { n } => {
            if n < 2 {
                return bad("needs at least two rungs");
            }
            let mut p: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            p.extend((0..n).map(|i| (n + i, n + (i + 1) % n)));
            p.extend((0..n).map(|i| (i, n + i)));
            (2 * n, p, 2 * n)
        }
        LadderKind::Mobius { n } => {
            if n < 2 {
                return bad("needs at least two rungs");
            }
            let mut p: Vec<_> = (0..2 * n).map(|i| (i, (i + 1) % (2 * n))).collect();
            p.extend((0..n).map(|i| (i, i + n)));
            (2 * n, p, 2 * n)
        }
        LadderKind::Path { n } => {
            if n < 1 {
                return bad("needs at least one rung");
            }
            let mut p: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            p.extend((0..n - 1).map(|i| (n + i, n + i + 1)));
            p.extend((0..n).map(|i| (i, n + i)));
            (2 * n, p, 2 * (n - 1))
        }
        LadderKind::TwoCycles { m, n } | LadderKind::BridgedCycles { m, n } => {
            if m < 2 || n < 2 {
                return bad("cycles need length at least two");
            }
            let mut p: Vec<_> = (0..m).map(|i| (i, (i + 1) % m)).collect();
            p.extend((0..n).map(|j| (m + j, m + (j + 1) % n)));
            let first_rung = p.len();
            if matches!(kind, LadderKind::BridgedCycles { .. }) {
                p.push((0, m));
            }
            (m + n, p, first_rung)
        }
        LadderKind::Cycle { n } | LadderKind::ChordedCycle { n } => {
            if n < 2 {
                return bad("cycle needs length at least two");
            }
            let mut p: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let first_rung = p.len();
            if matches!(kind, LadderKind::ChordedCycle { .. }) {
                p.push((0, n / 2));
            }
            (n, p, first_rung)
        }
    })
}

/// Builds a ladder in canonical numbering.
pub fn build_ladder(kind: LadderKind) -> Result<(MultiGraph, GeneralizedLadder), LadderError> {
    let (vc, pairs, first_rung) = canonical_pairs(kind)?;
    let graph = MultiGraph::from_pairs(vc, &pairs)?;
    let rungs: BTreeSet<EdgeId> = (first_rung..pairs.len()).collect();
    let rails = match kind {
        LadderKind::Circular { n } => vec![(0..n).collect(), (n..2 * n).collect()],
        LadderKind::Mobius { n } => vec![(0..2 * n).collect()],
        LadderKind::Path { n } => vec![(0..n - 1).collect(), (n - 1..2 * (n - 1)).collect()],
        LadderKind::TwoCycles { m, n } | LadderKind::BridgedCycles { m, n } => {
            vec![(0..m).collect(), (m..m + n).collect()]
        }
        LadderKind::Cycle { n } | LadderKind::ChordedCycle { n } => vec![(0..n).collect()],
    };
    let templated = matches!(
        kind,
        LadderKind::Circular { .. } | LadderKind::Mobius { .. } | LadderKind::Path { .. }
    );
    let (corner, paths) = if templated {
        (
            (0..vc).collect(),
            graph
                .edges()
                .iter()
                .map(|e| {
                    (
                        e.id,
                        SubPath {
                            vertices: vec![e.u, e.v],
                            edges: vec![e.id],
                        },
                    )
                })
                .collect(),
        )
    } else {
        (Vec::new(), BTreeMap::new())
    };
    let lad = GeneralizedLadder {
        subgraph: graph.as_subgraph(),
        kind,
        rungs,
        rails,
        corner,
        paths,
    };
    Ok((graph, lad))
}

/// Explicit flow on the canonical ladder of a kind that admits one.
///
/// Closed ladders: a 2-colouring in which rails alternate colours and rungs
/// cross, every edge oriented from colour 0 to colour 1, rails valued 1
/// and rungs -2. `L_n`: the square faces circulate alternately +1 and -1.
fn template_flow(kind: LadderKind) -> Option<FlowAssignment> {
    let (_, pairs, first_rung) = canonical_pairs(kind).ok()?;
    let bipartite = |colour: &dyn Fn(Vertex) -> usize| -> FlowAssignment {
        pairs
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| {
                let (tail, head) = if colour(a) == 0 { (a, b) } else { (b, a) };
                let value = if id >= first_rung { -2 } else { 1 };
                (id, Arc { tail, head, value })
            })
            .collect()
    };
    match kind {
        LadderKind::Circular { n } if n % 2 == 0 => Some(bipartite(&|v| (v % n + v / n) % 2)),
        LadderKind::Mobius { n } if n % 2 == 1 => Some(bipartite(&|v| v % 2)),
        LadderKind::Path { n } if n >= 2 => {
            // face i: (i,0) -> (i+1,0) -> (i+1,1) -> (i,1) -> (i,0), weight (-1)^i
            let w = |i: usize| if i.is_multiple_of(2) { 1 } else { -1 };
            let mut f = FlowAssignment::new();
            for i in 0..n - 1 {
                f.insert(
                    i,
                    Arc {
                        tail: i,
                        head: i + 1,
                        value: w(i),
                    },
                );
                f.insert(
                    n - 1 + i,
                    Arc {
                        tail: n + i + 1,
                        head: n + i,
                        value: w(i),
                    },
                );
            }
            for i in 0..n {
                let before = if i > 0 { w(i - 1) } else { 0 };
                let after = if i + 1 < n { w(i) } else { 0 };
                f.insert(
                    first_rung + i,
                    Arc {
                        tail: i,
                        head: n + i,
                        value: before - after,
                    },
                );
            }
            Some(f)
        }
        _ => None,
    }
}

/// Recognizes a subgraph with a designated rung set as a generalized
/// closed ladder (or one of its 0/1-rung degenerations).
pub fn recognize_ladder(
    host: &MultiGraph,
    sub: &Subgraph,
    rungs: &BTreeSet<EdgeId>,
) -> Result<GeneralizedLadder, LadderError> {
    let not = |s: String| LadderError::NotALadder(s);
    sub.check(host)?;
    if let Some(r) = rungs.iter().find(|r| !sub.edges.contains(r)) {
        return Err(not(format!("rung {r} is not in the subgraph")));
    }
    let mut rail_inc: BTreeMap<Vertex, Vec<Edge>> =
        sub.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &id in &sub.edges {
        if rungs.contains(&id) {
            continue;
        }
        let e = *host.edge(id).unwrap();
        rail_inc.get_mut(&e.u).unwrap().push(e);
        rail_inc.get_mut(&e.v).unwrap().push(e);
    }
    if let Some((v, inc)) = rail_inc.iter().find(|(_, inc)| inc.len() != 2) {
        return Err(not(format!("vertex {v} has rail degree {}", inc.len())));
    }
    let mut partner: BTreeMap<Vertex, (Vertex, EdgeId)> = BTreeMap::new();
    for &r in rungs {
        let e = host.edge(r).unwrap();
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if partner.insert(a, (b, r)).is_some() {
                return Err(not(format!("vertex {a} lies on two rungs")));
            }
        }
    }
    // rail cycles as (vertex, edge leaving it) sequences
    let walk = |start: Vertex, first: Edge| -> Vec<(Vertex, EdgeId)> {
        let mut seq = Vec::new();
        let (mut at, mut e) = (start, first);
        loop {
            seq.push((at, e.id));
            at = e.other(at);
            if at == start {
                return seq;
            }
            e = *rail_inc[&at].iter().find(|x| x.id != e.id).unwrap();
        }
    };
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let mut cycles: Vec<Vec<(Vertex, EdgeId)>> = Vec::new();
    let mut starts: Vec<Vertex> = partner.keys().copied().collect();
    starts.extend(sub.vertices.iter().copied());
    for s in starts {
        if seen.contains(&s) {
            continue;
        }
        let c = walk(s, rail_inc[&s][0]);
        seen.extend(c.iter().map(|&(v, _)| v));
        cycles.push(c);
    }
    let n = rungs.len();
    let rails: Vec<Vec<EdgeId>> = cycles
        .iter()
        .map(|c| c.iter().map(|&(_, e)| e).collect())
        .collect();
    let segments = |seq: &[(Vertex, EdgeId)]| -> Vec<SubPath> {
        let pos: Vec<usize> = (0..seq.len())
            .filter(|&i| partner.contains_key(&seq[i].0))
            .collect();
        (0..pos.len())
            .map(|k| {
                let (a, b) = (
                    pos[k],
                    if k + 1 < pos.len() {
                        pos[k + 1]
                    } else {
                        seq.len()
                    },
                );
                let mut vertices: Vec<Vertex> = (a..b).map(|i| seq[i].0).collect();
                vertices.push(seq[b % seq.len()].0);
                SubPath {
                    vertices,
                    edges: (a..b).map(|i| seq[i].1).collect(),
                }
            })
            .collect()
    };
    let corners_of = |seq: &[(Vertex, EdgeId)]| -> Vec<Vertex> {
        seq.iter()
            .map(|&(v, _)| v)
            .filter(|v| partner.contains_key(v))
            .collect()
    };
    let rung_path = |a: Vertex| -> SubPath {
        let (b, r) = partner[&a];
        SubPath {
            vertices: vec![a, b],
            edges: vec![r],
        }
    };
    let degenerate = |kind: LadderKind| GeneralizedLadder {
        subgraph: sub.clone(),
        kind,
        rungs: rungs.clone(),
        rails: rails.clone(),
        corner: Vec::new(),
        paths: BTreeMap::new(),
    };
    match cycles.len() {
        1 => {
            let len = cycles[0].len();
            match n {
                0 => Ok(degenerate(LadderKind::Cycle { n: len })),
                1 => Ok(degenerate(LadderKind::ChordedCycle { n: len })),
                _ => {
                    let c = corners_of(&cycles[0]);
                    if (0..2 * n).any(|i| partner[&c[i]].0 != c[(i + n) % (2 * n)]) {
                        return Err(not("rungs do not join antipodal corners".into()));
                    }
                    let mut paths: BTreeMap<EdgeId, SubPath> =
                        segments(&cycles[0]).into_iter().enumerate().collect();
                    for i in 0..n {
                        paths.insert(2 * n + i, rung_path(c[i]));
                    }
                    Ok(GeneralizedLadder {
                        subgraph: sub.clone(),
                        kind: LadderKind::Mobius { n },
                        rungs: rungs.clone(),
                        rails,
                        corner: c,
                        paths,
                    })
                }
            }
        }
        2 => {
            let (la, lb) = (cycles[0].len(), cycles[1].len());
            let in_a: BTreeSet<Vertex> = cycles[0].iter().map(|&(v, _)| v).collect();
            if partner
                .iter()
                .any(|(a, (b, _))| in_a.contains(a) == in_a.contains(b))
            {
                return Err(not("a rung joins a rail cycle to itself".into()));
            }
            match n {
                0 => Ok(degenerate(LadderKind::TwoCycles { m: la, n: lb })),
                1 => Ok(degenerate(LadderKind::BridgedCycles { m: la, n: lb })),
                _ => {
                    let a = corners_of(&cycles[0]);
                    let b0 = partner[&a[0]].0;
                    let want: Vec<Vertex> = a.iter().map(|v| partner[v].0).collect();
                    let second = rail_inc[&b0]
                        .iter()
                        .map(|&e| walk(b0, e))
                        .find(|seq| corners_of(seq) == want)
                        .ok_or_else(|| not("rungs cross between the rail cycles".into()))?;
                    let mut paths: BTreeMap<EdgeId, SubPath> =
                        segments(&cycles[0]).into_iter().enumerate().collect();
                    for (i, p) in segments(&second).into_iter().enumerate() {
                        paths.insert(n + i, p);
                    }
                    for (i, &v) in a.iter().enumerate() {
                        paths.insert(2 * n + i, rung_path(v));
                    }
                    let mut corner = a;
                    corner.extend(want);
                    Ok(GeneralizedLadder {
                        subgraph: sub.clone(),
                        kind: LadderKind::Circular { n },
                        rungs: rungs.clone(),
                        rails,
                        corner,
                        paths,
                    })
                }
            }
        }
        k => Err(not(format!("{k} rail components"))),
    }
}

/// Recognizes a subgraph as the path ladder `L_n`: the non-rung edges form
/// two paths on `n` vertices each, and the rungs join them position by
/// position (in either direction).
pub fn recognize_path_ladder(
    host: &MultiGraph,
    sub: &Subgraph,
    rungs: &BTreeSet<EdgeId>,
) -> Result<GeneralizedLadder, LadderError> {
    let not = |s: &str| LadderError::NotALadder(s.to_string());
    sub.check(host)?;
    if rungs.iter().any(|r| !sub.edges.contains(r)) {
        return Err(not("rung outside the subgraph"));
    }
    let rails: BTreeSet<EdgeId> = sub.edges.difference(rungs).copied().collect();
    let mut rail_inc: BTreeMap<Vertex, Vec<Edge>> =
        sub.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &id in &rails {
        let e = *host.edge(id).unwrap();
        rail_inc.get_mut(&e.u).unwrap().push(e);
        rail_inc.get_mut(&e.v).unwrap().push(e);
    }
    let mut partner: BTreeMap<Vertex, (Vertex, EdgeId)> = BTreeMap::new();
    for &r in rungs {
        let e = host.edge(r).unwrap();
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if partner.insert(a, (b, r)).is_some() {
                return Err(not("vertex on two rungs"));
            }
        }
    }
    if partner.len() != sub.vertices.len() || rail_inc.values().any(|inc| inc.len() > 2) {
        return Err(not("rung or rail degrees do not fit a path ladder"));
    }
    // walk a rail path from an end
    let walk = |start: Vertex| -> (Vec<Vertex>, Vec<EdgeId>) {
        let (mut vs, mut es) = (vec![start], Vec::new());
        let mut prev: Option<EdgeId> = None;
        let mut at = start;
        while let Some(e) = rail_inc[&at].iter().find(|e| Some(e.id) != prev) {
            es.push(e.id);
            prev = Some(e.id);
            at = e.other(at);
            vs.push(at);
        }
        (vs, es)
    };
    let ends: Vec<Vertex> = rail_inc
        .iter()
        .filter(|(_, inc)| inc.len() < 2)
        .map(|(&v, _)| v)
        .collect();
    let (va, ea) = walk(*ends.first().ok_or_else(|| not("rails contain a cycle"))?);
    let n = va.len();
    if 2 * n != sub.vertices.len() {
        return Err(not("rails are not two paths of equal length"));
    }
    let w0 = partner[&va[0]].0;
    let (vb, eb) = walk(w0);
    let aligned = vb.len() == n && (0..n).all(|i| partner[&va[i]].0 == vb[i]);
    if !aligned {
        return Err(not("rungs do not join the rails position by position"));
    }
    let mut paths = BTreeMap::new();
    let single = |vertices: Vec<Vertex>, e: EdgeId| SubPath {
        vertices,
        edges: vec![e],
    };
    for i in 0..n - 1 {
        paths.insert(i, single(vec![va[i], va[i + 1]], ea[i]));
        paths.insert(n - 1 + i, single(vec![vb[i], vb[i + 1]], eb[i]));
    }
    for i in 0..n {
        paths.insert(
            2 * (n - 1) + i,
            single(vec![va[i], vb[i]], partner[&va[i]].1),
        );
    }
    let mut corner = va;
    corner.extend(vb);
    Ok(GeneralizedLadder {
        subgraph: sub.clone(),
        kind: LadderKind::Path { n },
        rungs: rungs.clone(),
        rails: vec![ea, eb],
        corner,
        paths,
    })
}

/// Explicit nowhere-zero 3-flow of a generalized ladder, or `None` when its
/// kind admits none.
///
/// Closed ladders and `L_n` use the canonical template carried along the
/// rail subdivisions; cycle unions get a 2-flow and a chorded cycle is a
/// subdivided theta graph.
pub fn ladder_flow(
    host: &MultiGraph,
    lad: &GeneralizedLadder,
) -> Result<Option<FlowAssignment>, LadderError> {
    if !lad.kind.admits_flow() {
        return Ok(None);
    }
    let graph = host.restrict(&lad.subgraph);
    let f = match lad.kind {
        LadderKind::Circular { .. } | LadderKind::Mobius { .. } | LadderKind::Path { .. } => {
            let template = template_flow(lad.kind).expect("kind admits a flow");
            let (_, pairs, _) = canonical_pairs(lad.kind)?;
            let core_edges = pairs
                .iter()
                .enumerate()
                .map(|(id, &(a, b))| Edge {
                    id,
                    u: lad.corner[a],
                    v: lad.corner[b],
                })
                .collect();
            let core = MultiGraph::new(host.vertex_count(), core_edges)?;
            let relabelled: FlowAssignment = template
                .iter()
                .map(|(id, a)| {
                    (
                        id,
                        Arc {
                            tail: lad.corner[a.tail],
                            head: lad.corner[a.head],
                            value: a.value,
                        },
                    )
                })
                .collect();
            transfer_across_subdivision(&core, &relabelled, &graph, &lad.paths)?
        }
        LadderKind::TwoCycles { .. } | LadderKind::Cycle { .. } => even_2_flow(&graph)?,
        LadderKind::ChordedCycle { .. } => match crate::flow::structural_3flow(&graph)? {
            FlowSearch::Found(f) => f,
            other => {
                return Err(LadderError::Contradiction(format!(
                    "chorded cycle without a flow: {other:?}"
                )));
            }
        },
        LadderKind::BridgedCycles { .. } => unreachable!("no flow by kind"),
    };
    ensure_flow(&graph, &f, 3)?;
    Ok(Some(f))
}

/// Which of `lad` and `lad - e` carries a flow, together with that flow.
#[derive(Debug, Clone)]
pub struct RungResolution {
    /// `true` when the whole ladder was kept.
    pub kept_whole: bool,
    pub ladder: GeneralizedLadder,
    pub flow: FlowAssignment,
}

/// Exactly one of a ladder and the ladder minus a rung admits a flow (for
/// circular ladders with a rung and Mobius ladders with two); returns it.
pub fn resolve_rung_deletion(
    host: &MultiGraph,
    lad: &GeneralizedLadder,
    e: EdgeId,
) -> Result<RungResolution, LadderError> {
    if !lad.rungs.contains(&e) {
        return Err(LadderError::NotARung(e));
    }
    match lad.kind {
        LadderKind::Circular { .. } | LadderKind::BridgedCycles { .. } => {}
        LadderKind::Mobius { n } if n >= 2 => {}
        other => return Err(LadderError::OutOfScope(format!("{other:?}"))),
    }
    let minus = without_rung(host, lad, e)?;
    let whole = ladder_flow(host, lad)?;
    let reduced = ladder_flow(host, &minus)?;
    match (whole, reduced) {
        (Some(flow), None) => Ok(RungResolution {
            kept_whole: true,
            ladder: lad.clone(),
            flow,
        }),
        (None, Some(flow)) => Ok(RungResolution {
            kept_whole: false,
            ladder: minus,
            flow,
        }),
        (w, r) => Err(LadderError::Contradiction(format!(
            "rung dichotomy fails for {:?}: whole {}, minus {}",
            lad.kind,
            w.is_some(),
            r.is_some()
        ))),
    }
}

/// The ladder with one rung deleted, re-recognized.
pub fn without_rung(
    host: &MultiGraph,
    lad: &GeneralizedLadder,
    e: EdgeId,
) -> Result<GeneralizedLadder, LadderError> {
    let mut sub = lad.subgraph.clone();
    sub.edges.remove(&e);
    let mut rungs = lad.rungs.clone();
    rungs.remove(&e);
    recognize_ladder(host, &sub, &rungs)
}

/// Replaces rail edges by longer paths: `extra[e]` new vertices on rail
/// edge `e`. Returns the new graph (new vertices appended, edges renumbered
/// in order), its ladder and the edge-to-path correspondence.
pub fn subdivide_rails(
    graph: &MultiGraph,
    lad: &GeneralizedLadder,
    extra: &BTreeMap<EdgeId, usize>,
) -> Result<(MultiGraph, GeneralizedLadder, BTreeMap<EdgeId, SubPath>), LadderError> {
    let mut next_vertex = graph.vertex_count();
    let mut edges = Vec::new();
    let mut corr = BTreeMap::new();
    let mut rungs = BTreeSet::new();
    for e in graph.edges() {
        let k = extra.get(&e.id).copied().unwrap_or(0);
        if k > 0 && lad.rungs.contains(&e.id) {
            return Err(LadderError::InvalidParameter(format!(
                "rung {} cannot be subdivided",
                e.id
            )));
        }
        let mut vertices = vec![e.u];
        for _ in 0..k {
            vertices.push(next_vertex);
            next_vertex += 1;
        }
        vertices.push(e.v);
        let mut ids = Vec::new();
        for w in vertices.windows(2) {
            let id = edges.len();
            edges.push(Edge {
                id,
                u: w[0],
                v: w[1],
            });
            ids.push(id);
        }
        if lad.rungs.contains(&e.id) {
            rungs.insert(ids[0]);
        }
        corr.insert(
            e.id,
            SubPath {
                vertices,
                edges: ids,
            },
        );
    }
    let new_graph = MultiGraph::new(next_vertex, edges)?;
    let sub = Subgraph {
        vertices: (0..next_vertex).collect(),
        edges: new_graph.edge_ids().collect(),
    };
    let new_lad = match lad.kind {
        LadderKind::Path { .. } => {
            return Err(LadderError::InvalidParameter(
                "path ladders are not subdivided".into(),
            ));
        }
        _ => recognize_ladder(&new_graph, &sub, &rungs)?,
    };
    Ok((new_graph, new_lad, corr))
}

/// Flow for an arbitrary piece with designated rungs: the ladder route when
/// the piece is recognized, otherwise structural search with the oracle as
/// a bounded fallback.
pub(crate) fn piece_flow(
    host: &MultiGraph,
    sub: &Subgraph,
    rungs: &BTreeSet<EdgeId>,
) -> Result<Option<FlowAssignment>, LadderError> {
    match recognize_ladder(host, sub, rungs) {
        Ok(lad) => ladder_flow(host, &lad),
        Err(LadderError::NotALadder(_)) => Ok(find_3flow(&host.restrict(sub), MEMBER_RANK_CAP)?),
        Err(e) => Err(e),
    }
}
