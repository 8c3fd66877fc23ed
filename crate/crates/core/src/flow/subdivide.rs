use std::collections::{BTreeMap, BTreeSet};

use super::{
    check_input, ensure_flow, Arc, Edge, EdgeId, FlowAssignment, FlowError, MultiGraph, Vertex,
};

/// A walk `vertices[0] -e0- vertices[1] -e1- ...`; closed when the first
/// and last vertices agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubPath {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl SubPath {
    fn oriented(&self, tail: Vertex) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        let forward = self.vertices[0] == tail;
        let n = self.edges.len();
        (0..n).map(move |i| {
            let i = if forward { i } else { n - 1 - i };
            let (a, b) = (self.vertices[i], self.vertices[i + 1]);
            if forward {
                (self.edges[i], a, b)
            } else {
                (self.edges[i], b, a)
            }
        })
    }
}

/// Result of suppressing every degree-2 vertex.
///
/// `core` keeps the original vertex numbering (suppressed vertices become
/// isolated) and numbers its edges `0..`; `paths[e]` is the walk that core
/// edge `e` replaces. Components that are plain cycles have nothing to
/// suppress onto and are listed in `cycles`.
#[derive(Debug, Clone)]
pub struct Suppression {
    pub core: MultiGraph,
    pub paths: BTreeMap<EdgeId, SubPath>,
    pub cycles: Vec<SubPath>,
}

/// Suppresses all degree-2 vertices. Fails if that would create a loop.
pub fn suppress(g: &MultiGraph) -> Result<Suppression, FlowError> {
    let degrees = g.degrees();
    let inc = g.incidence();
    let branch = |v: Vertex| degrees[v] != 2;
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let walk = |start: Vertex, first: Edge, used: &mut BTreeSet<EdgeId>| -> SubPath {
        let mut path = SubPath {
            vertices: vec![start],
            edges: Vec::new(),
        };
        let (mut at, mut e) = (start, first);
        loop {
            used.insert(e.id);
            path.edges.push(e.id);
            at = e.other(at);
            path.vertices.push(at);
            if branch(at) || at == start {
                return path;
            }
            e = *inc[at].iter().find(|x| x.id != e.id).unwrap();
        }
    };
    let mut core_edges = Vec::new();
    let mut paths = BTreeMap::new();
    for b in (0..g.vertex_count()).filter(|&v| branch(v)) {
        for &e in &inc[b] {
            if used.contains(&e.id) {
                continue;
            }
            let path = walk(b, e, &mut used);
            let end = *path.vertices.last().unwrap();
            if end == b {
                return Err(FlowError::SuppressionLoop(b));
            }
            let id = core_edges.len();
            core_edges.push(Edge { id, u: b, v: end });
            paths.insert(id, path);
        }
    }
    let mut cycles = Vec::new();
    for e in g.edges() {
        if !used.contains(&e.id) {
            cycles.push(walk(e.u, *e, &mut used));
        }
    }
    Ok(Suppression {
        core: MultiGraph::new(g.vertex_count(), core_edges)?,
        paths,
        cycles,
    })
}

/// Carries a flow on `g` to a subdivision of it: every edge of the path
/// replacing `e` gets the value of `e`, oriented along the path.
pub fn transfer_across_subdivision(
    g: &MultiGraph,
    f: &FlowAssignment,
    subdivided: &MultiGraph,
    correspondence: &BTreeMap<EdgeId, SubPath>,
) -> Result<FlowAssignment, FlowError> {
    let bad = |s: String| FlowError::InconsistentCorrespondence(s);
    check_input(g, f, i64::MAX)?;
    let mut out = FlowAssignment::new();
    for e in g.edges() {
        let path = correspondence
            .get(&e.id)
            .ok_or_else(|| bad(format!("edge {} has no path", e.id)))?;
        if path.vertices.len() != path.edges.len() + 1 || path.edges.is_empty() {
            return Err(bad(format!("malformed path for edge {}", e.id)));
        }
        let ends = (path.vertices[0], *path.vertices.last().unwrap());
        if ends != (e.u, e.v) && ends != (e.v, e.u) {
            return Err(bad(format!("path for edge {} has the wrong ends", e.id)));
        }
        for (i, &pe) in path.edges.iter().enumerate() {
            let se = subdivided
                .edge(pe)
                .ok_or_else(|| bad(format!("path edge {pe} missing")))?;
            let (a, b) = (path.vertices[i], path.vertices[i + 1]);
            if !((se.u, se.v) == (a, b) || (se.u, se.v) == (b, a)) {
                return Err(bad(format!("path edge {pe} does not join {a} and {b}")));
            }
        }
        let arc = f.get(e.id).unwrap();
        for (pe, tail, head) in path.oriented(arc.tail) {
            if out
                .insert(
                    pe,
                    Arc {
                        tail,
                        head,
                        value: arc.value,
                    },
                )
                .is_some()
            {
                return Err(bad(format!("edge {pe} lies on two paths")));
            }
        }
    }
    if out.len() != subdivided.edge_count() {
        return Err(bad("paths do not cover the subdivision".into()));
    }
    ensure_flow(subdivided, &out, f.max_abs() + 1)?;
    Ok(out)
}

/// Inverse of the transfer: reads each core edge's value off the first edge
/// of its path.
pub fn restrict_to_core(s: &Suppression, f: &FlowAssignment) -> FlowAssignment {
    s.paths
        .iter()
        .map(|(&id, path)| {
            let first = path.edges[0];
            let value = f
                .value_along(first, path.vertices[0])
                .expect("flow covers the path");
            (
                id,
                Arc {
                    tail: path.vertices[0],
                    head: *path.vertices.last().unwrap(),
                    value,
                },
            )
        })
        .collect()
}
