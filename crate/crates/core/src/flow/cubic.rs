use std::collections::BTreeSet;

use super::{
    check_input, ensure_flow, even_2_flow, z3_oracle, z3_to_integer, Arc, Edge, EdgeId,
    FlowAssignment, FlowError, MultiGraph, Subgraph, Vertex,
};

/// Nowhere-zero 3-flow of a cubic bipartite graph.
///
/// `second_side[v]` gives the bipartition. A perfect matching is found by
/// augmenting paths; every edge is oriented from the first side to the
/// second, matching edges carry -2 and the rest 1. Isolated vertices are
/// ignored, so a cubic subgraph restricted from a larger host is accepted.
pub fn cubic_bipartite_3flow(
    g: &MultiGraph,
    second_side: &[bool],
) -> Result<FlowAssignment, FlowError> {
    let degrees = g.degrees();
    if let Some(v) = (0..g.vertex_count()).find(|&v| degrees[v] != 0 && degrees[v] != 3) {
        return Err(FlowError::NotCubic {
            vertex: v,
            degree: degrees[v],
        });
    }
    if second_side.len() != g.vertex_count() {
        return Err(FlowError::InvalidGraph(
            "bipartition has the wrong length".into(),
        ));
    }
    if let Some(e) = g
        .edges()
        .iter()
        .find(|e| second_side[e.u] == second_side[e.v])
    {
        return Err(FlowError::InvalidBipartition(e.id));
    }
    let inc = g.incidence();
    let mut mate_of_b: Vec<Option<(EdgeId, Vertex)>> = vec![None; g.vertex_count()];

    fn augment(
        a: Vertex,
        inc: &[Vec<Edge>],
        seen: &mut [bool],
        mate_of_b: &mut [Option<(EdgeId, Vertex)>],
    ) -> bool {
        for e in &inc[a] {
            let b = e.other(a);
            if seen[b] {
                continue;
            }
            seen[b] = true;
            let free = match mate_of_b[b] {
                None => true,
                Some((_, a2)) => augment(a2, inc, seen, mate_of_b),
            };
            if free {
                mate_of_b[b] = Some((e.id, a));
                return true;
            }
        }
        false
    }

    for a in (0..g.vertex_count()).filter(|&v| !second_side[v] && degrees[v] == 3) {
        let mut seen = vec![false; g.vertex_count()];
        if !augment(a, &inc, &mut seen, &mut mate_of_b) {
            return Err(FlowError::NoPerfectMatching);
        }
    }
    let matching: BTreeSet<EdgeId> = mate_of_b.iter().flatten().map(|&(e, _)| e).collect();
    let f: FlowAssignment = g
        .edges()
        .iter()
        .map(|e| {
            let (tail, head) = if second_side[e.u] {
                (e.v, e.u)
            } else {
                (e.u, e.v)
            };
            let value = if matching.contains(&e.id) { -2 } else { 1 };
            (e.id, Arc { tail, head, value })
        })
        .collect();
    ensure_flow(g, &f, 3)?;
    Ok(f)
}

/// Outcome of the structural search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowSearch {
    Found(FlowAssignment),
    /// Provably no nowhere-zero 3-flow exists.
    Impossible,
    /// The reduced graph is neither even nor cubic.
    Undecided,
}

struct Working {
    u: Vertex,
    v: Vertex,
    /// original edges, oriented along `u -> v`
    chain: Vec<(EdgeId, Vertex, Vertex)>,
    alive: bool,
}

fn reversed(chain: &[(EdgeId, Vertex, Vertex)]) -> Vec<(EdgeId, Vertex, Vertex)> {
    chain.iter().rev().map(|&(e, a, b)| (e, b, a)).collect()
}

/// Decides 3-flow existence by reduction, without search.
///
/// Degree-2 vertices are suppressed and closed trails left as loops are
/// peeled off (each carries value 1 around itself). A remaining vertex of
/// degree 1 rules a flow out. The reduced graph then gets a 2-flow if all
/// degrees are even, the matching construction if it is cubic and
/// bipartite, and is impossible if it is cubic and not bipartite. Values
/// are carried back along the suppressed paths.
pub fn structural_3flow(g: &MultiGraph) -> Result<FlowSearch, FlowError> {
    let mut work: Vec<Working> = g
        .edges()
        .iter()
        .map(|e| Working {
            u: e.u,
            v: e.v,
            chain: vec![(e.id, e.u, e.v)],
            alive: true,
        })
        .collect();
    let mut flow = FlowAssignment::new();
    let n = g.vertex_count();
    loop {
        let mut degree = vec![0usize; n];
        for w in work.iter().filter(|w| w.alive) {
            degree[w.u] += 1;
            degree[w.v] += 1;
        }
        if degree.contains(&1) {
            return Ok(FlowSearch::Impossible);
        }
        let mut changed = false;
        for w in work.iter_mut().filter(|w| w.alive && w.u == w.v) {
            for &(e, a, b) in &w.chain {
                flow.insert(
                    e,
                    Arc {
                        tail: a,
                        head: b,
                        value: 1,
                    },
                );
            }
            w.alive = false;
            changed = true;
        }
        if changed {
            continue;
        }
        let Some(v) = (0..n).find(|&v| degree[v] == 2) else {
            break;
        };
        let ends: Vec<usize> = (0..work.len())
            .filter(|&i| work[i].alive && (work[i].u == v || work[i].v == v))
            .collect();
        let (i, j) = (ends[0], ends[1]);
        let into_v = if work[i].v == v {
            work[i].chain.clone()
        } else {
            reversed(&work[i].chain)
        };
        let from_v = if work[j].u == v {
            work[j].chain.clone()
        } else {
            reversed(&work[j].chain)
        };
        let x = work[i].other_end(v);
        let y = work[j].other_end(v);
        work[i].alive = false;
        work[j].alive = false;
        let mut chain = into_v;
        chain.extend(from_v);
        work.push(Working {
            u: x,
            v: y,
            chain,
            alive: true,
        });
    }
    let alive: Vec<usize> = (0..work.len()).filter(|&i| work[i].alive).collect();
    let core = MultiGraph::new(
        n,
        alive
            .iter()
            .map(|&i| Edge {
                id: i,
                u: work[i].u,
                v: work[i].v,
            })
            .collect(),
    )?;
    let degrees = core.degrees();
    let core_flow = if degrees.iter().all(|d| d % 2 == 0) {
        even_2_flow(&core)?
    } else if degrees.iter().all(|&d| d == 0 || d == 3) {
        match core.bipartition() {
            Some(side) => cubic_bipartite_3flow(&core, &side)?,
            None => return Ok(FlowSearch::Impossible),
        }
    } else {
        return Ok(FlowSearch::Undecided);
    };
    for (i, arc) in core_flow.iter() {
        let forward = arc.tail == work[i].u;
        for &(e, a, b) in &work[i].chain {
            let (tail, head) = if forward { (a, b) } else { (b, a) };
            flow.insert(
                e,
                Arc {
                    tail,
                    head,
                    value: arc.value,
                },
            );
        }
    }
    ensure_flow(g, &flow, 3)?;
    Ok(FlowSearch::Found(flow))
}

impl Working {
    fn other_end(&self, v: Vertex) -> Vertex {
        if self.u == v {
            self.v
        } else {
            self.u
        }
    }
}

/// Structural search first, then the exhaustive Z3 oracle (bounded by
/// `rank_cap`) when the structure alone does not decide.
pub fn find_3flow(g: &MultiGraph, rank_cap: usize) -> Result<Option<FlowAssignment>, FlowError> {
    match structural_3flow(g)? {
        FlowSearch::Found(f) => Ok(Some(f)),
        FlowSearch::Impossible => Ok(None),
        FlowSearch::Undecided => match z3_oracle(g, rank_cap)? {
            Some(z) => Ok(Some(z3_to_integer(g, &z)?)),
            None => Ok(None),
        },
    }
}

/// Extends a 3-flow on a spanning odd-regular subgraph to an odd-regular
/// host: the complement has even degrees, gets a 2-flow, and the two parts
/// are edge-disjoint.
pub fn extend_odd_regular(
    host: &MultiGraph,
    sub: &Subgraph,
    f: &FlowAssignment,
) -> Result<FlowAssignment, FlowError> {
    let regular_degree = |g: &MultiGraph| -> Result<usize, FlowError> {
        let d = g.degrees();
        match d.first() {
            Some(&r) if d.iter().all(|&x| x == r) && r % 2 == 1 => Ok(r),
            _ => Err(FlowError::NotOddRegular(format!("degrees {d:?}"))),
        }
    };
    sub.check(host)?;
    if sub.vertices.len() != host.vertex_count() {
        return Err(FlowError::NotOddRegular("subgraph is not spanning".into()));
    }
    regular_degree(host)?;
    let inner = host.restrict(sub);
    regular_degree(&inner)?;
    check_input(&inner, f, 3)?;
    let rest: BTreeSet<EdgeId> = host.edge_ids().filter(|e| !sub.edges.contains(e)).collect();
    let two = even_2_flow(&host.restrict_edges(&rest))?;
    let out = f.disjoint_union(&two);
    ensure_flow(host, &out, 3)?;
    Ok(out)
}
