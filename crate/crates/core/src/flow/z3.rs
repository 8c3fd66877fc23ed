use std::collections::{BTreeMap, VecDeque};

use super::{ensure_flow, verify_flow, Arc, EdgeId, FlowAssignment, FlowError, MultiGraph, Vertex};

/// Orientation plus a residue in `{1, 2}` for each edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Z3Flow {
    arcs: BTreeMap<EdgeId, Arc>,
}

impl Z3Flow {
    /// Reduces an integer assignment mod 3 (residues kept in `0..3`).
    pub fn from_integer(f: &FlowAssignment) -> Z3Flow {
        Z3Flow {
            arcs: f
                .iter()
                .map(|(e, a)| {
                    (
                        e,
                        Arc {
                            value: a.value.rem_euclid(3),
                            ..*a
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn get(&self, edge: EdgeId) -> Option<&Arc> {
        self.arcs.get(&edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Arc)> {
        self.arcs.iter().map(|(&e, a)| (e, a))
    }

    /// Checks coverage, residues in `{1, 2}` and conservation mod 3.
    pub fn validate(&self, g: &MultiGraph) -> Result<(), FlowError> {
        let bad = |s: String| FlowError::NotZ3Flow(s);
        if self.arcs.len() != g.edge_count() {
            return Err(bad("coverage mismatch".into()));
        }
        let mut net = vec![0i64; g.vertex_count()];
        for e in g.edges() {
            let a = self
                .arcs
                .get(&e.id)
                .ok_or_else(|| bad(format!("edge {} missing", e.id)))?;
            if !((a.tail, a.head) == (e.u, e.v) || (a.tail, a.head) == (e.v, e.u)) {
                return Err(FlowError::EndpointMismatch(e.id));
            }
            if a.value != 1 && a.value != 2 {
                return Err(bad(format!("edge {} has residue {}", e.id, a.value)));
            }
            net[a.tail] += a.value;
            net[a.head] -= a.value;
        }
        match net.iter().position(|n| n.rem_euclid(3) != 0) {
            Some(v) => Err(bad(format!("vertex {v} does not conserve mod 3"))),
            None => Ok(()),
        }
    }
}

/// Exhaustive search for a nowhere-zero Z3-flow.
///
/// Residues are enumerated over the co-tree edges of a spanning forest;
/// tree edges are forced bottom-up in post-order, and a forced zero prunes
/// the branch. Refuses graphs whose cycle rank exceeds `rank_cap`.
pub fn z3_oracle(g: &MultiGraph, rank_cap: usize) -> Result<Option<Z3Flow>, FlowError> {
    let rank = g.cycle_rank();
    if rank > rank_cap {
        return Err(FlowError::RankCapExceeded {
            rank,
            cap: rank_cap,
        });
    }
    let n = g.vertex_count();
    let edges = g.edges();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        inc[e.u].push(k);
        inc[e.v].push(k);
    }
    // spanning forest, post-order
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut is_tree = vec![false; edges.len()];
    let mut post: Vec<Vertex> = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (x, ref mut i)) = stack.last_mut() {
            if let Some(&k) = inc[x].get(*i) {
                *i += 1;
                let y = edges[k].other(x);
                if !visited[y] {
                    visited[y] = true;
                    parent_edge[y] = Some(k);
                    is_tree[k] = true;
                    stack.push((y, 0));
                }
            } else {
                post.push(x);
                stack.pop();
            }
        }
    }
    let mut post_index = vec![0; n];
    for (i, &v) in post.iter().enumerate() {
        post_index[v] = i;
    }
    let mut cotree: Vec<usize> = (0..edges.len()).filter(|&k| !is_tree[k]).collect();
    let key = |k: usize| post_index[edges[k].u].min(post_index[edges[k].v]);
    cotree.sort_by_key(|&k| (key(k), k));
    // ready[i]: vertices whose parent edge is forced once co-tree edges
    // 0..i are assigned
    let mut ready: Vec<Vec<Vertex>> = vec![Vec::new(); cotree.len() + 1];
    for &v in &post {
        let i = cotree.partition_point(|&k| key(k) <= post_index[v]);
        ready[i].push(v);
    }

    struct Search<'a> {
        g: &'a MultiGraph,
        inc: &'a [Vec<usize>],
        parent_edge: &'a [Option<usize>],
        cotree: &'a [usize],
        ready: &'a [Vec<Vertex>],
        values: Vec<i64>,
    }

    impl Search<'_> {
        fn settle(&mut self, v: Vertex) -> bool {
            let edges = self.g.edges();
            let pe = self.parent_edge[v];
            let mut s = 0i64;
            for &k in &self.inc[v] {
                if Some(k) == pe {
                    continue;
                }
                s += if edges[k].u == v {
                    self.values[k]
                } else {
                    -self.values[k]
                };
            }
            let s = s.rem_euclid(3);
            match pe {
                None => s == 0,
                Some(k) => {
                    let x = if edges[k].u == v { (3 - s) % 3 } else { s };
                    self.values[k] = x;
                    x != 0
                }
            }
        }

        fn run(&mut self, i: usize) -> bool {
            for idx in 0..self.ready[i].len() {
                let v = self.ready[i][idx];
                if !self.settle(v) {
                    return false;
                }
            }
            if i == self.cotree.len() {
                return true;
            }
            for x in [1, 2] {
                self.values[self.cotree[i]] = x;
                if self.run(i + 1) {
                    return true;
                }
            }
            false
        }
    }

    let mut search = Search {
        g,
        inc: &inc,
        parent_edge: &parent_edge,
        cotree: &cotree,
        ready: &ready,
        values: vec![0; edges.len()],
    };
    if !search.run(0) {
        return Ok(None);
    }
    let z = Z3Flow {
        arcs: edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                (
                    e.id,
                    Arc {
                        tail: e.u,
                        head: e.v,
                        value: search.values[k],
                    },
                )
            })
            .collect(),
    };
    z.validate(g)?;
    Ok(Some(z))
}

/// Integer 3-flow congruent to a Z3-flow.
///
/// Every edge starts at value 1 in the direction where its residue is 1.
/// While some vertex has positive excess, an augmenting path to a vertex of
/// negative excess is found by BFS (stepping forward along a 1-arc or
/// backward along a (-2)-arc) and every arc on it switches between 1 and
/// -2, moving 3 units of excess. The output keeps the input orientation.
pub fn z3_to_integer(g: &MultiGraph, z: &Z3Flow) -> Result<FlowAssignment, FlowError> {
    z.validate(g)?;
    let as_is: FlowAssignment = z.iter().map(|(e, a)| (e, *a)).collect();
    if verify_flow(g, &as_is, 3)?.ok {
        return Ok(as_is);
    }
    let n = g.vertex_count();
    let edges = g.edges();
    // residue-1 orientation per edge, and its current value in {1, -2}
    let mut dir: Vec<(Vertex, Vertex)> = Vec::with_capacity(edges.len());
    for e in edges {
        let a = z.get(e.id).unwrap();
        dir.push(if a.value == 1 {
            (a.tail, a.head)
        } else {
            (a.head, a.tail)
        });
    }
    let mut phi = vec![1i64; edges.len()];
    let mut excess = vec![0i64; n];
    for &(t, h) in &dir {
        excess[t] += 1;
        excess[h] -= 1;
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        inc[e.u].push(k);
        inc[e.v].push(k);
    }
    while let Some(s) = (0..n).find(|&v| excess[v] > 0) {
        let mut via: Vec<Option<(usize, Vertex)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut target = None;
        while let Some(x) = queue.pop_front() {
            if excess[x] < 0 {
                target = Some(x);
                break;
            }
            for &k in &inc[x] {
                let (t, h) = dir[k];
                let y = if x == t && phi[k] == 1 {
                    h
                } else if x == h && phi[k] == -2 {
                    t
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((k, x));
                    queue.push_back(y);
                }
            }
        }
        let Some(d) = target else {
            return Err(FlowError::NoReducingPath);
        };
        let mut y = d;
        while let Some((k, x)) = via[y] {
            phi[k] = if phi[k] == 1 { -2 } else { 1 };
            y = x;
        }
        excess[s] -= 3;
        excess[d] += 3;
    }
    let out: FlowAssignment = edges
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let a = z.get(e.id).unwrap();
            let value = if a.value == 1 { phi[k] } else { -phi[k] };
            (e.id, Arc { value, ..*a })
        })
        .collect();
    ensure_flow(g, &out, 3)?;
    Ok(out)
}
