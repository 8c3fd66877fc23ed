//! Shared test fixtures: the small-group catalog, connection-multiset
//! enumeration and the synthesis scan.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nzflow::cayley::{build_cayley, validate_connection, ConnectionMultiset};
use nzflow::flow::{verify_flow, z3_oracle};
use nzflow::group::{build_group, Element, FiniteGroup, GroupSpec};
use nzflow::synth::{hypothesis_report, synthesize, SynthError};

pub const INSTANCE_CAP: usize = 500;
pub const ORACLE_RANK: usize = 18;

fn cyc(n: usize) -> GroupSpec {
    GroupSpec::Cyclic { n }
}

fn dih(n: usize) -> GroupSpec {
    GroupSpec::Dihedral { n }
}

fn prod(a: GroupSpec, b: GroupSpec) -> GroupSpec {
    GroupSpec::product(a, b)
}

/// Permutations of `0..n` (even ones only if `even`), composed left to
/// right, as a multiplication table.
pub fn permutation_table(n: usize, even: bool) -> Vec<Vec<Element>> {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut perms);
    perms.sort();
    if even {
        perms.retain(|p| {
            let inv = (0..n)
                .flat_map(|i| (0..i).map(move |j| (j, i)))
                .filter(|&(j, i)| p[j] > p[i])
                .count();
            inv % 2 == 0
        });
    }
    let idx = |q: &Vec<usize>| perms.iter().position(|r| r == q).unwrap();
    perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| idx(&(0..n).map(|i| b[a[i]]).collect()))
                .collect()
        })
        .collect()
}

fn permute(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, out);
        p.swap(k, i);
    }
}

pub fn a4() -> FiniteGroup {
    FiniteGroup::from_table("A4", permutation_table(4, true)).unwrap()
}

pub fn s4() -> FiniteGroup {
    FiniteGroup::from_table("S4", permutation_table(4, false)).unwrap()
}

/// The built-in catalog: cyclic up to 16, dihedral up to 8, dicyclic up to
/// 4 (including Q8), direct products up to order 16, and A4, S4.
pub fn catalog() -> Vec<FiniteGroup> {
    let mut specs: Vec<GroupSpec> = Vec::new();
    specs.extend((1..=16).map(cyc));
    specs.extend((3..=8).map(dih));
    specs.extend((2..=4).map(|n| GroupSpec::Dicyclic { n }));
    specs.extend([
        prod(cyc(2), cyc(2)),
        prod(cyc(2), cyc(4)),
        prod(cyc(2), cyc(6)),
        prod(cyc(2), cyc(8)),
        prod(cyc(4), cyc(4)),
        prod(cyc(3), cyc(3)),
        prod(prod(cyc(2), cyc(2)), cyc(2)),
        prod(prod(cyc(2), cyc(2)), cyc(3)),
        prod(prod(cyc(2), cyc(2)), cyc(4)),
        prod(prod(prod(cyc(2), cyc(2)), cyc(2)), cyc(2)),
        prod(dih(3), cyc(2)),
        prod(dih(4), cyc(2)),
        prod(GroupSpec::Dicyclic { n: 2 }, cyc(2)),
    ]);
    let mut groups: Vec<FiniteGroup> = specs.iter().map(|s| build_group(s).unwrap()).collect();
    groups.push(a4());
    groups.push(s4());
    groups
}

/// `H ⋊ V4` for the Heisenberg group `H` of order `p^3`, written as
/// triples `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
/// The two generators of `V4` negate `(a, c)` and `(b, c)` respectively.
/// Element `(a, b, c, v)` has index `((a p + b) p + c) 4 + v`.
pub fn heisenberg_by_klein(p: usize) -> FiniteGroup {
    let enc = |a: usize, b: usize, c: usize, v: usize| ((a * p + b) * p + c) * 4 + v;
    let dec = |i: usize| (i / 4 / p / p, (i / 4 / p) % p, (i / 4) % p, i % 4);
    let neg = |x: usize| (p - x) % p;
    let act = |v: usize, (a, b, c): (usize, usize, usize)| {
        let (a, c) = if v & 1 == 1 { (neg(a), neg(c)) } else { (a, c) };
        let (b, c) = if v & 2 == 2 { (neg(b), neg(c)) } else { (b, c) };
        (a, b, c)
    };
    let n = 4 * p * p * p;
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (a, b, c, v) = dec(i);
                    let (x, y, z) = act(v, (dec(j).0, dec(j).1, dec(j).2));
                    enc((a + x) % p, (b + y) % p, (c + z + a * y) % p, v ^ dec(j).3)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(format!("Heis{p}:V4"), table).unwrap()
}

/// Larger groups reaching the branches the built-in catalog cannot: two
/// minimal normal subgroups inside `G'`, the final rotation-pair
/// construction, and three involutions with a non-bipartite cubic part.
pub fn supplementary() -> Vec<FiniteGroup> {
    let mut groups: Vec<FiniteGroup> = [
        dih(9),
        prod(dih(3), cyc(3)),
        prod(dih(5), cyc(2)),
        GroupSpec::Semidirect {
            normal: Box::new(cyc(5)),
            acting: Box::new(cyc(4)),
            action: vec![0, 2, 4, 1, 3],
        },
        prod(dih(3), cyc(4)),
        dih(15),
    ]
    .iter()
    .map(|s| build_group(s).unwrap())
    .collect();
    groups.push(heisenberg_by_klein(3));
    groups
}

/// All inverse-closed multisets of non-identity elements of the given
/// cardinality that generate `G`, in lexicographic order of their
/// `(element, multiplicity)` lists; thinned to at most `cap` by taking
/// evenly spaced entries.
pub fn connection_multisets(
    group: &FiniteGroup,
    cardinality: usize,
    cap: usize,
) -> Vec<ConnectionMultiset> {
    // blocks: an involution (size 1) or an inverse pair (size 2)
    let mut blocks: Vec<(Element, usize)> = Vec::new();
    for x in 1..group.order() {
        let xi = group.inv(x);
        if x == xi {
            blocks.push((x, 1));
        } else if x < xi {
            blocks.push((x, 2));
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<(Element, usize)> = Vec::new();
    fill(group, &blocks, 0, cardinality, &mut chosen, &mut out);
    if out.len() > cap {
        let n = out.len();
        out = (0..cap).map(|i| out[i * n / cap].clone()).collect();
    }
    out
}

fn fill(
    group: &FiniteGroup,
    blocks: &[(Element, usize)],
    from: usize,
    left: usize,
    chosen: &mut Vec<(Element, usize)>,
    out: &mut Vec<ConnectionMultiset>,
) {
    if left == 0 {
        let mut raw: Vec<(Element, usize)> = Vec::new();
        for &(x, m) in chosen.iter() {
            raw.push((x, m));
            let xi = group.inv(x);
            if xi != x {
                raw.push((xi, m));
            }
        }
        let x = validate_connection(group, &raw).unwrap();
        let gens: Vec<Element> = x.support();
        if nzflow::group::generated_subgroup(group, &gens).order() == group.order() {
            out.push(x);
        }
        return;
    }
    for i in from..blocks.len() {
        let (x, size) = blocks[i];
        let mut copies = 1;
        while copies * size <= left {
            chosen.push((x, copies));
            fill(group, blocks, i + 1, left - copies * size, chosen, out);
            chosen.pop();
            copies += 1;
        }
    }
}

#[derive(Debug, Default)]
pub struct ScanSummary {
    pub instances: usize,
    pub applicable: usize,
    pub certified: usize,
    pub failures: Vec<String>,
    pub refused_correctly: usize,
    pub oracle_checked: usize,
    pub oracle_disagreements: Vec<String>,
    /// Trace `case` label (and `case / variant`) -> number of certificates
    /// using it.
    pub census: BTreeMap<String, usize>,
}

impl ScanSummary {
    pub fn merge(&mut self, other: ScanSummary) {
        self.instances += other.instances;
        self.applicable += other.applicable;
        self.certified += other.certified;
        self.failures.extend(other.failures);
        self.refused_correctly += other.refused_correctly;
        self.oracle_checked += other.oracle_checked;
        self.oracle_disagreements.extend(other.oracle_disagreements);
        for (k, v) in other.census {
            *self.census.entry(k).or_default() += v;
        }
    }
}

/// Runs synthesis on every cardinality-4 and -5 instance of `group`,
/// verifying certificates and, below the rank cap, comparing with the
/// exhaustive oracle.
pub fn scan_group(group: &FiniteGroup, with_oracle: bool) -> ScanSummary {
    let mut s = ScanSummary::default();
    let applicable = hypothesis_report(group).applicable;
    for card in [4, 5] {
        for x in connection_multisets(group, card, INSTANCE_CAP) {
            s.instances += 1;
            let tag = format!("{} {:?}", group.name(), x.entries().collect::<Vec<_>>());
            let result = synthesize(group, &x);
            if !applicable {
                match result {
                    Err(SynthError::Hypothesis(_)) => s.refused_correctly += 1,
                    other => s.failures.push(format!(
                        "{tag}: expected refusal, got {:?}",
                        other.map(|_| ())
                    )),
                }
                continue;
            }
            s.applicable += 1;
            let cert = match result {
                Ok(c) => c,
                Err(e) => {
                    s.failures.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            let cay = build_cayley(group, &x);
            match verify_flow(cay.graph(), &cert.flow, 3) {
                Ok(r) if r.ok => s.certified += 1,
                other => {
                    s.failures
                        .push(format!("{tag}: certificate rejected: {other:?}"));
                    continue;
                }
            }
            let mut cases: Vec<String> = Vec::new();
            for n in cert.trace.nodes() {
                cases.push(n.case.clone());
                if let Some(v) = n.data.get("variant").and_then(|v| v.as_str()) {
                    cases.push(format!("{} / {v}", n.case));
                }
            }
            cases.sort();
            cases.dedup();
            for c in cases {
                *s.census.entry(c).or_default() += 1;
            }
            if with_oracle && cay.graph().cycle_rank() <= ORACLE_RANK {
                s.oracle_checked += 1;
                match z3_oracle(cay.graph(), ORACLE_RANK) {
                    Ok(Some(_)) => {}
                    other => s.oracle_disagreements.push(format!(
                        "{tag}: oracle says {:?}",
                        other.map(|o| o.is_some())
                    )),
                }
            }
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Randomized composition cases. Each returns `Err` with a description when
// the composed flow fails verification; all randomness comes from the seed.

pub mod compose {
    use std::collections::{BTreeMap, BTreeSet};

    use nzflow::cayley::{build_cayley, connection_from_list, quotient_cayley};
    use nzflow::flow::{
        cubic_bipartite_3flow, extend_odd_regular, glue, transfer_across_subdivision, verify_flow,
        z3_oracle, z3_to_integer, Arc, Edge, EdgeId, FlowAssignment, MultiGraph, SubPath, Subgraph,
    };
    use nzflow::group::{build_group, normal_closure, Element, FiniteGroup, GroupSpec};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub const CASES: u64 = 1000;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn checked(g: &MultiGraph, f: &FlowAssignment, what: &str) -> Result<(), String> {
        match verify_flow(g, f, 3) {
            Ok(r) if r.ok => Ok(()),
            other => Err(format!("{what}: {other:?}")),
        }
    }

    fn oracle_flow(g: &MultiGraph, cap: usize) -> Option<FlowAssignment> {
        let z = z3_oracle(g, cap).ok()??;
        Some(z3_to_integer(g, &z).expect("oracle witness converts"))
    }

    /// A small connected multigraph with a nowhere-zero 3-flow.
    pub fn flow_graph(r: &mut ChaCha8Rng) -> (MultiGraph, FlowAssignment) {
        loop {
            let n = r.gen_range(2..=7);
            let m = r.gen_range(n..=n + 6);
            let pairs: Vec<(usize, usize)> = (0..m)
                .map(|_| {
                    let u = r.gen_range(0..n);
                    let v = (u + r.gen_range(1..n)) % n;
                    (u, v)
                })
                .collect();
            let g = MultiGraph::from_pairs(n, &pairs).unwrap();
            if g.component_count() != 1 {
                continue;
            }
            if let Some(f) = oracle_flow(&g, 14) {
                return (g, f);
            }
        }
    }

    /// Two flow graphs placed in one host, sharing nothing, one vertex, or
    /// one edge.
    pub fn glue_case(seed: u64) -> Result<(), String> {
        let mut r = rng(seed);
        let (g1, f1) = flow_graph(&mut r);
        let (g2, f2) = flow_graph(&mut r);
        let n1 = g1.vertex_count();
        let mode = r.gen_range(0..3);
        let mut vmap: Vec<usize> = (0..g2.vertex_count()).map(|v| n1 + v).collect();
        let mut shared: Option<(EdgeId, EdgeId)> = None;
        match mode {
            1 => vmap[0] = r.gen_range(0..n1),
            2 => {
                let e1 = g1.edges()[r.gen_range(0..g1.edge_count())];
                let e2 = g2.edges()[r.gen_range(0..g2.edge_count())];
                vmap[e2.u] = e1.u;
                vmap[e2.v] = e1.v;
                shared = Some((e1.id, e2.id));
            }
            _ => {}
        }
        let mut edges: Vec<Edge> = g1.edges().to_vec();
        let mut emap: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        for e in g2.edges() {
            if let Some((e1, e2)) = shared {
                if e.id == e2 {
                    emap.insert(e.id, e1);
                    continue;
                }
            }
            let id = edges.len();
            edges.push(Edge {
                id,
                u: vmap[e.u],
                v: vmap[e.v],
            });
            emap.insert(e.id, id);
        }
        // compact the vertex numbering
        let used: BTreeSet<usize> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        let renum: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                id: e.id,
                u: renum[&e.u],
                v: renum[&e.v],
            })
            .collect();
        let host = MultiGraph::new(used.len(), edges).unwrap();
        let s1 = Subgraph::from_edges(&host, g1.edge_ids());
        let s2 = Subgraph::from_edges(&host, emap.values().copied());
        let h1: FlowAssignment = f1
            .iter()
            .map(|(e, a)| {
                (
                    e,
                    Arc {
                        tail: renum[&a.tail],
                        head: renum[&a.head],
                        value: a.value,
                    },
                )
            })
            .collect();
        let h2: FlowAssignment = f2
            .iter()
            .map(|(e, a)| {
                (
                    emap[&e],
                    Arc {
                        tail: renum[&vmap[a.tail]],
                        head: renum[&vmap[a.head]],
                        value: a.value,
                    },
                )
            })
            .collect();
        let f = glue(&host, &s1, &h1, &s2, &h2).map_err(|e| format!("glue mode {mode}: {e}"))?;
        checked(&host.restrict(&s1.union(&s2)), &f, "glue")
    }

    /// Rail-free subdivision of a random flow graph.
    pub fn subdivision_case(seed: u64) -> Result<(), String> {
        let mut r = rng(seed);
        let (g, f) = flow_graph(&mut r);
        let mut next = g.vertex_count();
        let mut edges = Vec::new();
        let mut corr = BTreeMap::new();
        let mut order: Vec<&Edge> = g.edges().iter().collect();
        order.shuffle(&mut r);
        for e in order {
            let k = r.gen_range(0..4);
            let mut vertices = vec![e.u];
            vertices.extend(next..next + k);
            next += k;
            vertices.push(e.v);
            if r.gen_bool(0.5) {
                vertices.reverse();
            }
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
            corr.insert(
                e.id,
                SubPath {
                    vertices,
                    edges: ids,
                },
            );
        }
        let sg = MultiGraph::new(next, edges).unwrap();
        let t = transfer_across_subdivision(&g, &f, &sg, &corr)
            .map_err(|e| format!("transfer: {e}"))?;
        checked(&sg, &t, "transfer")
    }

    /// Three random perfect matchings between two sides of size `n`.
    pub fn cubic_bipartite_case(seed: u64) -> Result<(), String> {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let mut pairs = Vec::new();
        for _ in 0..3 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut r);
            pairs.extend((0..n).map(|i| (i, n + perm[i])));
        }
        pairs.shuffle(&mut r);
        let pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if r.gen_bool(0.5) { (b, a) } else { (a, b) })
            .collect();
        let g = MultiGraph::from_pairs(2 * n, &pairs).unwrap();
        let side: Vec<bool> = (0..2 * n).map(|v| v >= n).collect();
        let f = cubic_bipartite_3flow(&g, &side).map_err(|e| format!("cubic bipartite: {e}"))?;
        checked(&g, &f, "cubic bipartite")
    }

    fn small_groups() -> Vec<FiniteGroup> {
        let specs = [
            GroupSpec::Cyclic { n: 6 },
            GroupSpec::Cyclic { n: 8 },
            GroupSpec::Cyclic { n: 12 },
            GroupSpec::Dihedral { n: 4 },
            GroupSpec::Dihedral { n: 5 },
            GroupSpec::Dihedral { n: 6 },
            GroupSpec::Dicyclic { n: 2 },
            GroupSpec::Dicyclic { n: 3 },
            GroupSpec::product(GroupSpec::Cyclic { n: 2 }, GroupSpec::Cyclic { n: 4 }),
            GroupSpec::product(GroupSpec::Dihedral { n: 3 }, GroupSpec::Cyclic { n: 2 }),
        ];
        specs.iter().map(|s| build_group(s).unwrap()).collect()
    }

    fn random_elements(r: &mut ChaCha8Rng, g: &FiniteGroup, slots: usize) -> Vec<Element> {
        // `slots` counts elements of the multiset, inverse pairs included
        let mut out = Vec::new();
        while out.len() < slots {
            let x = r.gen_range(1..g.order());
            let xi = g.inv(x);
            if x == xi {
                out.push(x);
            } else if out.len() + 2 <= slots {
                out.push(x);
                out.push(xi);
            }
        }
        out
    }

    /// Flow on a quotient `Cay(G/N, X/N)` lifted along the covering.
    pub fn lift_case(seed: u64) -> Result<(), String> {
        let mut r = rng(seed);
        let groups = small_groups();
        loop {
            let g = &groups[r.gen_range(0..groups.len())];
            let k = r.gen_range(2..=5);
            let xs = random_elements(&mut r, g, k);
            let n = normal_closure(g, &[r.gen_range(1..g.order())]);
            if n.order() == g.order() || xs.iter().any(|&x| n.contains(x)) {
                continue;
            }
            let x = connection_from_list(g, &xs).unwrap();
            let q = quotient_cayley(g, &x, &n).map_err(|e| format!("quotient: {e}"))?;
            q.covering.check().map_err(|e| format!("covering: {e}"))?;
            let Some(base) = oracle_flow(q.graph.graph(), 16) else {
                continue;
            };
            let up =
                nzflow::cayley::lift_flow(&q.covering, &base).map_err(|e| format!("lift: {e}"))?;
            return checked(&q.covering.upstairs, &up, "lift");
        }
    }

    /// A flow on an odd-regular spanning `Cay(G, Y)` extended to
    /// `Cay(G, X)` for `Y` inside `X`.
    pub fn extend_case(seed: u64) -> Result<(), String> {
        let mut r = rng(seed);
        let groups = small_groups();
        loop {
            let g = &groups[r.gen_range(0..groups.len())];
            let k = if r.gen_bool(0.7) { 3 } else { 5 };
            let ys = random_elements(&mut r, g, k);
            if ys.len().is_multiple_of(2) {
                continue;
            }
            let k = 2 * r.gen_range(1..=2);
            let extra = random_elements(&mut r, g, k);
            let mut xs = ys.clone();
            xs.extend(extra);
            let y = connection_from_list(g, &ys).unwrap();
            let x = connection_from_list(g, &xs).unwrap();
            let cay = build_cayley(g, &x);
            let ycay = build_cayley(g, &y);
            let Some(fy) = oracle_flow(ycay.graph(), 16) else {
                continue;
            };
            // carry the flow to the host's edge ids via labels
            let mut taken: BTreeSet<EdgeId> = BTreeSet::new();
            let mut f = FlowAssignment::new();
            for (e, a) in fy.iter() {
                let lab = ycay.label(e);
                let id = cay.edge_by_label(lab).ok_or("label missing upstairs")?;
                if !taken.insert(id) {
                    return Err("two sub-edges map to one host edge".into());
                }
                f.insert(id, *a);
            }
            let sub = Subgraph {
                vertices: g.elements().collect(),
                edges: taken,
            };
            let full =
                extend_odd_regular(cay.graph(), &sub, &f).map_err(|e| format!("extend: {e}"))?;
            return checked(cay.graph(), &full, "extend");
        }
    }
}
