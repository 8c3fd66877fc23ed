//! Valency-five graphs `X = U + {b, b^-1, z}` where `<b>` is normal with a
//! centralizer of index at most two: a cycle-and-prism family `Sigma` built
//! from `U` and the odd rungs along `<b>`, glued to pruned prisms `Lambda`
//! built from `b` and `z`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{bipartite_spanning, central_involution_3flow, contradiction, precondition, TraceNode};
use crate::cayley::{connection_from_list, lift_flow, quotient_cayley, CayleyGraph};
use crate::flow::{ensure_flow, find_3flow, suppress, EdgeId, FlowAssignment, Subgraph, Vertex};
use crate::group::{
    centralizer, element_order, generated_subgroup, is_normal, is_prime, join, left_coset_labels,
    prime_factors, set_product, Element, FiniteGroup,
};
use crate::ladders::{cup_compose, ladder_flow, recognize_path_ladder, Member, MEMBER_RANK_CAP};

use super::SynthError;

const STEP: &str = "index-two construction";

/// Shape of a pruned prism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum LambdaShape {
    /// The path ladder `L_n`.
    PathLadder { n: usize },
    /// Subdivision of a cycle with a single chord.
    UniqueRung,
}

/// One pruned prism on `g<b> + mu(g)<b>`, where `gz = mu(g) b^lambda`.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaPiece {
    pub g: Element,
    pub mu: Element,
    pub lambda: usize,
    pub removed: Vec<EdgeId>,
    pub subgraph: Subgraph,
    pub shape: LambdaShape,
}

fn edge(cay: &CayleyGraph, g: Element, h: Element) -> Result<EdgeId, SynthError> {
    let group = cay.group();
    let x = group.mul(group.inv(g), h);
    cay.edge_at(g, (x, 0))
        .ok_or_else(|| contradiction(STEP, format!("no edge between {g} and {h}")))
}

/// Checks the standing hypotheses; the message names the failed one.
pub(crate) fn index_preconditions(
    cay: &CayleyGraph,
    u: [Element; 2],
    b: Element,
    z: Element,
) -> Result<(), String> {
    let group = cay.group();
    let x = cay.connection();
    let bi = group.inv(b);
    let expected =
        connection_from_list(group, &[u[0], u[1], b, bi, z]).map_err(|e| e.to_string())?;
    if &expected != x || x.entries().any(|(_, m)| m != 1) || x.cardinality() != 5 {
        return Err("X is not the simple connection set U + {b, b^-1, z}".into());
    }
    if cay.graph().component_count() != 1 {
        return Err("graph is disconnected".into());
    }
    let inverse_closed = if group.is_involution(u[0]) {
        group.is_involution(u[1])
    } else {
        u[1] == group.inv(u[0])
    };
    if !inverse_closed || u[0] == u[1] {
        return Err("U is not an inverse-closed pair".into());
    }
    if u.iter().any(|&e| element_order(group, e) % 2 == 1) {
        return Err("U has an element of odd order".into());
    }
    if !group.is_involution(z) {
        return Err("z is not an involution".into());
    }
    let bsub = generated_subgroup(group, &[b]);
    if bsub.order() <= 2 || !is_normal(group, &bsub) {
        return Err("<b> is not a normal subgroup of order greater than 2".into());
    }
    if !generated_subgroup(group, &u)
        .intersection(&bsub)
        .is_trivial()
    {
        return Err("<U> meets <b>".into());
    }
    if 2 * centralizer(group, &bsub).order() < group.order() {
        return Err("the centralizer of <b> has index greater than 2".into());
    }
    Ok(())
}

/// Flow for `X = U + {b, b^-1, z}` under the index-two hypotheses.
pub fn index_construction(
    cay: &CayleyGraph,
    u: [Element; 2],
    b: Element,
    z: Element,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    index_preconditions(cay, u, b, z).map_err(|r| precondition(STEP, r))?;
    let group = cay.group();
    let order_b = element_order(group, b);
    let bsub = generated_subgroup(group, &[b]);
    let node = |variant: &str| {
        TraceNode::new(STEP, "index-two")
            .with("variant", variant)
            .with("u", u)
            .with("b", b)
            .with("z", z)
    };
    if order_b.is_multiple_of(2) {
        if bsub.contains(z) {
            let (f, child) = central_involution_3flow(cay, z)?;
            return Ok((f, node("z inside <b>: central").child(child)));
        }
        // <b^2> + <b^2>bz against <b^2>z + <b^2>b, on every translate
        let bz_sub = generated_subgroup(group, &[b, z]);
        let b2 = generated_subgroup(group, &[group.mul(b, b)]);
        let second: BTreeSet<Element> = set_product(group, b2.elements(), &[z])
            .into_iter()
            .chain(set_product(group, b2.elements(), &[b]))
            .collect();
        let labels = left_coset_labels(group, &bz_sub);
        let side: Vec<bool> = group
            .elements()
            .map(|g| second.contains(&group.mul(group.inv(labels[g]), g)))
            .collect();
        let s = connection_from_list(group, &[b, group.inv(b), z])?;
        let f = bipartite_spanning(cay, &s, &side, STEP)?;
        return Ok((f, node("b of even order: bipartite prism family")));
    }
    if !is_prime(order_b) {
        let q = prime_factors(order_b)[0];
        let nsub = generated_subgroup(group, &[group.pow(b, q as i64)]);
        let quotient = quotient_cayley(group, cay.connection(), &nsub)?;
        let p = &quotient.projection;
        let (qf, child) = index_construction(&quotient.graph, [p[u[0]], p[u[1]]], p[b], p[z])?;
        let f = lift_flow(&quotient.covering, &qf)?;
        return Ok((
            f,
            node("b of composite order: quotient")
                .with("normal_subgroup", nsub.elements())
                .child(child),
        ));
    }
    let (f, pieces) = prime_construction(cay, u, b, z)?;
    let summary: Vec<(Element, Element, usize, LambdaShape)> = pieces
        .iter()
        .map(|p| (p.g, p.mu, p.lambda, p.shape))
        .collect();
    Ok((
        f,
        node("b of prime order: prisms and pruned prisms").with("pieces", summary),
    ))
}

/// The pruned prisms of the prime-order construction.
pub fn lambda_pieces(
    cay: &CayleyGraph,
    u: [Element; 2],
    b: Element,
    z: Element,
) -> Result<Vec<LambdaPiece>, SynthError> {
    index_preconditions(cay, u, b, z).map_err(|r| precondition(STEP, r))?;
    if !is_prime(element_order(cay.group(), b)) || element_order(cay.group(), b) == 2 {
        return Err(precondition(STEP, "b is not of odd prime order"));
    }
    Ok(build_lambda(cay, b, z, &transversal_of_b(cay.group(), u, b))?.0)
}

/// `A<U>`: a left transversal of `<b>`, as the products of a transversal
/// of `<U, b>` with `<U>`.
fn transversal_of_b(
    group: &FiniteGroup,
    u: [Element; 2],
    b: Element,
) -> (Vec<Element>, Vec<Element>) {
    let h = generated_subgroup(group, &u);
    let k = join(group, &h, &[b]);
    let labels = left_coset_labels(group, &k);
    let a: Vec<Element> = group.elements().filter(|&g| labels[g] == g).collect();
    let ah = set_product(group, &a, h.elements());
    (a, ah)
}

type LambdaBuild = (Vec<LambdaPiece>, Subgraph, FlowAssignment);

fn build_lambda(
    cay: &CayleyGraph,
    b: Element,
    z: Element,
    (_, ah): &(Vec<Element>, Vec<Element>),
) -> Result<LambdaBuild, SynthError> {
    let group = cay.group();
    let p = element_order(group, b);
    let n = (p - 1) / 2;
    let bp = |g: Element, j: usize| group.mul(g, group.pow(b, j as i64));
    // gz = mu(g) b^lambda
    let mut coset_of: BTreeMap<Element, (Element, usize)> = BTreeMap::new();
    for &t in ah {
        for j in 0..p {
            coset_of.insert(bp(t, j), (t, j));
        }
    }
    let mu_lambda = |g: Element| coset_of[&group.mul(g, z)];
    let mut t_set: Vec<Element> = Vec::new();
    let mut assigned: BTreeSet<Element> = BTreeSet::new();
    for &g in ah {
        if assigned.contains(&g) {
            continue;
        }
        let (mu, _) = mu_lambda(g);
        if mu == g {
            return Err(contradiction(STEP, "mu has a fixed point"));
        }
        if mu_lambda(mu).0 != g {
            return Err(contradiction(STEP, "mu is not an involution"));
        }
        assigned.insert(g);
        assigned.insert(mu);
        t_set.push(g);
    }
    let inverts = group.conjugate(b, z) != b;
    let bedge = |g: Element, k: usize| edge(cay, bp(g, k % p), bp(g, (k + 1) % p));
    let mut pieces = Vec::new();
    let mut lambda_sub = Subgraph::default();
    let mut flow = FlowAssignment::new();
    for g in t_set {
        let (mu, lambda) = mu_lambda(g);
        let mut sub = Subgraph::default();
        for base in [g, mu] {
            for j in 0..p {
                let v = bp(base, j);
                sub.vertices.insert(v);
                sub.edges.insert(edge(cay, v, group.mul(v, b))?);
                sub.edges.insert(edge(cay, v, group.mul(v, z))?);
            }
        }
        let all_rungs = |removed: &mut Vec<EdgeId>| -> Result<(), SynthError> {
            for i in 1..=n {
                removed.push(bedge(g, 2 * i - 1)?);
                removed.push(bedge(mu, 2 * i - 1)?);
            }
            Ok(())
        };
        let mut removed = Vec::new();
        if lambda % 2 == 1 {
            if lambda == 1 {
                all_rungs(&mut removed)?;
            } else if !inverts {
                removed.push(bedge(g, 2 * n + 2 - lambda)?);
                removed.push(bedge(mu, 1)?);
            } else {
                removed.push(bedge(g, 1)?);
                removed.push(bedge(mu, lambda - 2)?);
            }
        } else if lambda == 2 * n {
            all_rungs(&mut removed)?;
        } else if !inverts {
            removed.push(bedge(g, 1)?);
            removed.push(bedge(mu, lambda + 1)?);
        } else {
            removed.push(bedge(g, 2 * n - 1)?);
            removed.push(bedge(mu, lambda + 1)?);
        }
        for e in &removed {
            sub.edges.remove(e);
        }
        let (shape, f) = piece_shape_and_flow(cay, &sub, z, p)?;
        let expect_path = lambda != 1 && lambda != 2 * n;
        if expect_path != matches!(shape, LambdaShape::PathLadder { .. }) {
            return Err(contradiction(
                STEP,
                format!("pruned prism at g = {g} with lambda = {lambda} has shape {shape:?}"),
            ));
        }
        flow = flow.disjoint_union(&f);
        lambda_sub = lambda_sub.union(&sub);
        pieces.push(LambdaPiece {
            g,
            mu,
            lambda,
            removed,
            subgraph: sub,
            shape,
        });
    }
    Ok((pieces, lambda_sub, flow))
}

/// Identifies a pruned prism: a path ladder whose rungs are the `z`-edges,
/// or a subdivided theta graph (a cycle with one chord).
fn piece_shape_and_flow(
    cay: &CayleyGraph,
    sub: &Subgraph,
    z: Element,
    p: usize,
) -> Result<(LambdaShape, FlowAssignment), SynthError> {
    let host = cay.graph();
    let z_edges: BTreeSet<EdgeId> = sub
        .edges
        .iter()
        .copied()
        .filter(|&e| cay.label(e).element == z)
        .collect();
    if let Ok(lad) = recognize_path_ladder(host, sub, &z_edges) {
        if lad.kind == (crate::ladders::LadderKind::Path { n: p }) {
            let f = ladder_flow(host, &lad)?
                .ok_or_else(|| contradiction(STEP, "path ladder without a flow"))?;
            return Ok((LambdaShape::PathLadder { n: p }, f));
        }
    }
    let piece = host.restrict(sub);
    let s = suppress(&piece)?;
    let core_deg: Vec<usize> = s.core.degrees().into_iter().filter(|&d| d > 0).collect();
    if core_deg == [3, 3] && s.core.edge_count() == 3 && s.cycles.is_empty() {
        let f = find_3flow(&piece, MEMBER_RANK_CAP)?
            .ok_or_else(|| contradiction(STEP, "theta piece without a flow"))?;
        return Ok((LambdaShape::UniqueRung, f));
    }
    Err(contradiction(
        STEP,
        format!(
            "pruned prism is neither a path ladder nor a chorded cycle (core degrees {core_deg:?})"
        ),
    ))
}

fn prime_construction(
    cay: &CayleyGraph,
    u: [Element; 2],
    b: Element,
    z: Element,
) -> Result<(FlowAssignment, Vec<LambdaPiece>), SynthError> {
    let group = cay.group();
    let host = cay.graph();
    let p = element_order(group, b);
    let n = (p - 1) / 2;
    let h = generated_subgroup(group, &u);
    let tr = transversal_of_b(group, u, b);
    let (a, ah) = &tr;
    let bp = |g: Element, j: usize| group.mul(g, group.pow(b, j as i64));
    let u_edges = |v: Vertex| -> Result<Vec<EdgeId>, SynthError> {
        u.iter().map(|&x| edge(cay, v, group.mul(v, x))).collect()
    };
    // Sigma: the cycle on a<U> and the prisms on a b^(2i-1)<U> + a b^(2i)<U>
    let mut sigma = Vec::new();
    let mut all_rungs = BTreeSet::new();
    for &ar in a {
        for i in 0..=n {
            let mut sub = Subgraph::default();
            let mut rungs = BTreeSet::new();
            let layers: Vec<usize> = if i == 0 {
                vec![0]
            } else {
                vec![2 * i - 1, 2 * i]
            };
            for &l in &layers {
                for &hh in h.elements() {
                    let v = group.mul(bp(ar, l), hh);
                    sub.vertices.insert(v);
                    sub.edges.extend(u_edges(v)?);
                }
            }
            if i > 0 {
                for &hh in h.elements() {
                    let r = edge(
                        cay,
                        group.mul(bp(ar, 2 * i - 1), hh),
                        group.mul(bp(ar, 2 * i), hh),
                    )?;
                    rungs.insert(r);
                    sub.edges.insert(r);
                }
            }
            all_rungs.extend(rungs.iter().copied());
            sigma.push(Member {
                subgraph: sub,
                rungs,
            });
        }
    }
    // the rung set is also {g b^(2i-1), g b^(2i)} over g in A<U>
    let mut expected = BTreeSet::new();
    for &g in ah {
        for i in 1..=n {
            expected.insert(edge(cay, bp(g, 2 * i - 1), bp(g, 2 * i))?);
        }
    }
    if expected != all_rungs {
        return Err(contradiction(
            STEP,
            "rung sets of the prism family disagree",
        ));
    }
    let (pieces, lambda_sub, f_lambda) = build_lambda(cay, b, z, &tr)?;
    ensure_flow(&host.restrict(&lambda_sub), &f_lambda, 3)?;
    let (union, f) = cup_compose(host, &lambda_sub, &f_lambda, &sigma)?;
    if union.edges.len() != host.edge_count() {
        return Err(contradiction(
            STEP,
            "Sigma and Lambda do not cover the graph",
        ));
    }
    ensure_flow(host, &f, 3)?;
    Ok((f, pieces))
}

/// Three involutions `Y = {x, y, z}` plus `{b, b^-1}` with `b` of odd prime
/// order: bipartite `Cay(G, Y)` gives a spanning cubic bipartite subgraph;
/// otherwise some labelling with `y` centralizing `b` meets the index-two
/// hypotheses.
pub(crate) fn three_involutions(
    cay: &CayleyGraph,
    ys: [Element; 3],
    b: Element,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let ymul = connection_from_list(group, &ys)?;
    let sub = cay.spanning(&ymul)?;
    let base = TraceNode::new("three involutions", "three-involutions")
        .with("involutions", ys)
        .with("b", b);
    if let Some(side) = cay.graph().restrict(&sub).bipartition() {
        let f = bipartite_spanning(cay, &ymul, &side, "three involutions")?;
        return Ok((f, base.with("variant", "bipartite spanning cubic subgraph")));
    }
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut reasons = Vec::new();
    for [i, j, k] in perms {
        let (x, y, z) = (ys[i], ys[j], ys[k]);
        if group.mul(y, b) != group.mul(b, y) {
            continue;
        }
        match index_preconditions(cay, [x, y], b, z) {
            Ok(()) => {
                let (f, child) = index_construction(cay, [x, y], b, z)?;
                return Ok((
                    f,
                    base.with("variant", "index-two construction")
                        .with("labelling", [x, y, z])
                        .child(child),
                ));
            }
            Err(r) => reasons.push(format!("({x}, {y}, {z}): {r}")),
        }
    }
    Err(contradiction(
        "three involutions",
        format!("no labelling meets the index-two hypotheses: {reasons:?}"),
    ))
}
