//! Valency five with `X = {y, y^-1, z, b, b^-1}`, `y` of order greater than
//! two, `z` an involution and `b` generating the unique minimal normal
//! subgroup inside `G'`.

use std::collections::BTreeSet;

use super::{
    bipartite_spanning, central_involution_3flow, contradiction, hypothesis_report, precondition,
    quotient_step, SynthError, TraceNode,
};
use crate::cayley::{connection_from_list, CayleyGraph};
use crate::flow::{ensure_flow, even_2_flow, glue, EdgeId, FlowAssignment, Subgraph};
use crate::group::{
    derived_subgroup, element_order, generated_subgroup, has_noncyclic_sylow2, is_nilpotent,
    minimal_normal_in, quotient_group, set_product, Element, Subgroup,
};
use crate::ladders::{cup_compose, two_ladder_core, Member};

const STEP: &str = "rotation pair";

/// Flow for `X = {y, y^-1, z, b, b^-1}`: bipartite `{y, y^-1, z}` when the
/// Sylow 2-subgroup is noncyclic, the central route when `G` is nilpotent,
/// and otherwise ladders and cycles around the rotation `c = yz`.
pub fn rotation_pair_3flow(
    cay: &CayleyGraph,
    y: Element,
    z: Element,
    b: Element,
) -> Result<(FlowAssignment, TraceNode), SynthError> {
    let group = cay.group();
    let x = cay.connection();
    let yi = group.inv(y);
    let expected = connection_from_list(group, &[y, yi, z, b, group.inv(b)])?;
    if &expected != x || y == yi || !group.is_involution(z) || group.is_involution(b) {
        return Err(precondition(
            STEP,
            "connection set is not {y, y^-1, z, b, b^-1}",
        ));
    }
    let node = |variant: &str| {
        TraceNode::new(STEP, "rotation-pair")
            .with("variant", variant)
            .with("y", y)
            .with("z", z)
            .with("b", b)
    };
    let derived = derived_subgroup(group);
    if has_noncyclic_sylow2(group) {
        // <y^2>G' + <y^2>yzG' against <y^2>yG' + <y^2>zG'
        let y2 = generated_subgroup(group, &[group.mul(y, y)]);
        let base = set_product(group, y2.elements(), derived.elements());
        let mut second: BTreeSet<Element> = BTreeSet::new();
        for t in [y, z] {
            second.extend(base.iter().map(|&g| group.mul(g, t)));
        }
        let side: Vec<bool> = group.elements().map(|g| second.contains(&g)).collect();
        let s = connection_from_list(group, &[y, yi, z])?;
        let f = bipartite_spanning(cay, &s, &side, STEP)?;
        return Ok((
            f,
            node("noncyclic Sylow 2-subgroup: bipartite {y, y^-1, z}"),
        ));
    }
    if is_nilpotent(group) {
        let (f, child) = central_involution_3flow(cay, z)?;
        return Ok((f, node("nilpotent: z is central").child(child)));
    }
    let c = group.mul(y, z);
    let csub = generated_subgroup(group, &[c]);
    let generates_abelianization =
        set_product(group, csub.elements(), derived.elements()).len() == group.order();
    if element_order(group, c) % 2 == 1 || !generates_abelianization {
        let (f, child, m) = fallback_quotient(cay)?;
        return Ok((
            f,
            node("yz does not generate G/G' with even order: quotient")
                .with("normal_subgroup", m.elements())
                .child(child),
        ));
    }
    if csub.contains(y) {
        let (f, rep) = two_ladder_core(
            cay,
            [(y, 0), (yi, 0)],
            [(b, 0), (group.inv(b), 0)],
            (z, 0),
            true,
        )?;
        return Ok((
            f,
            node("y inside <yz>: two ladders").with("composition", rep),
        ));
    }
    let l = generated_subgroup(group, &[y]).intersection(&csub);
    if !l.is_trivial() {
        if x.support().iter().any(|&s| l.contains(s)) {
            return Err(contradiction(
                STEP,
                "<y> meets <yz> in a subgroup containing part of X",
            ));
        }
        let (f, child) = quotient_step(cay, x, &l, false)?;
        return Ok((
            f,
            node("<y> meets <yz>: quotient")
                .with("normal_subgroup", l.elements())
                .child(child),
        ));
    }
    let f = cycle_ladders_cycles(cay, y, z, b, c)?;
    Ok((
        f,
        node("cycle through <yz>, prisms on {b, b^-1, z}, y-cycles").with("rotation", c),
    ))
}

/// The least minimal normal subgroup avoiding `X` with an applicable
/// quotient, then recursion.
fn fallback_quotient(
    cay: &CayleyGraph,
) -> Result<(FlowAssignment, TraceNode, Subgroup), SynthError> {
    let group = cay.group();
    let support = cay.connection().support();
    let whole = Subgroup::whole(group);
    let mut candidates = minimal_normal_in(group, &whole);
    candidates.sort_by(|a, b| (a.order(), a.elements()).cmp(&(b.order(), b.elements())));
    for m in candidates {
        if support.iter().any(|&s| m.contains(s)) {
            continue;
        }
        let (q, _) = quotient_group(group, &m)?;
        if !hypothesis_report(&q).applicable {
            continue;
        }
        let (f, child) = quotient_step(cay, cay.connection(), &m, false)?;
        return Ok((f, child, m));
    }
    Err(contradiction(
        STEP,
        "no minimal normal subgroup avoids X with an applicable quotient",
    ))
}

fn cycle_ladders_cycles(
    cay: &CayleyGraph,
    y: Element,
    z: Element,
    b: Element,
    c: Element,
) -> Result<FlowAssignment, SynthError> {
    let group = cay.group();
    let host = cay.graph();
    let two_m = element_order(group, c);
    let edge = |g: Element, s: Element| {
        cay.edge_at(g, (s, 0))
            .ok_or_else(|| contradiction(STEP, format!("missing edge at {g} labelled {s}")))
    };
    // Delta: 1, y, c, cy, ..., c^(2m-1), c^(2m-1)y
    let mut delta = Subgraph::default();
    for i in 0..two_m {
        let ci = group.pow(c, i as i64);
        let ciy = group.mul(ci, y);
        delta.vertices.insert(ci);
        delta.vertices.insert(ciy);
        delta.edges.insert(edge(ci, y)?);
        delta.edges.insert(edge(ciy, z)?);
    }
    if delta.vertices.len() != 2 * two_m || delta.edges.len() != 2 * two_m {
        return Err(contradiction(STEP, "Delta is not a cycle"));
    }
    let f_delta = even_2_flow(&host.restrict(&delta))?;

    let bz = connection_from_list(group, &[b, group.inv(b), z])?;
    let bz_edges = cay.edges_of(&bz)?;
    let thetas: Vec<Member> = cay
        .components_of(&bz_edges)
        .into_iter()
        .map(|(sub, _)| {
            let rungs: BTreeSet<EdgeId> = sub
                .edges
                .iter()
                .copied()
                .filter(|&e| cay.label(e).element == z)
                .collect();
            Member {
                subgraph: sub,
                rungs,
            }
        })
        .collect();
    let (mut sigma, mut f) = cup_compose(host, &delta, &f_delta, &thetas)?;

    let ycon = connection_from_list(group, &[y, group.inv(y)])?;
    let y_edges = cay.edges_of(&ycon)?;
    for (cycle, rep) in cay.components_of(&y_edges) {
        let shared = sigma.common_edges(&cycle).len();
        if shared > 1 {
            return Err(contradiction(
                STEP,
                format!("y-cycle at {rep} shares {shared} edges with Sigma"),
            ));
        }
        let fc = even_2_flow(&host.restrict(&cycle))?;
        f = glue(host, &sigma, &f, &cycle, &fc)?;
        sigma = sigma.union(&cycle);
    }
    if sigma.edges.len() != host.edge_count() {
        return Err(contradiction(STEP, "the pieces do not cover the graph"));
    }
    ensure_flow(host, &f, 3)?;
    Ok(f)
}
