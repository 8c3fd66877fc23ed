//! Acceptance run: one PASS/FAIL line per criterion, exiting nonzero if
//! any fails. Built without the libtest harness so the report is always
//! printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nzflow::cayley::{build_cayley, connection_from_list};
use nzflow::flow::{verify_flow, z3_oracle, EdgeId, FlowAssignment, MultiGraph, Subgraph};
use nzflow::group::{
    build_group, center, derived_subgroup, has_noncyclic_sylow2, has_squarefree_derived,
    is_supersolvable, minimal_normal_in, normal_closure, quotient_group, FiniteGroup, GroupSpec,
    Subgroup,
};
use nzflow::ladders::{build_ladder, ladder_flow, subdivide_rails, without_rung, LadderKind};
use nzflow::synth::{lambda_pieces, LambdaShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::compose;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn verified(g: &MultiGraph, f: &Option<FlowAssignment>) -> bool {
    f.as_ref()
        .is_some_and(|f| verify_flow(g, f, 3).is_ok_and(|r| r.ok))
}

fn ladder_parity() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for n in 2..=12 {
        for (kind, expected) in [
            (LadderKind::Circular { n }, n % 2 == 0),
            (LadderKind::Mobius { n }, n % 2 == 1),
            (LadderKind::Path { n }, true),
        ] {
            let (g, lad) = build_ladder(kind).unwrap();
            let f = ladder_flow(&g, &lad).unwrap();
            let constructed = verified(&g, &f);
            let oracle = z3_oracle(&g, 40).unwrap().is_some();
            if constructed != expected || oracle != expected || f.is_some() != expected {
                mismatches.push(format!("{kind:?}"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && elapsed < Duration::from_secs(5),
        format!("CL/M/L for n = 2..12, mismatches {mismatches:?}, {elapsed:.2?}"),
    )
}

fn rung_dichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checked, mut bad) = (0, Vec::new());
    for n in 2..=6 {
        for kind in [LadderKind::Circular { n }, LadderKind::Mobius { n }] {
            let (g, lad) = build_ladder(kind).unwrap();
            let rails: Vec<EdgeId> = g.edge_ids().filter(|e| !lad.rungs.contains(e)).collect();
            for &rung in &lad.rungs {
                for _ in 0..20 {
                    let extra: BTreeMap<EdgeId, usize> =
                        rails.iter().map(|&e| (e, rng.gen_range(0..3))).collect();
                    let (sg, slad, corr) = subdivide_rails(&g, &lad, &extra).unwrap();
                    let r = corr[&rung].edges[0];
                    let whole = verified(&sg, &ladder_flow(&sg, &slad).unwrap());
                    let minus = without_rung(&sg, &slad, r).unwrap();
                    let mg = sg.restrict(&minus.subgraph);
                    let part = verified(&mg, &ladder_flow(&sg, &minus).unwrap());
                    let oracle_whole = z3_oracle(&sg, 40).unwrap().is_some();
                    let oracle_part = z3_oracle(&mg, 40).unwrap().is_some();
                    checked += 1;
                    if whole == part || whole != oracle_whole || part != oracle_part {
                        bad.push(format!("{kind:?} rung {rung}"));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{checked} (ladder, rung, subdivision) triples, disagreements {}",
            bad.len()
        ),
    )
}

struct Scans {
    catalog: common::ScanSummary,
    supplementary: common::ScanSummary,
    elapsed: Duration,
}

fn run_scans() -> Scans {
    let start = Instant::now();
    let mut catalog = common::ScanSummary::default();
    for g in common::catalog() {
        catalog.merge(common::scan_group(&g, true));
    }
    let mut supplementary = common::ScanSummary::default();
    for g in common::supplementary() {
        supplementary.merge(common::scan_group(&g, true));
    }
    Scans {
        catalog,
        supplementary,
        elapsed: start.elapsed(),
    }
}

fn exhaustive_scan(s: &Scans) -> Outcome {
    let mut pass = s.elapsed <= Duration::from_secs(600);
    let mut parts = Vec::new();
    for (name, sum) in [("catalog", &s.catalog), ("supplementary", &s.supplementary)] {
        pass &= sum.failures.is_empty() && sum.certified == sum.applicable;
        parts.push(format!(
            "{name}: {} instances, {}/{} certified, {} correctly refused",
            sum.instances, sum.certified, sum.applicable, sum.refused_correctly
        ));
        for f in sum.failures.iter().take(5) {
            parts.push(format!("failure {f}"));
        }
    }
    parts.push(format!("{:.1?}", s.elapsed));
    outcome(pass, parts.join("; "))
}

fn oracle_cross_validation(s: &Scans) -> Outcome {
    let checked = s.catalog.oracle_checked + s.supplementary.oracle_checked;
    let bad: Vec<&String> = s
        .catalog
        .oracle_disagreements
        .iter()
        .chain(&s.supplementary.oracle_disagreements)
        .collect();
    outcome(
        checked > 0 && bad.is_empty(),
        format!(
            "{checked} instances of cycle rank <= {}, disagreements {:?}",
            common::ORACLE_RANK,
            bad
        ),
    )
}

type Suite = fn(u64) -> Result<(), String>;

fn composition_suites() -> Outcome {
    let suites: [(&str, Suite); 5] = [
        ("glue", compose::glue_case),
        ("lift", compose::lift_case),
        ("subdivision transfer", compose::subdivision_case),
        ("odd-regular extension", compose::extend_case),
        ("cubic bipartite", compose::cubic_bipartite_case),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, case) in suites {
        let failures: Vec<String> = (0..compose::CASES).filter_map(|s| case(s).err()).collect();
        pass &= failures.is_empty();
        parts.push(format!(
            "{name} {}/{}",
            compose::CASES as usize - failures.len(),
            compose::CASES
        ));
        if let Some(f) = failures.first() {
            parts.push(format!("first failure: {f}"));
        }
    }
    outcome(pass, parts.join(", "))
}

/// Independent path-ladder template: rails `0..n` and `n..2n`, rungs
/// `{i, n + i}`.
fn path_ladder_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n - 1)
        .flat_map(|i| [(i, i + 1), (n + i, n + i + 1)])
        .collect();
    pairs.extend((0..n).map(|i| (i, n + i)));
    pairs
}

/// Backtracking isomorphism test for small simple graphs given as
/// adjacency sets.
fn isomorphic(a: &[BTreeSet<usize>], b: &[BTreeSet<usize>]) -> bool {
    fn extend(
        a: &[BTreeSet<usize>],
        b: &[BTreeSet<usize>],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        if v == a.len() {
            return true;
        }
        for w in 0..b.len() {
            if used[w] || a[v].len() != b[w].len() {
                continue;
            }
            let consistent = (0..v).all(|u| a[v].contains(&u) == b[w].contains(&map[u].unwrap()));
            if consistent {
                map[v] = Some(w);
                used[w] = true;
                if extend(a, b, map, used, v + 1) {
                    return true;
                }
                used[w] = false;
                map[v] = None;
            }
        }
        false
    }
    if a.len() != b.len()
        || a.iter().map(|s| s.len()).sum::<usize>() != b.iter().map(|s| s.len()).sum::<usize>()
    {
        return false;
    }
    extend(a, b, &mut vec![None; a.len()], &mut vec![false; b.len()], 0)
}

fn adjacency(g: &MultiGraph, sub: &Subgraph) -> Vec<BTreeSet<usize>> {
    let index: BTreeMap<usize, usize> = sub
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut adj = vec![BTreeSet::new(); sub.vertices.len()];
    for &e in &sub.edges {
        let ed = g.edge(e).unwrap();
        adj[index[&ed.u]].insert(index[&ed.v]);
        adj[index[&ed.v]].insert(index[&ed.u]);
    }
    adj
}

fn pruned_prism_shapes() -> Outcome {
    // D7 x Z4: b = (r,0) of order 7, U = {(e,1),(e,3)}, z = (s r^j, 0)
    // inverts b and gives lambda = j on e x Z4.
    let g = build_group(&GroupSpec::product(
        GroupSpec::Dihedral { n: 7 },
        GroupSpec::Cyclic { n: 4 },
    ))
    .unwrap();
    let l7: Vec<BTreeSet<usize>> = {
        let pairs = path_ladder_pairs(7);
        let mut adj = vec![BTreeSet::new(); 14];
        for (u, v) in pairs {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    };
    let mut parts = Vec::new();
    let mut pass = true;
    for j in [5, 6] {
        let z = (7 + j) * 4;
        let x = connection_from_list(&g, &[1, 3, 4, g.inv(4), z]).unwrap();
        let cay = build_cayley(&g, &x);
        let pieces = lambda_pieces(&cay, [1, 3], 4, z).unwrap();
        for p in pieces.iter().filter(|p| p.lambda == j) {
            let adj = adjacency(cay.graph(), &p.subgraph);
            let ok = if j == 5 {
                p.shape == (LambdaShape::PathLadder { n: 7 }) && isomorphic(&adj, &l7)
            } else {
                // a cycle plus one chord path: two branch vertices, |E| = |V| + 1,
                // connected, branch vertices g and mu(g)
                let branch: Vec<usize> = p
                    .subgraph
                    .vertices
                    .iter()
                    .copied()
                    .filter(|&v| adj_degree(&adj, &p.subgraph, v) == 3)
                    .collect();
                let rest_two = p
                    .subgraph
                    .vertices
                    .iter()
                    .all(|&v| matches!(adj_degree(&adj, &p.subgraph, v), 2 | 3));
                p.shape == LambdaShape::UniqueRung
                    && branch == {
                        let mut b = vec![p.g, p.mu];
                        b.sort();
                        b
                    }
                    && rest_two
                    && p.subgraph.edges.len() == p.subgraph.vertices.len() + 1
                    && connected(&adj)
            };
            pass &= ok;
            parts.push(format!(
                "lambda {j} at g = {}: {:?} {}",
                p.g,
                p.shape,
                if ok { "ok" } else { "WRONG" }
            ));
        }
        if pieces.iter().all(|p| p.lambda != j) {
            pass = false;
            parts.push(format!("no piece with lambda {j}"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn connected(adj: &[BTreeSet<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn adj_degree(adj: &[BTreeSet<usize>], sub: &Subgraph, v: usize) -> usize {
    let i = sub.vertices.iter().position(|&w| w == v).unwrap();
    adj[i].len()
}

fn group_known_answers() -> Outcome {
    let mut bad = Vec::new();
    for n in 3..=8 {
        let g = build_group(&GroupSpec::Dihedral { n }).unwrap();
        let expected: BTreeSet<usize> = (0..n).map(|i| (2 * i) % n).collect();
        let got: BTreeSet<usize> = derived_subgroup(&g).elements().iter().copied().collect();
        if got != expected {
            bad.push(format!("D{n}' = {got:?}"));
        }
        if !is_supersolvable(&g) {
            bad.push(format!("D{n} not supersolvable"));
        }
    }
    let q8 = build_group(&GroupSpec::Dicyclic { n: 2 }).unwrap();
    if derived_subgroup(&q8) != center(&q8)
        || center(&q8).elements() != [0, 2]
        || !is_supersolvable(&q8)
    {
        bad.push("Q8".into());
    }
    for n in 1..=16 {
        if !is_supersolvable(&build_group(&GroupSpec::Cyclic { n }).unwrap()) {
            bad.push(format!("Z{n}"));
        }
    }
    for g in [common::a4(), common::s4()] {
        if is_supersolvable(&g) {
            bad.push(format!("{} supersolvable", g.name()));
        }
    }
    let mut implications = 0;
    for g in common::catalog().into_iter().chain(common::supplementary()) {
        if has_squarefree_derived(&g) && !is_supersolvable(&g) {
            bad.push(format!(
                "{}: square-free G' but not supersolvable",
                g.name()
            ));
        }
        if is_supersolvable(&g) && has_noncyclic_sylow2(&g) {
            for n in normal_subgroups_in_derived(&g) {
                implications += 1;
                let (q, _) = quotient_group(&g, &n).unwrap();
                if !has_noncyclic_sylow2(&q) {
                    bad.push(format!(
                        "{}/{:?} has a cyclic Sylow 2-subgroup",
                        g.name(),
                        n.elements()
                    ));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{implications} quotient implications checked, wrong {bad:?}"),
    )
}

fn normal_subgroups_in_derived(g: &FiniteGroup) -> Vec<Subgroup> {
    let d = derived_subgroup(g);
    let mut out: Vec<Subgroup> = d
        .elements()
        .iter()
        .map(|&x| normal_closure(g, &[x]))
        .collect();
    out.extend(minimal_normal_in(g, &d));
    out.sort_by(|a, b| a.elements().cmp(b.elements()));
    out.dedup();
    out
}

fn trace_census(s: &Scans) -> Outcome {
    let required: [(&str, &[&str]); 7] = [
        ("central involution", &["central-involution"]),
        ("quotient by a normal subgroup", &["quotient"]),
        ("dihedral of order 2p", &["dihedral-2p"]),
        ("two minimal normal subgroups", &["second-minimal-normal"]),
        (
            "unique minimal normal subgroup",
            &[
                "unique-minimal-normal",
                "three-involutions",
                "rotation-pair",
            ],
        ),
        ("three involutions", &["three-involutions"]),
        ("rotation pair", &["rotation-pair"]),
    ];
    let count = |sum: &common::ScanSummary, labels: &[&str]| -> usize {
        labels
            .iter()
            .map(|l| sum.census.get(*l).copied().unwrap_or(0))
            .sum()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, labels) in required {
        let (c, sup) = (count(&s.catalog, labels), count(&s.supplementary, labels));
        pass &= c + sup > 0;
        parts.push(format!("{name} {c}+{sup}"));
    }
    let final_branch: usize = s
        .supplementary
        .census
        .iter()
        .chain(&s.catalog.census)
        .filter(|(k, _)| k.starts_with("rotation-pair / cycle through"))
        .map(|(_, v)| v)
        .sum();
    parts.push(format!("final rotation-pair construction {final_branch}"));
    let index_route = s
        .supplementary
        .census
        .get("three-involutions / index-two construction")
        .copied()
        .unwrap_or(0)
        + s.catalog
            .census
            .get("three-involutions / index-two construction")
            .copied()
            .unwrap_or(0);
    parts.push(format!(
        "three involutions via the index-two construction {index_route}"
    ));
    outcome(
        pass,
        format!("(catalog+supplementary) {}", parts.join(", ")),
    )
}

fn main() -> ExitCode {
    let scans = run_scans();
    let results = [
        ("ladder parity table", ladder_parity()),
        ("rung-deletion dichotomy", rung_dichotomy()),
        ("exhaustive small-order scan", exhaustive_scan(&scans)),
        ("oracle cross-validation", oracle_cross_validation(&scans)),
        ("composition suites", composition_suites()),
        ("pruned prism shapes", pruned_prism_shapes()),
        ("group known answers", group_known_answers()),
        ("trace census", trace_census(&scans)),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let census: Vec<String> = scans
        .catalog
        .census
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    println!("catalog census: {}", census.join(", "));
    let census: Vec<String> = scans
        .supplementary
        .census
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    println!("supplementary census: {}", census.join(", "));
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, (_, o))| !o.pass)
        .map(|(i, _)| i + 1)
        .collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
