use std::collections::VecDeque;

use super::{Element, FiniteGroup, GroupError, Subgroup};

/// Least `m >= 1` with `g^m = 1`.
pub fn element_order(group: &FiniteGroup, g: Element) -> usize {
    let mut m = 1;
    let mut x = g;
    while x != 0 {
        x = group.mul(x, g);
        m += 1;
    }
    m
}

/// Closure of `gens` under multiplication. The empty set gives the trivial
/// subgroup.
pub fn generated_subgroup(group: &FiniteGroup, gens: &[Element]) -> Subgroup {
    let n = group.order();
    let gens: Vec<Element> = gens.iter().copied().filter(|&g| g != 0).collect();
    let mut mask = vec![false; n];
    mask[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(h) = queue.pop_front() {
        for &g in &gens {
            let hg = group.mul(h, g);
            if !mask[hg] {
                mask[hg] = true;
                queue.push_back(hg);
            }
        }
    }
    Subgroup::from_members(n, (0..n).filter(|&g| mask[g]))
}

/// Subgroup generated by a subgroup together with extra elements.
pub fn join(group: &FiniteGroup, h: &Subgroup, extra: &[Element]) -> Subgroup {
    let mut gens: Vec<Element> = h.elements().to_vec();
    gens.extend_from_slice(extra);
    generated_subgroup(group, &gens)
}

/// Checks that an element list forms a subgroup and wraps it.
pub fn subgroup_from_elements(
    group: &FiniteGroup,
    elements: &[Element],
) -> Result<Subgroup, GroupError> {
    for &g in elements {
        group.check_element(g)?;
    }
    let candidate = Subgroup::from_members(group.order(), elements.iter().copied());
    let closed = candidate.contains(0)
        && candidate.elements().iter().all(|&a| {
            candidate.contains(group.inv(a))
                && candidate
                    .elements()
                    .iter()
                    .all(|&b| candidate.contains(group.mul(a, b)))
        });
    if closed {
        Ok(candidate)
    } else {
        Err(GroupError::InvalidParameter(format!(
            "{elements:?} is not a subgroup of {}",
            group.name()
        )))
    }
}

pub fn derived_subgroup(group: &FiniteGroup) -> Subgroup {
    let n = group.order();
    let mut comms = vec![false; n];
    for x in 0..n {
        for y in 0..n {
            comms[group.commutator(x, y)] = true;
        }
    }
    let gens: Vec<Element> = (0..n).filter(|&g| comms[g]).collect();
    generated_subgroup(group, &gens)
}

pub fn is_normal(group: &FiniteGroup, h: &Subgroup) -> bool {
    group.elements().all(|g| {
        h.elements()
            .iter()
            .all(|&x| h.contains(group.conjugate(x, g)))
    })
}

pub fn centralizer(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    Subgroup::from_members(
        group.order(),
        group.elements().filter(|&g| {
            h.elements()
                .iter()
                .all(|&x| group.mul(g, x) == group.mul(x, g))
        }),
    )
}

pub fn normalizer(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    Subgroup::from_members(
        group.order(),
        group.elements().filter(|&g| {
            h.elements()
                .iter()
                .all(|&x| h.contains(group.conjugate(x, g)))
        }),
    )
}

pub fn center(group: &FiniteGroup) -> Subgroup {
    Subgroup::from_members(
        group.order(),
        group.elements().filter(|&g| group.is_central(g)),
    )
}

/// Smallest normal subgroup containing `elements`.
pub fn normal_closure(group: &FiniteGroup, elements: &[Element]) -> Subgroup {
    let n = group.order();
    let mut gens = vec![false; n];
    for &x in elements {
        for g in 0..n {
            gens[group.conjugate(x, g)] = true;
        }
    }
    let gens: Vec<Element> = (0..n).filter(|&g| gens[g]).collect();
    generated_subgroup(group, &gens)
}

pub fn is_cyclic(group: &FiniteGroup, h: &Subgroup) -> bool {
    h.elements()
        .iter()
        .any(|&g| element_order(group, g) == h.order())
}

/// The elements of the set product `a * b`, sorted.
pub fn set_product(group: &FiniteGroup, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut mask = vec![false; group.order()];
    for &x in a {
        for &y in b {
            mask[group.mul(x, y)] = true;
        }
    }
    (0..group.order()).filter(|&g| mask[g]).collect()
}

/// Left-coset label of every element: the least member of `gH`.
pub fn left_coset_labels(group: &FiniteGroup, h: &Subgroup) -> Vec<Element> {
    let n = group.order();
    let mut label = vec![usize::MAX; n];
    for g in 0..n {
        if label[g] != usize::MAX {
            continue;
        }
        for &x in h.elements() {
            label[group.mul(g, x)] = g;
        }
    }
    label
}

/// Quotient by a normal subgroup.
///
/// Cosets are numbered by their least member, so the identity coset is 0.
/// Returns the quotient and the projection `g -> index of gN`.
pub fn quotient_group(
    group: &FiniteGroup,
    n: &Subgroup,
) -> Result<(FiniteGroup, Vec<Element>), GroupError> {
    if !is_normal(group, n) {
        return Err(GroupError::NotNormal);
    }
    let labels = left_coset_labels(group, n);
    let mut reps: Vec<Element> = labels.clone();
    reps.sort_unstable();
    reps.dedup();
    let mut index_of = vec![usize::MAX; group.order()];
    for (i, &r) in reps.iter().enumerate() {
        index_of[r] = i;
    }
    let projection: Vec<Element> = labels.iter().map(|&l| index_of[l]).collect();
    let table: Vec<Vec<Element>> = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| projection[group.mul(a, b)]).collect())
        .collect();
    let quotient = FiniteGroup::from_table(format!("{}/N{}", group.name(), n.order()), table)?;
    Ok((quotient, projection))
}

/// Preimage of a quotient subgroup under a projection.
pub fn pull_back(group: &FiniteGroup, projection: &[Element], k: &Subgroup) -> Subgroup {
    Subgroup::from_members(
        group.order(),
        group.elements().filter(|&g| k.contains(projection[g])),
    )
}

/// Minimal normal subgroups of `group` contained in `k`, sorted by element
/// list.
///
/// A nontrivial normal subgroup is minimal exactly when it is the normal
/// closure of each of its nonidentity elements, so the search runs over
/// normal closures of single elements.
pub fn minimal_normal_in(group: &FiniteGroup, k: &Subgroup) -> Vec<Subgroup> {
    let n = group.order();
    let mut closures: Vec<Option<Subgroup>> = vec![None; n];
    for &g in k.elements() {
        if g != 0 {
            closures[g] = Some(normal_closure(group, &[g]));
        }
    }
    let mut out: Vec<Subgroup> = Vec::new();
    for &g in k.elements() {
        let Some(cl) = &closures[g] else { continue };
        if !cl.is_subgroup_of(k) {
            continue;
        }
        let minimal = cl.elements().iter().filter(|&&h| h != 0).all(|&h| {
            closures[h]
                .as_ref()
                .map_or_else(|| normal_closure(group, &[h]) == *cl, |c| c == cl)
        });
        if minimal && !out.contains(cl) {
            out.push(cl.clone());
        }
    }
    out.sort();
    out
}

/// A chief series `1 = G_0 < G_1 < ... < G_r = G`, choosing the least
/// minimal normal subgroup of each successive quotient.
pub fn chief_series(group: &FiniteGroup) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::trivial(group.order())];
    loop {
        let current = series.last().unwrap().clone();
        if current.order() == group.order() {
            return series;
        }
        let (q, proj) = quotient_group(group, &current).expect("chief series terms are normal");
        let mins = minimal_normal_in(&q, &Subgroup::whole(&q));
        let next = pull_back(group, &proj, &mins[0]);
        series.push(next);
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_squarefree(n: usize) -> bool {
    prime_factors(n).iter().all(|&p| !(n / p).is_multiple_of(p))
}

/// Supersolvable iff every chief factor has prime order.
pub fn is_supersolvable(group: &FiniteGroup) -> bool {
    chief_series(group)
        .windows(2)
        .all(|w| is_prime(w[1].order() / w[0].order()))
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// A Sylow `p`-subgroup, grown greedily: adjoin the least `p`-element of the
/// normalizer that lies outside the current subgroup until none remains.
pub fn sylow_subgroup(group: &FiniteGroup, p: usize) -> Subgroup {
    let orders: Vec<usize> = group.elements().map(|g| element_order(group, g)).collect();
    let mut current = Subgroup::trivial(group.order());
    loop {
        let norm = normalizer(group, &current);
        let next = norm
            .elements()
            .iter()
            .copied()
            .find(|&g| !current.contains(g) && is_power_of(orders[g], p));
        match next {
            Some(g) => current = join(group, &current, &[g]),
            None => return current,
        }
    }
}

pub fn has_noncyclic_sylow2(group: &FiniteGroup) -> bool {
    let p = sylow_subgroup(group, 2);
    !is_cyclic(group, &p)
}

/// Nilpotent iff every Sylow subgroup is normal.
pub fn is_nilpotent(group: &FiniteGroup) -> bool {
    prime_factors(group.order())
        .into_iter()
        .all(|p| is_normal(group, &sylow_subgroup(group, p)))
}

pub fn has_squarefree_derived(group: &FiniteGroup) -> bool {
    is_squarefree(derived_subgroup(group).order())
}

/// One representative per left coset of `h`, containing every element of
/// `c`. Elements of `c` come first (in increasing order), followed by the
/// least element of each remaining coset.
pub fn left_transversal(
    group: &FiniteGroup,
    h: &Subgroup,
    c: &Subgroup,
) -> Result<Vec<Element>, GroupError> {
    if !c.intersection(h).is_trivial() {
        return Err(GroupError::NontrivialIntersection);
    }
    let labels = left_coset_labels(group, h);
    let mut covered = vec![false; group.order()];
    let mut out = Vec::new();
    for &x in c.elements() {
        covered[labels[x]] = true;
        out.push(x);
    }
    for g in group.elements() {
        if labels[g] == g && !covered[g] {
            out.push(g);
        }
    }
    Ok(out)
}
