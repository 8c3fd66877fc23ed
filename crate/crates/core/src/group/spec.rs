use serde::{Deserialize, Serialize};

use super::{element_order, Element, FiniteGroup, GroupError};

/// Declarative description of a group.
///
/// Family constructors fix the element order:
/// - `cyclic(n)`: index `i` is `a^i`;
/// - `dihedral(n)`: index `i` is `r^i`, index `n + i` is `s r^i`;
/// - `dicyclic(n)` (order `4n`): index `e*2n + i` is `a^i x^e`, with
///   `x a = a^-1 x` and `x^2 = a^n`;
/// - `product(A, B)`: index `a*|B| + b` is `(a, b)`;
/// - `semidirect(K, H, phi)`: index `h*|K| + k` is `(k, h)`, multiplied as
///   `(k1, h1)(k2, h2) = (k1 * phi^h1(k2), h1 h2)`. `H` must be cyclic with
///   element 1 as generator, and `phi` is the automorphism of `K` that
///   element induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Table {
        table: Vec<Vec<Element>>,
    },
    Cyclic {
        n: usize,
    },
    Dihedral {
        n: usize,
    },
    Dicyclic {
        n: usize,
    },
    Product {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
    Semidirect {
        normal: Box<GroupSpec>,
        acting: Box<GroupSpec>,
        action: Vec<Element>,
    },
}

impl GroupSpec {
    pub fn product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

fn positive(n: usize, family: &str) -> Result<(), GroupError> {
    if n == 0 {
        Err(GroupError::InvalidParameter(format!("{family}(0)")))
    } else {
        Ok(())
    }
}

fn table_from(n: usize, mul: impl Fn(usize, usize) -> usize) -> Vec<Vec<Element>> {
    (0..n)
        .map(|a| (0..n).map(|b| mul(a, b)).collect())
        .collect()
}

pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
    match spec {
        GroupSpec::Table { table } => FiniteGroup::from_table("table", table.clone()),
        &GroupSpec::Cyclic { n } => {
            positive(n, "cyclic")?;
            let g = FiniteGroup::from_table(format!("Z{n}"), table_from(n, |a, b| (a + b) % n))?;
            Ok(g.with_generator_names(vec![("a".into(), 1 % n)]))
        }
        &GroupSpec::Dihedral { n } => {
            positive(n, "dihedral")?;
            let table = table_from(2 * n, |x, y| {
                let (a, i) = (x / n, x % n);
                let (b, j) = (y / n, y % n);
                let i = if b == 1 { (n - i) % n } else { i };
                ((a + b) % 2) * n + (i + j) % n
            });
            let g = FiniteGroup::from_table(format!("D{n}"), table)?;
            Ok(g.with_generator_names(vec![("r".into(), 1 % n), ("s".into(), n)]))
        }
        &GroupSpec::Dicyclic { n } => {
            positive(n, "dicyclic")?;
            let m = 2 * n;
            let table = table_from(2 * m, |x, y| {
                let (e, i) = (x / m, x % m);
                let (f, j) = (y / m, y % m);
                if e == 0 {
                    f * m + (i + j) % m
                } else if f == 0 {
                    m + (i + m - j) % m
                } else {
                    (i + m - j + n) % m
                }
            });
            let g = FiniteGroup::from_table(format!("Dic{n}"), table)?;
            Ok(g.with_generator_names(vec![("a".into(), 1 % m), ("x".into(), m)]))
        }
        GroupSpec::Product { left, right } => {
            let a = build_group(left)?;
            let b = build_group(right)?;
            let nb = b.order();
            let table = table_from(a.order() * nb, |x, y| {
                a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
            });
            let mut names: Vec<(String, Element)> = a
                .generator_names()
                .iter()
                .map(|(s, g)| (format!("L.{s}"), g * nb))
                .collect();
            names.extend(
                b.generator_names()
                    .iter()
                    .map(|(s, g)| (format!("R.{s}"), *g)),
            );
            let g = FiniteGroup::from_table(format!("{}x{}", a.name(), b.name()), table)?;
            Ok(g.with_generator_names(names))
        }
        GroupSpec::Semidirect {
            normal,
            acting,
            action,
        } => {
            let k = build_group(normal)?;
            let h = build_group(acting)?;
            let nk = k.order();
            let nh = h.order();
            let powers = action_powers(&k, &h, action)?;
            // exponent[h] = e with 1^e = h in the acting group
            let mut exponent = vec![0usize; nh];
            let mut x = 0;
            for e in 0..nh {
                exponent[x] = e;
                x = h.mul(x, 1 % nh);
            }
            let table = table_from(nk * nh, |x, y| {
                let (h1, k1) = (x / nk, x % nk);
                let (h2, k2) = (y / nk, y % nk);
                h.mul(h1, h2) * nk + k.mul(k1, powers[exponent[h1]][k2])
            });
            let mut names: Vec<(String, Element)> = k
                .generator_names()
                .iter()
                .map(|(s, g)| (format!("N.{s}"), *g))
                .collect();
            names.extend(
                h.generator_names()
                    .iter()
                    .map(|(s, g)| (format!("H.{s}"), g * nk)),
            );
            let g = FiniteGroup::from_table(format!("{}:{}", k.name(), h.name()), table)?;
            Ok(g.with_generator_names(names))
        }
    }
}

/// Validates the action permutation and returns `phi^0 .. phi^(|H|-1)`.
fn action_powers(
    k: &FiniteGroup,
    h: &FiniteGroup,
    action: &[Element],
) -> Result<Vec<Vec<Element>>, GroupError> {
    let nk = k.order();
    let nh = h.order();
    if action.len() != nk {
        return Err(GroupError::InvalidAction(format!(
            "permutation has {} entries, normal factor has order {nk}",
            action.len()
        )));
    }
    let mut seen = vec![false; nk];
    for &v in action {
        if v >= nk || seen[v] {
            return Err(GroupError::InvalidAction("not a permutation".into()));
        }
        seen[v] = true;
    }
    for a in 0..nk {
        for b in 0..nk {
            if action[k.mul(a, b)] != k.mul(action[a], action[b]) {
                return Err(GroupError::InvalidAction(format!(
                    "not a homomorphism at ({a}, {b})"
                )));
            }
        }
    }
    if nh > 1 && element_order(h, 1) != nh {
        return Err(GroupError::InvalidAction(
            "acting factor must be cyclic with element 1 as generator".into(),
        ));
    }
    let mut powers = vec![(0..nk).collect::<Vec<_>>()];
    for _ in 1..nh {
        let last = powers.last().unwrap();
        powers.push(last.iter().map(|&x| action[x]).collect());
    }
    let full: Vec<Element> = powers.last().unwrap().iter().map(|&x| action[x]).collect();
    if full.iter().enumerate().any(|(i, &x)| i != x) {
        return Err(GroupError::InvalidAction(format!(
            "action order does not divide {nh}"
        )));
    }
    Ok(powers)
}

/// Resolves a word such as `"r^2 s"` or `"L.a R.r^-1"` using the group's
/// generator names. A bare integer is taken as a raw element index, and
/// `"e"` or `"1"` as the identity.
pub fn resolve_word(group: &FiniteGroup, word: &str) -> Result<Element, GroupError> {
    let bad = |reason: &str| GroupError::BadWord {
        word: word.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = word.trim();
    if trimmed.is_empty() {
        return Err(bad("empty word"));
    }
    if let Ok(idx) = trimmed.parse::<usize>() {
        return if idx < group.order() {
            Ok(idx)
        } else {
            Err(bad("element index out of range"))
        };
    }
    let mut acc = 0;
    for token in trimmed.split(|c: char| c.is_whitespace() || c == '*') {
        if token.is_empty() || token == "e" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad("bad exponent"))?),
            None => (token, 1),
        };
        let g = group
            .generator_names()
            .iter()
            .find(|(s, _)| s == name)
            .map(|(_, g)| *g)
            .ok_or_else(|| bad(&format!("unknown generator {name:?}")))?;
        acc = group.mul(acc, group.pow(g, exp));
    }
    Ok(acc)
}
