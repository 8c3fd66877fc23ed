use serde::Serialize;

use super::{LadderError, LadderKind};
use crate::cayley::ConnectionMultiset;
use crate::group::{element_order, generated_subgroup, is_normal, is_prime, Element, FiniteGroup};

/// Which shape of cubic Cayley graph was recognized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicCase {
    /// `<y> x <z>`, `X = {y, z, z}`: `CL_2` with rungs `y`.
    KleinDoubled,
    /// `<x, y>`, three involutions, `z = (xy)^n`, `xy` of order `2n`: `M_2n`.
    DihedralMobius,
    /// `<x, y> x <z>`, three involutions, `xy` of order `n`: `CL_2n`.
    DihedralTimesInvolution,
    /// `<x> x <z>`, `X = {x, x^-1, z}`: `CL_|x|`.
    CyclicTimesInvolution,
    /// `<x>` of order `2n`, `z = x^n`: `M_n`.
    CyclicMobius,
    /// `z` inverts `x` of odd prime order: `CL_p`.
    DihedralPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CubicClass {
    Ladder {
        #[serde(flatten)]
        kind: LadderKind,
        rung_involution: Element,
        case: CubicCase,
    },
    NotApplicable,
}

impl CubicClass {
    pub fn rung_involution(&self) -> Option<Element> {
        match self {
            CubicClass::Ladder {
                rung_involution, ..
            } => Some(*rung_involution),
            CubicClass::NotApplicable => None,
        }
    }
}

/// Classifies `Cay(<X3>, X3)` for a connection multiset of cardinality 3,
/// when it contains an involution central in `<X3>` or an element of prime
/// order generating a normal subgroup. Other shapes are `NotApplicable`.
pub fn classify_cubic(
    group: &FiniteGroup,
    x3: &ConnectionMultiset,
) -> Result<CubicClass, LadderError> {
    classify_preferring(group, x3, None)
}

/// As [`classify_cubic`], trying `prefer` first as the rung involution when
/// several choices are possible.
pub(crate) fn classify_preferring(
    group: &FiniteGroup,
    x3: &ConnectionMultiset,
    prefer: Option<Element>,
) -> Result<CubicClass, LadderError> {
    if x3.cardinality() != 3 {
        return Err(LadderError::Precondition(format!(
            "cubic classification needs three elements, got {}",
            x3.cardinality()
        )));
    }
    let xs = x3.elements();
    let h = generated_subgroup(group, &xs);
    if h.order() < 4 {
        return Ok(CubicClass::NotApplicable);
    }
    let central = |z: Element| xs.iter().all(|&x| group.mul(x, z) == group.mul(z, x));
    let ladder = |kind, z, case| CubicClass::Ladder {
        kind,
        rung_involution: z,
        case,
    };
    let support = x3.support();
    if support.len() == 2 && support.iter().all(|&x| group.is_involution(x)) {
        // {y, z, z}
        let (y, z) = if x3.multiplicity(support[0]) == 1 {
            (support[0], support[1])
        } else {
            (support[1], support[0])
        };
        if central(y) || central(z) {
            return Ok(ladder(
                LadderKind::Circular { n: 2 },
                y,
                CubicCase::KleinDoubled,
            ));
        }
        return Ok(CubicClass::NotApplicable);
    }
    if support.len() == 3 && support.iter().all(|&x| group.is_involution(x)) {
        let mut candidates = support.clone();
        if let Some(p) = prefer.filter(|p| candidates.contains(p)) {
            candidates.retain(|&c| c != p);
            candidates.insert(0, p);
        }
        for &z in &candidates {
            if !central(z) {
                continue;
            }
            let others: Vec<Element> = support.iter().copied().filter(|&c| c != z).collect();
            let xy = group.mul(others[0], others[1]);
            let m = element_order(group, xy);
            let inside = generated_subgroup(group, &others);
            if inside.contains(z) {
                if m.is_multiple_of(2) && group.pow(xy, (m / 2) as i64) == z {
                    return Ok(ladder(
                        LadderKind::Mobius { n: m },
                        z,
                        CubicCase::DihedralMobius,
                    ));
                }
            } else {
                return Ok(ladder(
                    LadderKind::Circular { n: 2 * m },
                    z,
                    CubicCase::DihedralTimesInvolution,
                ));
            }
        }
        return Ok(CubicClass::NotApplicable);
    }
    // {x, x^-1, z}
    let Some(&z) = support
        .iter()
        .find(|&&s| group.is_involution(s) && x3.multiplicity(s) == 1)
    else {
        return Ok(CubicClass::NotApplicable);
    };
    let Some(&x) = support.iter().find(|&&s| !group.is_involution(s)) else {
        return Ok(CubicClass::NotApplicable);
    };
    let n = element_order(group, x);
    let cyc = generated_subgroup(group, &[x]);
    if central(z) {
        if cyc.contains(z) {
            return Ok(ladder(
                LadderKind::Mobius { n: n / 2 },
                z,
                CubicCase::CyclicMobius,
            ));
        }
        return Ok(ladder(
            LadderKind::Circular { n },
            z,
            CubicCase::CyclicTimesInvolution,
        ));
    }
    if is_prime(n) && n % 2 == 1 && group.conjugate(x, z) == group.inv(x) {
        debug_assert!(is_normal(group, &cyc) || h.order() < group.order());
        return Ok(ladder(
            LadderKind::Circular { n },
            z,
            CubicCase::DihedralPrime,
        ));
    }
    Ok(CubicClass::NotApplicable)
}
