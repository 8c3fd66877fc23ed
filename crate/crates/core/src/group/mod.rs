//! Finite groups stored as multiplication tables.
//!
//! Elements are indices `0..order`, and index 0 is always the identity.
//! Everything here is a pure function of the table, so groups are plain
//! values that can be cloned and shared freely.

mod ops;
mod spec;

pub use ops::*;
pub use spec::{build_group, resolve_word, GroupSpec};

use std::fmt;

use thiserror::Error;

/// Index of a group element.
pub type Element = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is empty")]
    Empty,
    #[error("multiplication table is not square (row {row} has {len} entries, expected {order})")]
    NotSquare {
        row: usize,
        len: usize,
        order: usize,
    },
    #[error("table entry {value} at ({row}, {col}) is out of range for order {order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("element 0 does not act as the identity (row or column {0})")]
    IdentityLaw(usize),
    #[error("table is not a Latin square: {0}")]
    NotLatin(String),
    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid semidirect action: {0}")]
    InvalidAction(String),
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("subgroups intersect nontrivially")]
    NontrivialIntersection,
    #[error("cannot resolve word {word:?}: {reason}")]
    BadWord { word: String, reason: String },
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<Element>,
    inverses: Vec<Element>,
    generator_names: Vec<(String, Element)>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[g][h] = g*h`) and wraps it.
    ///
    /// Checks range, identity law, the Latin property and associativity
    /// (cubic in the order, fine at the sizes this crate targets).
    pub fn from_table(
        name: impl Into<String>,
        table: Vec<Vec<Element>>,
    ) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut flat = Vec::with_capacity(order * order);
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange {
                        row,
                        col,
                        value,
                        order,
                    });
                }
            }
            flat.extend_from_slice(entries);
        }
        for g in 0..order {
            if flat[g] != g || flat[g * order] != g {
                return Err(GroupError::IdentityLaw(g));
            }
        }
        let mut seen = vec![false; order];
        for r in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for c in 0..order {
                let v = flat[r * order + c];
                if seen[v] {
                    return Err(GroupError::NotLatin(format!("row {r} repeats {v}")));
                }
                seen[v] = true;
            }
        }
        for c in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for r in 0..order {
                let v = flat[r * order + c];
                if seen[v] {
                    return Err(GroupError::NotLatin(format!("column {c} repeats {v}")));
                }
                seen[v] = true;
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = flat[a * order + b];
                for c in 0..order {
                    if flat[ab * order + c] != flat[a * order + flat[b * order + c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let mut inverses = vec![0; order];
        for g in 0..order {
            inverses[g] = (0..order)
                .find(|&h| flat[g * order + h] == 0)
                .expect("Latin rows contain the identity");
        }
        Ok(FiniteGroup {
            name: name.into(),
            order,
            table: flat,
            inverses,
            generator_names: Vec::new(),
        })
    }

    pub(crate) fn with_generator_names(mut self, names: Vec<(String, Element)>) -> Self {
        self.generator_names = names;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    /// Named generators usable in element words (empty for raw tables).
    pub fn generator_names(&self) -> &[(String, Element)] {
        &self.generator_names
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inverses[a]
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// `g^-1 h g`.
    pub fn conjugate(&self, h: Element, g: Element) -> Element {
        self.mul(self.mul(self.inv(g), h), g)
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(&self, x: Element, y: Element) -> Element {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(self.inv(yx), xy)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_involution(&self, g: Element) -> bool {
        g != 0 && self.mul(g, g) == 0
    }

    pub fn is_central(&self, g: Element) -> bool {
        (0..self.order).all(|h| self.mul(g, h) == self.mul(h, g))
    }

    /// Raw row-major table, `order * order` entries.
    pub fn table_rows(&self) -> Vec<Vec<Element>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn check_element(&self, g: Element) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange(g))
        }
    }
}

/// A subgroup, stored as a sorted element list plus a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<Element>,
    mask: Vec<bool>,
}

impl Subgroup {
    /// Wraps an element set already known to be a subgroup of a group of
    /// order `parent_order`.
    pub(crate) fn from_members(
        parent_order: usize,
        members: impl IntoIterator<Item = Element>,
    ) -> Self {
        let mut mask = vec![false; parent_order];
        for g in members {
            mask[g] = true;
        }
        let elements = (0..parent_order).filter(|&g| mask[g]).collect();
        Subgroup { elements, mask }
    }

    pub fn trivial(parent_order: usize) -> Self {
        Self::from_members(parent_order, [0])
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self::from_members(group.order(), group.elements())
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    #[inline]
    pub fn contains(&self, g: Element) -> bool {
        self.mask.get(g).copied().unwrap_or(false)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_members(
            self.mask.len(),
            self.elements.iter().copied().filter(|&g| other.contains(g)),
        )
    }
}
