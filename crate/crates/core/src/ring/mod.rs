//! The graded GF(2) algebra `H*(M̄_{n,n-2k})`.
//!
//! The algebra is generated by `R, V_1, …, V_{n-1}` in degree 1. A product
//! of `k` distinct `V_i` vanishes, and all monomials of degree `d` with the
//! same set `S` of `V`-indices (each exponent positive) coincide; that
//! common class is written `T_{S,d}`. The classes `T_{S,d}` with
//! `|S| <= min(k-1, d)` span degree `d`, subject to one relation
//! `Σ_{S ⊆ L} T_{S,d} = 0` for each `L` with `n - k <= |L| <= d + 1`.

mod functional;
mod presentation;

pub use functional::{check_closed_form, Functional, FunctionalCheck, FunctionalKind};
pub use presentation::CohomologyRing;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// A set of `V`-generator indices, bit `i` standing for `V_i` (`1 <= i <= 63`).
///
/// Ordered by size, then lexicographically on the sorted index lists.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Support(pub u64);

impl Support {
    pub const EMPTY: Support = Support(0);

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut bits = 0u64;
        for i in indices {
            assert!((1..64).contains(&i), "generator index {i} out of range");
            bits |= 1 << i;
        }
        Support(bits)
    }

    pub fn singleton(i: u32) -> Self {
        Support::from_indices([i])
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: u32) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn union(self, other: Support) -> Support {
        Support(self.0 | other.0)
    }

    #[inline]
    pub fn is_subset(self, other: Support) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = u32> {
        let mut w = self.0;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let i = w.trailing_zeros();
            w &= w - 1;
            Some(i)
        })
    }

    /// Every subset of `self`, in no particular order.
    pub fn submasks(self) -> impl Iterator<Item = Support> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Support(cur))
        })
    }
}

impl Ord for Support {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {
                if self.0 == other.0 {
                    return Ordering::Equal;
                }
                let diff = self.0 ^ other.0;
                let lowest = diff & diff.wrapping_neg();
                if self.0 & lowest != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            ord => ord,
        }
    }
}

impl PartialOrd for Support {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{")?;
        for (j, i) in self.indices().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Support {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len() as usize))?;
        for i in self.indices() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

/// All `size`-subsets of `{1, …, universe}` in lexicographic order.
pub fn subsets_of_size(universe: u32, size: u32) -> Vec<Support> {
    let mut out = Vec::new();
    if size > universe {
        return out;
    }
    let size = size as usize;
    let mut idx: Vec<u32> = (1..=size as u32).collect();
    loop {
        out.push(Support::from_indices(idx.iter().copied()));
        // advance to the next combination
        let mut pos = size;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < universe - (size - 1 - pos) as u32 {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The class `T_{S,d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisClass {
    pub degree: u32,
    pub support: Support,
}

impl BasisClass {
    pub fn new(support: Support, degree: u32) -> Self {
        BasisClass { degree, support }
    }

    /// Monomial product in the presentation: supports unite, degrees add.
    /// `None` when `k` or more distinct `V`s meet or the degree passes `top`.
    #[inline]
    pub fn times(self, other: BasisClass, k: u32, top: u32) -> Option<BasisClass> {
        let support = self.support.union(other.support);
        let degree = self.degree + other.degree;
        (support.len() < k && degree <= top).then_some(BasisClass { degree, support })
    }
}

impl fmt::Display for BasisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{:?},{}", self.support, self.degree)
    }
}

impl Serialize for BasisClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BasisClass", 2)?;
        st.serialize_field("support", &self.support)?;
        st.serialize_field("degree", &self.degree)?;
        st.end()
    }
}

/// A homogeneous GF(2) combination of classes `T_{S,d}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub degree: u32,
    pub terms: BTreeSet<Support>,
}

impl RingElement {
    pub fn zero(degree: u32) -> Self {
        RingElement {
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn class(support: Support, degree: u32) -> Self {
        let mut x = RingElement::zero(degree);
        x.terms.insert(support);
        x
    }

    pub fn from_terms<I: IntoIterator<Item = Support>>(degree: u32, terms: I) -> Self {
        let mut x = RingElement::zero(degree);
        for s in terms {
            x.toggle(s);
        }
        x
    }

    /// `R`
    pub fn r() -> Self {
        RingElement::class(Support::EMPTY, 1)
    }

    /// `V_i`
    pub fn v(i: u32) -> Self {
        RingElement::class(Support::singleton(i), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds one copy of `T_{support, degree}` (GF(2), so presence toggles).
    pub fn toggle(&mut self, support: Support) {
        if !self.terms.remove(&support) {
            self.terms.insert(support);
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.degree, other.degree, "adding elements of different degrees");
        let mut out = self.clone();
        for s in &other.terms {
            out.toggle(*s);
        }
        out
    }

    pub fn classes(&self) -> impl Iterator<Item = BasisClass> + '_ {
        self.terms.iter().map(|s| BasisClass::new(*s, self.degree))
    }
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RingElement", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (j, c) in self.classes().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
