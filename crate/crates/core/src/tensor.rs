//! Products of zero-divisors `y⊗1 + 1⊗y` in `H* ⊗ H*`.
//!
//! Elements are stored on the presentation level: each bidegree component
//! is a GF(2) set of pairs `T_{S,a} ⊗ T_{S',b}`. Pairs whose left or right
//! class vanishes (too many distinct `V`s, or degree above `n-3`) are
//! dropped as soon as they appear. Passing to cohomology proper is done on
//! demand by [`TensorElement::reduce_in`]; the functionals used for
//! evaluation are constant on relation cosets, so no reduction is needed
//! before [`TensorElement::pair_evaluate`].

use serde::ser::{SerializeMap, SerializeStruct, SerializeTuple};
use serde::{Serialize, Serializer};
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::ring::{BasisClass, CohomologyRing, Functional, Support};

/// A degree-one class `r·R + Σ v_i V_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct H1Vector {
    pub r: bool,
    pub v: Support,
}

impl H1Vector {
    pub const R: H1Vector = H1Vector {
        r: true,
        v: Support::EMPTY,
    };

    pub fn v(i: u32) -> Self {
        H1Vector {
            r: false,
            v: Support::singleton(i),
        }
    }

    pub fn new(r: bool, v: Support) -> Self {
        H1Vector { r, v }
    }

    pub fn is_zero(&self) -> bool {
        !self.r && self.v.is_empty()
    }

    /// The degree-one classes making up this vector.
    pub fn classes(&self) -> impl Iterator<Item = BasisClass> + '_ {
        self.r
            .then_some(BasisClass::new(Support::EMPTY, 1))
            .into_iter()
            .chain(self.v.indices().map(|i| BasisClass::new(Support::singleton(i), 1)))
    }

    /// `Some` when the vector is a single generator `R` or `V_i`.
    pub fn as_generator(&self) -> Option<(char, u32)> {
        match (self.r, self.v.len()) {
            (true, 0) => Some(('R', 0)),
            (false, 1) => Some(('V', self.v.indices().next().unwrap())),
            _ => None,
        }
    }
}

impl fmt::Debug for H1Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for H1Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.r {
            parts.push("R".to_string());
        }
        parts.extend(self.v.indices().map(|i| format!("V{i}")));
        write!(f, "{}", parts.join("+"))
    }
}

/// One term `T_{S,a} ⊗ T_{S',b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiClass {
    pub left: BasisClass,
    pub right: BasisClass,
}

impl fmt::Display for BiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊗ {}", self.left, self.right)
    }
}

type Pair = (Support, Support);

/// Sorts and cancels repeated pairs (coefficients are bits).
fn canonicalize(mut terms: Vec<Pair>) -> Vec<Pair> {
    terms.sort_unstable();
    let mut out = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i + 1;
        while j < terms.len() && terms[j] == terms[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(terms[i]);
        }
        i = j;
    }
    out
}

/// A bigraded element of `H* ⊗ H*` for a fixed `(n, k)`.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    n: u32,
    k: u32,
    /// Bidegree to canonical (sorted, duplicate-free) term list.
    components: BTreeMap<(u32, u32), Vec<Pair>>,
}

impl TensorElement {
    pub fn zero(n: u32, k: u32) -> Self {
        TensorElement {
            n,
            k,
            components: BTreeMap::new(),
        }
    }

    /// `T_{∅,0} ⊗ T_{∅,0}`
    pub fn identity(n: u32, k: u32) -> Self {
        let mut x = TensorElement::zero(n, k);
        x.components.insert((0, 0), vec![(Support::EMPTY, Support::EMPTY)]);
        x
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn top(&self) -> u32 {
        self.n - 3
    }

    /// `y⊗1 + 1⊗y`.
    pub fn zero_divisor(n: u32, k: u32, y: H1Vector) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::InvalidArgument(
                "the zero class does not give a useful zero-divisor".into(),
            ));
        }
        if let Some(i) = y.v.indices().find(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!(
                "V{i} is not a generator for n = {n}"
            )));
        }
        let mut x = TensorElement::zero(n, k);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for c in y.classes() {
            left.push((c.support, Support::EMPTY));
            right.push((Support::EMPTY, c.support));
        }
        x.components.insert((1, 0), canonicalize(left));
        x.components.insert((0, 1), canonicalize(right));
        Ok(x)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.components.keys().copied()
    }

    /// Terms of the `(a, b)` component, in canonical order.
    pub fn component(&self, a: u32, b: u32) -> Vec<BiClass> {
        self.components
            .get(&(a, b))
            .map(|terms| {
                terms
                    .iter()
                    .map(|&(l, r)| BiClass {
                        left: BasisClass::new(l, a),
                        right: BasisClass::new(r, b),
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = BiClass> + '_ {
        self.components.iter().flat_map(|(&(a, b), terms)| {
            terms.iter().map(move |&(l, r)| BiClass {
                left: BasisClass::new(l, a),
                right: BasisClass::new(r, b),
            })
        })
    }

    fn check_compatible(&self, other: &TensorElement) {
        assert_eq!(
            (self.n, self.k),
            (other.n, other.k),
            "tensor elements for different (n, k)"
        );
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        self.check_compatible(other);
        let mut out = self.clone();
        for (bd, terms) in &other.components {
            let merged: Vec<Pair> = out
                .components
                .remove(bd)
                .unwrap_or_default()
                .into_iter()
                .chain(terms.iter().copied())
                .collect();
            let merged = canonicalize(merged);
            if !merged.is_empty() {
                out.components.insert(*bd, merged);
            }
        }
        out
    }

    /// Product, keeping only components with `a <= bound.0` and `b <= bound.1`.
    fn mul_bounded(&self, other: &TensorElement, bound: (u32, u32)) -> TensorElement {
        self.check_compatible(other);
        let cap = self.k;
        let mut raw: HashMap<(u32, u32), Vec<Pair>> = HashMap::new();
        for (&(a1, b1), xs) in &self.components {
            for (&(a2, b2), ys) in &other.components {
                let (a, b) = (a1 + a2, b1 + b2);
                if a > bound.0 || b > bound.1 {
                    continue;
                }
                let out = raw.entry((a, b)).or_default();
                for &(l1, r1) in xs {
                    for &(l2, r2) in ys {
                        let l = l1.union(l2);
                        let r = r1.union(r2);
                        if l.len() < cap && r.len() < cap {
                            out.push((l, r));
                        }
                    }
                }
            }
        }
        let mut result = TensorElement::zero(self.n, self.k);
        for (bd, terms) in raw {
            let terms = canonicalize(terms);
            if !terms.is_empty() {
                result.components.insert(bd, terms);
            }
        }
        result
    }

    /// `(x⊗x')(y⊗y') = xy ⊗ x'y'`, truncated above `(n-3, n-3)`.
    pub fn multiply(&self, other: &TensorElement) -> TensorElement {
        self.mul_bounded(other, (self.top(), self.top()))
    }

    fn power_bounded(&self, e: u32, bound: (u32, u32)) -> TensorElement {
        let mut result = TensorElement::identity(self.n, self.k);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_bounded(&base, bound);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_bounded(&base, bound);
            }
        }
        result
    }

    /// `self^e` by square-and-multiply.
    pub fn power(&self, e: u32) -> TensorElement {
        self.power_bounded(e, (self.top(), self.top()))
    }

    /// Exchanges the two tensor factors.
    pub fn swap(&self) -> TensorElement {
        let mut out = TensorElement::zero(self.n, self.k);
        for (&(a, b), terms) in &self.components {
            out.components.insert(
                (b, a),
                canonicalize(terms.iter().map(|&(l, r)| (r, l)).collect()),
            );
        }
        out
    }

    /// `Σ φ_left(x) φ_right(y)` over the terms `x ⊗ y` of the matching component.
    pub fn pair_evaluate(&self, left: &Functional, right: &Functional) -> bool {
        self.components
            .get(&(left.degree(), right.degree()))
            .map(|terms| {
                terms
                    .iter()
                    .fold(false, |acc, &(l, r)| acc ^ (left.value(l) && right.value(r)))
            })
            .unwrap_or(false)
    }

    /// Coordinates in `H^a ⊗ H^b` for each bidegree: row `i` of component
    /// `(a, b)` holds the coefficients of `e_i ⊗ f_j` where `e`, `f` are the
    /// normal bases of the ring. Zero components are omitted.
    pub fn reduce_in(&self, ring: &CohomologyRing) -> Result<BTreeMap<(u32, u32), Vec<BitVec>>> {
        if (ring.n(), ring.k()) != (self.n, self.k) {
            return Err(Error::InvalidArgument("ring does not match tensor element".into()));
        }
        let mut out = BTreeMap::new();
        for (&(a, b), terms) in &self.components {
            let rows = ring.dim(a)?;
            let cols = ring.dim(b)?;
            let mut m = vec![BitVec::zeros(cols); rows];
            let mut left_cache: HashMap<Support, BitVec> = HashMap::new();
            let mut right_cache: HashMap<Support, BitVec> = HashMap::new();
            for &(l, r) in terms {
                if let Entry::Vacant(e) = left_cache.entry(l) {
                    e.insert(ring.class_coordinates(l, a)?);
                }
                if let Entry::Vacant(e) = right_cache.entry(r) {
                    e.insert(ring.class_coordinates(r, b)?);
                }
                let rv = &right_cache[&r];
                for i in left_cache[&l].ones() {
                    m[i].xor_assign(rv);
                }
            }
            if m.iter().any(|row| !row.is_zero()) {
                out.insert((a, b), m);
            }
        }
        Ok(out)
    }

    /// Whether the element vanishes in `H* ⊗ H*`.
    pub fn is_zero_in(&self, ring: &CohomologyRing) -> Result<bool> {
        Ok(self.reduce_in(ring)?.is_empty())
    }
}

fn check_factors(factors: &[(H1Vector, u32)]) -> Result<()> {
    if let Some((y, _)) = factors.iter().find(|(y, _)| y.is_zero()) {
        return Err(Error::InvalidArgument(format!("zero factor {y}")));
    }
    Ok(())
}

fn expand_bounded(
    n: u32,
    k: u32,
    factors: &[(H1Vector, u32)],
    bound: (u32, u32),
) -> Result<TensorElement> {
    check_factors(factors)?;
    // Small exponents first: with a tight bound the last, largest power is
    // then almost entirely pruned.
    let mut order: Vec<&(H1Vector, u32)> = factors.iter().collect();
    order.sort_by_key(|(_, e)| *e);
    let mut acc = TensorElement::identity(n, k);
    for &(y, e) in order {
        if e == 0 {
            continue;
        }
        let f = TensorElement::zero_divisor(n, k, y)?.power_bounded(e, bound);
        acc = acc.mul_bounded(&f, bound);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `Π (y⊗1 + 1⊗y)^e` over the factor list, truncated above `(n-3, n-3)`.
///
/// Total exponents above `2n-6` always give zero.
pub fn expand(n: u32, k: u32, factors: &[(H1Vector, u32)]) -> Result<TensorElement> {
    expand_bounded(n, k, factors, (n - 3, n - 3))
}

/// The `target` component of [`expand`], computed with components that
/// cannot reach the target pruned along the way.
pub fn expand_component(
    n: u32,
    k: u32,
    factors: &[(H1Vector, u32)],
    target: (u32, u32),
) -> Result<TensorElement> {
    let total: u32 = factors.iter().map(|(_, e)| *e).sum();
    if target.0 > n - 3 || target.1 > n - 3 || target.0 + target.1 != total {
        return Ok(TensorElement::zero(n, k));
    }
    let full = expand_bounded(n, k, factors, target)?;
    let mut out = TensorElement::zero(n, k);
    if let Some(terms) = full.components.get(&target) {
        out.components.insert(target, terms.clone());
    }
    Ok(out)
}

struct ComponentTerms<'a>(&'a [Pair]);

impl Serialize for ComponentTerms<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (l, r) in self.0 {
            seq.serialize_element(&PairJson(*l, *r))?;
        }
        seq.end()
    }
}

struct PairJson(Support, Support);

impl Serialize for PairJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.0)?;
        t.serialize_element(&self.1)?;
        t.end()
    }
}

struct Components<'a>(&'a BTreeMap<(u32, u32), Vec<Pair>>);

impl Serialize for Components<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for ((a, b), terms) in self.0 {
            map.serialize_entry(&format!("{a},{b}"), &ComponentTerms(terms))?;
        }
        map.end()
    }
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TensorElement", 1)?;
        st.serialize_field("components", &Components(&self.components))?;
        st.end()
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (j, t) in self.terms().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::decompose;
    use crate::ring::FunctionalKind;

    fn t(s: &[u32], d: u32) -> BasisClass {
        BasisClass::new(Support::from_indices(s.iter().copied()), d)
    }

    fn bi(l: BasisClass, r: BasisClass) -> BiClass {
        BiClass { left: l, right: r }
    }

    #[test]
    fn zero_divisor_shapes() {
        let x = TensorElement::zero_divisor(6, 2, H1Vector::v(1)).unwrap();
        assert_eq!(x.component(1, 0), vec![bi(t(&[1], 1), t(&[], 0))]);
        assert_eq!(x.component(0, 1), vec![bi(t(&[], 0), t(&[1], 1))]);
        let r = TensorElement::zero_divisor(6, 2, H1Vector::R).unwrap();
        assert_eq!(r.component(1, 0), vec![bi(t(&[], 1), t(&[], 0))]);
        let y = H1Vector::new(true, Support::singleton(2));
        let s = TensorElement::zero_divisor(6, 2, y).unwrap();
        assert_eq!(s.component(1, 0).len(), 2);
        assert_eq!(s.component(0, 1).len(), 2);
        assert!(TensorElement::zero_divisor(6, 2, H1Vector::new(false, Support::EMPTY)).is_err());
        assert!(TensorElement::zero_divisor(6, 2, H1Vector::v(6)).is_err());
    }

    #[test]
    fn square_of_zero_divisor_loses_cross_terms() {
        let z = TensorElement::zero_divisor(8, 3, H1Vector::v(1)).unwrap();
        let sq = z.multiply(&z);
        let bds: Vec<_> = sq.bidegrees().collect();
        assert_eq!(bds, vec![(0, 2), (2, 0)]);
        assert_eq!(sq.component(2, 0), vec![bi(t(&[1], 2), t(&[], 0))]);
        assert_eq!(sq, z.power(2));
    }

    #[test]
    fn product_with_zero_is_zero() {
        let z = TensorElement::zero_divisor(6, 2, H1Vector::v(1)).unwrap();
        assert!(z.multiply(&TensorElement::zero(6, 2)).is_zero());
    }

    #[test]
    fn distinct_generators_k2() {
        let a = TensorElement::zero_divisor(6, 2, H1Vector::v(1)).unwrap();
        let b = TensorElement::zero_divisor(6, 2, H1Vector::v(2)).unwrap();
        let p = a.multiply(&b);
        assert_eq!(p.term_count(), 2);
        assert_eq!(
            p.component(1, 1),
            vec![bi(t(&[1], 1), t(&[2], 1)), bi(t(&[2], 1), t(&[1], 1))]
        );
    }

    #[test]
    fn power_examples() {
        let z = TensorElement::zero_divisor(6, 2, H1Vector::v(1)).unwrap();
        assert_eq!(z.power(0), TensorElement::identity(6, 2));
        let cube = z.power(3);
        let terms: Vec<_> = cube.terms().collect();
        assert_eq!(
            terms,
            vec![
                bi(t(&[], 0), t(&[1], 3)),
                bi(t(&[1], 1), t(&[1], 2)),
                bi(t(&[1], 2), t(&[1], 1)),
                bi(t(&[1], 3), t(&[], 0)),
            ]
        );
    }

    #[test]
    fn expand_examples() {
        let x = expand(6, 2, &[(H1Vector::v(1), 3), (H1Vector::R, 2)]).unwrap();
        assert_eq!(
            x.component(3, 2),
            vec![bi(t(&[1], 3), t(&[], 2)), bi(t(&[1], 3), t(&[1], 2))]
        );
        let p = decompose(6, 2).unwrap();
        let phi1 = Functional::new(FunctionalKind::Phi1, &p).unwrap();
        let phi2 = Functional::new(FunctionalKind::Phi2, &p).unwrap();
        assert!(x.pair_evaluate(&phi1, &phi2));

        let y = expand(7, 2, &[(H1Vector::v(1), 4), (H1Vector::R, 3)]).unwrap();
        assert_eq!(y.component(4, 3), vec![bi(t(&[1], 4), t(&[], 3))]);
        let p = decompose(7, 2).unwrap();
        let phi1 = Functional::new(FunctionalKind::Phi1, &p).unwrap();
        let phi3 = Functional::new(FunctionalKind::Phi3, &p).unwrap();
        assert!(y.pair_evaluate(&phi1, &phi3));

        assert_eq!(expand(6, 2, &[]).unwrap(), TensorElement::identity(6, 2));
    }

    #[test]
    fn targeted_expansion_matches_full() {
        let factors = [
            (H1Vector::v(1), 7),
            (H1Vector::v(2), 1),
            (H1Vector::v(3), 1),
            (H1Vector::v(4), 2),
            (H1Vector::v(5), 2),
            (H1Vector::R, 4),
        ];
        let full = expand(12, 5, &factors).unwrap();
        let part = expand_component(12, 5, &factors, (9, 8)).unwrap();
        assert_eq!(part.component(9, 8), full.component(9, 8));
        assert_eq!(part.bidegrees().count(), 1);
    }

    #[test]
    fn json_layout() {
        let x = TensorElement::zero_divisor(6, 2, H1Vector::v(1)).unwrap();
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"{"components":{"0,1":[[[],[1]]],"1,0":[[[1],[]]]}}"#
        );
    }

    #[test]
    fn reduction_detects_relations() {
        let ring = CohomologyRing::new(6, 2).unwrap();
        // (T_∅,3 + Σ_{i<=4} T_{i},3) ⊗ 1 is a relation tensored with 1
        let mut x = TensorElement::zero(6, 2);
        let terms = [0u32, 1, 2, 3, 4]
            .iter()
            .map(|&i| {
                let s = if i == 0 { Support::EMPTY } else { Support::singleton(i) };
                (s, Support::EMPTY)
            })
            .collect();
        x.components.insert((3, 0), canonicalize(terms));
        assert!(!x.is_zero());
        assert!(x.is_zero_in(&ring).unwrap());
        let y = expand(6, 2, &[(H1Vector::v(1), 3), (H1Vector::R, 2)]).unwrap();
        assert!(!y.is_zero_in(&ring).unwrap());
    }
}
