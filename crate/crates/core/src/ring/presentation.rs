use std::collections::HashMap;
use std::sync::OnceLock;

use super::{subsets_of_size, BasisClass, Functional, FunctionalKind, RingElement, Support};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Echelon};
use crate::parity::{check_domain, decompose};

/// Per-degree basis, relation echelon and normal-form data.
#[derive(Debug)]
struct Degree {
    basis: Vec<Support>,
    index: HashMap<Support, usize>,
    echelon: Echelon,
    /// Basis positions of the non-pivot columns; these classes form a basis of `H^d`.
    normal: Vec<usize>,
    /// Inverse of `normal`.
    normal_position: HashMap<usize, usize>,
}

/// The graded presentation of `H*(M̄_{n,n-2k})` in degrees `0..=n-3`.
///
/// Degree data is built lazily and cached; a shared reference may be used
/// from several threads.
#[derive(Debug)]
pub struct CohomologyRing {
    n: u32,
    k: u32,
    degrees: Vec<OnceLock<Degree>>,
}

impl CohomologyRing {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        check_domain(n, k)?;
        if n > 64 {
            return Err(Error::TooManyGenerators(n as u64));
        }
        Ok(CohomologyRing {
            n,
            k,
            degrees: (0..=n - 3).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Manifold dimension; nothing lives above it.
    pub fn top_degree(&self) -> u32 {
        self.n - 3
    }

    fn check_degree(&self, d: u32) -> Result<()> {
        if d > self.top_degree() {
            return Err(Error::DegreeOutOfRange {
                degree: d,
                max: self.top_degree(),
            });
        }
        Ok(())
    }

    fn max_support(&self, d: u32) -> u32 {
        (self.k - 1).min(d)
    }

    fn basis_supports(&self, d: u32) -> Vec<Support> {
        (0..=self.max_support(d))
            .flat_map(|s| subsets_of_size(self.n - 1, s))
            .collect()
    }

    /// Number of classes `T_{S,d}` spanning degree `d`.
    pub fn basis_len(&self, d: u32) -> Result<usize> {
        self.check_degree(d)?;
        Ok(self.degree(d).basis.len())
    }

    /// `T_{S,d}` for `|S| <= min(k-1, d)`, ordered by `|S|` then lexicographically.
    pub fn basis(&self, d: u32) -> Result<Vec<BasisClass>> {
        self.check_degree(d)?;
        Ok(self
            .degree(d)
            .basis
            .iter()
            .map(|s| BasisClass::new(*s, d))
            .collect())
    }

    /// The subsets `L` indexing the relations of degree `d`.
    fn relation_sets(&self, d: u32) -> Vec<Support> {
        let lo = self.n - self.k;
        let hi = d + 1;
        (lo..=hi.min(self.n - 1))
            .flat_map(|size| subsets_of_size(self.n - 1, size))
            .collect()
    }

    fn relation_terms(&self, l: Support, d: u32) -> impl Iterator<Item = Support> {
        let cap = self.max_support(d);
        l.submasks().filter(move |s| s.len() <= cap)
    }

    /// One element `Σ_{S ⊆ L} T_{S,d}` per qualifying `L`.
    pub fn relations(&self, d: u32) -> Result<Vec<RingElement>> {
        self.check_degree(d)?;
        Ok(self
            .relation_sets(d)
            .into_iter()
            .map(|l| RingElement::from_terms(d, self.relation_terms(l, d)))
            .collect())
    }

    fn degree(&self, d: u32) -> &Degree {
        self.degrees[d as usize].get_or_init(|| self.build_degree(d))
    }

    fn build_degree(&self, d: u32) -> Degree {
        let basis = self.basis_supports(d);
        let index: HashMap<Support, usize> =
            basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut echelon = Echelon::new(basis.len());
        for l in self.relation_sets(d) {
            let mut row = BitVec::zeros(basis.len());
            for s in self.relation_terms(l, d) {
                row.set(index[&s], true);
            }
            echelon.insert(row);
        }
        let normal = echelon.free_columns();
        let normal_position = normal.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Degree {
            basis,
            index,
            echelon,
            normal,
            normal_position,
        }
    }

    /// Builds every degree up front, so later queries never block.
    pub fn precompute(&self) {
        for d in 0..=self.top_degree() {
            self.degree(d);
        }
    }

    /// Rank of the relation matrix in degree `d`.
    pub fn relation_rank(&self, d: u32) -> Result<usize> {
        self.check_degree(d)?;
        Ok(self.degree(d).echelon.rank())
    }

    /// `dim H^d`: basis size minus relation rank.
    pub fn dim(&self, d: u32) -> Result<usize> {
        self.check_degree(d)?;
        Ok(self.degree(d).normal.len())
    }

    /// `[dim H^0, …, dim H^{n-3}]`.
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top_degree())
            .map(|d| self.degree(d).normal.len())
            .collect()
    }

    /// Classes whose cosets form a basis of `H^d`; every reduced element is a sum of these.
    pub fn normal_basis(&self, d: u32) -> Result<Vec<BasisClass>> {
        self.check_degree(d)?;
        let deg = self.degree(d);
        Ok(deg
            .normal
            .iter()
            .map(|&c| BasisClass::new(deg.basis[c], d))
            .collect())
    }

    fn coordinates(&self, x: &RingElement) -> Result<BitVec> {
        self.check_degree(x.degree)?;
        let deg = self.degree(x.degree);
        let mut v = BitVec::zeros(deg.basis.len());
        for s in &x.terms {
            let Some(&i) = deg.index.get(s) else {
                return Err(Error::InvalidArgument(format!(
                    "{} is not a basis class for n={}, k={}",
                    BasisClass::new(*s, x.degree),
                    self.n,
                    self.k
                )));
            };
            v.flip(i);
        }
        Ok(v)
    }

    /// Canonical representative of `x` modulo the relations.
    pub fn reduce(&self, x: &RingElement) -> Result<RingElement> {
        let mut v = self.coordinates(x)?;
        let deg = self.degree(x.degree);
        deg.echelon.reduce(&mut v);
        Ok(RingElement::from_terms(
            x.degree,
            v.ones().map(|i| deg.basis[i]),
        ))
    }

    /// Coordinates of `x` in the basis [`Self::normal_basis`].
    pub fn normal_coordinates(&self, x: &RingElement) -> Result<BitVec> {
        let mut v = self.coordinates(x)?;
        let deg = self.degree(x.degree);
        deg.echelon.reduce(&mut v);
        let mut out = BitVec::zeros(deg.normal.len());
        for i in v.ones() {
            out.set(deg.normal_position[&i], true);
        }
        Ok(out)
    }

    /// Normal coordinates of a single class `T_{S,d}`.
    pub fn class_coordinates(&self, support: Support, d: u32) -> Result<BitVec> {
        self.normal_coordinates(&RingElement::class(support, d))
    }

    /// `true` iff `x - y` lies in the relation span.
    pub fn equivalent(&self, x: &RingElement, y: &RingElement) -> Result<bool> {
        if x.degree != y.degree {
            return Err(Error::DegreeMismatch {
                expected: x.degree,
                actual: y.degree,
            });
        }
        Ok(self.reduce(&x.add(y))?.is_zero())
    }

    /// Product in the presentation followed by reduction; zero above degree `n-3`.
    pub fn multiply(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        let degree = x.degree + y.degree;
        if degree > self.top_degree() {
            return Ok(RingElement::zero(degree));
        }
        let top = self.top_degree();
        let mut raw = RingElement::zero(degree);
        for a in x.classes() {
            for b in y.classes() {
                if let Some(c) = a.times(b, self.k, top) {
                    raw.toggle(c.support);
                }
            }
        }
        self.reduce(&raw)
    }

    /// Evaluates `φ₁`, `φ₂` or `φ₃` on `x`.
    pub fn evaluate_functional(&self, kind: FunctionalKind, x: &RingElement) -> Result<bool> {
        let p = decompose(self.n, self.k)?;
        Functional::new(kind, &p)?.evaluate(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: u32, k: u32) -> CohomologyRing {
        CohomologyRing::new(n, k).unwrap()
    }

    #[test]
    fn basis_examples() {
        let r = ring(6, 2);
        let b = r.basis(3).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b[0], BasisClass::new(Support::EMPTY, 3));
        assert_eq!(b[5], BasisClass::new(Support::singleton(5), 3));
        assert_eq!(r.basis(0).unwrap(), vec![BasisClass::new(Support::EMPTY, 0)]);
        assert_eq!(ring(8, 3).basis(2).unwrap().len(), 29);
        assert!(r.basis(4).is_err());
    }

    #[test]
    fn relation_examples() {
        let r = ring(6, 2);
        let rels = r.relations(3).unwrap();
        assert_eq!(rels.len(), 5);
        assert!(rels.iter().all(|x| x.terms.len() == 5 && x.terms.contains(&Support::EMPTY)));
        assert!(r.relations(1).unwrap().is_empty());
        assert_eq!(ring(8, 3).relations(4).unwrap().len(), 21);
    }

    #[test]
    fn dim_examples() {
        let r = ring(6, 2);
        assert_eq!(r.dim(0).unwrap(), 1);
        assert_eq!(r.dim(1).unwrap(), 6);
        assert_eq!(r.dim(2).unwrap(), 6);
        assert_eq!(r.dim(3).unwrap(), 1);
        assert_eq!(r.relation_rank(3).unwrap(), 5);
    }

    #[test]
    fn reduce_examples() {
        let r = ring(6, 2);
        let rel = RingElement::from_terms(3, [0, 1, 2, 3, 4].map(|i| {
            if i == 0 {
                Support::EMPTY
            } else {
                Support::singleton(i)
            }
        }));
        assert!(r.reduce(&rel).unwrap().is_zero());
        assert!(r.reduce(&RingElement::zero(3)).unwrap().is_zero());
        let a = r.reduce(&RingElement::class(Support::singleton(1), 3)).unwrap();
        let b = r.reduce(&RingElement::class(Support::singleton(2), 3)).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }

    #[test]
    fn multiply_examples() {
        let r = ring(6, 2);
        let v1 = RingElement::v(1);
        let v1_sq = RingElement::class(Support::singleton(1), 2);
        assert_eq!(
            r.multiply(&v1, &v1_sq).unwrap(),
            r.reduce(&RingElement::class(Support::singleton(1), 3)).unwrap()
        );
        assert_eq!(
            r.multiply(&v1, &v1_sq).unwrap(),
            RingElement::class(Support::singleton(1), 3)
        );
        assert!(r.multiply(&v1, &RingElement::v(2)).unwrap().is_zero());
        let p = r.multiply(&v1_sq, &v1_sq).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree, 4);
    }

    #[test]
    fn unknown_class_is_rejected() {
        let r = ring(6, 2);
        let bad = RingElement::class(Support::from_indices([1, 2]), 3);
        assert!(r.reduce(&bad).is_err());
    }

    #[test]
    fn relations_reduce_to_zero() {
        for (n, k) in [(7, 2), (8, 3), (9, 4)] {
            let r = ring(n, k);
            for d in 0..=r.top_degree() {
                for rel in r.relations(d).unwrap() {
                    assert!(r.reduce(&rel).unwrap().is_zero());
                }
            }
        }
    }
}
