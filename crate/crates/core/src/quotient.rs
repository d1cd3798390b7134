//! Zero-divisor products computed directly in normal-form coordinates of
//! `H* ⊗ H*`.
//!
//! Each bidegree component is a dense `dim H^a × dim H^b` bit matrix, and
//! multiplication by a degree-one class uses precomputed images of the
//! normal basis. This is the representation used for vanishing checks,
//! where thousands of full products have to be formed.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::Result;
use crate::gf2::BitVec;
use crate::ring::{CohomologyRing, RingElement, Support};
use crate::tensor::H1Vector;

/// Multiplication tables of `H*` in its normal basis.
#[derive(Debug)]
pub struct QuotientAlgebra {
    n: u32,
    k: u32,
    dims: Vec<usize>,
    /// `images[g][d][j]`: normal coordinates of `generator_g · e_j` in degree
    /// `d + 1`, where `g = 0` is `R` and `g = i` is `V_i`.
    images: Vec<Vec<Vec<BitVec>>>,
}

impl QuotientAlgebra {
    pub fn new(ring: &CohomologyRing) -> Result<Self> {
        let n = ring.n();
        let top = ring.top_degree();
        let dims = ring.dims();
        let mut images = Vec::with_capacity(n as usize);
        for g in 0..n {
            let gen = if g == 0 {
                RingElement::r()
            } else {
                RingElement::v(g)
            };
            let mut per_degree = Vec::with_capacity(top as usize);
            for d in 0..top {
                let basis = ring.normal_basis(d)?;
                let imgs = basis
                    .iter()
                    .map(|b| {
                        let prod = ring.multiply(&gen, &RingElement::class(b.support, d))?;
                        ring.normal_coordinates(&prod)
                    })
                    .collect::<Result<Vec<_>>>()?;
                per_degree.push(imgs);
            }
            images.push(per_degree);
        }
        Ok(QuotientAlgebra {
            n,
            k: ring.k(),
            dims,
            images,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn top(&self) -> u32 {
        self.n - 3
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Image of the normal basis of `H^d` under multiplication by `y`.
    fn multiplier(&self, y: H1Vector, d: u32) -> Cow<'_, [BitVec]> {
        let d = d as usize;
        if let Some((kind, i)) = y.as_generator() {
            let g = if kind == 'R' { 0 } else { i as usize };
            return Cow::Borrowed(&self.images[g][d]);
        }
        let mut out = vec![BitVec::zeros(self.dims[d + 1]); self.dims[d]];
        let gens = y
            .r
            .then_some(0usize)
            .into_iter()
            .chain(y.v.indices().map(|i| i as usize));
        for g in gens {
            for (j, img) in self.images[g][d].iter().enumerate() {
                out[j].xor_assign(img);
            }
        }
        Cow::Owned(out)
    }
}

fn take_slot(
    out: &mut BTreeMap<(u32, u32), Vec<BitVec>>,
    alg: &QuotientAlgebra,
    bd: (u32, u32),
) -> Vec<BitVec> {
    out.remove(&bd)
        .unwrap_or_else(|| vec![BitVec::zeros(alg.dims[bd.1 as usize]); alg.dims[bd.0 as usize]])
}

/// A bigraded element of `H* ⊗ H*` in normal coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTensor {
    /// Row `i` of component `(a, b)` lists the coefficients of `e_i ⊗ f_j`.
    components: BTreeMap<(u32, u32), Vec<BitVec>>,
}

impl QuotientTensor {
    pub fn identity(alg: &QuotientAlgebra) -> Self {
        let mut row = BitVec::zeros(alg.dims[0]);
        row.set(0, true);
        QuotientTensor {
            components: BTreeMap::from([((0, 0), vec![row])]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<(u32, u32), Vec<BitVec>> {
        &self.components
    }

    /// Multiplies by `y⊗1 + 1⊗y`.
    pub fn times_zero_divisor(&self, alg: &QuotientAlgebra, y: H1Vector) -> QuotientTensor {
        let top = alg.top();
        let mults: Vec<Cow<'_, [BitVec]>> = (0..top).map(|d| alg.multiplier(y, d)).collect();
        let mut out: BTreeMap<(u32, u32), Vec<BitVec>> = BTreeMap::new();
        for (&(a, b), m) in &self.components {
            if a < top {
                // (y·e_j) ⊗ f: row j of m is added to every row in the image of e_j
                let mult = &mults[a as usize];
                let mut target = take_slot(&mut out, alg, (a + 1, b));
                for (j, img) in mult.iter().enumerate() {
                    if m[j].is_zero() {
                        continue;
                    }
                    for i in img.ones() {
                        target[i].xor_assign(&m[j]);
                    }
                }
                out.insert((a + 1, b), target);
            }
            if b < top {
                // e ⊗ (y·f_j)
                let mult = &mults[b as usize];
                let mut target = take_slot(&mut out, alg, (a, b + 1));
                for (row, out_row) in m.iter().zip(target.iter_mut()) {
                    for j in row.ones() {
                        out_row.xor_assign(&mult[j]);
                    }
                }
                out.insert((a, b + 1), target);
            }
        }
        out.retain(|_, m| m.iter().any(|r| !r.is_zero()));
        QuotientTensor { components: out }
    }

    /// `Π (y⊗1 + 1⊗y)` over the list, one factor at a time.
    pub fn product(alg: &QuotientAlgebra, factors: &[H1Vector]) -> QuotientTensor {
        let mut acc = QuotientTensor::identity(alg);
        for &y in factors {
            acc = acc.times_zero_divisor(alg, y);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

/// The `n` generator zero-divisors `R, V_1, …, V_{n-1}`.
pub fn generators(n: u32) -> Vec<H1Vector> {
    std::iter::once(H1Vector::R)
        .chain((1..n).map(|i| H1Vector::new(false, Support::singleton(i))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::expand;

    #[test]
    fn agrees_with_presentation_level_expansion() {
        for (n, k) in [(6, 2), (7, 2), (7, 3), (8, 3)] {
            let ring = CohomologyRing::new(n, k).unwrap();
            let alg = QuotientAlgebra::new(&ring).unwrap();
            let lists: Vec<Vec<H1Vector>> = vec![
                vec![H1Vector::v(1), H1Vector::v(1), H1Vector::R],
                vec![H1Vector::v(1), H1Vector::v(2), H1Vector::R, H1Vector::R],
                vec![
                    H1Vector::new(true, Support::from_indices([1, 3])),
                    H1Vector::v(2),
                    H1Vector::new(false, Support::from_indices([2, 4])),
                    H1Vector::R,
                    H1Vector::v(1),
                ],
            ];
            for list in lists {
                let q = QuotientTensor::product(&alg, &list);
                let factors: Vec<_> = list.iter().map(|y| (*y, 1)).collect();
                let t = expand(n, k, &factors).unwrap();
                assert_eq!(&t.reduce_in(&ring).unwrap(), q.components(), "n={n} k={k}");
            }
        }
    }
}
