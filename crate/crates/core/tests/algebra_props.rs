//! Algebraic invariants of the ring and tensor square, driven by proptest.

use polygon_tc::parity::valid_pairs;
use polygon_tc::quotient::{QuotientAlgebra, QuotientTensor};
use polygon_tc::ring::{CohomologyRing, RingElement, Support};
use polygon_tc::tensor::{H1Vector, TensorElement};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs() -> Vec<(u32, u32)> {
    valid_pairs(10)
}

fn random_element(rng: &mut impl Rng, ring: &CohomologyRing, d: u32) -> RingElement {
    let basis = ring.basis(d).unwrap();
    RingElement::from_terms(d, basis.iter().filter(|_| rng.gen_bool(0.4)).map(|c| c.support))
}

fn random_h1(rng: &mut impl Rng, n: u32) -> H1Vector {
    loop {
        let bits = rng.gen::<u64>() & ((1u64 << n) - 1);
        if bits != 0 {
            return H1Vector::new(bits & 1 == 1, Support(bits & !1));
        }
    }
}

/// Relabels `V_i` as `V_{perm[i-1]}`.
fn relabel(y: H1Vector, perm: &[u32]) -> H1Vector {
    H1Vector::new(y.r, Support::from_indices(y.v.indices().map(|i| perm[i as usize - 1])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_commutative_and_associative(ix in 0usize..100, seed in any::<u64>()) {
        let (n, k) = pairs()[ix % pairs().len()];
        let ring = CohomologyRing::new(n, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = ring.top_degree();
        let a = rng.gen_range(0..=top);
        let b = rng.gen_range(0..=top - a);
        let c = rng.gen_range(0..=top - a - b);
        let x = random_element(&mut rng, &ring, a);
        let y = random_element(&mut rng, &ring, b);
        let z = random_element(&mut rng, &ring, c);
        prop_assert_eq!(ring.multiply(&x, &y).unwrap(), ring.multiply(&y, &x).unwrap());
        let left = ring.multiply(&ring.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = ring.multiply(&x, &ring.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let w = random_element(&mut rng, &ring, b);
        let distributed = ring.multiply(&x, &y).unwrap().add(&ring.multiply(&x, &w).unwrap());
        prop_assert_eq!(ring.multiply(&x, &y.add(&w)).unwrap(), distributed);
    }

    #[test]
    fn reduction_is_linear_and_idempotent(ix in 0usize..100, seed in any::<u64>()) {
        let (n, k) = pairs()[ix % pairs().len()];
        let ring = CohomologyRing::new(n, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(0..=ring.top_degree());
        let x = random_element(&mut rng, &ring, d);
        let y = random_element(&mut rng, &ring, d);
        let rx = ring.reduce(&x).unwrap();
        prop_assert_eq!(ring.reduce(&rx).unwrap(), rx.clone());
        prop_assert_eq!(ring.reduce(&x.add(&y)).unwrap(), rx.add(&ring.reduce(&y).unwrap()));
        prop_assert!(ring.equivalent(&x, &rx).unwrap());
    }

    #[test]
    fn tensor_products_commute_and_are_swap_symmetric(ix in 0usize..100, seed in any::<u64>()) {
        let (n, k) = pairs()[ix % pairs().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(1..=n as usize);
        let zds: Vec<TensorElement> = (0..len)
            .map(|_| TensorElement::zero_divisor(n, k, random_h1(&mut rng, n)).unwrap())
            .collect();
        let forward = zds.iter().fold(TensorElement::identity(n, k), |acc, z| acc.multiply(z));
        let backward = zds.iter().rev().fold(TensorElement::identity(n, k), |acc, z| acc.multiply(z));
        prop_assert_eq!(&forward, &backward);
        prop_assert_eq!(&forward.swap(), &forward);
    }

    #[test]
    fn squaring_a_zero_divisor_kills_cross_terms(ix in 0usize..100, seed in any::<u64>()) {
        let (n, k) = pairs()[ix % pairs().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_h1(&mut rng, n);
        let sq = TensorElement::zero_divisor(n, k, y).unwrap().power(2);
        prop_assert!(sq.bidegrees().all(|(a, b)| (a, b) == (2, 0) || (a, b) == (0, 2)));
        let ring = CohomologyRing::new(n, k).unwrap();
        // y² ⊗ 1 where y² is computed in the ring
        let y_elem = RingElement::from_terms(1, y.classes().map(|c| c.support));
        let y2 = ring.multiply(&y_elem, &y_elem).unwrap();
        let left: Vec<Support> = sq.component(2, 0).iter().map(|b| b.left.support).collect();
        let left = ring.reduce(&RingElement::from_terms(2, left)).unwrap();
        prop_assert_eq!(left, y2);
    }

    #[test]
    fn relabelling_generators_preserves_vanishing(ix in 0usize..100, seed in any::<u64>()) {
        let (n, k) = pairs()[ix % pairs().len()];
        if n > 8 { return Ok(()); }
        let ring = CohomologyRing::new(n, k).unwrap();
        let alg = QuotientAlgebra::new(&ring).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(n as usize - 2..=2 * n as usize - 7);
        let factors: Vec<H1Vector> = (0..len).map(|_| random_h1(&mut rng, n)).collect();
        let mut perm: Vec<u32> = (1..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let moved: Vec<H1Vector> = factors.iter().map(|y| relabel(*y, &perm)).collect();
        let a = QuotientTensor::product(&alg, &factors);
        let b = QuotientTensor::product(&alg, &moved);
        prop_assert_eq!(a.is_zero(), b.is_zero());
        // an automorphism keeps each bidegree component zero or nonzero
        let keys = |q: &QuotientTensor| q.components().keys().copied().collect::<Vec<_>>();
        prop_assert_eq!(keys(&a), keys(&b));
    }
}

#[test]
fn graded_dimensions_satisfy_duality() {
    for (n, k) in valid_pairs(12) {
        let dims = CohomologyRing::new(n, k).unwrap().dims();
        assert_eq!(dims.len() as u32, n - 2);
        assert_eq!(dims[0], 1, "n={n} k={k}");
        assert_eq!(*dims.last().unwrap(), 1, "n={n} k={k}");
        assert!(dims.iter().eq(dims.iter().rev()), "n={n} k={k} {dims:?}");
    }
}
