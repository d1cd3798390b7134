use polygon_tc::parity::{decompose, valid_pairs};
use polygon_tc::ring::{BasisClass, CohomologyRing, Functional, FunctionalKind, RingElement};
use polygon_tc::tensor::{expand, H1Vector, TensorElement};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_classes(ring: &CohomologyRing) -> Vec<BasisClass> {
    (0..=ring.top_degree()).flat_map(|d| ring.basis(d).unwrap()).collect()
}

fn el(c: BasisClass) -> RingElement {
    RingElement::class(c.support, c.degree)
}

#[test]
fn associativity_on_all_class_triples() {
    for (n, k) in valid_pairs(7) {
        let ring = CohomologyRing::new(n, k).unwrap();
        let classes = all_classes(&ring);
        for a in &classes {
            for b in &classes {
                let ab = ring.multiply(&el(*a), &el(*b)).unwrap();
                assert_eq!(ab, ring.multiply(&el(*b), &el(*a)).unwrap());
                for c in &classes {
                    if a.degree + b.degree + c.degree > ring.top_degree() {
                        continue;
                    }
                    let left = ring.multiply(&ab, &el(*c)).unwrap();
                    let bc = ring.multiply(&el(*b), &el(*c)).unwrap();
                    assert_eq!(left, ring.multiply(&el(*a), &bc).unwrap(), "{a} {b} {c}");
                }
            }
        }
    }
}

#[test]
fn top_functional_detects_top_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, k) in valid_pairs(11) {
        let ring = CohomologyRing::new(n, k).unwrap();
        let top = ring.top_degree();
        let p = decompose(n, k).unwrap();
        let phi1 = Functional::new(FunctionalKind::Phi1, &p).unwrap();
        let basis = ring.basis(top).unwrap();
        for _ in 0..30 {
            let x = RingElement::from_terms(top, basis.iter().filter(|_| rng.gen_bool(0.5)).map(|c| c.support));
            let reduced = ring.reduce(&x).unwrap();
            assert_eq!(reduced.is_zero(), !phi1.evaluate(&reduced).unwrap(), "n={n} k={k}");
            assert_eq!(phi1.evaluate(&x).unwrap(), phi1.evaluate(&reduced).unwrap());
        }
    }
}

#[test]
fn functionals_ignore_relations() {
    for (n, k) in valid_pairs(10) {
        let ring = CohomologyRing::new(n, k).unwrap();
        let p = decompose(n, k).unwrap();
        for kind in [FunctionalKind::Phi1, FunctionalKind::Phi2] {
            let f = Functional::new(kind, &p).unwrap();
            let d = f.degree();
            for r in ring.relations(d).unwrap() {
                for b in ring.basis(d).unwrap() {
                    let x = el(b);
                    assert_eq!(f.evaluate(&x).unwrap(), f.evaluate(&x.add(&r)).unwrap());
                }
            }
        }
    }
}

fn random_h1(rng: &mut impl Rng, n: u32) -> H1Vector {
    loop {
        let bits = rng.gen::<u64>() & ((1u64 << n) - 1);
        if bits != 0 {
            return H1Vector::new(bits & 1 == 1, polygon_tc::ring::Support(bits & !1));
        }
    }
}

#[test]
fn powers_match_repeated_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, k) in [(8, 3), (9, 2), (10, 4)] {
        let z = TensorElement::zero_divisor(n, k, random_h1(&mut rng, n)).unwrap();
        let mut acc = TensorElement::identity(n, k);
        for e in 0..=64 {
            assert_eq!(z.power(e), acc, "n={n} k={k} e={e}");
            acc = acc.multiply(&z);
        }
    }
}

#[test]
fn frobenius_on_two_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, k) in valid_pairs(11) {
        let y = random_h1(&mut rng, n);
        for j in 0..4 {
            let e = 1u32 << j;
            let p = TensorElement::zero_divisor(n, k, y).unwrap().power(e);
            assert!(p.bidegrees().all(|bd| bd == (e, 0) || bd == (0, e)), "n={n} y={y} e={e}");
        }
    }
}

#[test]
fn expansion_ignores_factor_order_and_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (n, k) in valid_pairs(10) {
        let p = decompose(n, k).unwrap();
        let phi1 = Functional::new(FunctionalKind::Phi1, &p).unwrap();
        let phi2 = Functional::new(FunctionalKind::Phi2, &p).unwrap();
        for _ in 0..5 {
            let mut factors: Vec<(H1Vector, u32)> = (0..3)
                .map(|_| (random_h1(&mut rng, n), rng.gen_range(1..=(2 * n - 7) / 3)))
                .collect();
            let a = expand(n, k, &factors).unwrap();
            factors.shuffle(&mut rng);
            let b = expand(n, k, &factors).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.swap(), a);
            assert_eq!(a.pair_evaluate(&phi1, &phi2), a.swap().pair_evaluate(&phi2, &phi1));
        }
    }
}
