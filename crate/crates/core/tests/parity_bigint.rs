//! Binomial parity against exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use polygon_tc::parity::binom_mod2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_pascal_up_to_4096() {
    let max = 4096usize;
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for a in 0..=max {
        for (b, c) in row.iter().enumerate() {
            let odd = c.bit(0);
            assert_eq!(binom_mod2(a as i64, b as i64), odd, "C({a}, {b})");
        }
        assert!(!binom_mod2(a as i64, a as i64 + 1));
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
}

/// 2-adic valuation of `m!` by Legendre's formula.
fn v2_factorial(m: u64) -> u64 {
    let mut v = 0;
    let mut p = 2;
    while p <= m {
        v += m / p;
        p *= 2;
    }
    v
}

fn exact_binomial(a: u64, b: u64) -> BigUint {
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

#[test]
fn random_pairs_below_2_pow_30() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for i in 0..10_000 {
        let a: u64 = rng.gen_range(0..1 << 30);
        let b: u64 = if i % 2 == 0 {
            rng.gen_range(0..=a)
        } else {
            // near the edges, where the product stays small enough to build
            let off = rng.gen_range(0..=a.min(300));
            if rng.gen() { off } else { a - off }
        };
        let odd = v2_factorial(a) == v2_factorial(b) + v2_factorial(a - b);
        assert_eq!(binom_mod2(a as i64, b as i64), odd, "C({a}, {b})");
        if b.min(a - b) <= 300 {
            let c = exact_binomial(a, b);
            assert!(!c.is_zero());
            assert_eq!(c.bit(0), odd, "C({a}, {b})");
        }
    }
}

#[test]
fn central_binomials_are_even() {
    for n in 6..=64i64 {
        assert!(!binom_mod2(2 * n - 6, n - 3), "n={n}");
        assert!(!exact_binomial(2 * n as u64 - 6, n as u64 - 3).bit(0));
    }
}

#[test]
fn out_of_range_arguments_are_even() {
    assert!(!binom_mod2(5, -1));
    assert!(!binom_mod2(-3, 1));
    assert!(!binom_mod2(3, 4));
    assert!(binom_mod2(0, 0));
}
