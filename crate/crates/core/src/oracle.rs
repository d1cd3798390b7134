//! Independent small-`n` model of the cohomology ring.
//!
//! The ring is rebuilt as a quotient of the polynomial algebra
//! `GF(2)[R, V_1, …, V_{n-1}]` by an explicit ideal, one homogeneous slice
//! per degree, and compared against the `T_{S,d}` model. Nothing here
//! reuses the fast model's basis, ordering or elimination code.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::parity::check_domain;
use crate::ring::{CohomologyRing, RingElement, Support};

/// Largest `n` the oracle accepts without `force`.
pub const ORACLE_MAX_N: u32 = 9;

/// `R^{r} Π V_i^{v[i-1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub r_exponent: u32,
    /// Exponents of `V_1, …, V_{n-1}`.
    pub v_exponents: Vec<u32>,
}

impl Monomial {
    pub fn one(n: u32) -> Self {
        Monomial {
            r_exponent: 0,
            v_exponents: vec![0; n as usize - 1],
        }
    }

    pub fn degree(&self) -> u32 {
        self.r_exponent + self.v_exponents.iter().sum::<u32>()
    }

    /// Indices `i` with a positive `V_i` exponent.
    pub fn support(&self) -> Vec<u32> {
        self.v_exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    /// Multiplies by variable `var` (0 is `R`, `i` is `V_i`).
    fn times_var(&self, var: usize) -> Monomial {
        let mut m = self.clone();
        if var == 0 {
            m.r_exponent += 1;
        } else {
            m.v_exponents[var - 1] += 1;
        }
        m
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            r_exponent: self.r_exponent + other.r_exponent,
            v_exponents: self
                .v_exponents
                .iter()
                .zip(&other.v_exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: String, e: u32| match e {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{e}")),
        };
        push("R".into(), self.r_exponent);
        for (i, e) in self.v_exponents.iter().enumerate() {
            push(format!("V{}", i + 1), *e);
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A homogeneous polynomial with GF(2) coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub degree: u32,
    pub terms: BTreeSet<Monomial>,
}

impl Polynomial {
    fn single(m: Monomial) -> Self {
        Polynomial {
            degree: m.degree(),
            terms: BTreeSet::from([m]),
        }
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|m| m.to_string()).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn guard(n: u32, k: u32, force: bool) -> Result<()> {
    check_domain(n, k)?;
    if n > ORACLE_MAX_N && !force {
        return Err(Error::Budget(format!(
            "oracle is limited to n <= {ORACLE_MAX_N}, got n = {n}"
        )));
    }
    Ok(())
}

fn squarefree(n: u32, set: &[u32], r: u32) -> Monomial {
    let mut m = Monomial::one(n);
    m.r_exponent = r;
    for &i in set {
        m.v_exponents[i as usize - 1] = 1;
    }
    m
}

/// All `size`-subsets of `1..=n-1`, as sorted index lists.
fn index_subsets(n: u32, size: u32) -> Vec<Vec<u32>> {
    fn rec(next: u32, last: u32, size: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() as u32 == size {
            out.push(cur.clone());
            return;
        }
        for i in next..=last {
            cur.push(i);
            rec(i + 1, last, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n - 1, size, &mut Vec::new(), &mut out);
    out
}

/// Generators of the defining ideal, in three families: products of `k`
/// distinct `V_i`, the binomials `V_i² + V_i R`, and for each `L` with
/// `n-k <= |L| <= n-2` the sum `Σ_{S ⊆ L, |S| <= k-1} R^{|L|-1-|S|} Π_{i∈S} V_i`.
pub fn ideal_generators(n: u32, k: u32, force: bool) -> Result<Vec<Polynomial>> {
    guard(n, k, force)?;
    let mut gens = Vec::new();
    for s in index_subsets(n, k) {
        gens.push(Polynomial::single(squarefree(n, &s, 0)));
    }
    for i in 1..n {
        let mut sq = Monomial::one(n);
        sq.v_exponents[i as usize - 1] = 2;
        let mut mixed = Monomial::one(n);
        mixed.v_exponents[i as usize - 1] = 1;
        mixed.r_exponent = 1;
        let mut p = Polynomial::single(sq);
        p.toggle(mixed);
        gens.push(p);
    }
    for size in n - k..=n - 2 {
        for l in index_subsets(n, size) {
            let mut p = Polynomial {
                degree: size - 1,
                terms: BTreeSet::new(),
            };
            for s_size in 0..=(k - 1) {
                for pick in choose(&l, s_size as usize) {
                    p.toggle(squarefree(n, &pick, size - 1 - s_size));
                }
            }
            gens.push(p);
        }
    }
    Ok(gens)
}

fn choose(items: &[u32], size: usize) -> Vec<Vec<u32>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in choose(&items[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// All monomials of degree `d` in `n` variables.
fn monomials(n: u32, d: u32) -> Vec<Monomial> {
    fn rec(var: usize, n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var == n - 1 {
            cur.push(left);
            out.push(Monomial {
                r_exponent: cur[0],
                v_exponents: cur[1..].to_vec(),
            });
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(var + 1, n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n as usize, d, &mut Vec::new(), &mut out);
    out
}

type Row = Vec<u64>;

fn row_zeros(len: usize) -> Row {
    vec![0; len.div_ceil(64)]
}

fn lowest(row: &Row) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Span of the ideal in one degree, over the full monomial basis.
#[derive(Debug)]
pub struct IdealSlice {
    pub degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Rows keyed by their lowest set column.
    pivots: HashMap<usize, Row>,
}

impl IdealSlice {
    fn new(degree: u32, monomials: Vec<Monomial>) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        IdealSlice {
            degree,
            monomials,
            index,
            pivots: HashMap::new(),
        }
    }

    fn reduce(&self, row: &mut Row) {
        while let Some(p) = lowest(row) {
            match self.pivots.get(&p) {
                Some(piv) => row.iter_mut().zip(piv).for_each(|(a, b)| *a ^= b),
                None => return,
            }
        }
    }

    fn insert(&mut self, mut row: Row) {
        self.reduce(&mut row);
        if let Some(p) = lowest(&row) {
            self.pivots.insert(p, row);
        }
    }

    fn encode(&self, p: &Polynomial) -> Row {
        let mut row = row_zeros(self.monomials.len());
        for m in &p.terms {
            let i = self.index[m];
            row[i / 64] ^= 1 << (i % 64);
        }
        row
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Dimension of the quotient in this degree.
    pub fn quotient_dim(&self) -> usize {
        self.monomials.len() - self.pivots.len()
    }

    /// `true` iff the polynomial lies in the ideal.
    pub fn contains(&self, p: &Polynomial) -> bool {
        let mut row = self.encode(p);
        self.reduce(&mut row);
        lowest(&row).is_none()
    }
}

/// The quotient algebra in degrees `0..=n-3`; immutable once built.
#[derive(Debug)]
pub struct Oracle {
    n: u32,
    k: u32,
    slices: Vec<IdealSlice>,
}

impl Oracle {
    /// Builds every slice: degree `d` is spanned by the degree-`d`
    /// generators and by variable multiples of the degree `d-1` slice.
    pub fn new(n: u32, k: u32, force: bool) -> Result<Self> {
        let gens = ideal_generators(n, k, force)?;
        let top = n - 3;
        let mut slices: Vec<IdealSlice> = Vec::with_capacity(top as usize + 1);
        for d in 0..=top {
            let mut slice = IdealSlice::new(d, monomials(n, d));
            if let Some(prev) = slices.last() {
                for row in prev.pivots.values() {
                    let mut cols = Vec::new();
                    for (w, word) in row.iter().enumerate() {
                        let mut bits = *word;
                        while bits != 0 {
                            cols.push(w * 64 + bits.trailing_zeros() as usize);
                            bits &= bits - 1;
                        }
                    }
                    for var in 0..n as usize {
                        let mut out = row_zeros(slice.monomials.len());
                        for &c in &cols {
                            let j = slice.index[&prev.monomials[c].times_var(var)];
                            out[j / 64] ^= 1 << (j % 64);
                        }
                        slice.insert(out);
                    }
                }
            }
            for g in gens.iter().filter(|g| g.degree == d) {
                let row = slice.encode(g);
                slice.insert(row);
            }
            slices.push(slice);
        }
        Ok(Oracle { n, k, slices })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn slice(&self, d: u32) -> &IdealSlice {
        &self.slices[d as usize]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slices.iter().map(IdealSlice::quotient_dim).collect()
    }

    /// `true` iff the two homogeneous polynomials agree in the quotient.
    pub fn same_coset(&self, a: &Polynomial, b: &Polynomial) -> bool {
        if a.degree != b.degree {
            return false;
        }
        let mut diff = a.clone();
        for m in &b.terms {
            diff.toggle(m.clone());
        }
        self.slice(a.degree).contains(&diff)
    }
}

/// Quotient dimensions in degrees `0..=n-3`.
pub fn oracle_dims(n: u32, k: u32, force: bool) -> Result<Vec<usize>> {
    Ok(Oracle::new(n, k, force)?.dims())
}

/// A monomial with support `S` and degree `d`, with the `d - |S|` spare
/// exponent spread at random over `R` and the `V_i`, `i ∈ S`.
fn random_representative(rng: &mut impl Rng, n: u32, s: &[u32], d: u32) -> Monomial {
    let mut m = squarefree(n, s, 0);
    for _ in 0..d - s.len() as u32 {
        let slot = rng.gen_range(0..=s.len());
        if slot == s.len() {
            m.r_exponent += 1;
        } else {
            m.v_exponents[s[slot] as usize - 1] += 1;
        }
    }
    m
}

fn canonical_representative(n: u32, s: Support, d: u32) -> Monomial {
    let set: Vec<u32> = s.indices().collect();
    squarefree(n, &set, d - set.len() as u32)
}

/// Agreement report between the fast model and the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub n: u32,
    pub k: u32,
    pub trials: usize,
    pub seed: u64,
    pub fast_dims: Vec<usize>,
    pub oracle_dims: Vec<usize>,
    pub dims_agree: bool,
    pub products_agree: bool,
    pub identification_holds: bool,
    pub mismatch: Option<String>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.dims_agree && self.products_agree && self.identification_holds
    }
}

/// Compares graded dimensions, random products, and the monomial
/// identification between the fast model and the oracle.
pub fn cross_check(n: u32, k: u32, trials: usize, seed: u64, force: bool) -> Result<CrossCheckReport> {
    let oracle = Oracle::new(n, k, force)?;
    let ring = CohomologyRing::new(n, k)?;
    let top = n - 3;
    let fast_dims = ring.dims();
    let oracle_dims = oracle.dims();
    let dims_agree = fast_dims == oracle_dims;
    let mut mismatch = (!dims_agree)
        .then(|| format!("dimensions differ: fast {fast_dims:?}, oracle {oracle_dims:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let to_poly = |x: &RingElement| Polynomial {
        degree: x.degree,
        terms: x
            .terms
            .iter()
            .map(|s| canonical_representative(n, *s, x.degree))
            .collect(),
    };

    let mut products_agree = true;
    for _ in 0..trials {
        let a = rng.gen_range(0..=top);
        let b = rng.gen_range(0..=top - a);
        let ca = *ring.basis(a)?.choose(&mut rng).expect("basis is nonempty");
        let cb = *ring.basis(b)?.choose(&mut rng).expect("basis is nonempty");
        let fast = ring.multiply(
            &RingElement::class(ca.support, a),
            &RingElement::class(cb.support, b),
        )?;
        let sa: Vec<u32> = ca.support.indices().collect();
        let sb: Vec<u32> = cb.support.indices().collect();
        let ma = random_representative(&mut rng, n, &sa, a);
        let mb = random_representative(&mut rng, n, &sb, b);
        let prod = Polynomial::single(ma.times(&mb));
        if !oracle.same_coset(&prod, &to_poly(&fast)) {
            products_agree = false;
            mismatch.get_or_insert_with(|| {
                format!("{ca} * {cb}: fast model gives {fast:?}, oracle disagrees on ({ma})({mb})")
            });
        }
    }

    let mut identification_holds = true;
    for _ in 0..trials {
        let d = rng.gen_range(0..=top);
        let size = rng.gen_range(0..=(k - 1).min(d));
        let mut pool: Vec<u32> = (1..n).collect();
        pool.shuffle(&mut rng);
        let mut s = pool[..size as usize].to_vec();
        s.sort_unstable();
        let m1 = random_representative(&mut rng, n, &s, d);
        let m2 = random_representative(&mut rng, n, &s, d);
        if !oracle.same_coset(&Polynomial::single(m1.clone()), &Polynomial::single(m2.clone())) {
            identification_holds = false;
            mismatch.get_or_insert_with(|| format!("{m1} and {m2} differ in the quotient"));
        }
    }

    Ok(CrossCheckReport {
        n,
        k,
        trials,
        seed,
        fast_dims,
        oracle_dims,
        dims_agree,
        products_agree,
        identification_holds,
        mismatch,
    })
}
