//! Witness products, certificates, and the vanishing check for `(2n-6)`-fold products.
//!
//! For each pair `(n, k)` a product of `2n - 7` zero-divisors is built
//! according to the proof case of [`decompose`]. Its `(n-3, n-4)` component
//! is evaluated under `φ₁ ⊗ φ₂` (or `φ₁ ⊗ φ₃` when `B` is even and `D = 0`);
//! a value of 1 shows the product is nonzero, so the zero-divisor cup
//! length is at least `2n - 7` and `TC >= 2n - 6`. The manifold bound gives
//! `TC <= 2n - 5`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::parity::{binom_mod2, decompose, ParamDecomp, ProofCase};
use crate::quotient::{generators, QuotientAlgebra, QuotientTensor};
use crate::ring::{CohomologyRing, Functional, FunctionalKind, Support};
use crate::tensor::{expand_component, H1Vector};

pub const ENGINE_VERSION: &str = concat!("polygon-tc ", env!("CARGO_PKG_VERSION"));

/// Default seed for every randomized check.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Largest `n` for the exhaustive monomial vanishing check without `force`.
pub const EXHAUSTIVE_MAX_N: u32 = 8;

/// Largest `n` for the sampled vanishing check without `force`.
pub const RANDOM_MAX_N: u32 = 14;

/// A concrete zero-divisor product and the functionals that detect it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSpec {
    pub params: ParamDecomp,
    pub factors: Vec<(H1Vector, u32)>,
    pub functionals: (FunctionalKind, FunctionalKind),
    pub target: (u32, u32),
}

impl WitnessSpec {
    pub fn total_exponent(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    /// Distinct `V` indices used.
    pub fn generator_count(&self) -> usize {
        self.factors.iter().filter(|(y, _)| !y.v.is_empty()).count()
    }
}

/// Exponent layout of a witness: `(main, singles, squares, r_exponent)`.
fn layout(p: &ParamDecomp) -> (u32, u32, u32, i64) {
    let n = p.n as i64;
    let c = p.c;
    let two_t_b1 = (p.two_t() * (p.b + 1)) as i64;
    match p.case {
        ProofCase::BOdd | ProofCase::BEvenSmallC => {
            ((two_t_b1 - 1) as u32, c, c, two_t_b1 - c as i64 - 2)
        }
        ProofCase::BEvenLargeC => {
            let m = p.m.expect("large-C decomposition carries m");
            (m, c, c, 2 * n - 7 - m as i64 - 3 * c as i64)
        }
        ProofCase::BEvenDZero => (p.n - 3, p.k - 2, 0, n - p.k as i64 - 2),
    }
}

/// Number of distinct `V` generators the witness for `p` needs.
pub fn witness_generator_count(p: &ParamDecomp) -> u32 {
    let (_, singles, squares, _) = layout(p);
    1 + singles + squares
}

/// The witness with `V_1` carrying the main exponent, then single factors
/// `V_2, …`, then squared factors.
pub fn build_witness(p: &ParamDecomp) -> WitnessSpec {
    let indices: Vec<u32> = (1..=witness_generator_count(p)).collect();
    build_witness_with_indices(p, &indices).expect("default generator assignment is admissible")
}

/// The witness with an explicit generator assignment: `indices[0]` carries
/// the main exponent, the next block the single factors, the last block the
/// squared factors.
pub fn build_witness_with_indices(p: &ParamDecomp, indices: &[u32]) -> Result<WitnessSpec> {
    let (main, singles, squares, r_exp) = layout(p);
    let needed = (1 + singles + squares) as usize;
    if indices.len() != needed {
        return Err(Error::InvalidArgument(format!(
            "witness needs {needed} generator indices, got {}",
            indices.len()
        )));
    }
    let in_range = indices.iter().all(|&i| i >= 1 && i < p.n);
    if !in_range || Support::from_indices(indices.iter().copied()).len() as usize != needed {
        return Err(Error::InvalidArgument(format!(
            "generator indices must be distinct and within 1..={}",
            p.n - 1
        )));
    }
    assert!(r_exp >= 0, "negative R exponent for {p:?}");

    let mut factors = vec![(H1Vector::v(indices[0]), main)];
    let (single_ix, square_ix) = indices[1..].split_at(singles as usize);
    factors.extend(single_ix.iter().map(|&i| (H1Vector::v(i), 1)));
    factors.extend(square_ix.iter().map(|&i| (H1Vector::v(i), 2)));
    factors.push((H1Vector::R, r_exp as u32));

    let second = if p.case == ProofCase::BEvenDZero {
        FunctionalKind::Phi3
    } else {
        FunctionalKind::Phi2
    };
    let w = WitnessSpec {
        params: p.clone(),
        factors,
        functionals: (FunctionalKind::Phi1, second),
        target: (p.n - 3, p.n - 4),
    };
    assert_eq!(w.total_exponent(), 2 * p.n - 7, "witness degree audit failed");
    assert!(needed < p.n as usize, "not enough generators for {p:?}");
    Ok(w)
}

/// Result of evaluating a witness product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEvaluation {
    pub value: bool,
    /// Number of presentation-level terms in the evaluated component.
    pub component_terms: usize,
}

/// Expands the witness and evaluates the requested functional pair on the
/// component matching the functionals' degrees.
pub fn evaluate_witness_with(
    w: &WitnessSpec,
    pair: (FunctionalKind, FunctionalKind),
) -> Result<WitnessEvaluation> {
    let p = &w.params;
    let left = Functional::new(pair.0, p)?;
    let right = Functional::new(pair.1, p)?;
    let target = (left.degree(), right.degree());
    let x = expand_component(p.n, p.k, &w.factors, target)?;
    Ok(WitnessEvaluation {
        value: x.pair_evaluate(&left, &right),
        component_terms: x.term_count(),
    })
}

pub fn evaluate_witness(w: &WitnessSpec) -> Result<WitnessEvaluation> {
    evaluate_witness_with(w, w.functionals)
}

/// Self-contained record of a witness evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u32,
    pub k: u32,
    pub case: ProofCase,
    /// `["V", i, e]` or `["R", 0, e]`.
    pub factors: Vec<(String, u32, u32)>,
    pub functionals: [FunctionalKind; 2],
    pub evaluation: u8,
    pub zdcl_lower: u32,
    pub tc_lower: u32,
    pub tc_upper: u32,
    pub engine_version: String,
    /// Unix seconds; only set on certificates written to disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_at: Option<u64>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.evaluation == 1
    }

    /// Content hash over every field except the timestamp.
    pub fn id(&self) -> String {
        let mut c = self.clone();
        c.verified_at = None;
        let json = serde_json::to_vec(&c).expect("certificate serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn factor_json(y: &H1Vector, e: u32) -> (String, u32, u32) {
    let (kind, i) = y
        .as_generator()
        .expect("witness factors are single generators");
    (kind.to_string(), i, e)
}

fn bounds(n: u32, evaluation: bool) -> (u32, u32, u32) {
    if evaluation {
        (2 * n - 7, 2 * n - 6, 2 * n - 5)
    } else {
        (0, 1, 2 * n - 5)
    }
}

/// Builds and evaluates the witness for `(n, k)`.
///
/// An evaluation of 0 yields a certificate with `evaluation = 0` rather
/// than an error, so the failing instance can be inspected.
pub fn certify_lower(n: u32, k: u32) -> Result<Certificate> {
    let p = decompose(n, k)?;
    let w = build_witness(&p);
    let eval = evaluate_witness(&w)?;
    Ok(certificate_for(&w, eval.value))
}

fn certificate_for(w: &WitnessSpec, value: bool) -> Certificate {
    let p = &w.params;
    let (zdcl_lower, tc_lower, tc_upper) = bounds(p.n, value);
    Certificate {
        n: p.n,
        k: p.k,
        case: p.case,
        factors: w.factors.iter().map(|(y, e)| factor_json(y, *e)).collect(),
        functionals: [w.functionals.0, w.functionals.1],
        evaluation: value as u8,
        zdcl_lower,
        tc_lower,
        tc_upper,
        engine_version: ENGINE_VERSION.to_string(),
        verified_at: None,
    }
}

/// Outcome of replaying a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayOutcome {
    pub ok: bool,
    pub recomputed_evaluation: Option<u8>,
    pub mismatches: Vec<String>,
}

/// Re-expands the certificate's own factor list and checks every recorded value.
pub fn replay_certificate(c: &Certificate) -> ReplayOutcome {
    let mut mismatches = Vec::new();
    let mut recomputed = None;
    match replay_inner(c, &mut mismatches) {
        Ok(v) => recomputed = Some(v as u8),
        Err(e) => mismatches.push(e.to_string()),
    }
    ReplayOutcome {
        ok: mismatches.is_empty(),
        recomputed_evaluation: recomputed,
        mismatches,
    }
}

fn replay_inner(c: &Certificate, mismatches: &mut Vec<String>) -> Result<bool> {
    let p = decompose(c.n, c.k)?;
    if p.case != c.case {
        mismatches.push(format!("case is {}, certificate says {}", p.case, c.case));
    }
    let mut factors = Vec::with_capacity(c.factors.len());
    for (kind, i, e) in &c.factors {
        let y = match (kind.as_str(), *i) {
            ("R", 0) => H1Vector::R,
            ("V", i) if i >= 1 && i < c.n => H1Vector::v(i),
            _ => {
                return Err(Error::Certificate(format!(
                    "bad factor [{kind:?}, {i}, {e}]"
                )))
            }
        };
        factors.push((y, *e));
    }
    let total: u32 = factors.iter().map(|(_, e)| e).sum();
    if total != 2 * c.n - 7 {
        mismatches.push(format!("factor exponents sum to {total}, expected {}", 2 * c.n - 7));
    }
    let left = Functional::new(c.functionals[0], &p)?;
    let right = Functional::new(c.functionals[1], &p)?;
    let x = expand_component(c.n, c.k, &factors, (left.degree(), right.degree()))?;
    let value = x.pair_evaluate(&left, &right);
    if value as u8 != c.evaluation {
        mismatches.push(format!(
            "evaluation replays to {}, certificate says {}",
            value as u8, c.evaluation
        ));
    }
    let (zdcl_lower, tc_lower, tc_upper) = bounds(c.n, c.evaluation == 1);
    for (name, want, got) in [
        ("zdcl_lower", zdcl_lower, c.zdcl_lower),
        ("tc_lower", tc_lower, c.tc_lower),
        ("tc_upper", tc_upper, c.tc_upper),
    ] {
        if want != got {
            mismatches.push(format!("{name} is {got}, expected {want}"));
        }
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingStrategy {
    #[serde(rename = "EXHAUSTIVE_MONOMIAL")]
    ExhaustiveMonomial,
    #[serde(rename = "RANDOM")]
    Random,
}

#[derive(Clone, Debug)]
pub struct VanishingOptions {
    pub strategy: VanishingStrategy,
    /// Number of sampled products (random strategy).
    pub samples: usize,
    pub seed: u64,
    /// Skip the size guards.
    pub force: bool,
}

impl VanishingOptions {
    pub fn exhaustive() -> Self {
        VanishingOptions {
            strategy: VanishingStrategy::ExhaustiveMonomial,
            samples: 0,
            seed: DEFAULT_SEED,
            force: false,
        }
    }

    pub fn random(samples: usize, seed: u64) -> Self {
        VanishingOptions {
            strategy: VanishingStrategy::Random,
            samples,
            seed,
            force: false,
        }
    }

    /// Exhaustive where it is within budget, otherwise sampled.
    pub fn auto(n: u32, samples: usize, seed: u64) -> Self {
        if n <= EXHAUSTIVE_MAX_N {
            VanishingOptions::exhaustive()
        } else {
            VanishingOptions::random(samples, seed)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub n: u32,
    pub k: u32,
    pub strategy: VanishingStrategy,
    /// Products checked (multisets for the exhaustive strategy).
    pub sample_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `C(2n-6, n-3)` is even.
    pub central_binomial_even: bool,
    pub all_vanished: bool,
    pub counterexample: Option<Vec<String>>,
}

/// Checks that `(2n-6)`-fold zero-divisor products vanish in `H* ⊗ H*`.
pub fn check_vanishing(n: u32, k: u32, opts: &VanishingOptions) -> Result<VanishingReport> {
    decompose(n, k)?;
    let limit = match opts.strategy {
        VanishingStrategy::ExhaustiveMonomial => EXHAUSTIVE_MAX_N,
        VanishingStrategy::Random => RANDOM_MAX_N,
    };
    if n > limit && !opts.force {
        return Err(Error::Budget(format!(
            "{:?} vanishing check is limited to n <= {limit}, got n = {n}",
            opts.strategy
        )));
    }
    let ring = CohomologyRing::new(n, k)?;
    ring.precompute();
    let alg = QuotientAlgebra::new(&ring)?;
    let length = (2 * n - 6) as usize;
    let (sample_count, counterexample) = match opts.strategy {
        VanishingStrategy::ExhaustiveMonomial => exhaustive(&alg, length),
        VanishingStrategy::Random => sampled(&alg, length, opts.samples, opts.seed),
    };
    Ok(VanishingReport {
        n,
        k,
        strategy: opts.strategy,
        sample_count,
        seed: (opts.strategy == VanishingStrategy::Random).then_some(opts.seed),
        central_binomial_even: !binom_mod2(2 * n as i64 - 6, n as i64 - 3),
        all_vanished: counterexample.is_none(),
        counterexample: counterexample.map(|f| f.iter().map(H1Vector::to_string).collect()),
    })
}

fn multisets(items: u64, size: u64) -> u64 {
    // C(items + size - 1, size)
    let (top, k) = (items + size - 1, size.min(items - 1));
    (0..k).fold(1u64, |acc, i| acc * (top - i) / (i + 1))
}

/// Walks all multisets of generators; a prefix whose product is already
/// zero accounts for all its completions at once.
fn exhaustive(alg: &QuotientAlgebra, length: usize) -> (u64, Option<Vec<H1Vector>>) {
    let gens = generators(alg.n());
    let root = QuotientTensor::identity(alg);
    // split on the exponent of the first generator
    let branches: Vec<(u64, Option<Vec<H1Vector>>)> = (0..=length)
        .into_par_iter()
        .map(|e0| {
            let mut acc = root.clone();
            for _ in 0..e0 {
                acc = acc.times_zero_divisor(alg, gens[0]);
            }
            let mut prefix = vec![gens[0]; e0];
            let mut count = 0;
            let mut found = None;
            walk(alg, &gens, 1, length - e0, acc, &mut prefix, &mut count, &mut found);
            (count, found)
        })
        .collect();
    let count = branches.iter().map(|(c, _)| c).sum();
    let found = branches.into_iter().find_map(|(_, f)| f);
    (count, found)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    alg: &QuotientAlgebra,
    gens: &[H1Vector],
    next: usize,
    remaining: usize,
    acc: QuotientTensor,
    prefix: &mut Vec<H1Vector>,
    count: &mut u64,
    found: &mut Option<Vec<H1Vector>>,
) {
    let left = (gens.len() - next) as u64;
    if acc.is_zero() {
        *count += if left == 0 {
            (remaining == 0) as u64
        } else {
            multisets(left, remaining as u64)
        };
        return;
    }
    if next == gens.len() {
        if remaining == 0 {
            *count += 1;
            if found.is_none() {
                *found = Some(prefix.clone());
            }
        }
        return;
    }
    if next == gens.len() - 1 {
        let mut acc = acc;
        for _ in 0..remaining {
            acc = acc.times_zero_divisor(alg, gens[next]);
        }
        let base = prefix.len();
        prefix.extend(std::iter::repeat_n(gens[next], remaining));
        walk(alg, gens, next + 1, 0, acc, prefix, count, found);
        prefix.truncate(base);
        return;
    }
    let base = prefix.len();
    let mut acc = acc;
    for e in 0..=remaining {
        if e > 0 {
            acc = acc.times_zero_divisor(alg, gens[next]);
            prefix.push(gens[next]);
        }
        walk(alg, gens, next + 1, remaining - e, acc.clone(), prefix, count, found);
    }
    prefix.truncate(base);
}

/// A uniformly random nonzero degree-one class.
pub fn random_h1(rng: &mut impl Rng, n: u32) -> H1Vector {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        let bits = rng.gen::<u64>() & mask;
        if bits != 0 {
            return H1Vector::new(bits & 1 == 1, Support(bits & !1));
        }
    }
}

/// Sample `i` draws from ChaCha8 seeded with `seed` on stream `i`, so the
/// outcome does not depend on how samples are spread over threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn sampled(
    alg: &QuotientAlgebra,
    length: usize,
    samples: usize,
    seed: u64,
) -> (u64, Option<Vec<H1Vector>>) {
    let found = (0..samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let factors: Vec<H1Vector> = (0..length).map(|_| random_h1(&mut rng, alg.n())).collect();
            let prod = QuotientTensor::product(alg, &factors);
            (!prod.is_zero()).then_some((i, factors))
        })
        .min_by_key(|(i, _)| *i)
        .map(|(_, f)| f);
    (samples as u64, found)
}

/// Zero-divisor cup length with the evidence behind it.
#[derive(Clone, Debug, Serialize)]
pub struct ZdclReport {
    pub n: u32,
    pub k: u32,
    /// `2n - 7` when both sides are verified, otherwise the best verified lower bound.
    pub zdcl: u32,
    pub defect: bool,
    pub certificate: Certificate,
    pub vanishing: VanishingReport,
}

pub fn zdcl(n: u32, k: u32, opts: &VanishingOptions) -> Result<ZdclReport> {
    let certificate = certify_lower(n, k)?;
    let vanishing = check_vanishing(n, k, opts)?;
    let defect = !certificate.passed() || !vanishing.all_vanished;
    Ok(ZdclReport {
        n,
        k,
        zdcl: certificate.zdcl_lower,
        defect,
        certificate,
        vanishing,
    })
}

/// Lower and upper topological complexity bounds with their provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TcReport {
    pub n: u32,
    pub k: u32,
    pub lower: u32,
    pub upper: u32,
    /// Id of the certificate behind the lower bound.
    pub basis: String,
}

pub fn tc_bounds(n: u32, k: u32) -> Result<TcReport> {
    let c = certify_lower(n, k)?;
    Ok(TcReport {
        n,
        k,
        lower: c.tc_lower,
        upper: c.tc_upper,
        basis: c.id(),
    })
}
