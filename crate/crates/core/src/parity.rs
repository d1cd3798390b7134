//! Mod-2 binomial arithmetic and the `(n, k)` parameter decomposition.
//!
//! Every pair with `k >= 2` and `n > 2k` splits uniquely as
//! `k = 2^t + k0` (`1 <= k0 <= 2^t`) and `n = k + 1 + 2^t B + D`
//! (`0 <= D < 2^t`, `B >= 1`). With `C = k0 + D - 1` this gives
//! `n = 2^t (B + 1) + C + 2`, and the parity of `B`, the vanishing of `D`
//! and the binary shape of `C` select one of four witness constructions.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Parity of `C(a, b)`.
///
/// Out-of-range arguments (`b < 0`, `b > a`, `a < 0`) give 0, which is the
/// convention the witness computations rely on.
#[inline]
pub fn binom_mod2(a: i64, b: i64) -> bool {
    if a < 0 || b < 0 || b > a {
        return false;
    }
    b & !a == 0
}

/// `floor(log2(x))` for `x >= 1`.
pub fn floor_lg(x: i64) -> Result<u32> {
    if x <= 0 {
        return Err(Error::NonPositiveLog(x));
    }
    Ok(63 - x.leading_zeros())
}

fn lg(x: i64) -> u32 {
    debug_assert!(x > 0);
    63 - x.leading_zeros()
}

/// Which witness construction applies to a pair `(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProofCase {
    #[serde(rename = "B_ODD")]
    BOdd,
    #[serde(rename = "B_EVEN_D_ZERO")]
    BEvenDZero,
    #[serde(rename = "B_EVEN_SMALL_C")]
    BEvenSmallC,
    #[serde(rename = "B_EVEN_LARGE_C")]
    BEvenLargeC,
}

impl ProofCase {
    pub const ALL: [ProofCase; 4] = [
        ProofCase::BOdd,
        ProofCase::BEvenDZero,
        ProofCase::BEvenSmallC,
        ProofCase::BEvenLargeC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProofCase::BOdd => "B_ODD",
            ProofCase::BEvenDZero => "B_EVEN_D_ZERO",
            ProofCase::BEvenSmallC => "B_EVEN_SMALL_C",
            ProofCase::BEvenLargeC => "B_EVEN_LARGE_C",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for ProofCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The decomposition of `(n, k)` together with the selected case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDecomp {
    pub n: u32,
    pub k: u32,
    pub t: u32,
    pub k0: u32,
    #[serde(rename = "B")]
    pub b: u32,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "C")]
    pub c: u32,
    pub case: ProofCase,
    /// `floor_lg(D)`, present whenever `D > 0`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ell: Option<u32>,
    /// `C = 2^(ell+1) A + gamma`; large-C case only.
    #[serde(rename = "A", skip_serializing_if = "Option::is_none", default)]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<u32>,
    /// Main exponent `2^t (B + 1) + 2^(ell+1) A - 1`; large-C case only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
}

impl ParamDecomp {
    pub fn two_t(&self) -> u32 {
        1 << self.t
    }

    /// Manifold dimension `n - 3`.
    pub fn top_degree(&self) -> u32 {
        self.n - 3
    }
}

/// Checks the study-range hypothesis `2 < 2k < n`.
pub fn check_domain(n: u32, k: u32) -> Result<()> {
    if k < 2 || (n as u64) <= 2 * k as u64 {
        return Err(Error::Domain {
            n: n as u64,
            k: k as u64,
        });
    }
    Ok(())
}

/// Computes the unique decomposition of `(n, k)` and its proof case.
pub fn decompose(n: u32, k: u32) -> Result<ParamDecomp> {
    check_domain(n, k)?;
    if n > 1 << 30 {
        return Err(Error::InvalidArgument(format!("n = {n} is too large")));
    }
    // 2^t < k <= 2^(t+1)
    let t = lg(k as i64 - 1);
    let two_t = 1u32 << t;
    let k0 = k - two_t;
    let rest = n - k - 1;
    let b = rest >> t;
    let d = rest & (two_t - 1);
    let c = k0 + d - 1;
    debug_assert!(b >= 1);

    let ell = (d > 0).then(|| lg(d as i64));
    let case = if b % 2 == 1 {
        ProofCase::BOdd
    } else if d == 0 {
        ProofCase::BEvenDZero
    } else {
        // d > 0 forces c >= 1
        let ell = ell.expect("D > 0");
        if (c - (1 << lg(c as i64))) < (1 << (1 + ell)) {
            ProofCase::BEvenSmallC
        } else {
            ProofCase::BEvenLargeC
        }
    };

    let (a, gamma, m) = if case == ProofCase::BEvenLargeC {
        let ell = ell.expect("D > 0");
        let block = 1u32 << (ell + 1);
        let a = c / block;
        let gamma = c % block;
        let m = two_t * (b + 1) + block * a - 1;
        (Some(a), Some(gamma), Some(m))
    } else {
        (None, None, None)
    };

    let p = ParamDecomp {
        n,
        k,
        t,
        k0,
        b,
        d,
        c,
        case,
        ell,
        a,
        gamma,
        m,
    };
    debug_assert_eq!(p.n, two_t * (b + 1) + c + 2);
    Ok(p)
}

/// All pairs `(n, k)` with `2 <= k`, `2k < n` and `6 <= n <= n_max`, ordered by `(n, k)`.
pub fn valid_pairs(n_max: u32) -> Vec<(u32, u32)> {
    (6..=n_max)
        .flat_map(|n| (2..).take_while(move |k| 2 * k < n).map(move |k| (n, k)))
        .collect()
}

/// Exact edge length `r`, either as binary floating point or a decimal string.
#[derive(Clone, Debug)]
pub enum Length<'a> {
    Float(f64),
    Decimal(&'a str),
}

/// Tolerance for deciding that a floating-point `n - r` sits on an odd integer.
pub const LENGTH_EPSILON: f64 = 1e-9;

/// Maps a generic length `r` to the `k` with `n - 2k - 1 < r < n - 2k + 1`.
pub fn normalize_length(n: u32, r: Length<'_>) -> Result<u32> {
    if n < 4 {
        return Err(Error::OutOfRange(format!("n = {n} must be at least 4")));
    }
    let k = match r {
        Length::Float(r) => normalize_float(n, r)?,
        Length::Decimal(s) => normalize_decimal(n, s)?,
    };
    if k == 1 {
        return Err(Error::KOneUnsupported);
    }
    if 2 * k as u64 >= n as u64 {
        return Err(Error::KAtLeastHalf {
            n: n as u64,
            k: k as u64,
        });
    }
    Ok(k)
}

fn normalize_float(n: u32, r: f64) -> Result<u32> {
    if !r.is_finite() || r <= 0.0 || r >= (n - 1) as f64 {
        return Err(Error::OutOfRange(format!("r = {r} must lie in (0, {})", n - 1)));
    }
    let x = n as f64 - r;
    let nearest = x.round();
    if (x - nearest).abs() < LENGTH_EPSILON {
        let whole = nearest as i64;
        if whole % 2 != 0 {
            return Err(Error::NonGeneric(whole.to_string()));
        }
        return Ok((whole / 2) as u32);
    }
    Ok(((x + 1.0) / 2.0).floor() as u32)
}

/// Parses `[+]digits[.digits]` into `p / 10^s`.
fn parse_decimal(s: &str) -> Result<(i128, i128)> {
    let bad = || Error::InvalidArgument(format!("not a decimal length: {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
        return Err(bad());
    }
    let digits: String = format!("{int}{frac}");
    let mut p: i128 = digits.parse().map_err(|_| bad())?;
    if neg {
        p = -p;
    }
    Ok((p, 10i128.pow(frac.len() as u32)))
}

fn normalize_decimal(n: u32, s: &str) -> Result<u32> {
    let (p, q) = parse_decimal(s)?;
    let n = n as i128;
    if p <= 0 || p >= (n - 1) * q {
        return Err(Error::OutOfRange(format!("r = {s} must lie in (0, {})", n - 1)));
    }
    let x_num = n * q - p; // n - r = x_num / q > 0
    if x_num % q == 0 && (x_num / q) % 2 != 0 {
        return Err(Error::NonGeneric((x_num / q).to_string()));
    }
    Ok(((x_num + q) / (2 * q)) as u32)
}

/// `C(n - 2 - i, k - 1 - i)` mod 2.
#[inline]
pub fn psi(i: i64, n: u32, k: u32) -> bool {
    binom_mod2(n as i64 - 2 - i, k as i64 - 1 - i)
}

/// Outcome of an exhaustive parity sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub name: &'static str,
    pub cases_checked: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl SweepReport {
    fn new(name: &'static str) -> Self {
        SweepReport {
            name,
            cases_checked: 0,
            passed: true,
            counterexample: None,
        }
    }

    fn fail(&mut self, what: String) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(what);
        }
    }
}

/// Checks the three-way evaluation of `psi` for every pair up to `n_max`:
/// `psi(C+1) = 1`, `psi(i) = 0` on `k0..=C`, and `psi(i) = 0` on `0..=C` when `B` is odd.
pub fn verify_techlem(n_max: u32) -> SweepReport {
    let mut report = SweepReport::new("techlem");
    for (n, k) in valid_pairs(n_max) {
        let p = decompose(n, k).expect("valid pair");
        let c = p.c as i64;
        report.cases_checked += 1;
        if !psi(c + 1, n, k) {
            report.fail(format!("n={n} k={k}: psi(C+1) = 0"));
        }
        let low = if p.b % 2 == 1 { 0 } else { p.k0 as i64 };
        for i in low..=c {
            if psi(i, n, k) {
                report.fail(format!("n={n} k={k}: psi({i}) = 1"));
            }
        }
    }
    report
}

/// Checks, for `t <= t_max`, `1 <= B <= b_max`, `0 <= C <= 2^(t+1) - 2`, `0 <= j <= C`,
/// that `C(2^(t+1)(B+1) - C - 3, 2^t(B+1) - C - 1 + j)` is odd exactly when
/// `B` is a power of two and `C = 2^(t+1) - 2`.
pub fn verify_bclem(t_max: u32, b_max: u32) -> SweepReport {
    let mut report = SweepReport::new("bclem");
    for t in 0..=t_max {
        let two_t = 1i64 << t;
        for b in 1..=b_max as i64 {
            for c in 0..=2 * two_t - 2 {
                let expected = (b as u64).is_power_of_two() && c == 2 * two_t - 2;
                for j in 0..=c {
                    report.cases_checked += 1;
                    let top = 2 * two_t * (b + 1) - c - 3;
                    let bottom = two_t * (b + 1) - c - 1 + j;
                    if binom_mod2(top, bottom) != expected {
                        report.fail(format!("t={t} B={b} C={c} j={j}"));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_examples() {
        assert!(!binom_mod2(4, 1));
        assert!(binom_mod2(3, 0));
        assert!(binom_mod2(7, 3));
        assert!(!binom_mod2(5, -2));
        assert!(!binom_mod2(2, 3));
        assert!(!binom_mod2(-1, 0));
    }

    #[test]
    fn floor_lg_examples() {
        assert_eq!(floor_lg(1).unwrap(), 0);
        assert_eq!(floor_lg(5).unwrap(), 2);
        assert_eq!(floor_lg(8).unwrap(), 3);
        assert!(floor_lg(0).is_err());
        assert!(floor_lg(-3).is_err());
    }

    fn shape(n: u32, k: u32) -> (u32, u32, u32, u32, u32, ProofCase) {
        let p = decompose(n, k).unwrap();
        (p.t, p.k0, p.b, p.d, p.c, p.case)
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(shape(6, 2), (0, 1, 3, 0, 0, ProofCase::BOdd));
        assert_eq!(shape(8, 3), (1, 1, 2, 0, 0, ProofCase::BEvenDZero));
        assert_eq!(shape(12, 5), (2, 1, 1, 2, 2, ProofCase::BOdd));
        assert_eq!(shape(9, 3), (1, 1, 2, 1, 1, ProofCase::BEvenSmallC));
        let p = decompose(32, 14).unwrap();
        assert_eq!((p.t, p.k0, p.b, p.d, p.c), (3, 6, 2, 1, 6));
        assert_eq!(p.case, ProofCase::BEvenLargeC);
        assert_eq!((p.ell, p.a, p.gamma, p.m), (Some(0), Some(3), Some(0), Some(29)));
    }

    #[test]
    fn decompose_rejects_outside_domain() {
        for (n, k) in [(6, 1), (6, 3), (4, 2), (10, 0)] {
            let err = decompose(n, k).unwrap_err();
            assert!(err.to_string().contains("2 < 2k < n"), "{err}");
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_length(6, Length::Float(1.5)).unwrap(), 2);
        assert_eq!(normalize_length(9, Length::Float(2.2)).unwrap(), 3);
        assert!(matches!(
            normalize_length(6, Length::Float(1.0)),
            Err(Error::NonGeneric(_))
        ));
        assert!(matches!(
            normalize_length(6, Length::Decimal("1.0")),
            Err(Error::NonGeneric(_))
        ));
        assert_eq!(normalize_length(6, Length::Decimal("1.5")).unwrap(), 2);
        assert_eq!(normalize_length(9, Length::Decimal("2.2")).unwrap(), 3);
    }

    #[test]
    fn normalize_outcomes() {
        assert!(matches!(
            normalize_length(6, Length::Float(0.0)),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            normalize_length(6, Length::Float(5.0)),
            Err(Error::OutOfRange(_))
        ));
        // n - r in (1, 3) means k = 1
        assert!(matches!(
            normalize_length(6, Length::Float(4.5)),
            Err(Error::KOneUnsupported)
        ));
        // r in (0, 1) with n even means k = n / 2
        assert!(matches!(
            normalize_length(8, Length::Decimal("0.25")),
            Err(Error::KAtLeastHalf { .. })
        ));
        // one ulp-scale perturbation stays on the wall
        assert!(matches!(
            normalize_length(6, Length::Float(1.0 + 1e-12)),
            Err(Error::NonGeneric(_))
        ));
        // exact decimal can sit arbitrarily close to the wall
        assert_eq!(
            normalize_length(6, Length::Decimal("1.0000000000001")).unwrap(),
            2
        );
        assert!(normalize_length(6, Length::Decimal("abc")).is_err());
    }

    #[test]
    fn normalize_inverts_lengths() {
        for (n, k) in valid_pairs(64) {
            let r = (n - 2 * k) as f64;
            assert_eq!(normalize_length(n, Length::Float(r)).unwrap(), k);
            let s = (n - 2 * k).to_string();
            assert_eq!(normalize_length(n, Length::Decimal(&s)).unwrap(), k);
        }
    }

    #[test]
    fn psi_examples() {
        assert!(psi(3, 12, 5));
        assert!(!psi(0, 12, 5));
        assert!(!psi(1, 12, 5));
    }

    #[test]
    fn techlem_small() {
        let r = verify_techlem(6);
        assert!(r.passed);
        assert_eq!(r.cases_checked, 1);
        let r = verify_techlem(5);
        assert!(r.passed);
        assert_eq!(r.cases_checked, 0);
        assert!(verify_techlem(32).passed);
    }

    #[test]
    fn bclem_spot_checks() {
        // t=1, B=2, C=2, j=0: C(7,3) = 35
        assert!(binom_mod2(4 * 3 - 2 - 3, 2 * 3 - 2 - 1));
        // t=1, B=3, C=2, j=1: C(11,6) = 462
        assert!(!binom_mod2(4 * 4 - 2 - 3, 2 * 4 - 2 - 1 + 1));
        assert!(verify_bclem(4, 16).passed);
    }

    #[test]
    fn case_partition_and_recomposition() {
        for (n, k) in valid_pairs(256) {
            let p = decompose(n, k).unwrap();
            let two_t = p.two_t();
            assert_eq!(k, two_t + p.k0);
            assert!(1 <= p.k0 && p.k0 <= two_t);
            assert!(p.d < two_t && p.b >= 1);
            assert_eq!(n, k + 1 + two_t * p.b + p.d);
            assert_eq!(n, two_t * (p.b + 1) + p.c + 2);
            let matches = [
                p.b % 2 == 1,
                p.b % 2 == 0 && p.d == 0,
                p.b % 2 == 0
                    && p.d > 0
                    && p.c - (1 << floor_lg(p.c as i64).unwrap())
                        < 1 << (1 + floor_lg(p.d as i64).unwrap()),
                p.b % 2 == 0
                    && p.d > 0
                    && p.c - (1 << floor_lg(p.c as i64).unwrap())
                        >= 1 << (1 + floor_lg(p.d as i64).unwrap()),
            ];
            assert_eq!(matches.iter().filter(|m| **m).count(), 1);
            let idx = ProofCase::ALL.iter().position(|c| *c == p.case).unwrap();
            assert!(matches[idx]);
        }
    }
}
