use serde::{Deserialize, Serialize};
use std::fmt;

use super::{RingElement, Support};
use crate::error::{Error, Result};
use crate::parity::{binom_mod2, ParamDecomp, ProofCase};

/// The linear functionals on the top two degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalKind {
    /// Top degree: `T_{S,n-3} ↦ C(n-2-|S|, k-1-|S|)`.
    #[serde(rename = "PHI1")]
    Phi1,
    /// Degree `n-4`, same coefficient rule.
    #[serde(rename = "PHI2")]
    Phi2,
    /// Degree `n-4`: 1 for `|S| < k-1`, 0 for `|S| = k-1`. B even, D = 0 only.
    #[serde(rename = "PHI3")]
    Phi3,
}

impl FunctionalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionalKind::Phi1 => "PHI1",
            FunctionalKind::Phi2 => "PHI2",
            FunctionalKind::Phi3 => "PHI3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "PHI1" => Some(FunctionalKind::Phi1),
            "PHI2" => Some(FunctionalKind::Phi2),
            "PHI3" => Some(FunctionalKind::Phi3),
            _ => None,
        }
    }

    /// Degree the functional is defined on.
    pub fn degree(self, n: u32) -> u32 {
        match self {
            FunctionalKind::Phi1 => n - 3,
            FunctionalKind::Phi2 | FunctionalKind::Phi3 => n - 4,
        }
    }
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A functional bound to a concrete `(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Functional {
    kind: FunctionalKind,
    n: u32,
    k: u32,
}

impl Functional {
    pub fn new(kind: FunctionalKind, p: &ParamDecomp) -> Result<Self> {
        if kind == FunctionalKind::Phi3 && p.case != ProofCase::BEvenDZero {
            return Err(Error::FunctionalUnavailable);
        }
        Ok(Functional {
            kind,
            n: p.n,
            k: p.k,
        })
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.kind.degree(self.n)
    }

    /// Value on any `T_{S,d}` with `|S| = size`.
    #[inline]
    pub fn value_at_size(&self, size: u32) -> bool {
        match self.kind {
            FunctionalKind::Phi1 | FunctionalKind::Phi2 => binom_mod2(
                self.n as i64 - 2 - size as i64,
                self.k as i64 - 1 - size as i64,
            ),
            FunctionalKind::Phi3 => size < self.k - 1,
        }
    }

    #[inline]
    pub fn value(&self, support: Support) -> bool {
        self.value_at_size(support.len())
    }

    pub fn evaluate(&self, x: &RingElement) -> Result<bool> {
        if x.degree != self.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                actual: x.degree,
            });
        }
        Ok(x.terms.iter().fold(false, |acc, s| acc ^ self.value(*s)))
    }

    /// Value on the relation `R_{L,d}` for any `L` with `|L| = size`.
    ///
    /// The relation contains `C(size, i)` classes with `|S| = i` for each
    /// `i <= min(k-1, d)`, and the functional depends only on `|S|`.
    pub fn on_relation_of_size(&self, size: u32) -> bool {
        let cap = (self.k - 1).min(self.degree());
        (0..=cap.min(size)).fold(false, |acc, i| {
            acc ^ (binom_mod2(size as i64, i as i64) && self.value_at_size(i))
        })
    }

    /// Checks that the functional kills every relation of its degree.
    pub fn check(&self) -> FunctionalCheck {
        let d = self.degree();
        let lo = self.n - self.k;
        let hi = (d + 1).min(self.n - 1);
        let mut relations_checked: u128 = 0;
        let mut failing_size = None;
        for size in lo..=hi {
            relations_checked += binomial_u128(self.n - 1, size);
            if self.on_relation_of_size(size) && failing_size.is_none() {
                failing_size = Some(size);
            }
        }
        let closed_form_agrees = (lo..=hi).all(|size| check_closed_form(*self, size));
        FunctionalCheck {
            kind: self.kind,
            relations_checked,
            passed: failing_size.is_none() && closed_form_agrees,
            failing_size,
            closed_form_agrees,
        }
    }
}

/// Compares the relation evaluation with its closed form.
///
/// For `φ₁`, `φ₂`: `Σ_i C(ℓ,i) C(n-2-i, k-1-i) ≡ C(ℓ-n+k, k-1)`.
/// For `φ₃`: `Σ_{i<=k-2} C(ℓ,i) ≡ Σ_{i<=k-2} C(ℓ - 2^t B, i) = 2^(ℓ - 2^t B)`.
pub fn check_closed_form(f: Functional, size: u32) -> bool {
    let (n, k) = (f.n as i64, f.k as i64);
    let l = size as i64;
    match f.kind {
        FunctionalKind::Phi1 | FunctionalKind::Phi2 => {
            let lhs = (0..k).fold(false, |acc, i| {
                acc ^ (binom_mod2(l, i) && binom_mod2(n - 2 - i, k - 1 - i))
            });
            lhs == binom_mod2(l - n + k, k - 1)
        }
        FunctionalKind::Phi3 => {
            let lhs = (0..=k - 2).fold(false, |acc, i| acc ^ binom_mod2(l, i));
            // n - k - 1 = 2^t B when D = 0
            let shifted = l - (n - k - 1);
            if !(1..=k - 2).contains(&shifted) {
                return false;
            }
            let reduced = (0..=k - 2).fold(false, |acc, i| acc ^ binom_mod2(shifted, i));
            // 2^shifted is even for shifted >= 1
            lhs == reduced && !reduced
        }
    }
}

fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Result of [`Functional::check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionalCheck {
    pub kind: FunctionalKind,
    pub relations_checked: u128,
    pub passed: bool,
    /// Size of a relation set `L` the functional fails to kill.
    pub failing_size: Option<u32>,
    pub closed_form_agrees: bool,
}
