//! Mod-2 cohomology of planar polygon spaces `M̄_{n,n-2k}` and certified
//! bounds on their topological complexity.
//!
//! The crate builds the cohomology ring from its generators-and-relations
//! presentation, expands products of zero-divisors in `H* ⊗ H*`, and
//! evaluates explicit witness products that certify
//! `TC(M̄_{n,n-2k}) >= 2n - 6` for `2 < 2k < n`. An independent
//! polynomial-ideal model cross-checks the ring on small cases.

pub mod certifier;
pub mod cli;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod parity;
pub mod quotient;
pub mod ring;
pub mod tensor;

pub use error::{Error, Result};
