//! Moments of the gcd-product random variable
//!
//! For moduli `n_1, …, n_k` the random variable
//! `X(l) = gcd(l, n_1) ⋯ gcd(l, n_k)` on `{1, …, lcm(n_1, …, n_k)}` with the
//! uniform measure counts `|Hom(A, ℤ/l)|` for `A = ∏ ℤ/n_j`. This crate
//! evaluates `E[X^w]` three independent ways:
//!
//! * brute force over the whole sample space ([`moments::brute_moment_exact`]),
//! * a product of per-prime local factors ([`moments::euler_product_moment`]),
//! * the element-order census `μ(A^w) = Σ_{a ∈ A^w} 1/|a|` ([`abgroup::mu`]),
//!
//! and checks the Igusa-type zeta function `Σ_m |Hom(ℤ^r × A, ℤ/m)| m^{-s}`
//! against its two closed forms and its residue at `s = r + 1` ([`igusa`]).
//!
//! Exact values are [`BigRational`]; complex exponents and zeta values are
//! binary64.

pub mod abgroup;
pub mod error;
pub mod igusa;
pub mod moments;
pub mod numtheory;

pub use abgroup::{AbelianGroup, PPrimaryProfile};
pub use error::{Error, Result};
pub use moments::{Exponent, MomentQuery, MomentReport, MomentValue, Verifier};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use numtheory::FactoredNat;

/// Default limit on the number of sample points or group elements any
/// brute-force route will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
