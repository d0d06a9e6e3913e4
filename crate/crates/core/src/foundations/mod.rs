//! Exact rationals, sieves, modular arithmetic, the coefficient series
//! `a(n)`, `b(n)`, the constant `C`, sawtooth kernels and DFT plumbing.

pub mod arith;
pub mod coeffs;
pub mod dft;
pub mod rational;
pub mod sawtooth;
pub mod sieve;

pub use arith::{gcd, is_prime, mod_inverse, pairwise_sum, CompensatedSum};
pub use coeffs::{coeff_a, coeff_b, constant_c, limiting_constant, CertifiedValue, CoefficientSeries};
pub use rational::ExactRational;
pub use sawtooth::{fejer, psi, psi_smoothed};
pub use sieve::SieveTables;

/// Builds the smallest-prime-factor, Euler phi and Mobius tables.
pub fn build_sieves(limit: u64) -> crate::error::Result<SieveTables> {
    SieveTables::new(limit)
}
