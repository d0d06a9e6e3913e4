//! Numerical toolkit for sawtooth-function spectra, Dedekind sums, prime-race
//! bias constants `C(k)` and the totient error term.

pub mod bias;
pub mod characters;
pub mod cli;
pub mod correlations;
pub mod dedekind;
pub mod distribution;
pub mod error;
pub mod foundations;
pub mod moments;
pub mod phi_error;
pub mod primes;
pub mod report;

pub use error::{Error, Result};
