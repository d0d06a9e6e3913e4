//! Dirichlet characters modulo a prime: the index (discrete log) table,
//! Gauss sums, `L(0, chi)`, `L(1, chi)` and the prime-pair correction
//! factor `A_{q,chi}`.
//!
//! Characters are labelled by `j` in `[0, q-2]` with
//! `chi_j(g^m) = e(j m / (q-1))` for the primitive root `g`, so `chi_j` is
//! odd exactly when `j` is odd. Every per-character quantity is a length
//! `q-1` transform over the index table and is computed with the chirp-z
//! DFT; [`CharacterTable::build_direct`] evaluates the same finite sums
//! term by term and serves as the oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foundations::arith::{factorize, mod_inverse, pow_mod, require_odd_prime, CompensatedSum};
use crate::foundations::coeffs::CoefficientSeries;
use crate::foundations::dft::{chirp_z, unit_root, Sign};
use crate::foundations::sawtooth::psi_residue;

/// Largest modulus accepted by table construction.
pub const DEFAULT_MAX_Q: u64 = 20_000_000;

/// Default cutoff `N` for the `A_{q,chi}` series.
pub const DEFAULT_A_CUTOFF: u64 = 100_000;

/// Surrogate for the unquantified epsilon in the `N^{-1/2 + eps}` tail.
pub const TAIL_EPSILON: f64 = 0.05;

/// A prime modulus with a primitive root, its discrete-log table and the
/// table of inverses.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    q: u64,
    root: u64,
    index: Vec<u32>,
    power: Vec<u32>,
    inverse: Vec<u32>,
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    let order = q - 1;
    let prime_factors: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
    (2..q)
        .find(|&g| prime_factors.iter().all(|&p| pow_mod(g, order / p, q) != 1))
        .unwrap_or(1)
}

impl PrimeContext {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, DEFAULT_MAX_Q)
    }

    pub fn with_cap(q: u64, cap: u64) -> Result<Self> {
        require_odd_prime(q)?;
        if q > cap {
            return Err(Error::resource("modulus q", q, cap));
        }
        let g = primitive_root(q);
        let n = q as usize;
        let mut index = vec![0u32; n];
        let mut power = vec![0u32; n - 1];
        let mut x = 1u64;
        for m in 0..(n - 1) {
            power[m] = x as u32;
            index[x as usize] = m as u32;
            x = x * g % q;
        }
        let mut inverse = vec![0u32; n];
        for a in 1..n {
            // g^{-m} = g^{q-1-m}
            let m = index[a] as usize;
            inverse[a] = power[(n - 1 - m) % (n - 1)];
        }
        Ok(PrimeContext {
            q,
            root: g,
            index,
            power,
            inverse,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn primitive_root(&self) -> u64 {
        self.root
    }

    /// Group order `phi(q) = q - 1`.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    /// Discrete log of `a` (nonzero mod q) to base `g`.
    pub fn index(&self, a: u64) -> u64 {
        self.index[(a % self.q) as usize] as u64
    }

    /// `g^m mod q`.
    pub fn power(&self, m: u64) -> u64 {
        self.power[(m % (self.q - 1)) as usize] as u64
    }

    /// Inverse of a nonzero residue.
    pub fn inverse(&self, a: u64) -> u64 {
        self.inverse[(a % self.q) as usize] as u64
    }

    pub fn inverse_checked(&self, a: i64) -> Result<u64> {
        mod_inverse(a, self.q)
    }

    /// `chi_j(a)`, zero when `q | a`.
    pub fn char_value(&self, j: u64, a: i64) -> Complex64 {
        let r = a.rem_euclid(self.q as i64) as u64;
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = self.index[r as usize] as u64;
        unit_root((j % (self.q - 1)) * m % (self.q - 1), self.q - 1)
    }
}

/// Per-character data.
#[derive(Clone, Copy, Debug)]
pub struct CharacterData {
    pub gauss_sum: Complex64,
    pub l_zero: Complex64,
    /// `None` for the principal character, where the series diverges.
    pub l_one: Option<Complex64>,
    pub a_q_chi: Complex64,
}

/// All Dirichlet characters modulo a prime with their L-values.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    context: PrimeContext,
    a_cutoff: u64,
    a_tail_bound: f64,
    constant: f64,
    chars: Vec<CharacterData>,
}

impl CharacterTable {
    /// Builds the table through chirp-z transforms over the index table.
    pub fn build(q: u64, a_series_cutoff: u64) -> Result<Self> {
        let context = PrimeContext::new(q)?;
        Self::build_with_context(context, a_series_cutoff)
    }

    pub fn build_with_context(context: PrimeContext, a_series_cutoff: u64) -> Result<Self> {
        let q = context.q;
        let order = (q - 1) as usize;
        let series = CoefficientSeries::new(a_series_cutoff.max(2), Some(q))?;
        let buckets = a_buckets(&context, &series, a_series_cutoff);

        let exp_seq: Vec<Complex64> = context.power.iter().map(|&x| unit_root(x as u64, q)).collect();
        let psi_seq: Vec<Complex64> = context
            .power
            .iter()
            .map(|&x| Complex64::new(psi_residue(x as u64, q), 0.0))
            .collect();
        let log_seq: Vec<Complex64> = context
            .power
            .iter()
            .map(|&x| Complex64::new(log_abs_one_minus_root(x as u64, q), 0.0))
            .collect();
        let bucket_seq: Vec<Complex64> = context
            .power
            .iter()
            .map(|&x| Complex64::new(buckets[x as usize], 0.0))
            .collect();

        let gauss = chirp_z(&exp_seq, Sign::Forward);
        let l0_raw = chirp_z(&psi_seq, Sign::Forward);
        let log_sums = chirp_z(&log_seq, Sign::Backward);
        let a_raw = chirp_z(&bucket_seq, Sign::Forward);

        let constant = series.constant();
        let chars = (0..order)
            .map(|j| {
                let mut l_zero = -l0_raw[j];
                if j % 2 == 0 {
                    // even characters: the finite sum vanishes identically
                    l_zero = Complex64::new(0.0, 0.0);
                }
                let l_one = l_one_closed_form(j, q, gauss[j], l_zero, log_sums[j]);
                CharacterData {
                    gauss_sum: gauss[j],
                    l_zero,
                    l_one,
                    a_q_chi: a_raw[j] * constant,
                }
            })
            .collect();
        Ok(CharacterTable {
            a_tail_bound: a_tail_bound(constant, a_series_cutoff),
            context,
            a_cutoff: a_series_cutoff,
            constant,
            chars,
        })
    }

    /// Same quantities by direct `O(q)` sums per character (`O(q^2)`
    /// total), parallel over `j`.
    pub fn build_direct(q: u64, a_series_cutoff: u64) -> Result<Self> {
        let context = PrimeContext::new(q)?;
        let series = CoefficientSeries::new(a_series_cutoff.max(2), Some(q))?;
        let buckets = a_buckets(&context, &series, a_series_cutoff);
        let constant = series.constant();
        let order = q - 1;
        let chars = (0..order)
            .into_par_iter()
            .map(|j| {
                let gauss_sum = gauss_sum_direct(&context, j);
                let mut l0 = Complex64::new(0.0, 0.0);
                let mut logs = Complex64::new(0.0, 0.0);
                let mut a_sum = Complex64::new(0.0, 0.0);
                for a in 1..q {
                    let chi = context.char_value(j, a as i64);
                    l0 -= chi * psi_residue(a, q);
                    logs += chi.conj() * log_abs_one_minus_root(a, q);
                    a_sum += chi * buckets[a as usize];
                }
                if j % 2 == 0 {
                    l0 = Complex64::new(0.0, 0.0);
                }
                CharacterData {
                    gauss_sum,
                    l_zero: l0,
                    l_one: l_one_closed_form(j as usize, q, gauss_sum, l0, logs),
                    a_q_chi: a_sum * constant,
                }
            })
            .collect();
        Ok(CharacterTable {
            a_tail_bound: a_tail_bound(constant, a_series_cutoff),
            context,
            a_cutoff: a_series_cutoff,
            constant,
            chars,
        })
    }

    pub fn context(&self) -> &PrimeContext {
        &self.context
    }

    pub fn q(&self) -> u64 {
        self.context.q
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn character(&self, j: u64) -> &CharacterData {
        &self.chars[j as usize]
    }

    pub fn characters(&self) -> &[CharacterData] {
        &self.chars
    }

    pub fn is_odd(&self, j: u64) -> bool {
        j % 2 == 1
    }

    pub fn char_value(&self, j: u64, a: i64) -> Complex64 {
        self.context.char_value(j, a)
    }

    pub fn gauss_sum(&self, j: u64) -> Complex64 {
        self.chars[j as usize].gauss_sum
    }

    pub fn a_cutoff(&self) -> u64 {
        self.a_cutoff
    }

    /// Surrogate tail bound `C N^{-1/2 + eps}` on the truncated `A_{q,chi}`
    /// series, with `eps = TAIL_EPSILON`.
    pub fn a_tail_bound(&self) -> f64 {
        self.a_tail_bound
    }

    /// The constant `C` with the factor at `q` removed.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `L(0,chi) L(1,chi) A_{q,chi}` for odd `j`, zero otherwise.
    pub fn bias_weight(&self, j: u64) -> Complex64 {
        let c = &self.chars[j as usize];
        match (j % 2, c.l_one) {
            (1, Some(l1)) => c.l_zero * l1 * c.a_q_chi,
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

fn a_tail_bound(constant: f64, cutoff: u64) -> f64 {
    constant * (cutoff.max(1) as f64).powf(-0.5 + TAIL_EPSILON)
}

// W_r = sum_{n <= N, 2n = r mod q} a(n); index 0 collects the multiples of q
// and is never read.
fn a_buckets(ctx: &PrimeContext, series: &CoefficientSeries, cutoff: u64) -> Vec<f64> {
    let q = ctx.q;
    let mut acc = vec![CompensatedSum::new(); q as usize];
    for n in 1..=cutoff {
        let a = series.a(n);
        if a != 0.0 {
            acc[((2 * n) % q) as usize].add(a);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

fn log_abs_one_minus_root(a: u64, q: u64) -> f64 {
    // |1 - e(a/q)| = 2 |sin(pi a / q)|
    (2.0 * (PI * a as f64 / q as f64).sin().abs()).ln()
}

fn l_one_closed_form(
    j: usize,
    q: u64,
    gauss: Complex64,
    l_zero: Complex64,
    conj_log_sum: Complex64,
) -> Option<Complex64> {
    if j == 0 {
        return None;
    }
    let qf = q as f64;
    if j % 2 == 1 {
        // L(1,chi) = -tau(chi) pi i / q * L(0, chi-bar), L(0, chi-bar) = conj L(0, chi)
        Some(-gauss * Complex64::new(0.0, PI) / qf * l_zero.conj())
    } else {
        // even: L(1,chi) = -(tau(chi)/q) sum_a chi-bar(a) log|1 - e(a/q)|
        Some(-gauss / qf * conj_log_sum)
    }
}

/// Gauss sum `tau(chi_j) = sum_m chi_j(m) e(m/q)` by its definition.
pub fn gauss_sum_direct(ctx: &PrimeContext, j: u64) -> Complex64 {
    let q = ctx.q;
    (1..q)
        .map(|m| ctx.char_value(j, m as i64) * unit_root(m, q))
        .sum()
}

/// Builds the character table (chirp-z route).
pub fn build_table(q: u64, a_series_cutoff: u64) -> Result<CharacterTable> {
    CharacterTable::build(q, a_series_cutoff)
}

pub fn char_value(table: &CharacterTable, j: u64, a: i64) -> Complex64 {
    table.char_value(j, a)
}

pub fn gauss_sum(table: &CharacterTable, j: u64) -> Complex64 {
    gauss_sum_direct(table.context(), j)
}

/// Truncated Dirichlet series `sum_{n <= x} chi_j(n)/n`.
pub fn l_one_series(table: &CharacterTable, j: u64, x: u64) -> Result<Complex64> {
    if j % (table.q() - 1) == 0 {
        return Err(Error::domain("the principal character has no finite L(1)"));
    }
    let q = table.q();
    let mut buckets = vec![CompensatedSum::new(); q as usize];
    for n in 1..=x {
        buckets[(n % q) as usize].add(1.0 / n as f64);
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for r in 1..q {
        let w = table.char_value(j, r as i64) * buckets[r as usize].value();
        re.add(w.re);
        im.add(w.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}
