//! The multiplicative coefficients `a(n)` and `b(n)` of the prime-pair
//! correction series, and the Euler-product constant `C` (twice the
//! twin-prime constant, optionally with one prime factor removed).

use once_cell::sync::Lazy;

use super::arith::{factorize, CompensatedSum};
use super::rational::ExactRational;
use super::sieve::{SegmentedPrimes, SieveTables};
use crate::error::{Error, Result};

fn a_prime_power(p: u64, e: u32) -> ExactRational {
    if p == 2 {
        return match e {
            0 => ExactRational::one(),
            1 => ExactRational::new(-1, 2),
            _ => ExactRational::zero(),
        };
    }
    let pp = (p as i128) * (p as i128 - 2);
    match e {
        0 => ExactRational::one(),
        1 => ExactRational::new(2, pp),
        2 => ExactRational::new(-1, pp),
        _ => ExactRational::zero(),
    }
}

fn b_prime_power(p: u64, e: u32) -> ExactRational {
    match (p, e) {
        (_, 0) => ExactRational::one(),
        (2, _) => ExactRational::zero(),
        (p, 1) => ExactRational::new(1, p as i64 - 2),
        _ => ExactRational::zero(),
    }
}

/// `a(n)`: multiplicative with `a(2) = -1/2`, `a(2^v) = 0` for `v >= 2`,
/// `a(p) = 2/(p(p-2))`, `a(p^2) = -1/(p(p-2))`, `a(p^v) = 0` for `v >= 3`.
pub fn coeff_a(n: u64) -> ExactRational {
    assert!(n >= 1, "coeff_a is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(ExactRational::one(), |acc, (p, e)| acc * a_prime_power(p, e))
}

/// `b(n) = sum_{uv = n} a(u)/v`: supported on odd squarefree `n` with
/// `b(p) = 1/(p-2)`.
pub fn coeff_b(n: u64) -> ExactRational {
    assert!(n >= 1, "coeff_b is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(ExactRational::one(), |acc, (p, e)| acc * b_prime_power(p, e))
}

fn a_prime_power_f64(p: u64, e: u32) -> f64 {
    let pf = p as f64;
    match (p, e) {
        (_, 0) => 1.0,
        (2, 1) => -0.5,
        (2, _) => 0.0,
        (_, 1) => 2.0 / (pf * (pf - 2.0)),
        (_, 2) => -1.0 / (pf * (pf - 2.0)),
        _ => 0.0,
    }
}

fn b_prime_power_f64(p: u64, e: u32) -> f64 {
    match (p, e) {
        (_, 0) => 1.0,
        (2, _) => 0.0,
        (p, 1) => 1.0 / (p as f64 - 2.0),
        _ => 0.0,
    }
}

/// A constant together with a certified absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedValue {
    pub value: f64,
    pub error_bound: f64,
    /// Largest prime multiplied in explicitly.
    pub cutoff: u64,
}

const DUSART_UPPER_FROM: u64 = 355_991;

// pi(t) bounds: t/ln t (1 + 1/ln t + a/ln^2 t), a = 1.8 (t >= 32299) and
// a = 2.51 (t >= 355991).
fn pi_bound(t: f64, a: f64) -> f64 {
    let l = t.ln();
    t / l * (1.0 + 1.0 / l + a / (l * l))
}

// int_P^inf pi_bound(t) * 2/(t-1)^3 dt via t = P e^s, Simpson on s in [0, 60].
fn stieltjes_tail_integral(p: f64, a: f64) -> f64 {
    let f = |s: f64| {
        let t = p * s.exp();
        pi_bound(t, a) * 2.0 / (t - 1.0).powi(3) * t
    };
    let n = 12_000usize;
    let h = 60.0 / n as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(0.0));
    acc.add(f(60.0));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(i as f64 * h));
    }
    acc.value() * h / 3.0
}

fn log_constant(cutoff: u64) -> (f64, f64) {
    // explicit part: ln 2 + sum_{3 <= p <= P} ln(1 - 1/(p-1)^2)
    let mut acc = CompensatedSum::new();
    let mut abs_terms = 0.0;
    let mut count = 0u64;
    let mut primes = SegmentedPrimes::new(cutoff + 1);
    while let Some(batch) = primes.next_batch() {
        for p in batch {
            count += 1;
            if p == 2 {
                continue;
            }
            let g = 1.0 / ((p - 1) as f64).powi(2);
            let t = (-g).ln_1p();
            abs_terms += t.abs();
            acc.add(t);
        }
    }
    let pf = cutoff as f64;
    let g_p = 1.0 / (pf - 1.0).powi(2);
    let boundary = g_p * count as f64;
    let s_lo = -boundary + stieltjes_tail_integral(pf, 1.8);
    let s_hi = -boundary + stieltjes_tail_integral(pf, 2.51);
    // quadrature slack
    let s_lo = s_lo * (1.0 - 1e-6);
    let s_hi = s_hi * (1.0 + 1e-6);
    // ln(1-u) in [-u - u^2, -u] for u <= 1/2
    let tail_hi = -s_lo;
    let tail_lo = -s_hi * (1.0 + g_p);
    let mid = 0.5 * (tail_lo + tail_hi);
    let half_width = 0.5 * (tail_hi - tail_lo) + 4.0 * f64::EPSILON * (1.0 + abs_terms);
    (std::f64::consts::LN_2 + acc.value() + mid, half_width)
}

/// `C = 2 prod_{p >= 3, p != excluded} (1 - 1/(p-1)^2)`, truncated at a
/// cutoff chosen so that the certified tail bound is below `tolerance`.
pub fn constant_c(excluded_prime: Option<u64>, tolerance: f64) -> Result<CertifiedValue> {
    if !(tolerance > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if let Some(q) = excluded_prime {
        if q < 3 || !super::arith::is_prime(q) {
            return Err(Error::domain(format!("excluded factor {q} is not an odd prime")));
        }
    }
    let mut cutoff = DUSART_UPPER_FROM * 3;
    let (log_c, width) = loop {
        let (l, w) = log_constant(cutoff);
        let bound = l.exp() * w.exp_m1() + 4.0 * f64::EPSILON;
        if bound < tolerance || cutoff > 2_000_000_000 {
            break (l, w);
        }
        cutoff *= 4;
    };
    let mut log_c = log_c;
    if let Some(q) = excluded_prime {
        let g = 1.0 / ((q - 1) as f64).powi(2);
        log_c -= (-g).ln_1p();
    }
    let value = log_c.exp();
    Ok(CertifiedValue {
        value,
        error_bound: value * width.exp_m1() + 8.0 * f64::EPSILON * value,
        cutoff,
    })
}

static LIMITING_C: Lazy<CertifiedValue> =
    Lazy::new(|| constant_c(None, 1e-9).expect("default tolerance is valid"));

/// The limiting constant (no excluded prime), computed once per process.
pub fn limiting_constant() -> CertifiedValue {
    *LIMITING_C
}

/// `C` with the factor at `q` removed, derived from the cached limiting
/// value.
pub fn constant_c_excluding(q: u64) -> f64 {
    let g = 1.0 / ((q - 1) as f64).powi(2);
    limiting_constant().value / (1.0 - g)
}

/// Floating tables of `a(n)` and `b(n)` for `n <= limit`, with the
/// constant `C` that scales them.
#[derive(Clone, Debug)]
pub struct CoefficientSeries {
    limit: u64,
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    constant: f64,
    constant_error: f64,
    excluded_prime: Option<u64>,
}

impl CoefficientSeries {
    pub fn new(limit: u64, excluded_prime: Option<u64>) -> Result<Self> {
        let sieve = SieveTables::new(limit.max(2))?;
        Ok(Self::from_sieve(&sieve, limit, excluded_prime))
    }

    pub fn from_sieve(sieve: &SieveTables, limit: u64, excluded_prime: Option<u64>) -> Self {
        let n = limit as usize;
        let mut a_values = vec![0.0; n + 1];
        let mut b_values = vec![0.0; n + 1];
        if n >= 1 {
            a_values[1] = 1.0;
            b_values[1] = 1.0;
        }
        for m in 2..=n {
            let p = sieve.smallest_prime_factor(m as u64);
            let mut rest = m as u64;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            a_values[m] = a_values[rest as usize] * a_prime_power_f64(p, e);
            b_values[m] = b_values[rest as usize] * b_prime_power_f64(p, e);
        }
        let lim = limiting_constant();
        let constant = match excluded_prime {
            Some(q) => constant_c_excluding(q),
            None => lim.value,
        };
        CoefficientSeries {
            limit,
            a_values,
            b_values,
            constant,
            constant_error: lim.error_bound * 2.0,
            excluded_prime,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn a(&self, n: u64) -> f64 {
        self.a_values[n as usize]
    }

    pub fn b(&self, n: u64) -> f64 {
        self.b_values[n as usize]
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    /// Exact `a(n)`; not limited to the table range.
    pub fn a_exact(&self, n: u64) -> ExactRational {
        coeff_a(n)
    }

    pub fn b_exact(&self, n: u64) -> ExactRational {
        coeff_b(n)
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn constant_error(&self) -> f64 {
        self.constant_error
    }

    pub fn excluded_prime(&self) -> Option<u64> {
        self.excluded_prime
    }
}
