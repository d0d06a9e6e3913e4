//! Consecutive-prime residue patterns: census of `(p_n, ..., p_{n+r-1})`
//! modulo `q`, the logarithmic integral, and comparison records against
//! the conjectured two-term expansion.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::bias::{c1_pattern, c2_pattern, Pattern};
use crate::characters::CharacterTable;
use crate::distribution::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::foundations::arith::require_odd_prime;
use crate::foundations::sieve::SegmentedPrimes;

/// Default upper limit on `x` for a census.
pub const DEFAULT_X_CAP: u64 = 1_000_000_000_000;

/// Counts of observed residue tuples.
#[derive(Clone, Debug, Serialize)]
pub struct PatternCensus {
    pub x: u64,
    pub q: u64,
    pub r: usize,
    pub counts: BTreeMap<Vec<u64>, u64>,
}

impl PatternCensus {
    pub fn count(&self, residues: &[u64]) -> u64 {
        self.counts.get(residues).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Census with the default cap on `x`.
pub fn pattern_census(x: u64, q: u64, r: usize) -> Result<PatternCensus> {
    pattern_census_with_cap(x, q, r, DEFAULT_X_CAP)
}

pub fn pattern_census_with_cap(x: u64, q: u64, r: usize, cap: u64) -> Result<PatternCensus> {
    require_odd_prime(q)?;
    if r == 0 {
        return Err(Error::domain("pattern length must be at least 1"));
    }
    if x < 2 {
        return Err(Error::domain("x must be at least 2"));
    }
    if x > cap {
        return Err(Error::resource("census limit x", x, cap));
    }
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut window: VecDeque<u64> = VecDeque::with_capacity(r);
    let mut bound = x + 1;
    let mut sieve = SegmentedPrimes::new(bound);
    'outer: loop {
        let batch = match sieve.next_batch() {
            Some(b) => b,
            None => {
                // successors of primes near x lie past the first bound
                bound = bound.saturating_add(bound / 8 + 1024);
                sieve.extend_to(bound);
                continue;
            }
        };
        for p in batch {
            window.push_back(p);
            if window.len() > r {
                window.pop_front();
            }
            if window.len() == r {
                if window[0] > x {
                    break 'outer;
                }
                if window.iter().all(|&v| v % q != 0) {
                    let key: Vec<u64> = window.iter().map(|&v| v % q).collect();
                    *counts.entry(key).or_default() += 1;
                }
            }
        }
    }
    Ok(PatternCensus { x, q, r, counts })
}

/// `E_1(s)` for `s > 0`.
fn exp_integral_e1(s: f64) -> f64 {
    if s <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..200 {
            term *= -s / n as f64;
            let add = -term / n as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - s.ln() + sum
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = s + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-s).exp()
    }
}

/// Principal-value logarithmic integral `li(x) = PV int_0^x dt / ln t`.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("li needs finite x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Err(Error::domain("li has a logarithmic singularity at x = 1"));
    }
    let t = x.ln();
    if x < 1.0 {
        // li(x) = Ei(ln x) = -E_1(-ln x)
        return Ok(-exp_integral_e1(-t));
    }
    // Ramanujan's series
    let mut sum = 0.0;
    let mut inner = 0.0;
    let mut factor = 1.0; // t^n / (n! 2^{n-1}) with sign
    for n in 1..1000u32 {
        factor *= t / n as f64;
        if n > 1 {
            factor /= 2.0;
        }
        if (n - 1) % 2 == 0 {
            inner += 1.0 / n as f64;
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * factor * inner;
        sum += term;
        if n as f64 > t && term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(EULER_GAMMA + t.ln() + x.sqrt() * sum)
}

/// Observed census count next to the one- and two-term predictions.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub x: u64,
    pub q: u64,
    pub pattern: Vec<u64>,
    pub observed: u64,
    pub main_term: f64,
    pub c1: f64,
    pub c2: Option<f64>,
    pub prediction1: f64,
    pub prediction2: f64,
    /// Residuals `(observed - prediction) / (li(x) / (phi(q)^r log x))`.
    pub residual0: f64,
    pub residual1: f64,
    pub residual2: f64,
}

/// Conjecture comparison for one pattern. `c2` is taken as zero for
/// patterns of length one.
pub fn conjecture_report(census: &PatternCensus, pattern: &Pattern, table: &CharacterTable) -> Result<ConjectureReport> {
    if pattern.q() != census.q || pattern.len() != census.r {
        return Err(Error::domain("pattern does not match the census modulus and length"));
    }
    if census.x < 3 {
        return Err(Error::domain("x too small for log log x"));
    }
    let xf = census.x as f64;
    let logx = xf.ln();
    let loglogx = logx.ln();
    let li = log_integral(xf)?;
    let phi_r = ((census.q - 1) as f64).powi(census.r as i32);
    let main = li / phi_r;
    let c1 = c1_pattern(pattern);
    let c2 = if pattern.len() >= 2 { Some(c2_pattern(table, pattern)?) } else { None };
    let prediction1 = main * (1.0 + c1 * loglogx / logx);
    let prediction2 = main * (1.0 + c1 * loglogx / logx + c2.unwrap_or(0.0) / logx);
    let observed = census.count(pattern.residues());
    let unit = main / logx;
    Ok(ConjectureReport {
        x: census.x,
        q: census.q,
        pattern: pattern.residues().to_vec(),
        observed,
        main_term: main,
        c1,
        c2,
        prediction1,
        prediction2,
        residual0: (observed as f64 - main) / unit,
        residual1: (observed as f64 - prediction1) / unit,
        residual2: (observed as f64 - prediction2) / unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_at_thirty() {
        let c = pattern_census(30, 3, 2).unwrap();
        assert_eq!(c.count(&[2, 1]), 4);
        assert_eq!(c.count(&[1, 2]), 3);
        assert_eq!(c.count(&[2, 2]), 1);
        assert_eq!(c.count(&[1, 1]), 0);
        assert_eq!(c.total(), 8);
    }

    #[test]
    fn census_r1_counts_primes() {
        let c = pattern_census(1000, 7, 1).unwrap();
        assert_eq!(c.total(), 168 - 1);
        let c = pattern_census(5, 7, 1).unwrap();
        assert_eq!(c.total(), 3);
    }

    #[test]
    fn census_rejects() {
        assert!(pattern_census(100, 4, 2).is_err());
        assert!(pattern_census(100, 3, 0).is_err());
        assert!(pattern_census(1, 3, 2).is_err());
        assert!(matches!(pattern_census_with_cap(1000, 3, 2, 100), Err(Error::Resource { .. })));
    }

    #[test]
    fn li_examples() {
        assert_eq!(log_integral(0.0).unwrap(), 0.0);
        assert!(log_integral(1.0).is_err());
        assert!((log_integral(2.0).unwrap() - 1.045_163_780_1).abs() < 1e-9);
        assert!((log_integral(10.0).unwrap() - 6.165_599_504_8).abs() < 1e-9);
        assert!((log_integral(0.5).unwrap() + 0.378_671_043_6).abs() < 1e-9);
    }

    #[test]
    fn report_identity() {
        let census = pattern_census(10_000, 5, 2).unwrap();
        let table = CharacterTable::build(5, 10_000).unwrap();
        let p = Pattern::new(5, &[1, 3]).unwrap();
        let rep = conjecture_report(&census, &p, &table).unwrap();
        let lx = 10_000f64.ln();
        let expect = rep.main_term * (1.0 + rep.c1 * lx.ln() / lx + rep.c2.unwrap() / lx);
        assert!((rep.prediction2 - expect).abs() <= 1e-12 * expect.abs());
    }
}
