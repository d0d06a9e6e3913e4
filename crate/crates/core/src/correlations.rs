//! Correlation integrals `B(n_1, ..., n_l)` of dilated sawtooth functions:
//! exact rational evaluation over one period, the lattice-sum estimator and
//! the discrete analogue modulo a prime.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundations::arith::{factorize, gcd, mod_inverse, pairwise_sum, require_odd_prime, CompensatedSum};
use crate::foundations::rational::ExactRational;
use crate::foundations::sawtooth::psi_residue;

/// Default cap on the period of a reduced tuple.
pub const DEFAULT_PERIOD_CAP: u64 = 1_000_000;

/// Largest supported tuple length for exact integration.
pub const MAX_ELL: usize = 8;

/// Default cap on candidate vectors for the lattice estimator.
pub const DEFAULT_LATTICE_BUDGET: u64 = 400_000_000;

/// A tuple of moduli after stripping primes that divide only one entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CorrelationKey {
    moduli: Vec<u64>,
    #[serde(serialize_with = "ser_rational")]
    extracted_scalar: ExactRational,
    period: u128,
}

fn ser_rational<S: serde::Serializer>(r: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_fraction_string())
}

impl CorrelationKey {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::domain("empty tuple of moduli"));
        }
        if moduli.contains(&0) {
            return Err(Error::domain("moduli must be positive"));
        }
        let mut reduced = moduli.to_vec();
        let mut primes: Vec<u64> = moduli.iter().flat_map(|&n| factorize(n).into_iter().map(|(p, _)| p)).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut stripped: u128 = 1;
        let mut scalar = ExactRational::one();
        for p in primes {
            let holders: Vec<usize> = (0..reduced.len()).filter(|&i| reduced[i] % p == 0).collect();
            if let [only] = holders[..] {
                while reduced[only] % p == 0 {
                    reduced[only] /= p;
                    stripped *= p as u128;
                    if stripped > u64::MAX as u128 {
                        scalar = scalar * ExactRational::new(1, BigInt::from(stripped));
                        stripped = 1;
                    }
                }
            }
        }
        if stripped > 1 {
            scalar = scalar * ExactRational::new(1, BigInt::from(stripped));
        }
        reduced.sort_unstable();
        let period = reduced.iter().fold(1u128, |l, &n| {
            let l = l.min(u64::MAX as u128);
            let g = gcd((l % n as u128) as u64, n) as u128;
            (l / g).saturating_mul(n as u128)
        });
        Ok(CorrelationKey {
            moduli: reduced,
            extracted_scalar: scalar,
            period,
        })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn extracted_scalar(&self) -> &ExactRational {
        &self.extracted_scalar
    }

    pub fn period(&self) -> u128 {
        self.period
    }
}

static CACHE: Lazy<RwLock<HashMap<Vec<u64>, ExactRational>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// Number of reduced tuples currently memoised.
pub fn cache_len() -> usize {
    CACHE.read().map(|c| c.len()).unwrap_or(0)
}

/// `B(n_1, n_2) = gcd(n_1, n_2)^2 / (12 n_1 n_2)`.
pub fn b_pair(n1: u64, n2: u64) -> ExactRational {
    let g = gcd(n1, n2);
    ExactRational::new(BigInt::from(g) * BigInt::from(g), BigInt::from(12u64) * BigInt::from(n1) * BigInt::from(n2))
}

/// Exact value of `B` with the default period cap.
pub fn b_exact(moduli: &[u64]) -> Result<ExactRational> {
    b_exact_with_cap(moduli, DEFAULT_PERIOD_CAP)
}

pub fn b_exact_with_cap(moduli: &[u64], cap: u64) -> Result<ExactRational> {
    if moduli.is_empty() {
        return Err(Error::domain("empty tuple of moduli"));
    }
    if moduli.contains(&0) {
        return Err(Error::domain("moduli must be positive"));
    }
    if moduli.len() % 2 == 1 {
        return Ok(ExactRational::zero());
    }
    if moduli.len() == 2 {
        return Ok(b_pair(moduli[0], moduli[1]));
    }
    if moduli.len() > MAX_ELL {
        return Err(Error::domain(format!("tuple length {} exceeds {MAX_ELL}", moduli.len())));
    }
    let key = CorrelationKey::new(moduli)?;
    Ok(key.extracted_scalar() * &reduced_value(&key, cap)?)
}

fn reduced_value(key: &CorrelationKey, cap: u64) -> Result<ExactRational> {
    if let Some(v) = CACHE.read().ok().and_then(|c| c.get(&key.moduli).cloned()) {
        return Ok(v);
    }
    if key.period > cap as u128 {
        return Err(Error::resource("correlation period", key.period, cap));
    }
    let v = period_integral(&key.moduli, 0, key.period as u64);
    let v = &v / &ExactRational::from_integer(key.period as u64);
    if let Ok(mut c) = CACHE.write() {
        c.entry(key.moduli.clone()).or_insert_with(|| v.clone());
    }
    Ok(v)
}

/// Exact value of the product integral over `[0, period)` without the
/// reduction step; used to cross-check the reduction.
pub fn b_direct(moduli: &[u64], cap: u64) -> Result<ExactRational> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::domain("moduli must be positive"));
    }
    let mut period: u64 = 1;
    for &n in moduli {
        period = crate::foundations::arith::checked_lcm(period, n)
            .filter(|&l| l <= cap)
            .ok_or_else(|| Error::resource("correlation period", period as u128 * n as u128, cap))?;
    }
    Ok(&period_integral(moduli, 0, period) / &ExactRational::from_integer(period))
}

/// `int_{from}^{to} prod_j psi(x / n_j) dx` over integer endpoints.
pub fn sawtooth_product_integral(moduli: &[u64], from: u64, to: u64) -> Result<ExactRational> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::domain("moduli must be positive"));
    }
    if from > to {
        return Err(Error::domain("empty integration range"));
    }
    Ok(period_integral(moduli, from, to))
}

// On [m, m+1): psi((m+y)/n) = (c + 2y) / (2n), c = 2 (m mod n) - n.
// Sum the coefficients of prod (c_j + 2y) over m, then integrate y^k.
fn period_integral(moduli: &[u64], from: u64, to: u64) -> ExactRational {
    let ell = moduli.len();
    let span = to - from;
    if span == 0 {
        return ExactRational::zero();
    }
    let bound: f64 = moduli.iter().map(|&n| n as f64 + 2.0).product::<f64>() * span as f64;
    let chunk = 1u64 << 14;
    let chunks: Vec<(u64, u64)> = (from..to).step_by(chunk as usize).map(|s| (s, (s + chunk).min(to))).collect();
    let sums: Vec<BigInt> = if bound < 1e36 {
        let parts: Vec<Vec<i128>> = chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = vec![0i128; ell + 1];
                let mut poly = vec![0i128; ell + 1];
                for m in lo..hi {
                    poly.iter_mut().for_each(|c| *c = 0);
                    poly[0] = 1;
                    for (d, &n) in moduli.iter().enumerate() {
                        let c = 2 * (m % n) as i128 - n as i128;
                        for k in (0..=d + 1).rev() {
                            let lower = if k > 0 { 2 * poly[k - 1] } else { 0 };
                            poly[k] = poly[k] * c + lower;
                        }
                    }
                    for k in 0..=ell {
                        acc[k] += poly[k];
                    }
                }
                acc
            })
            .collect();
        (0..=ell).map(|k| BigInt::from(parts.iter().map(|p| p[k]).sum::<i128>())).collect()
    } else {
        let parts: Vec<Vec<BigInt>> = chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = vec![BigInt::zero(); ell + 1];
                let mut poly = vec![BigInt::zero(); ell + 1];
                for m in lo..hi {
                    poly.iter_mut().for_each(|c| *c = BigInt::zero());
                    poly[0] = BigInt::one();
                    for (d, &n) in moduli.iter().enumerate() {
                        let c = BigInt::from(2 * (m % n) as i128 - n as i128);
                        for k in (0..=d + 1).rev() {
                            let lower = if k > 0 { &poly[k - 1] * 2 } else { BigInt::zero() };
                            poly[k] = &poly[k] * &c + lower;
                        }
                    }
                    for k in 0..=ell {
                        acc[k] += &poly[k];
                    }
                }
                acc
            })
            .collect();
        (0..=ell).map(|k| parts.iter().map(|p| &p[k]).sum()).collect()
    };
    let mut total = BigRational::zero();
    for (k, s) in sums.into_iter().enumerate() {
        total += BigRational::new(s, BigInt::from(k as u64 + 1));
    }
    let den: BigInt = moduli.iter().map(|&n| BigInt::from(2 * n)).product();
    ExactRational::from(total / BigRational::from_integer(den))
}

/// The bound `2^{-l} / r`, where `r` is the product of primes dividing
/// `n_1 ... n_l` exactly once.
pub fn b_bound(moduli: &[u64]) -> ExactRational {
    let mut exps: HashMap<u64, u32> = HashMap::new();
    for &n in moduli {
        for (p, e) in factorize(n) {
            *exps.entry(p).or_default() += e;
        }
    }
    let r: BigInt = exps.iter().filter(|(_, &e)| e == 1).map(|(&p, _)| BigInt::from(p)).product();
    ExactRational::new(1, r * (BigInt::one() << moduli.len()))
}

/// Lattice-sum approximation
/// `(i/2pi)^l sum_{0<|k_j|<=K, sum k_j/n_j = 0} 1/(k_1 ... k_l)`.
pub fn b_lattice_estimate(moduli: &[u64], k_max: u64) -> Result<f64> {
    b_lattice_estimate_with_budget(moduli, k_max, DEFAULT_LATTICE_BUDGET)
}

pub fn b_lattice_estimate_with_budget(moduli: &[u64], k_max: u64, budget: u64) -> Result<f64> {
    let ell = moduli.len();
    if ell < 2 || ell % 2 == 1 {
        return Err(Error::domain("lattice estimator needs an even tuple length >= 2"));
    }
    if moduli.contains(&0) || k_max == 0 {
        return Err(Error::domain("moduli and K must be positive"));
    }
    let candidates = (2.0 * k_max as f64).powi(ell as i32 - 1);
    if candidates > budget as f64 {
        return Err(Error::Budget {
            what: "lattice candidates",
            budget,
            partial: None,
        });
    }
    let mut lcm: u128 = 1;
    for &n in moduli {
        let g = gcd((lcm % n as u128) as u64, n) as u128;
        lcm = (lcm / g)
            .checked_mul(n as u128)
            .filter(|&l| l < 1 << 60)
            .ok_or_else(|| Error::resource("lattice lcm", u128::MAX, 1u128 << 60))?;
    }
    // the coordinate with the largest weight is solved for
    let mut weights: Vec<i128> = moduli.iter().map(|&n| (lcm / n as u128) as i128).collect();
    let solve = (0..ell).max_by_key(|&j| weights[j]).unwrap();
    let ws = weights.remove(solve);
    let k = k_max as i64;
    let first = weights[0];
    let rest = &weights[1..];
    let ks: Vec<i64> = (-k..=k).filter(|&x| x != 0).collect();
    let parts: Vec<f64> = ks
        .par_iter()
        .map(|&k1| {
            let mut acc = CompensatedSum::new();
            enumerate(rest, k, first * k1 as i128, 1.0 / k1 as f64, ws, &mut acc);
            acc.value()
        })
        .collect();
    let sign = if (ell / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * pairwise_sum(&parts) / (2.0 * PI).powi(ell as i32))
}

fn enumerate(weights: &[i128], k: i64, partial: i128, recip: f64, ws: i128, acc: &mut CompensatedSum) {
    match weights.split_first() {
        None => {
            if partial != 0 && partial % ws == 0 {
                let last = -partial / ws;
                if last.abs() <= k as i128 {
                    acc.add(recip / last as f64);
                }
            }
        }
        Some((&w, rest)) => {
            for x in (-k..=k).filter(|&x| x != 0) {
                enumerate(rest, k, partial + w * x as i128, recip / x as f64, ws, acc);
            }
        }
    }
}

/// `K = n_1 ... n_l / min(n_j)`.
pub fn discrete_k(moduli: &[u64]) -> u128 {
    let prod: u128 = moduli.iter().map(|&n| n as u128).product();
    prod / *moduli.iter().min().unwrap_or(&1) as u128
}

/// The error shape `(l K / q) log(e q / K)`.
pub fn discrete_bound(q: u64, moduli: &[u64]) -> f64 {
    let kk = discrete_k(moduli) as f64;
    let ell = moduli.len() as f64;
    ell * kk / q as f64 * (std::f64::consts::E * q as f64 / kk).ln()
}

fn discrete_inverses(q: u64, moduli: &[u64]) -> Result<Vec<u64>> {
    require_odd_prime(q)?;
    if moduli.is_empty() {
        return Err(Error::domain("empty tuple of moduli"));
    }
    let inv: Vec<u64> = moduli
        .iter()
        .map(|&n| mod_inverse(n as i64, q))
        .collect::<Result<_>>()
        .map_err(|_| Error::domain("moduli must be coprime to q"))?;
    let kk = discrete_k(moduli);
    if kk * moduli.len() as u128 >= q as u128 {
        return Err(Error::precondition(format!("K = {kk} is not below q/l for q = {q}")));
    }
    Ok(inv)
}

/// `(1/q) sum_{k mod q} prod_j psi(k n_j-bar / q)` in floating point.
pub fn discrete_correlation(q: u64, moduli: &[u64]) -> Result<f64> {
    let inv = discrete_inverses(q, moduli)?;
    let terms: Vec<f64> = (1..q)
        .into_par_iter()
        .map(|k| inv.iter().map(|&i| psi_residue(((k as u128 * i as u128) % q as u128) as u64, q)).product())
        .collect();
    Ok(pairwise_sum(&terms) / q as f64)
}

/// Exact rational form of [`discrete_correlation`].
pub fn discrete_correlation_exact(q: u64, moduli: &[u64]) -> Result<ExactRational> {
    let inv = discrete_inverses(q, moduli)?;
    let total: BigInt = (1..q)
        .into_par_iter()
        .map(|k| {
            inv.iter()
                .map(|&i| BigInt::from(2 * ((k as u128 * i as u128) % q as u128) as i128 - q as i128))
                .product::<BigInt>()
        })
        .reduce(BigInt::zero, |a, b| a + b);
    let den = BigInt::from(q) * BigInt::from(2 * q).pow(moduli.len() as u32);
    Ok(ExactRational::new(total, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn exact_examples() {
        assert_eq!(b_exact(&[1, 2]).unwrap(), r(1, 24));
        assert_eq!(b_exact(&[1, 1, 1]).unwrap(), r(0, 1));
        assert_eq!(b_exact(&[1, 1, 1, 1]).unwrap(), r(1, 80));
        assert_eq!(b_exact(&[3, 1, 1, 1]).unwrap(), r(1, 240));
        assert_eq!(b_direct(&[3, 1, 1, 1], 1000).unwrap(), r(1, 240));
    }

    #[test]
    fn pair_route_matches_integration() {
        for n1 in 1..12 {
            for n2 in 1..12 {
                assert_eq!(b_direct(&[n1, n2], 1000).unwrap(), b_pair(n1, n2), "({n1},{n2})");
            }
        }
    }

    #[test]
    fn key_reduction() {
        let k = CorrelationKey::new(&[12, 9, 5, 1]).unwrap();
        assert_eq!(k.moduli(), &[1, 1, 3, 9]);
        assert_eq!(k.extracted_scalar(), &r(1, 20));
        assert_eq!(k.period(), 9);
    }

    #[test]
    fn resource_cap() {
        assert!(matches!(
            b_exact_with_cap(&[1009, 1009, 1013, 1013], 1000),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        assert!((b_lattice_estimate(&[1, 1], 100).unwrap() - 1.0 / 12.0).abs() < 1e-3);
        assert!((b_lattice_estimate(&[2, 3], 200).unwrap() - 1.0 / 72.0).abs() < 1e-3);
        assert!(b_lattice_estimate(&[1, 2, 3], 10).is_err());
        assert!(matches!(
            b_lattice_estimate_with_budget(&[1, 1, 1, 1], 1000, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn discrete_examples() {
        assert_eq!(discrete_correlation_exact(7, &[1, 1]).unwrap(), r(5, 98));
        assert!((discrete_correlation(7, &[1, 1]).unwrap() - 5.0 / 98.0).abs() < 1e-15);
        assert!(matches!(discrete_correlation(7, &[4, 4]), Err(Error::Precondition(_))));
        assert!(discrete_correlation(7, &[7, 1]).is_err());
        let a = discrete_correlation_exact(101, &[1, 1]).unwrap();
        let b = discrete_correlation_exact(101, &[5, 5]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(b_bound(&[1, 2]), r(1, 8));
        assert_eq!(b_bound(&[2, 2]), r(1, 4));
        assert_eq!(b_bound(&[6, 10, 1, 1]), r(1, 16 * 3 * 5));
    }
}
