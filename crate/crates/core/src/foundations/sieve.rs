//! Linear sieve tables (smallest prime factor, Euler phi, Mobius) and a
//! segmented sieve of Eratosthenes for long prime runs.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default upper bound on `limit` for [`SieveTables`]; roughly 1.8 GB of
/// tables at nine bytes per entry.
pub const DEFAULT_SIEVE_CAP: u64 = 200_000_000;

/// Arithmetic tables over `[0, limit]`. Index 0 and 1 hold conventional
/// values (`spf[1] = 1`, `phi[1] = 1`, `mu[1] = 1`).
#[derive(Clone, Debug)]
pub struct SieveTables {
    limit: u64,
    spf: Vec<u32>,
    phi: Vec<u32>,
    mobius: Vec<i8>,
    primes: Vec<u32>,
}

impl SieveTables {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be >= 2, got {limit}")));
        }
        if limit > cap || limit > u32::MAX as u64 {
            return Err(Error::resource("sieve limit", limit, cap.min(u32::MAX as u64)));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut phi = vec![0u32; n + 1];
        let mut mobius = vec![0i8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        spf[1] = 1;
        phi[1] = 1;
        mobius[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                phi[i] = i as u32 - 1;
                mobius[i] = -1;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
                if p == si {
                    phi[m] = phi[i] * p;
                    mobius[m] = 0;
                } else {
                    phi[m] = phi[i] * (p - 1);
                    mobius[m] = -mobius[i];
                }
            }
        }
        Ok(SieveTables {
            limit,
            spf,
            phi,
            mobius,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn euler_phi(&self, n: u64) -> u64 {
        self.phi[n as usize] as u64
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[n as usize]
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Factorisation of `n <= limit` from the smallest-prime-factor table.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn phi_table(&self) -> &[u32] {
        &self.phi
    }

    pub fn mobius_table(&self) -> &[i8] {
        &self.mobius
    }
}

/// All primes `<= n` by a plain sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi)` given every prime up to `sqrt(hi)`.
pub fn segment_primes(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j < hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|&(i, &c)| !c && lo + i as u64 >= 2)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// Segmented sieve producing primes in ascending order. Memory is
/// `O(sqrt(hi) + segment)`; segments inside one batch are sieved in
/// parallel and concatenated in order.
pub struct SegmentedPrimes {
    next_lo: u64,
    hi: u64,
    segment: u64,
    base: Vec<u64>,
    base_limit: u64,
}

impl SegmentedPrimes {
    /// Primes in `[2, hi)`.
    pub fn new(hi: u64) -> Self {
        Self::with_segment(hi, 1 << 18)
    }

    pub fn with_segment(hi: u64, segment: u64) -> Self {
        SegmentedPrimes {
            next_lo: 0,
            hi,
            segment: segment.max(1024),
            base: Vec::new(),
            base_limit: 0,
        }
    }

    /// Extends the sieve bound; used when a run must continue past the
    /// originally requested limit.
    pub fn extend_to(&mut self, hi: u64) {
        self.hi = self.hi.max(hi);
    }

    fn ensure_base(&mut self, hi: u64) {
        let need = (hi as f64).sqrt() as u64 + 2;
        if need > self.base_limit {
            let new_limit = need.max(self.base_limit * 2);
            self.base = primes_up_to(new_limit);
            self.base_limit = new_limit;
        }
    }

    /// Next batch of primes (several segments at once), or `None` when
    /// `hi` is reached.
    pub fn next_batch(&mut self) -> Option<Vec<u64>> {
        if self.next_lo >= self.hi {
            return None;
        }
        let threads = rayon::current_num_threads().max(1) as u64;
        let batch_hi = self.hi.min(self.next_lo.saturating_add(self.segment * threads));
        self.ensure_base(batch_hi);
        let lo = self.next_lo;
        let seg = self.segment;
        let count = (batch_hi - lo).div_ceil(seg);
        let base = &self.base;
        let parts: Vec<Vec<u64>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let a = lo + i * seg;
                let b = (a + seg).min(batch_hi);
                segment_primes(a, b, base)
            })
            .collect();
        self.next_lo = batch_hi;
        Some(parts.concat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table_examples() {
        let t = SieveTables::new(10).unwrap();
        assert_eq!(t.euler_phi(10), 4);
        assert_eq!(t.mobius(10), 1);
        assert_eq!(t.euler_phi(9), 6);
        assert_eq!(t.mobius(9), 0);
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(matches!(SieveTables::new(1), Err(Error::Domain(_))));
        assert!(matches!(SieveTables::with_cap(1000, 100), Err(Error::Resource { .. })));
    }

    #[test]
    fn prime_invariants() {
        let t = SieveTables::new(10_000).unwrap();
        for &p in t.primes() {
            assert_eq!(t.euler_phi(p as u64), p as u64 - 1);
            assert_eq!(t.mobius(p as u64), -1);
        }
        for n in 2..=10_000u64 {
            let squarefree = t.factorize(n).iter().all(|&(_, e)| e == 1);
            assert_eq!(t.mobius(n) == 0, !squarefree);
        }
    }

    #[test]
    fn segmented_matches_plain_sieve() {
        let plain = primes_up_to(200_000);
        let mut seg = SegmentedPrimes::with_segment(200_001, 1024);
        let mut got = Vec::new();
        while let Some(b) = seg.next_batch() {
            got.extend(b);
        }
        assert_eq!(plain, got);
    }
}
