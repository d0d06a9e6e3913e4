//! The totient summatory error `R(x) = sum_{n<=x} phi(n) - 3x^2/pi^2`, its
//! normalised form `R~(u)`, exact moment integrals and the truncated
//! Mobius model.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{b_pair, sawtooth_product_integral};
use crate::error::{Error, Result};
use crate::foundations::arith::{checked_lcm, CompensatedSum};
use crate::foundations::sawtooth::psi;
use crate::foundations::sieve::SieveTables;

/// Below this interval index the binomial antiderivative is used; above it
/// the cancellation between `S_m/u` and `3u/pi^2` makes Gauss-Legendre the
/// more accurate choice.
pub const CLOSED_FORM_LIMIT: u64 = 16;

/// Maximum moment order.
pub const MAX_ELL: u32 = 8;

/// Default cap on the number of pairs in [`pair_correlation_stat`].
pub const DEFAULT_PAIR_BUDGET: u64 = 4_000_000;

const THREE_OVER_PI2: f64 = 3.0 / (PI * PI);

// 10-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Prefix sums `S_m = sum_{n<=m} phi(n)` for `m <= y`.
#[derive(Clone, Debug)]
pub struct PhiAccumulator {
    y: u64,
    phi: Vec<u32>,
    prefix: Vec<u128>,
}

impl PhiAccumulator {
    pub fn new(y: u64) -> Result<Self> {
        if y == 0 {
            return Err(Error::domain("y must be positive"));
        }
        let sieve = SieveTables::new(y.max(2))?;
        let phi: Vec<u32> = sieve.phi_table()[..=y as usize].to_vec();
        let mut prefix = Vec::with_capacity(phi.len());
        let mut s: u128 = 0;
        prefix.push(0);
        for &p in &phi[1..] {
            s += p as u128;
            prefix.push(s);
        }
        Ok(PhiAccumulator { y, phi, prefix })
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn prefix(&self, m: u64) -> u128 {
        self.prefix[m as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize] as u64
    }
}

/// `(R(x), R~(x))` with `R~(x) = R(x)/x - [x in Z] phi(x)/(2x)`.
pub fn r_values(x: f64, acc: &PhiAccumulator) -> Result<(f64, f64)> {
    if !(x > 0.0) || x > acc.y as f64 {
        return Err(Error::domain(format!("x = {x} outside (0, {}]", acc.y)));
    }
    let m = x.floor() as u64;
    let r = acc.prefix(m) as f64 - THREE_OVER_PI2 * x * x;
    let mut rt = r / x;
    if x == m as f64 {
        rt -= acc.phi(m) as f64 / (2.0 * x);
    }
    Ok((r, rt))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_m^{m+1} (s/u - c u)^l du` by expanding the binomial.
fn interval_closed_form(s: f64, m: u64, ell: u32) -> f64 {
    let (a, b) = (m as f64, m as f64 + 1.0);
    let c = THREE_OVER_PI2;
    let mut total = CompensatedSum::new();
    for j in 0..=ell {
        let p = 2 * j as i32 - ell as i32;
        let coef = binomial(ell, j) * s.powi((ell - j) as i32) * (-c).powi(j as i32);
        let anti = if p == -1 {
            (b / a).ln()
        } else {
            (b.powi(p + 1) - a.powi(p + 1)) / (p + 1) as f64
        };
        total.add(coef * anti);
    }
    total.value()
}

/// Same integral by 10-point Gauss-Legendre, writing the integrand as
/// `((S - c m^2) - c t (2m + t)) / (m + t)` to keep the cancellation exact.
fn interval_quadrature(s: u128, m: u64, ell: u32) -> f64 {
    let mf = m as f64;
    let base = s as f64 - THREE_OVER_PI2 * (mf * mf);
    let f = |t: f64| ((base - THREE_OVER_PI2 * t * (2.0 * mf + t)) / (mf + t)).powi(ell as i32);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * (f(0.5 + 0.5 * x) + f(0.5 - 0.5 * x));
    }
    0.5 * acc
}

fn interval_integral(acc: &PhiAccumulator, m: u64, ell: u32) -> f64 {
    if m == 0 {
        // R~(u) = -c u on [0, 1)
        return (-THREE_OVER_PI2).powi(ell as i32) / (ell + 1) as f64;
    }
    if m < CLOSED_FORM_LIMIT {
        interval_closed_form(acc.prefix(m) as f64, m, ell)
    } else {
        interval_quadrature(acc.prefix(m), m, ell)
    }
}

/// `(1/y) int_0^y R~(u)^l du`, integrated interval by interval.
pub fn rtilde_moment_exact(y: u64, ell: u32) -> Result<f64> {
    let acc = PhiAccumulator::new(y)?;
    rtilde_moment_with(&acc, y, ell)
}

pub fn rtilde_moment_with(acc: &PhiAccumulator, y: u64, ell: u32) -> Result<f64> {
    if y < 2 || y > acc.y {
        return Err(Error::domain("need 2 <= y <= accumulator limit"));
    }
    if ell == 0 || ell > MAX_ELL {
        return Err(Error::domain(format!("moment order must be in 1..={MAX_ELL}")));
    }
    let chunk = 1u64 << 14;
    let starts: Vec<u64> = (0..y).step_by(chunk as usize).collect();
    let parts: Vec<CompensatedSum> = starts
        .par_iter()
        .map(|&lo| {
            let mut s = CompensatedSum::new();
            for m in lo..(lo + chunk).min(y) {
                s.add(interval_integral(acc, m, ell));
            }
            s
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value() / y as f64)
}

/// Skewness `M3 / M2^{3/2}` of `R~` over `[0, y]`.
pub fn rtilde_skewness(acc: &PhiAccumulator, y: u64) -> Result<f64> {
    let m1 = rtilde_moment_with(acc, y, 1)?;
    let m2 = rtilde_moment_with(acc, y, 2)?;
    let m3 = rtilde_moment_with(acc, y, 3)?;
    let var = m2 - m1 * m1;
    Ok((m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3)) / var.powf(1.5))
}

/// `-sum_{n<=N} (mu(n)/n) psi(u/n)`.
pub fn rtilde_truncated_model(u: f64, n: u64) -> Result<f64> {
    let sieve = SieveTables::new(n.max(2))?;
    Ok(truncated_model_with(&sieve, u, n))
}

pub fn truncated_model_with(sieve: &SieveTables, u: f64, n: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for k in 1..=n {
        let mu = sieve.mobius(k);
        if mu != 0 {
            s.add(mu as f64 / k as f64 * psi(u / k as f64, false));
        }
    }
    -s.value()
}

/// Mean of `|model_N(u) - R~(u)|` over `points` evenly spaced `u` in
/// `[lo, hi]`.
pub fn model_mean_abs_gap(acc: &PhiAccumulator, n: u64, lo: f64, hi: f64, points: usize) -> Result<f64> {
    if points < 2 || !(lo > 0.0) || hi <= lo {
        return Err(Error::domain("need 0 < lo < hi and at least two points"));
    }
    let sieve = SieveTables::new(n.max(2))?;
    let gaps: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let (_, rt) = r_values(u, acc)?;
            Ok((truncated_model_with(&sieve, u, n) - rt).abs())
        })
        .collect::<Result<_>>()?;
    Ok(crate::foundations::arith::pairwise_sum(&gaps) / points as f64)
}

/// `sum_{N < n1, n2 <= 2N} |(1/y) int_0^y psi(x/n1) psi(x/n2) dx|`.
pub fn pair_correlation_stat(n: u64, y: u64) -> Result<f64> {
    pair_correlation_stat_with_budget(n, y, DEFAULT_PAIR_BUDGET)
}

pub fn pair_correlation_stat_with_budget(n: u64, y: u64, budget: u64) -> Result<f64> {
    if n == 0 || 2 * n > y {
        return Err(Error::domain("need 1 <= N and 2N <= y"));
    }
    if n * n > budget {
        return Err(Error::resource("pair count", n * n, budget));
    }
    let pairs: Vec<(u64, u64)> = (n + 1..=2 * n).flat_map(|a| (a..=2 * n).map(move |b| (a, b))).collect();
    let vals: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let v = pair_integral_mean(a, b, y)?.abs();
            Ok(if a == b { v } else { 2.0 * v })
        })
        .collect::<Result<_>>()?;
    Ok(crate::foundations::arith::pairwise_sum(&vals))
}

/// `(1/y) int_0^y psi(x/a) psi(x/b) dx`: full periods by the closed form,
/// the remainder by exact integration.
pub fn pair_integral_mean(a: u64, b: u64, y: u64) -> Result<f64> {
    let l = checked_lcm(a, b).ok_or_else(|| Error::resource("pair period", u128::MAX, u64::MAX as u128))?;
    let full = (y / l) as f64 * l as f64 * b_pair(a, b).to_f64();
    let rest = sawtooth_product_integral(&[a, b], 0, y % l)?.to_f64();
    Ok((full + rest) / y as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SignChanges {
    pub limit: u64,
    pub changes: u64,
    pub positive_seen: bool,
    pub negative_seen: bool,
}

/// Sign changes of `R(x)` on `[1, limit]`. `R` decreases on each
/// `[m, m+1)` and jumps up by `phi(m+1)` at integers, so checking both
/// ends of every interval finds every change.
pub fn r_sign_changes(acc: &PhiAccumulator, limit: u64) -> Result<SignChanges> {
    if limit < 1 || limit > acc.y {
        return Err(Error::domain("limit outside accumulator range"));
    }
    let mut changes = 0;
    let mut last = 0i8;
    let (mut pos, mut neg) = (false, false);
    let mut visit = |v: f64| {
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
            pos |= s > 0;
            neg |= s < 0;
        }
    };
    for m in 1..=limit {
        let s = acc.prefix(m) as f64;
        visit(s - THREE_OVER_PI2 * (m * m) as f64);
        if m < limit {
            visit(s - THREE_OVER_PI2 * ((m + 1) * (m + 1)) as f64);
        }
    }
    Ok(SignChanges {
        limit,
        changes,
        positive_seen: pos,
        negative_seen: neg,
    })
}
