//! Moments of `C(k)`, `pi i s_q(t)` and `R~(u)`: truncated multi-sums over
//! the correlation integrals, empirical power means, and the continuous
//! model `C(x;B) = C sum_{n<=B} b(n) psi(x/n)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::b_exact;
use crate::error::{Error, Result};
use crate::foundations::arith::{checked_lcm, pairwise_sum, CompensatedSum};
use crate::foundations::coeffs::{coeff_b, limiting_constant};
use crate::foundations::rational::ExactRational;
use crate::foundations::sawtooth::psi;
use crate::foundations::sieve::SieveTables;

/// Weight-product threshold below which tuples are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Default cap on enumerated multisets for `l >= 4`.
pub const DEFAULT_TUPLE_BUDGET: u64 = 20_000_000;

/// Default cap on `lcm(1..B)` for the continuous model.
pub const DEFAULT_MODEL_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MomentKind {
    /// `C(k)`: weights `C b(n)`.
    C,
    /// `pi i s_q(t)`: weights `1/n`.
    #[serde(rename = "s")]
    S,
    /// `R~(u)`: weights `mu(n)/n`.
    R,
}

impl MomentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentKind::C => "C",
            MomentKind::S => "s",
            MomentKind::R => "R",
        }
    }
}

impl std::str::FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(MomentKind::C),
            "s" | "S" => Ok(MomentKind::S),
            "R" | "r" => Ok(MomentKind::R),
            _ => Err(Error::Usage(format!("unknown moment kind {s:?} (expected C, s or R)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentEstimate {
    pub kind: MomentKind,
    pub ell: u32,
    pub truncation: u64,
    pub value: f64,
    pub tail_note: String,
    /// Upper bound on the contribution of pruned tuples (already scaled by
    /// `C^l` for kind `C`).
    pub pruned_mass: f64,
    /// Number of multisets evaluated.
    pub tuples: u64,
}

/// Nonzero weights `w(n)` for `n <= B`, without the constant for kind `C`.
pub fn moment_weights(kind: MomentKind, b: u64) -> Result<Vec<(u64, f64)>> {
    if b == 0 {
        return Err(Error::domain("truncation B must be positive"));
    }
    let out = match kind {
        MomentKind::S => (1..=b).map(|n| (n, 1.0 / n as f64)).collect(),
        MomentKind::R => {
            let sieve = SieveTables::new(b.max(2))?;
            (1..=b)
                .filter(|&n| sieve.mobius(n) != 0)
                .map(|n| (n, sieve.mobius(n) as f64 / n as f64))
                .collect()
        }
        MomentKind::C => {
            let sieve = SieveTables::new(b.max(2))?;
            (1..=b)
                .filter(|&n| n % 2 == 1 && sieve.mobius(n) != 0)
                .map(|n| {
                    let w: f64 = sieve.factorize(n).iter().map(|&(p, _)| 1.0 / (p - 2) as f64).product();
                    (n, w)
                })
                .collect()
        }
    };
    Ok(out)
}

fn kind_scale(kind: MomentKind, ell: u32) -> f64 {
    match kind {
        MomentKind::C => limiting_constant().value.powi(ell as i32),
        _ => 1.0,
    }
}

/// `J_2(n) = n^2 prod_{p | n} (1 - p^{-2})` for `n <= B`.
fn jordan2(b: u64) -> Vec<u64> {
    let mut j: Vec<u64> = (0..=b).map(|n| n * n).collect();
    for p in 2..=b {
        if j[p as usize] == p * p {
            // p is prime iff untouched so far
            let mut m = p;
            while m <= b {
                j[m as usize] = j[m as usize] / (p * p) * (p * p - 1);
                m += p;
            }
        }
    }
    j
}

/// `M(2)` via `gcd^2 = sum_{e | gcd} J_2(e)`:
/// `(1/12) sum_e J_2(e) (sum_{e | n <= B} w(n)/n)^2`.
fn second_moment(weights: &[(u64, f64)], b: u64) -> f64 {
    let mut per_n = vec![0.0; b as usize + 1];
    for &(n, w) in weights {
        per_n[n as usize] = w / n as f64;
    }
    let j2 = jordan2(b);
    let terms: Vec<f64> = (1..=b)
        .into_par_iter()
        .map(|e| {
            let mut s = CompensatedSum::new();
            let mut n = e;
            while n <= b {
                s.add(per_n[n as usize]);
                n += e;
            }
            j2[e as usize] as f64 * s.value() * s.value()
        })
        .collect();
    pairwise_sum(&terms) / 12.0
}

/// `M(2)` by the direct `O(B^2)` pair sum; kept as an independent check on
/// the divisor-sum route.
pub fn moment2_direct(kind: MomentKind, b: u64) -> Result<f64> {
    let w = moment_weights(kind, b)?;
    let rows: Vec<f64> = w
        .par_iter()
        .map(|&(n1, w1)| {
            let mut s = CompensatedSum::new();
            for &(n2, w2) in &w {
                let g = crate::foundations::arith::gcd(n1, n2) as f64;
                s.add(w1 * w2 * g * g / (12.0 * n1 as f64 * n2 as f64));
            }
            s.value()
        })
        .collect();
    Ok(pairwise_sum(&rows) * kind_scale(kind, 2))
}

/// Truncated theoretical moment `sum_{n_i <= B} prod w(n_i) B(n_1..n_l)`.
pub fn theoretical_moment(kind: MomentKind, ell: u32, b: u64) -> Result<MomentEstimate> {
    theoretical_moment_with_budget(kind, ell, b, DEFAULT_TUPLE_BUDGET)
}

pub fn theoretical_moment_with_budget(kind: MomentKind, ell: u32, b: u64, budget: u64) -> Result<MomentEstimate> {
    if ell == 0 {
        return Err(Error::domain("moment order must be positive"));
    }
    let weights = moment_weights(kind, b)?;
    let mut est = MomentEstimate {
        kind,
        ell,
        truncation: b,
        value: 0.0,
        tail_note: String::new(),
        pruned_mass: 0.0,
        tuples: 0,
    };
    if ell % 2 == 1 {
        est.tail_note = "odd order: every correlation integral vanishes".into();
        return Ok(est);
    }
    if ell == 2 {
        est.value = second_moment(&weights, b) * kind_scale(kind, 2);
        est.tuples = weights.len() as u64;
        est.tail_note = format!("pairs with max(n1,n2) > {b} omitted; tail O(log B / B) for kinds s and R");
        return Ok(est);
    }
    let (value, pruned, tuples) = multiset_sum(&weights, ell as usize, budget)?;
    let scale = kind_scale(kind, ell);
    est.value = value * scale;
    est.pruned_mass = pruned * scale;
    est.tuples = tuples;
    est.tail_note = format!(
        "tuples with some n_i > {b} omitted; weight products below {PRUNE_THRESHOLD:e} pruned (bound {:.3e})",
        est.pruned_mass
    );
    Ok(est)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

struct Walk<'a> {
    weights: &'a [(u64, f64)],
    tail_abs: Vec<f64>,
    ell: usize,
    stack: Vec<u64>,
    mults: Vec<usize>,
    sum: CompensatedSum,
    pruned: f64,
    count: u64,
    error: Option<Error>,
}

impl Walk<'_> {
    fn prefix_multiplicity_factor(&self) -> f64 {
        self.mults.iter().map(|&m| factorial(m)).product()
    }

    fn go(&mut self, start: usize, prod: f64) {
        if self.error.is_some() {
            return;
        }
        let depth = self.stack.len();
        if depth == self.ell {
            match b_exact(&self.stack) {
                Ok(v) => {
                    let mult = factorial(self.ell) / self.prefix_multiplicity_factor();
                    self.sum.add(mult * prod * v.to_f64());
                    self.count += 1;
                }
                Err(e) => self.error = Some(e),
            }
            return;
        }
        let rem = self.ell - depth;
        for i in start..self.weights.len() {
            let (n, w) = self.weights[i];
            let bound = prod.abs() * w.abs().powi(rem as i32);
            if bound < PRUNE_THRESHOLD {
                // later entries are no heavier, so the rest of this level goes too
                let ordered = factorial(self.ell) / self.prefix_multiplicity_factor() * prod.abs()
                    * self.tail_abs[i].powi(rem as i32)
                    / factorial(rem);
                self.pruned += ordered * 0.5f64.powi(self.ell as i32);
                return;
            }
            let last_same = self.stack.last() == Some(&n);
            self.stack.push(n);
            if last_same {
                *self.mults.last_mut().unwrap() += 1;
            } else {
                self.mults.push(1);
            }
            self.go(i, prod * w);
            self.stack.pop();
            if last_same {
                *self.mults.last_mut().unwrap() -= 1;
            } else {
                self.mults.pop();
            }
            if self.error.is_some() {
                return;
            }
        }
    }
}

/// Sum over multisets of size `ell` drawn from `weights`, each weighted by
/// its number of orderings. Returns (value, pruned-mass bound, multisets).
fn multiset_sum(weights: &[(u64, f64)], ell: usize, budget: u64) -> Result<(f64, f64, u64)> {
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    let mut tail_abs = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        tail_abs[i] = tail_abs[i + 1] + sorted[i].1.abs();
    }
    let estimate = binomial_f64(sorted.len() + ell - 1, ell);
    let parts: Vec<Result<(f64, f64, u64)>> = (0..sorted.len())
        .into_par_iter()
        .map(|first| {
            let (n, w) = sorted[first];
            let mut walk = Walk {
                weights: &sorted,
                tail_abs: tail_abs.clone(),
                ell,
                stack: vec![n],
                mults: vec![1],
                sum: CompensatedSum::new(),
                pruned: 0.0,
                count: 0,
                error: None,
            };
            if w.abs().powi(ell as i32) < PRUNE_THRESHOLD {
                return Ok((0.0, 0.0, 0));
            }
            walk.go(first, w);
            match walk.error {
                Some(e) => Err(e),
                None => Ok((walk.sum.value(), walk.pruned, walk.count)),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(parts.len());
    let mut pruned = 0.0;
    let mut count = 0u64;
    // first-coordinates skipped wholesale still count towards the pruned mass
    let mut skipped_from = None;
    for (i, p) in parts.into_iter().enumerate() {
        let (v, pm, c) = p?;
        if c == 0 && skipped_from.is_none() && sorted[i].1.abs().powi(ell as i32) < PRUNE_THRESHOLD {
            skipped_from = Some(i);
        }
        values.push(v);
        pruned += pm;
        count += c;
    }
    if let Some(i) = skipped_from {
        pruned += tail_abs[i].powi(ell as i32) * 0.5f64.powi(ell as i32);
    }
    if count > budget || estimate > 1e18 {
        return Err(Error::Budget {
            what: "moment tuples",
            budget,
            partial: Some(pairwise_sum(&values)),
        });
    }
    Ok((pairwise_sum(&values), pruned, count))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Power means `(1/n) sum v^l` for `l = 1..=ell_max`.
pub fn empirical_moments(values: &[f64], ell_max: u32) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let n = values.len() as f64;
    Ok((1..=ell_max)
        .map(|ell| {
            let powers: Vec<f64> = values.iter().map(|v| v.powi(ell as i32)).collect();
            pairwise_sum(&powers) / n
        })
        .collect())
}

/// `C(x;B) = C sum_{n <= B} b(n) psi(x/n)` with the limiting constant.
pub fn continuous_model_eval(x: f64, b: u64) -> Result<f64> {
    let w = moment_weights(MomentKind::C, b)?;
    let mut s = CompensatedSum::new();
    for (n, wn) in w {
        s.add(wn * psi(x / n as f64, false));
    }
    Ok(limiting_constant().value * s.value())
}

/// Piecewise-linear description of `sum b(n) psi(x/n)` on unit intervals:
/// on `[m, m+1)` it equals `(alpha_m + beta y) / den` with integers.
struct LinearModel {
    period: u64,
    den: BigInt,
    /// `D b(n) / (2n)` for each supported `n`.
    coef: Vec<(u64, i128)>,
    slope: i128,
}

impl LinearModel {
    fn new(b: u64, cap: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::domain("truncation B must be positive"));
        }
        let mut period = 1u64;
        for n in 1..=b {
            period = checked_lcm(period, n)
                .filter(|&l| l <= cap)
                .ok_or_else(|| Error::resource("lcm(1..B)", period as u128 * n as u128, cap))?;
        }
        let support: Vec<(u64, ExactRational)> =
            (1..=b).map(|n| (n, coeff_b(n))).filter(|(_, v)| !v.is_zero()).collect();
        let mut den = BigInt::one();
        for (n, v) in &support {
            let d = v.denom() * BigInt::from(2 * n);
            den = num_integer::Integer::lcm(&den, &d);
        }
        let den_i = den.to_i128().filter(|d| *d < 1 << 60).ok_or_else(|| {
            Error::resource("model denominator", u128::MAX, 1u128 << 60)
        })?;
        let mut coef = Vec::new();
        for (n, v) in &support {
            let c = v.as_big_rational() * BigRational::from_integer(BigInt::from(den_i))
                / BigRational::from_integer(BigInt::from(2 * n));
            coef.push((*n, c.to_integer().to_i128().unwrap()));
        }
        let slope = coef.iter().map(|&(_, c)| 2 * c).sum();
        Ok(LinearModel {
            period,
            den,
            coef,
            slope,
        })
    }

    fn alpha(&self, m: u64) -> i128 {
        self.coef.iter().map(|&(n, c)| c * (2 * (m % n) as i128 - n as i128)).sum()
    }
}

/// `(1/L) int_0^L (sum_{n<=B} b(n) psi(x/n))^l dx` exactly, `L = lcm(1..B)`.
/// The constant `C^l` is not included.
pub fn continuous_model_moment_exact(ell: u32, b: u64) -> Result<ExactRational> {
    continuous_model_moment_exact_with_cap(ell, b, DEFAULT_MODEL_CAP)
}

pub fn continuous_model_moment_exact_with_cap(ell: u32, b: u64, cap: u64) -> Result<ExactRational> {
    if ell == 0 || ell > 6 {
        return Err(Error::domain("model moments are supported for 1 <= l <= 6"));
    }
    let model = LinearModel::new(b, cap)?;
    let ell = ell as usize;
    // power sums P_j = sum_m alpha_m^j
    let chunk = 1u64 << 12;
    let starts: Vec<u64> = (0..model.period).step_by(chunk as usize).collect();
    let partial: Vec<Vec<BigInt>> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + chunk).min(model.period);
            let mut acc = vec![BigInt::zero(); ell + 1];
            for m in lo..hi {
                let a = BigInt::from(model.alpha(m));
                let mut p = BigInt::one();
                for slot in acc.iter_mut() {
                    *slot += &p;
                    p *= &a;
                }
            }
            acc
        })
        .collect();
    let power_sums: Vec<BigInt> = (0..=ell).map(|j| partial.iter().map(|p| &p[j]).sum()).collect();
    // int_0^1 (a + s y)^l dy = sum_k binom(l,k) a^{l-k} s^k / (k+1)
    let slope = BigInt::from(model.slope);
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    let mut sk = BigInt::one();
    for k in 0..=ell {
        let term = &binom * &power_sums[ell - k] * &sk;
        total += BigRational::new(term, BigInt::from(k as u64 + 1));
        binom = binom * BigInt::from((ell - k) as u64) / BigInt::from(k as u64 + 1);
        sk *= &slope;
    }
    let norm = BigInt::from(model.period) * model.den.pow(ell as u32);
    Ok(ExactRational::from(total / BigRational::from_integer(norm)))
}

/// `sum_{n_i <= B} prod b(n_i) B(n_1, ..., n_l)` in exact arithmetic.
pub fn model_tuple_sum_exact(ell: u32, b: u64) -> Result<ExactRational> {
    if ell == 0 {
        return Err(Error::domain("moment order must be positive"));
    }
    let support: Vec<(u64, ExactRational)> =
        (1..=b).map(|n| (n, coeff_b(n))).filter(|(_, v)| !v.is_zero()).collect();
    let ell = ell as usize;
    let mut total = ExactRational::zero();
    let mut idx = vec![0usize; ell];
    loop {
        let tuple: Vec<u64> = idx.iter().map(|&i| support[i].0).collect();
        let mut w = b_exact(&tuple)?;
        if !w.is_zero() {
            for &i in &idx {
                w *= &support[i].1;
            }
            let mut mult = factorial(ell) as u64;
            let mut run = 1;
            for j in 1..=ell {
                if j < ell && idx[j] == idx[j - 1] {
                    run += 1;
                } else {
                    mult /= (1..=run).product::<u64>();
                    run = 1;
                }
            }
            total += &(&w * &ExactRational::from(mult as i64));
        }
        // next nondecreasing index tuple
        let mut pos = ell;
        while pos > 0 && idx[pos - 1] == support.len() - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        let v = idx[pos - 1];
        for slot in idx.iter_mut().skip(pos) {
            *slot = v;
        }
    }
    Ok(total)
}

/// `(1/L) int_0^L exp(i t C(x;B)) dx`, integrating the linear phase on
/// each unit interval in closed form.
pub fn char_function_estimate(t: f64, b: u64) -> Result<Complex64> {
    char_function_estimate_with_cap(t, b, DEFAULT_MODEL_CAP)
}

pub fn char_function_estimate_with_cap(t: f64, b: u64, cap: u64) -> Result<Complex64> {
    let model = LinearModel::new(b, cap)?;
    let den = model.den.to_f64().unwrap();
    let scale = t * limiting_constant().value / den;
    let slope = scale * model.slope as f64;
    // int_0^1 exp(i s y) dy
    let piece = if slope.abs() < 1e-8 {
        Complex64::new(1.0 - slope * slope / 6.0, slope / 2.0)
    } else {
        (Complex64::new(0.0, slope).exp() - 1.0) / Complex64::new(0.0, slope)
    };
    let parts: Vec<(f64, f64)> = (0..model.period)
        .into_par_iter()
        .map(|m| {
            let z = Complex64::new(0.0, scale * model.alpha(m) as f64).exp();
            (z.re, z.im)
        })
        .collect();
    let re: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let im: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let mean = Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / model.period as f64;
    Ok(mean * piece)
}

/// `5 pi^2 / 144`, the second moment of `pi i s_q(t)`.
pub fn spectrum_second_moment() -> f64 {
    5.0 * PI * PI / 144.0
}

/// `1 / (2 pi^2)`, the second moment of `R~`.
pub fn rtilde_second_moment() -> f64 {
    1.0 / (2.0 * PI * PI)
}
