//! Prime-race bias constants: `C(k)` by the character route and the
//! truncated sawtooth route, `c1` and `c2` of a residue pattern, and the
//! bridge `c2(q;(a,b))/q ~ C(b-a)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{CharacterTable, PrimeContext};
use crate::error::{Error, Result};
use crate::foundations::arith::{gcd, pairwise_sum, require_odd_prime, CompensatedSum};
use crate::foundations::coeffs::CoefficientSeries;
use crate::foundations::dft::{chirp_z, cyclic_convolution_real, Sign};
use crate::foundations::sawtooth::psi_residue;

/// Tolerance on `C(k) + C(q-k)` before symmetrisation.
pub const ODDNESS_TOLERANCE: f64 = 1e-10;

/// A residue pattern `(a_1, ..., a_r)` modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    q: u64,
    residues: Vec<u64>,
}

impl Pattern {
    pub fn new(q: u64, residues: &[i64]) -> Result<Self> {
        require_odd_prime(q)?;
        if residues.is_empty() {
            return Err(Error::domain("pattern must have at least one residue"));
        }
        let reduced: Vec<u64> = residues.iter().map(|&a| a.rem_euclid(q as i64) as u64).collect();
        if let Some(bad) = reduced.iter().find(|&&a| gcd(a, q) != 1) {
            return Err(Error::domain(format!("residue {bad} is not coprime to {q}")));
        }
        Ok(Pattern { q, residues: reduced })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// How `C(k)` is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum CkMethod<'a> {
    /// Character average of `L(0,chi) L(1,chi) A_{q,chi}`.
    Characters(&'a CharacterTable),
    /// `-C sum_{n <= N, (n,q)=1} b(n) psi(k (2n)-bar / q)`.
    Truncated { n: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CkMethodTag {
    Characters,
    Truncated,
}

/// `C(k)` for `k = 1..q-1`.
#[derive(Clone, Debug, Serialize)]
pub struct CkVector {
    q: u64,
    values: Vec<f64>,
    method: CkMethodTag,
    /// `N` of the truncated route, or the `A_{q,chi}` cutoff for the
    /// character route.
    truncation: u64,
    /// Largest `|C(k) + C(q-k)|` before symmetrisation.
    max_asymmetry: f64,
    /// Largest imaginary residue (character route only).
    max_imaginary: f64,
}

impl CkVector {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `C(k)`; `k` must not be divisible by `q`.
    pub fn get(&self, k: i64) -> f64 {
        let r = k.rem_euclid(self.q as i64) as usize;
        assert!(r != 0, "C(0) is undefined");
        self.values[r - 1]
    }

    /// Values for `k = 1..q-1` in order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> CkMethodTag {
        self.method
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_asymmetry
    }

    pub fn max_imaginary(&self) -> f64 {
        self.max_imaginary
    }

    fn symmetrized(q: u64, raw: Vec<f64>, method: CkMethodTag, truncation: u64, imag: f64) -> Result<Self> {
        let n = raw.len();
        let mut max_asym: f64 = 0.0;
        let mut values = vec![0.0; n];
        for i in 0..n {
            let j = n - 1 - i; // index of q - k
            max_asym = max_asym.max((raw[i] + raw[j]).abs());
            values[i] = 0.5 * (raw[i] - raw[j]);
        }
        if max_asym > ODDNESS_TOLERANCE * (1.0 + raw.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            return Err(Error::precondition(format!(
                "C(k) + C(-k) reached {max_asym:e}, above the oddness tolerance"
            )));
        }
        Ok(CkVector {
            q,
            values,
            method,
            truncation,
            max_asymmetry: max_asym,
            max_imaginary: imag,
        })
    }
}

fn require_nonzero(q: u64, k: i64) -> Result<u64> {
    let r = k.rem_euclid(q as i64) as u64;
    if r == 0 {
        return Err(Error::domain(format!("C(k) is undefined for k = {k} = 0 mod {q}")));
    }
    Ok(r)
}

/// Default `N` for the truncated route.
pub fn default_truncation(q: u64) -> u64 {
    q.max(1000)
}

/// Character route for one `k`, returning the full complex sum so callers
/// can inspect the imaginary residue.
pub fn ck_point_complex(table: &CharacterTable, k: i64) -> Result<Complex64> {
    let q = table.q();
    require_nonzero(q, k)?;
    let order = q - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    // pair j with q-1-j (both odd) so conjugates meet in the same step
    for j in (1..order / 2 + 1).step_by(2) {
        let partner = order - j;
        let a = table.char_value(j, k).conj() * table.bias_weight(j);
        if partner != j {
            let b = table.char_value(partner, k).conj() * table.bias_weight(partner);
            acc += a + b;
        } else {
            acc += a;
        }
    }
    Ok(acc / order as f64)
}

/// Truncated route for one `k`: `O(N)` direct sum.
pub fn ck_point_truncated(ctx: &PrimeContext, series: &CoefficientSeries, k: i64, n_max: u64) -> Result<f64> {
    let q = ctx.q();
    let k = require_nonzero(q, k)?;
    if n_max > series.limit() {
        return Err(Error::precondition("coefficient table shorter than N"));
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=n_max {
        let b = series.b(n);
        if b == 0.0 || n % q == 0 {
            continue;
        }
        let inv = ctx.inverse((2 * n) % q);
        acc.add(b * psi_residue(k * inv % q, q));
    }
    Ok(-series.constant() * acc.value())
}

/// `C(k)` by the chosen route.
pub fn ck_point(q: u64, k: i64, method: CkMethod<'_>) -> Result<f64> {
    match method {
        CkMethod::Characters(table) => {
            if table.q() != q {
                return Err(Error::domain("character table built for a different modulus"));
            }
            Ok(ck_point_complex(table, k)?.re)
        }
        CkMethod::Truncated { n } => {
            let ctx = PrimeContext::new(q)?;
            let series = CoefficientSeries::new(n.max(2), Some(q))?;
            ck_point_truncated(&ctx, &series, k, n)
        }
    }
}

/// Full vector through the character route: one length `q-1` DFT over the
/// index table.
pub fn ck_all_characters(table: &CharacterTable) -> Result<CkVector> {
    let q = table.q();
    let order = (q - 1) as usize;
    let weights: Vec<Complex64> = (0..order as u64).map(|j| table.bias_weight(j)).collect();
    let sums = chirp_z(&weights, Sign::Backward);
    let mut raw = vec![0.0; order];
    let mut imag: f64 = 0.0;
    for (m, z) in sums.iter().enumerate() {
        let k = table.context().power(m as u64) as usize;
        let v = z / order as f64;
        imag = imag.max(v.im.abs());
        raw[k - 1] = v.re;
    }
    CkVector::symmetrized(q, raw, CkMethodTag::Characters, table.a_cutoff(), imag)
}

/// Full vector through the truncated route, as a cyclic convolution over
/// the index table: with `k = g^a`, `2n = g^b`,
/// `psi(k (2n)-bar/q) = psi(g^{a-b}/q)`.
pub fn ck_all_truncated(q: u64, n_max: u64) -> Result<CkVector> {
    let ctx = PrimeContext::new(q)?;
    let series = CoefficientSeries::new(n_max.max(2), Some(q))?;
    ck_all_truncated_with(&ctx, &series, n_max)
}

pub fn ck_all_truncated_with(ctx: &PrimeContext, series: &CoefficientSeries, n_max: u64) -> Result<CkVector> {
    let q = ctx.q();
    if n_max > series.limit() {
        return Err(Error::precondition("coefficient table shorter than N"));
    }
    let order = (q - 1) as usize;
    let mut weights = vec![CompensatedSum::new(); q as usize];
    for n in 1..=n_max {
        let b = series.b(n);
        if b != 0.0 && n % q != 0 {
            weights[((2 * n) % q) as usize].add(b);
        }
    }
    let w: Vec<f64> = (0..order).map(|m| weights[ctx.power(m as u64) as usize].value()).collect();
    let p: Vec<f64> = (0..order).map(|m| psi_residue(ctx.power(m as u64), q)).collect();
    let conv = cyclic_convolution_real(&w, &p);
    let c = series.constant();
    let mut raw = vec![0.0; order];
    for (a, v) in conv.iter().enumerate() {
        let k = ctx.power(a as u64) as usize;
        raw[k - 1] = -c * v;
    }
    CkVector::symmetrized(q, raw, CkMethodTag::Truncated, n_max, 0.0)
}

/// Batch form of [`ck_point`].
pub fn ck_all(q: u64, method: CkMethod<'_>) -> Result<CkVector> {
    match method {
        CkMethod::Characters(table) => {
            if table.q() != q {
                return Err(Error::domain("character table built for a different modulus"));
            }
            ck_all_characters(table)
        }
        CkMethod::Truncated { n } => ck_all_truncated(q, n),
    }
}

/// `(1/q) sum_k |C_1(k) - C_2(k)|^2`.
pub fn mean_square_gap(a: &CkVector, b: &CkVector) -> f64 {
    assert_eq!(a.q, b.q, "vectors for different moduli");
    let sq: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).collect();
    pairwise_sum(&sq) / a.q as f64
}

fn count_matches(res: &[u64], gap: usize) -> usize {
    (0..res.len().saturating_sub(gap)).filter(|&i| res[i] == res[i + gap]).count()
}

/// `c1(q; a) = (phi(q)/2) ((r-1)/phi(q) - #{i <= r-1 : a_i = a_{i+1}})`.
pub fn c1_pattern(pattern: &Pattern) -> f64 {
    let phi = (pattern.q - 1) as f64;
    let r = pattern.len() as f64;
    let repeats = count_matches(&pattern.residues, 1) as f64;
    phi / 2.0 * ((r - 1.0) / phi - repeats)
}

/// `c2(q; (a, b))`: closed form on the diagonal, character sum otherwise.
pub fn c2_pair(table: &CharacterTable, a: i64, b: i64) -> Result<f64> {
    let q = table.q();
    let qi = q as i64;
    let (ar, br) = (a.rem_euclid(qi), b.rem_euclid(qi));
    if ar == 0 || br == 0 {
        return Err(Error::domain("c2 residues must be coprime to q"));
    }
    let qf = q as f64;
    let phi = qf - 1.0;
    if ar == br {
        return Ok((qf - 2.0) / 2.0 * (qf / (2.0 * PI)).ln());
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (1..q - 1).step_by(2) {
        let coef = table.char_value(j, br - ar).conj()
            + (table.char_value(j, br).conj() - table.char_value(j, ar).conj()) / phi;
        acc += coef * table.bias_weight(j);
    }
    Ok(0.5 * (2.0 * PI / qf).ln() + qf / phi * acc.re)
}

/// `c2` of a pattern of length `r >= 2`, composed from adjacent pairs plus
/// the longer-gap repetition terms.
pub fn c2_pattern(table: &CharacterTable, pattern: &Pattern) -> Result<f64> {
    if pattern.q != table.q() {
        return Err(Error::domain("character table built for a different modulus"));
    }
    let r = pattern.len();
    if r < 2 {
        return Err(Error::domain("c2 needs a pattern of length >= 2"));
    }
    let res = &pattern.residues;
    let pairs: Vec<f64> = (0..r - 1)
        .into_par_iter()
        .map(|i| c2_pair(table, res[i] as i64, res[i + 1] as i64))
        .collect::<Result<_>>()?;
    let phi = (pattern.q - 1) as f64;
    let mut gaps = 0.0;
    for j in 1..=r.saturating_sub(2) {
        let matches = count_matches(res, j + 1) as f64;
        gaps += ((r - 1 - j) as f64 / phi - matches) / j as f64;
    }
    Ok(pairwise_sum(&pairs) + phi / 2.0 * gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_examples() {
        let p = Pattern::new(3, &[1, 1]).unwrap();
        assert_eq!(c1_pattern(&p), -0.5);
        let p = Pattern::new(3, &[1, 2]).unwrap();
        assert_eq!(c1_pattern(&p), 0.5);
        let mut total = 0.0;
        for a in 1..5 {
            for b in 1..5 {
                total += c1_pattern(&Pattern::new(5, &[a, b]).unwrap());
            }
        }
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn c1_repeat_difference() {
        let no_repeat = Pattern::new(11, &[1, 2, 3, 4]).unwrap();
        let one_repeat = Pattern::new(11, &[1, 1, 3, 4]).unwrap();
        assert_eq!(c1_pattern(&no_repeat) - c1_pattern(&one_repeat), 5.0);
    }

    #[test]
    fn pattern_validation() {
        assert!(Pattern::new(7, &[]).is_err());
        assert!(Pattern::new(7, &[1, 14]).is_err());
        assert!(Pattern::new(8, &[1]).is_err());
        assert_eq!(Pattern::new(7, &[-1, 9]).unwrap().residues(), &[6, 2]);
    }

    #[test]
    fn c2_diagonal_closed_form() {
        let t = CharacterTable::build(5, 1000).unwrap();
        let v = c2_pair(&t, 2, 2).unwrap();
        assert!((v - 1.5 * (5.0 / (2.0 * PI)).ln()).abs() < 1e-14);
        assert!((v - (-0.342_66)).abs() < 1e-5);
    }

    #[test]
    fn c2_small_patterns() {
        let t = CharacterTable::build(3, 10_000).unwrap();
        let p12 = c2_pair(&t, 1, 2).unwrap();
        let p21 = c2_pair(&t, 2, 1).unwrap();
        let p22 = c2_pair(&t, 2, 2).unwrap();
        let two = Pattern::new(3, &[1, 2]).unwrap();
        assert_eq!(c2_pattern(&t, &two).unwrap(), p12);
        let v = c2_pattern(&t, &Pattern::new(3, &[1, 2, 1]).unwrap()).unwrap();
        assert!((v - (p12 + p21 + (0.5 - 1.0))).abs() < 1e-12);
        let v = c2_pattern(&t, &Pattern::new(3, &[1, 2, 2]).unwrap()).unwrap();
        assert!((v - (p12 + p22 + 0.5)).abs() < 1e-12);
        // for q = 3 the character correction cancels exactly
        assert!((p12 - 0.5 * (2.0 * PI / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn ck_rejects_zero() {
        let t = CharacterTable::build(11, 100).unwrap();
        assert!(ck_point(11, 0, CkMethod::Characters(&t)).is_err());
        assert!(ck_point(11, 22, CkMethod::Truncated { n: 100 }).is_err());
    }
}
