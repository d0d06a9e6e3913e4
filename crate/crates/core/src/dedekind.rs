//! Dedekind sums `s_q(a) = sum_x psi(x/q) psi(ax/q)` and their discrete
//! Fourier transform `s-hat_q(t) = (1/q) sum_a s_q(a) e(at/q)`.
//!
//! Three routes to the transform are provided: the DFT of the exact sums
//! (naive or chirp-z), the character identity
//! `s-hat(t) = -1/(pi i phi(q)) sum chi-bar(t) L(0,chi) L(1,chi)`, and the
//! truncated sawtooth series `(1/(pi i)) sum_{n <= x} psi(t n-bar / q)/n`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::characters::{CharacterTable, PrimeContext};
use crate::error::{Error, Result};
use crate::foundations::arith::{gcd, require_odd_prime, CompensatedSum};
use crate::foundations::dft::{chirp_z, Sign};
use crate::foundations::rational::ExactRational;
use crate::foundations::sawtooth::psi_residue;

/// Largest modulus for which full spectra are computed.
pub const DEFAULT_SPECTRUM_CAP: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedekindMethod {
    /// The defining `O(q)` sum.
    Direct,
    /// Euclidean descent on the reciprocity law, `O(log q)`.
    Reciprocity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    NaiveDft,
    ChirpZ,
    Truncated,
    Characters,
}

impl SpectrumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumMethod::NaiveDft => "naive-dft",
            SpectrumMethod::ChirpZ => "chirp-z",
            SpectrumMethod::Truncated => "truncated",
            SpectrumMethod::Characters => "characters",
        }
    }
}

/// Dedekind sum `s(a, c)` for any coprime pair with `c >= 1`.
pub fn dedekind_sum_general(a: i64, c: u64, method: DedekindMethod) -> Result<ExactRational> {
    if c == 0 {
        return Err(Error::domain("Dedekind sum needs a positive modulus"));
    }
    let a_red = a.rem_euclid(c as i64) as u64;
    if gcd(a_red, c) != 1 {
        return Err(Error::domain(format!("gcd({a}, {c}) != 1")));
    }
    Ok(match method {
        DedekindMethod::Direct => direct_sum(a_red, c),
        DedekindMethod::Reciprocity => reciprocity_sum(a_red, c),
    })
}

/// `s_q(a)` for a prime modulus.
pub fn dedekind_sum(q: u64, a: i64, method: DedekindMethod) -> Result<ExactRational> {
    require_odd_prime(q)?;
    if a.rem_euclid(q as i64) == 0 {
        return Err(Error::domain(format!("{a} is divisible by {q}")));
    }
    dedekind_sum_general(a, q, method)
}

// (1/(4c^2)) sum_{x=1}^{c-1} (2x - c)(2(ax mod c) - c)
fn direct_sum(a: u64, c: u64) -> ExactRational {
    if c == 1 {
        return ExactRational::zero();
    }
    let mut acc: i128 = 0;
    let mut r = 0u64;
    for x in 1..c {
        r = (r + a) % c;
        acc += (2 * x as i128 - c as i128) * (2 * r as i128 - c as i128);
    }
    ExactRational::new(BigInt::from(acc), BigInt::from(4i128 * c as i128 * c as i128))
}

// s(a,c) + s(c,a) = -1/4 + (a/c + c/a + 1/(ac))/12, descending (a, c) -> (c mod a, a).
fn reciprocity_sum(mut a: u64, mut c: u64) -> ExactRational {
    let mut acc = ExactRational::zero();
    let mut positive = true;
    while a != 0 && c > 1 {
        let (ai, ci) = (a as i128, c as i128);
        let term = ExactRational::new(ai * ai + ci * ci + 1 - 3 * ai * ci, 12 * ai * ci);
        if positive {
            acc += term;
        } else {
            acc -= &term;
        }
        positive = !positive;
        let next = c % a;
        c = a;
        a = next;
    }
    acc
}

/// Imaginary parts of `s-hat_q(t)` for `t = 0..q-1`; the real parts vanish.
#[derive(Clone, Debug)]
pub struct Spectrum {
    q: u64,
    values: Vec<f64>,
    method: SpectrumMethod,
    /// Largest real part seen before it was dropped.
    max_real_residue: f64,
    truncation: Option<u64>,
}

impl Spectrum {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `Im s-hat_q(t)`.
    pub fn im(&self, t: u64) -> f64 {
        self.values[(t % self.q) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> SpectrumMethod {
        self.method
    }

    pub fn max_real_residue(&self) -> f64 {
        self.max_real_residue
    }

    pub fn truncation(&self) -> Option<u64> {
        self.truncation
    }

    /// `pi i s-hat_q(t) = -pi Im s-hat_q(t)` for `t = 1..q-1`, the real
    /// sample set whose distribution is studied.
    pub fn scaled_samples(&self) -> Vec<f64> {
        self.values[1..].iter().map(|v| -PI * v).collect()
    }

    /// Inverse transform `s_q(a) = sum_t s-hat(t) e(-at/q)`, as doubles.
    pub fn reconstruct_dedekind(&self) -> Vec<f64> {
        let input: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(0.0, v)).collect();
        chirp_z(&input, Sign::Backward).iter().map(|z| z.re).collect()
    }
}

/// All `s_q(a)`, `a = 0..q-1` (with `s_q(0) = 0`), as doubles.
pub fn dedekind_table(q: u64) -> Result<Vec<f64>> {
    require_odd_prime(q)?;
    let half: Vec<f64> = (1..=(q - 1) / 2)
        .into_par_iter()
        .map(|a| reciprocity_sum(a, q).to_f64())
        .collect();
    let mut out = vec![0.0; q as usize];
    for (i, v) in half.into_iter().enumerate() {
        let a = i + 1;
        out[a] = v;
        out[q as usize - a] = -v;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DftAlgorithm {
    Naive,
    ChirpZ,
}

/// Full spectrum by DFT of the exact Dedekind sums.
pub fn spectrum_all(q: u64, algorithm: DftAlgorithm) -> Result<Spectrum> {
    spectrum_all_with_cap(q, algorithm, DEFAULT_SPECTRUM_CAP)
}

pub fn spectrum_all_with_cap(q: u64, algorithm: DftAlgorithm, cap: u64) -> Result<Spectrum> {
    require_odd_prime(q)?;
    if q > cap {
        return Err(Error::resource("spectrum modulus q", q, cap));
    }
    let s = dedekind_table(q)?;
    let qf = q as f64;
    let (values, residue, method) = match algorithm {
        DftAlgorithm::Naive => {
            // s is odd, so only the sine part survives
            let values: Vec<f64> = (0..q)
                .into_par_iter()
                .map(|t| {
                    let mut acc = CompensatedSum::new();
                    for a in 1..q {
                        let r = (a * t) % q;
                        acc.add(s[a as usize] * (2.0 * PI * r as f64 / qf).sin());
                    }
                    acc.value() / qf
                })
                .collect();
            (values, 0.0, SpectrumMethod::NaiveDft)
        }
        DftAlgorithm::ChirpZ => {
            let input: Vec<Complex64> = s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let out = chirp_z(&input, Sign::Forward);
            let residue = out.iter().map(|z| (z.re / qf).abs()).fold(0.0, f64::max);
            // the t = 0 term is an exact zero and t -> q - t flips the sign
            let n = q as usize;
            let mut values = vec![0.0; n];
            for t in 1..n {
                values[t] = (out[t].im - out[n - t].im) / (2.0 * qf);
            }
            (values, residue, SpectrumMethod::ChirpZ)
        }
    };
    Ok(Spectrum {
        q,
        values,
        method,
        max_real_residue: residue,
        truncation: None,
    })
}

/// Precomputed harmonic buckets `H_r = sum_{n <= x, n = r mod q} 1/n`
/// so that each truncated spectrum value costs `O(q)`.
#[derive(Clone, Debug)]
pub struct TruncatedSpectrum {
    context: PrimeContext,
    x: u64,
    buckets: Vec<f64>,
}

impl TruncatedSpectrum {
    pub fn new(q: u64, x: u64) -> Result<Self> {
        let context = PrimeContext::new(q)?;
        Self::with_context(context, x)
    }

    pub fn with_context(context: PrimeContext, x: u64) -> Result<Self> {
        if x < 1 {
            return Err(Error::domain("truncation point must be >= 1"));
        }
        let q = context.q();
        let mut acc = vec![CompensatedSum::new(); q as usize];
        for n in 1..=x {
            acc[(n % q) as usize].add(1.0 / n as f64);
        }
        Ok(TruncatedSpectrum {
            context,
            x,
            buckets: acc.iter().map(CompensatedSum::value).collect(),
        })
    }

    /// `(1/(pi i)) sum_{n <= x, (n,q)=1} psi(t n-bar/q)/n`.
    pub fn point(&self, t: u64) -> Complex64 {
        let q = self.context.q();
        let t = t % q;
        let mut acc = CompensatedSum::new();
        for r in 1..q {
            let arg = (t * self.context.inverse(r)) % q;
            acc.add(psi_residue(arg, q) * self.buckets[r as usize]);
        }
        // 1/(pi i) = -i/pi
        Complex64::new(0.0, -acc.value() / PI)
    }

    pub fn spectrum(&self) -> Spectrum {
        let q = self.context.q();
        let values = (0..q).into_par_iter().map(|t| self.point(t).im).collect();
        Spectrum {
            q,
            values,
            method: SpectrumMethod::Truncated,
            max_real_residue: 0.0,
            truncation: Some(self.x),
        }
    }
}

/// Single truncated value; builds the bucket table on the fly.
pub fn spectrum_point_truncated(q: u64, t: u64, x: u64) -> Result<Complex64> {
    require_odd_prime(q)?;
    if t % q == 0 {
        return Err(Error::domain("t must be coprime to q"));
    }
    Ok(TruncatedSpectrum::new(q, x)?.point(t))
}

/// `s-hat_q(t)` through the character identity.
pub fn spectrum_point_characters(table: &CharacterTable, t: u64) -> Result<Complex64> {
    let q = table.q();
    if t % q == 0 {
        return Err(Error::domain("t must be coprime to q"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (1..q - 1).step_by(2) {
        let c = table.character(j);
        if let Some(l1) = c.l_one {
            acc += table.char_value(j, t as i64).conj() * c.l_zero * l1;
        }
    }
    // -1/(pi i phi(q)) = i/(pi phi(q))
    Ok(acc * Complex64::new(0.0, 1.0 / (PI * (q - 1) as f64)))
}

/// The whole spectrum through the character identity, evaluated as a DFT
/// over the index table.
pub fn spectrum_from_characters(table: &CharacterTable) -> Spectrum {
    let q = table.q();
    let order = (q - 1) as usize;
    let weights: Vec<Complex64> = (0..order)
        .map(|j| {
            let c = table.character(j as u64);
            match (j % 2, c.l_one) {
                (1, Some(l1)) => c.l_zero * l1,
                _ => Complex64::new(0.0, 0.0),
            }
        })
        .collect();
    // sum_j chi_j-bar(g^m) w_j = sum_j e(-jm/(q-1)) w_j
    let sums = chirp_z(&weights, Sign::Backward);
    let scale = Complex64::new(0.0, 1.0 / (PI * order as f64));
    let mut values = vec![0.0; q as usize];
    let mut residue: f64 = 0.0;
    for m in 0..order {
        let t = table.context().power(m as u64) as usize;
        let z = sums[m] * scale;
        residue = residue.max(z.re.abs());
        values[t] = z.im;
    }
    Spectrum {
        q,
        values,
        method: SpectrumMethod::Characters,
        max_real_residue: residue,
        truncation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_examples() {
        for m in [DedekindMethod::Direct, DedekindMethod::Reciprocity] {
            assert_eq!(dedekind_sum(5, 1, m).unwrap(), ExactRational::new(1, 5));
            assert_eq!(dedekind_sum(5, 2, m).unwrap(), ExactRational::zero());
            assert_eq!(dedekind_sum(7, 1, m).unwrap(), ExactRational::new(5, 14));
            assert_eq!(dedekind_sum(7, 6, m).unwrap(), ExactRational::new(-5, 14));
        }
        assert!(dedekind_sum(7, 14, DedekindMethod::Direct).is_err());
        assert!(dedekind_sum(9, 2, DedekindMethod::Direct).is_err());
    }

    #[test]
    fn s1_closed_form() {
        for q in [3u64, 5, 7, 11, 101, 1009] {
            let expect = ExactRational::new((q as i64 - 1) * (q as i64 - 2), 12 * q as i64);
            assert_eq!(dedekind_sum(q, 1, DedekindMethod::Reciprocity).unwrap(), expect);
        }
    }

    #[test]
    fn q3_character_route() {
        let table = CharacterTable::build(3, 100).unwrap();
        let z = spectrum_point_characters(&table, 1).unwrap();
        let expect = 1.0 / (18.0 * 3f64.sqrt());
        assert!(z.re.abs() < 1e-15);
        assert!((z.im - expect).abs() < 1e-15);
    }

    #[test]
    fn spectrum_zero_and_oddness() {
        for alg in [DftAlgorithm::Naive, DftAlgorithm::ChirpZ] {
            let s = spectrum_all(101, alg).unwrap();
            assert!(s.im(0).abs() < 1e-12);
            for t in 1..101 {
                assert!((s.im(t) + s.im(101 - t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_is_purely_imaginary() {
        let z = spectrum_point_truncated(101, 5, 2000).unwrap();
        assert_eq!(z.re, 0.0);
        assert!(spectrum_point_truncated(101, 0, 10).is_err());
    }
}
