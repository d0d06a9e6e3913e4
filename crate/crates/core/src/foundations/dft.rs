//! Discrete Fourier transforms of arbitrary length.
//!
//! Prime (and other non-power-of-two) lengths are handled with the chirp-z
//! (Bluestein) identity `nk = (n^2 + k^2 - (k-n)^2)/2`, which turns the
//! transform into a linear convolution evaluated with power-of-two FFTs.
//! The quadratic chirp phases are reduced modulo `2N` in integer arithmetic
//! before conversion to floating point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Direction of the exponential: `Forward` uses `e(+nk/N)`, `Backward`
/// uses `e(-nk/N)`. No normalisation is applied either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Forward,
    Backward,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Forward => 1.0,
            Sign::Backward => -1.0,
        }
    }
}

/// `e(r / n)` with the fraction reduced first.
#[inline]
pub fn unit_root(r: u64, n: u64) -> Complex64 {
    let r = r % n;
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// `X_k = sum_n x_n e(sign * nk / N)` in `O(N^2)`; the oracle for
/// [`chirp_z`].
pub fn naive_dft(input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = input.len() as u64;
    (0..n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let w = unit_root((j as u64 * k) % n, n);
                    let w = if sign == Sign::Backward { w.conj() } else { w };
                    x * w
                })
                .sum()
        })
        .collect()
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// Linear convolution of two complex sequences through zero-padded
/// power-of-two FFTs.
pub fn linear_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let m = out_len.next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft_in_place(&mut fa, true);
    let scale = 1.0 / m as f64;
    fa.truncate(out_len);
    fa.iter_mut().for_each(|x| *x *= scale);
    fa
}

/// Cyclic convolution `c_k = sum_j a_j b_{(k - j) mod N}` of two real
/// sequences of equal length `N`.
pub fn cyclic_convolution_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "cyclic convolution needs equal lengths");
    let n = a.len();
    let ca: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let cb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let lin = linear_convolution(&ca, &cb);
    let mut out = vec![0.0; n];
    for (i, z) in lin.iter().enumerate() {
        out[i % n] += z.re;
    }
    out
}

/// Chirp-z evaluation of the length-`N` DFT, `O(N log N)` for any `N`.
pub fn chirp_z(input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        // rustfft forward is e(-nk/N)
        fft_in_place(&mut buf, sign == Sign::Forward);
        return buf;
    }
    let two_n = 2 * n as u64;
    let s = sign.value();
    let chirp: Vec<Complex64> = (0..n as u64)
        .map(|j| {
            let r = (j * j) % two_n;
            Complex64::from_polar(1.0, s * PI * r as f64 / n as f64)
        })
        .collect();
    let m = (2 * n - 1).next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        fa[j] = input[j] * chirp[j];
    }
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    fb[0] = chirp[0].conj();
    for j in 1..n {
        let c = chirp[j].conj();
        fb[j] = c;
        fb[m - j] = c;
    }
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft_in_place(&mut fa, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| fa[k] * scale * chirp[k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_signal(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn chirp_matches_naive_for_awkward_lengths() {
        for (i, &n) in [1usize, 2, 3, 7, 16, 100, 101, 199, 1008].iter().enumerate() {
            let x = random_signal(n, i as u64);
            for sign in [Sign::Forward, Sign::Backward] {
                let fast = chirp_z(&x, sign);
                let slow = naive_dft(&x, sign);
                let err = fast
                    .iter()
                    .zip(&slow)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-9 * (n as f64).max(1.0), "n={n} err={err}");
            }
        }
    }

    #[test]
    fn cyclic_convolution_matches_direct() {
        let a: Vec<f64> = (0..13).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..13).map(|i| (i as f64 * 0.7).cos()).collect();
        let fast = cyclic_convolution_real(&a, &b);
        for k in 0..13 {
            let direct: f64 = (0..13).map(|j| a[j] * b[(k + 13 - j) % 13]).sum();
            assert!((fast[k] - direct).abs() < 1e-12);
        }
    }
}
