//! The sawtooth `psi`, its right-continuous variant, the Fejer kernel and
//! the Fejer-smoothed sawtooth.

use std::f64::consts::PI;

use super::rational::ExactRational;

/// `{x} - 1/2` off the integers, `0` on them. With `plus_variant` the value
/// at integers is `1/2` instead (the right limit).
pub fn psi(x: f64, plus_variant: bool) -> f64 {
    let fl = x.floor();
    if fl == x {
        return if plus_variant { 0.5 } else { 0.0 };
    }
    if x < 0.0 {
        // evaluated through the positive branch so oddness is exact
        return -psi(-x, false);
    }
    (x - fl) - 0.5
}

/// `psi(r/q)` for an integer residue, as an exact-denominator double. The
/// value is `(2 (r mod q) - q) / (2q)`, or 0 when `q | r`.
#[inline]
pub fn psi_residue(r: u64, q: u64) -> f64 {
    let r = r % q;
    if r == 0 {
        0.0
    } else {
        (2.0 * r as f64 - q as f64) / (2.0 * q as f64)
    }
}

/// `psi(num/den)` exactly.
pub fn psi_exact(num: i64, den: u64) -> ExactRational {
    let r = num.rem_euclid(den as i64);
    if r == 0 {
        ExactRational::zero()
    } else {
        ExactRational::new(2 * r as i128 - den as i128, 2 * den as i128)
    }
}

/// Fejer kernel `K_N(x) = (1/(N+1)) (sin(pi(N+1)x) / sin(pi x))^2`.
pub fn fejer(n: u32, x: f64) -> f64 {
    let s = (PI * x).sin();
    if s.abs() < 1e-12 {
        // limit at integers
        return (n + 1) as f64;
    }
    let r = (PI * (n + 1) as f64 * x).sin() / s;
    r * r / (n + 1) as f64
}

/// `psi_N(x) = i sum_{0<|k|<=N} e(kx) (1 - |k|/(N+1)) / (2 pi k)`, folded
/// into the real sine series `-sum_{k=1}^N (1 - k/(N+1)) sin(2 pi k x)/(pi k)`.
pub fn psi_smoothed(n: u32, x: f64) -> f64 {
    let frac = x - x.floor();
    let theta = 2.0 * PI * frac;
    let scale = (n + 1) as f64;
    let mut acc = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        acc += (1.0 - kf / scale) * (kf * theta).sin() / kf;
    }
    -acc / PI
}

/// Distance to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}
