mod common;

use common::adaptive_simpson;
use rand::{Rng, SeedableRng};
use sawspec::phi_error::{
    model_mean_abs_gap, pair_correlation_stat, pair_integral_mean, r_sign_changes, r_values, rtilde_moment_exact,
    rtilde_moment_with, rtilde_skewness, rtilde_truncated_model, PhiAccumulator,
};
use std::f64::consts::PI;

const C3: f64 = 3.0 / (PI * PI);

#[test]
fn accumulator_prefix_sums() {
    let acc = PhiAccumulator::new(10_000).unwrap();
    assert_eq!(acc.prefix(10), 32);
    for m in 1..=10_000 {
        assert_eq!(acc.prefix(m) - acc.prefix(m - 1), acc.phi(m) as u128);
        assert!(acc.prefix(m) > acc.prefix(m - 1));
    }
}

#[test]
fn r_examples() {
    let acc = PhiAccumulator::new(100).unwrap();
    let (r1, _) = r_values(1.0, &acc).unwrap();
    assert!((r1 - (1.0 - C3)).abs() < 1e-12);
    let (r10, rt10) = r_values(10.0, &acc).unwrap();
    let want = 32.0 - 300.0 / (PI * PI);
    assert!((r10 - want).abs() < 1e-12);
    assert!((rt10 - (want / 10.0 - 0.2)).abs() < 1e-12);
    let (r, rt) = r_values(10.5, &acc).unwrap();
    assert!((rt - r / 10.5).abs() < 1e-15);
    assert!(r_values(0.0, &acc).is_err());
    assert!(r_values(101.0, &acc).is_err());
}

#[test]
fn second_moment_on_short_range_matches_quadrature() {
    let acc = PhiAccumulator::new(10).unwrap();
    let mut total = 0.0;
    for m in 0..10u64 {
        // on [0, 1) the prefix sum is zero, so there is no 1/u term
        let s = acc.prefix(m) as f64;
        let f = |u: f64| if m == 0 { -C3 * u } else { s / u - C3 * u }.powi(2);
        total += adaptive_simpson(&f, m as f64, m as f64 + 1.0, 1e-13);
    }
    let exact = rtilde_moment_exact(10, 2).unwrap();
    assert!((exact - total / 10.0).abs() < 1e-10, "{exact} vs {}", total / 10.0);
}

#[test]
fn single_intervals_match_quadrature() {
    let acc = PhiAccumulator::new(3000).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let m = rng.gen_range(2..2999u64);
        let ell = rng.gen_range(1..=4u32);
        let hi = rtilde_moment_with(&acc, m + 1, ell).unwrap() * (m + 1) as f64;
        let lo = rtilde_moment_with(&acc, m, ell).unwrap() * m as f64;
        let s = acc.prefix(m) as f64;
        let f = |u: f64| (s / u - C3 * u).powi(ell as i32);
        let quad = adaptive_simpson(&f, m as f64, m as f64 + 1.0, 1e-12);
        assert!((hi - lo - quad).abs() < 1e-10, "m={m} l={ell}: {} vs {quad}", hi - lo);
    }
}

#[test]
fn odd_moments_and_skewness_small() {
    let acc = PhiAccumulator::new(1_000_000).unwrap();
    for ell in [1, 3] {
        assert!(rtilde_moment_with(&acc, 1_000_000, ell).unwrap().abs() <= 0.02);
    }
    assert!(rtilde_skewness(&acc, 1_000_000).unwrap().abs() <= 0.05);
}

#[test]
fn r_takes_both_signs() {
    let acc = PhiAccumulator::new(10_000).unwrap();
    let signs = r_sign_changes(&acc, 10_000).unwrap();
    assert!(signs.positive_seen && signs.negative_seen);
    assert!(signs.changes > 0);
}

#[test]
fn truncated_model() {
    assert_eq!(rtilde_truncated_model(10.5, 1).unwrap(), 0.0);
    assert!((rtilde_truncated_model(10.5, 2).unwrap() + 0.125).abs() < 1e-15);
    let acc = PhiAccumulator::new(100_000).unwrap();
    assert!(model_mean_abs_gap(&acc, 1000, 1000.0, 1e5, 5000).unwrap() <= 0.05);
}

#[test]
fn pair_statistics() {
    assert!((pair_integral_mean(3, 4, 12_000).unwrap() - 1.0 / 144.0).abs() < 1e-15);
    assert!((pair_correlation_stat(1, 1_000_000).unwrap() - 1.0 / 12.0).abs() < 1e-12);
    let s: Vec<f64> = [8, 16, 32].iter().map(|&n| pair_correlation_stat(n, 1_000_000).unwrap()).collect();
    for w in s.windows(2) {
        assert!((w[1] / w[0]).log2() < 2.0, "{s:?}");
    }
}
