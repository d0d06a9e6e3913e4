use proptest::prelude::*;
use sawspec::foundations::arith::factorize;
use sawspec::foundations::sieve::primes_up_to;
use sawspec::foundations::{coeff_a, coeff_b, constant_c, fejer, psi, psi_smoothed, CoefficientSeries, ExactRational, SieveTables};

fn phi_by_factoring(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

#[test]
fn phi_prefix_sum_matches_direct_factoring() {
    let sieve = SieveTables::new(1_000_000).unwrap();
    let from_sieve: u64 = (1..=1_000_000).map(|n| sieve.euler_phi(n)).sum();
    let direct: u64 = (1..=1_000_000).map(phi_by_factoring).sum();
    assert_eq!(from_sieve, direct);
    assert_eq!(sieve.euler_phi(10), 4);
    assert_eq!(sieve.mobius(10), 1);
    assert_eq!(sieve.mobius(9), 0);
}

#[test]
fn b_is_the_divisor_convolution_of_a() {
    for n in 1..=10_000u64 {
        let mut conv = ExactRational::zero();
        for u in (1..=n).filter(|u| n % u == 0) {
            conv += coeff_a(u) * ExactRational::new(1, (n / u) as i64);
        }
        assert_eq!(coeff_b(n), conv, "n = {n}");
    }
}

#[test]
fn b_of_fifteen_by_hand() {
    assert_eq!(coeff_b(15), ExactRational::new(1, 3));
    assert_eq!(coeff_b(15), coeff_b(3) * coeff_b(5));
}

#[test]
fn absolute_a_tail_decays_like_inverse_square_root() {
    // sum |a(n)| over all n is the Euler product with factors 3/2 at p = 2
    // and 1 + 3/(p(p-2)) at odd p.
    let cutoff = 10_000_000u64;
    let mut log_total = 1.5f64.ln();
    for p in primes_up_to(cutoff).into_iter().skip(1) {
        let pf = p as f64;
        log_total += (3.0 / (pf * (pf - 2.0))).ln_1p();
    }
    let cf = cutoff as f64;
    log_total += 3.0 / (cf * cf.ln());
    let total = log_total.exp();

    let series = CoefficientSeries::new(100_000, None).unwrap();
    let mut partial = 0.0;
    let mut points = Vec::new();
    let mut next = 100u64;
    for n in 1..=100_000u64 {
        partial += series.a(n).abs();
        if n == next {
            points.push(((n as f64).ln(), (total - partial).ln()));
            next *= 10;
        }
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= -0.4, "fitted exponent {slope}");
}

#[test]
fn constant_is_twice_twin_prime_constant() {
    let c = constant_c(None, 1e-9).unwrap();
    assert!((c.value - 1.320_323_631_693_739).abs() < 1e-9, "{}", c.value);
    assert!(c.error_bound <= 1e-9);
    let without3 = constant_c(Some(3), 1e-9).unwrap();
    assert!((without3.value / c.value - 4.0 / 3.0).abs() < 1e-12);
    let big = constant_c(Some(1_000_000_007), 1e-9).unwrap();
    assert!((big.value - c.value).abs() < 2e-9);
}

#[test]
fn fejer_nonnegative_on_grid() {
    for n in [1u32, 2, 5, 17, 64] {
        for i in 0..=4000 {
            let x = -1.0 + i as f64 / 2000.0;
            assert!(fejer(n, x) >= 0.0, "N={n} x={x}");
        }
    }
}

#[test]
fn smoothed_sawtooth_single_term() {
    let v = psi_smoothed(1, 0.25);
    assert!((v + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15, "{v}");
    assert_eq!(psi_smoothed(9, 0.0), 0.0);
}

#[test]
fn smoothed_sawtooth_error_profile() {
    for n in [10u32, 50, 200] {
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let dist = x.min(1.0 - x);
            let bound = (1.0f64).min(1.0 / (n as f64 * dist));
            assert!((psi_smoothed(n, x) - psi(x, false)).abs() <= bound, "N={n} x={x}");
        }
    }
}

proptest! {
    #[test]
    fn sawtooth_is_odd(x in -1e6f64..1e6) {
        prop_assert_eq!(psi(x, false) + psi(-x, false), 0.0);
    }

    #[test]
    fn sawtooth_has_period_one(x in -1e3f64..1e3, k in -1000i32..1000) {
        let shifted = x + k as f64;
        // Shifting can round when x and x+k differ in exponent.
        let err = (psi(shifted, false) - psi(x, false)).abs();
        prop_assert!(err <= 4.0 * f64::EPSILON * shifted.abs().max(x.abs()).max(1.0));
    }

    #[test]
    fn sawtooth_range(x in -1e9f64..1e9) {
        let v = psi(x, false);
        prop_assert!((-0.5..=0.5).contains(&v));
    }
}
