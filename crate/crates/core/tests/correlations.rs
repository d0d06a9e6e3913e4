use proptest::prelude::*;
use sawspec::correlations::{
    b_bound, b_direct, b_exact, b_lattice_estimate, b_lattice_estimate_with_budget, discrete_bound, discrete_correlation, discrete_correlation_exact,
    discrete_k, CorrelationKey,
};
use sawspec::foundations::ExactRational;

fn closed_pair(n1: u64, n2: u64) -> ExactRational {
    let g = num_integer::gcd(n1, n2) as i64;
    ExactRational::new(g * g, 12 * (n1 * n2) as i64)
}

fn moduli(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=12, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permutation_invariance(m in moduli(2..=5), seed in any::<u64>()) {
        let mut shuffled = m.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize >> (i % 8)) % (i + 1));
        }
        prop_assert_eq!(b_exact(&m).unwrap(), b_exact(&shuffled).unwrap());
    }

    #[test]
    fn reduction_matches_direct_integration(m in moduli(2..=4)) {
        let direct = b_direct(&m, 1_000_000).unwrap();
        prop_assert_eq!(b_exact(&m).unwrap(), direct);
        let key = CorrelationKey::new(&m).unwrap();
        let reduced = b_direct(key.moduli(), 1_000_000).unwrap();
        prop_assert_eq!(key.extracted_scalar() * &reduced, b_exact(&m).unwrap());
    }

    #[test]
    fn pair_closed_form(n1 in 1u64..60, n2 in 1u64..60) {
        prop_assert_eq!(b_direct(&[n1, n2], 1_000_000).unwrap(), closed_pair(n1, n2));
    }

    #[test]
    fn size_bound(m in moduli(2..=6)) {
        let v = b_exact(&m).unwrap().abs();
        prop_assert!(v <= b_bound(&m), "{:?}", m);
    }

    #[test]
    fn odd_length_vanishes(m in moduli(1..=5)) {
        prop_assume!(m.len() % 2 == 1);
        prop_assert!(b_exact(&m).unwrap().is_zero());
    }
}

#[test]
fn reduced_key_shape() {
    let key = CorrelationKey::new(&[12, 9, 5, 1]).unwrap();
    for &n in key.moduli() {
        for (p, _) in sawspec::foundations::arith::factorize(n) {
            let count = key.moduli().iter().filter(|&&m| m % p == 0).count();
            assert!(count >= 2, "prime {p} divides only one modulus");
        }
    }
}

#[test]
fn lattice_error_decreases() {
    for m in [vec![1u64, 1], vec![2, 3], vec![1, 2], vec![3, 6]] {
        let exact = b_exact(&m).unwrap().to_f64();
        let errs: Vec<f64> = [50u64, 100, 200, 400]
            .iter()
            .map(|&k| (b_lattice_estimate(&m, k).unwrap() - exact).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{m:?}: {errs:?}");
    }
    // four moduli need about 8 K^3 candidates, past the default budget at K = 400
    let m = [3u64, 1, 1, 1];
    let exact = b_exact(&m).unwrap().to_f64();
    let errs: Vec<f64> = [50u64, 100, 200, 400]
        .iter()
        .map(|&k| (b_lattice_estimate_with_budget(&m, k, 1_000_000_000).unwrap() - exact).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{m:?}: {errs:?}");
    assert!(b_lattice_estimate(&m, 400).is_err());
    assert!((b_lattice_estimate(&[1, 1], 100).unwrap() - 1.0 / 12.0).abs() < 1e-3);
    assert!((b_lattice_estimate(&[2, 3], 200).unwrap() - 1.0 / 72.0).abs() < 1e-3);
    assert!(b_lattice_estimate(&[1, 2, 3], 50).is_err());
}

#[test]
fn discrete_examples() {
    assert_eq!(discrete_correlation_exact(7, &[1, 1]).unwrap(), ExactRational::new(5, 98));
    let base = discrete_correlation_exact(101, &[1, 1]).unwrap();
    for n in 2..=6 {
        assert_eq!(discrete_correlation_exact(101, &[n, n]).unwrap(), base);
    }
    for q in [1009u64, 10007, 100003] {
        let err = (discrete_correlation(q, &[1, 1]).unwrap() - 1.0 / 12.0).abs();
        assert!(err <= discrete_bound(q, &[1, 1]), "q={q}");
    }
}

#[test]
fn discrete_scan_within_ten_bounds() {
    for q in [101u64, 1009] {
        for len in [2usize, 4] {
            let mut stack = vec![vec![]];
            while let Some(t) = stack.pop() {
                if t.len() < len {
                    for n in t.last().copied().unwrap_or(1)..=6 {
                        let mut next = t.clone();
                        next.push(n);
                        stack.push(next);
                    }
                    continue;
                }
                if discrete_k(&t) as f64 >= q as f64 / len as f64 {
                    assert!(discrete_correlation(q, &t).is_err());
                    continue;
                }
                let err = (discrete_correlation(q, &t).unwrap() - b_exact(&t).unwrap().to_f64()).abs();
                assert!(err <= 10.0 * discrete_bound(q, &t), "q={q} {t:?}");
            }
        }
    }
}
