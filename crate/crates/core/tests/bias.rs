use sawspec::bias::{
    c1_pattern, c2_pair, c2_pattern, ck_all, ck_all_characters, ck_all_truncated, ck_point, mean_square_gap, CkMethod,
    Pattern,
};
use sawspec::characters::{CharacterTable, DEFAULT_A_CUTOFF};

#[test]
fn ck_is_odd_and_real() {
    for q in [101u64, 1009] {
        let table = CharacterTable::build(q, DEFAULT_A_CUTOFF).unwrap();
        let ck = ck_all_characters(&table).unwrap();
        assert!(ck.max_imaginary() <= 1e-10);
        assert!(ck.max_asymmetry() <= 1e-10);
        for k in 1..q as i64 {
            assert_eq!(ck.get(k) + ck.get(q as i64 - k), 0.0, "q={q} k={k}");
            assert_eq!(ck.get(-k), -ck.get(k));
            assert!(ck.get(k).is_finite());
        }
        assert!(ck.values().iter().sum::<f64>().abs() < 1e-8);
    }
}

#[test]
fn pointwise_routes_match_vectors() {
    let q = 101u64;
    let table = CharacterTable::build(q, DEFAULT_A_CUTOFF).unwrap();
    let full = ck_all(q, CkMethod::Characters(&table)).unwrap();
    let trunc = ck_all(q, CkMethod::Truncated { n: 500 }).unwrap();
    for k in [1i64, 2, 17, 50, 100] {
        let p = ck_point(q, k, CkMethod::Characters(&table)).unwrap();
        assert!((p - full.get(k)).abs() < 1e-10, "k={k}");
        let t = ck_point(q, k, CkMethod::Truncated { n: 500 }).unwrap();
        assert!((t - trunc.get(k)).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn route_gap_shrinks_with_truncation() {
    let q = 1009u64;
    let table = CharacterTable::build(q, DEFAULT_A_CUTOFF).unwrap();
    let full = ck_all_characters(&table).unwrap();
    let mut last = f64::INFINITY;
    for b in [50u64, 100, 200] {
        let gap = mean_square_gap(&full, &ck_all_truncated(q, b).unwrap());
        assert!(gap <= 10.0 / (b as f64).sqrt(), "B={b}: {gap}");
        assert!(gap < last);
        last = gap;
    }
}

#[test]
fn c1_sums_to_zero_over_pairs() {
    let q = 5u64;
    let mut total = 0.0;
    for a in 1..q as i64 {
        for b in 1..q as i64 {
            total += c1_pattern(&Pattern::new(q, &[a, b]).unwrap());
        }
    }
    assert!(total.abs() < 1e-12, "{total}");
}

#[test]
fn c1_repeat_removal() {
    let q = 11u64;
    let phi = (q - 1) as f64;
    let plain = c1_pattern(&Pattern::new(q, &[1, 2, 3, 4]).unwrap());
    let repeat = c1_pattern(&Pattern::new(q, &[1, 1, 3, 4]).unwrap());
    assert!((plain - repeat - phi / 2.0).abs() < 1e-12);
}

#[test]
fn c2_three_term_patterns() {
    let table = CharacterTable::build(3, DEFAULT_A_CUTOFF).unwrap();
    let pair = |a, b| c2_pair(&table, a, b).unwrap();
    let p = |r: &[i64]| c2_pattern(&table, &Pattern::new(3, r).unwrap()).unwrap();
    assert!((p(&[1, 2, 1]) - (pair(1, 2) + pair(2, 1) - 0.5)).abs() < 1e-12);
    assert!((p(&[1, 2, 2]) - (pair(1, 2) + pair(2, 2) + 0.5)).abs() < 1e-12);
    assert_eq!(p(&[1, 2]), pair(1, 2));
}

#[test]
fn c2_pinned_and_dual_build() {
    let fast = CharacterTable::build(101, DEFAULT_A_CUTOFF).unwrap();
    let direct = CharacterTable::build_direct(101, DEFAULT_A_CUTOFF).unwrap();
    let a = c2_pair(&fast, 1, 2).unwrap();
    let b = c2_pair(&direct, 1, 2).unwrap();
    assert!((a - b).abs() < 1e-8);
    assert!((a - 18.411_653_043_8).abs() < 1e-8, "{a}");
}

#[test]
fn c2_tracks_ck_of_the_gap() {
    let q = 101u64;
    let table = CharacterTable::build(q, DEFAULT_A_CUTOFF).unwrap();
    let ck = ck_all_characters(&table).unwrap();
    let qf = q as f64;
    let bound = 10.0 * qf.ln().powi(2) / qf.sqrt();
    for (a, b) in [(1i64, 2i64), (3, 40), (7, 99), (50, 51)] {
        let c2 = c2_pair(&table, a, b).unwrap();
        assert!((c2 / qf - ck.get(b - a)).abs() <= bound, "({a}, {b})");
    }
}
