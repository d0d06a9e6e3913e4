use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use sawspec::characters::{gauss_sum_direct, l_one_series, CharacterTable, PrimeContext, DEFAULT_A_CUTOFF};
use std::f64::consts::PI;

#[test]
fn orthogonality_on_random_pairs() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for q in [7u64, 101, 1009] {
        let table = CharacterTable::build(q, 1000).unwrap();
        for _ in 0..40 {
            let a = rng.gen_range(1..q) as i64;
            let b = if rng.gen_bool(0.3) { a } else { rng.gen_range(1..q) as i64 };
            let sum: Complex64 = (0..q - 1).map(|j| table.char_value(j, a) * table.char_value(j, b).conj()).sum();
            let avg = sum / (q - 1) as f64;
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((avg - want).norm() < 1e-10, "q={q} a={a} b={b}: {avg}");
        }
    }
}

#[test]
fn gauss_sums() {
    for q in [5u64, 101, 1009] {
        let table = CharacterTable::build(q, 1000).unwrap();
        assert!((table.gauss_sum(0) + 1.0).norm() < 1e-10);
        for j in 1..q - 1 {
            let tau = table.gauss_sum(j);
            assert!((tau.norm() - (q as f64).sqrt()).abs() < 1e-10, "q={q} j={j}");
        }
        let ctx = PrimeContext::new(q).unwrap();
        for j in [1, 2, (q - 1) / 2] {
            assert!((table.gauss_sum(j) - gauss_sum_direct(&ctx, j)).norm() < 1e-9);
        }
    }
    let five = CharacterTable::build(5, 1000).unwrap();
    assert!((five.gauss_sum(2) - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-10);
}

#[test]
fn character_values_on_generator_and_minus_one() {
    let q = 101u64;
    let table = CharacterTable::build(q, 1000).unwrap();
    let g = table.context().primitive_root() as i64;
    for j in 0..q - 1 {
        let theta = 2.0 * PI * j as f64 / (q - 1) as f64;
        assert!((table.char_value(j, g) - Complex64::from_polar(1.0, theta)).norm() < 1e-12);
        assert!((table.char_value(j, 1) - 1.0).norm() < 1e-12);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert!((table.char_value(j, q as i64 - 1) - sign).norm() < 1e-12);
    }
}

#[test]
fn l_values_mod_three() {
    let table = CharacterTable::build(3, DEFAULT_A_CUTOFF).unwrap();
    let odd = table.character(1);
    assert!((odd.l_zero - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);
    let l1 = PI / (3.0 * 3f64.sqrt());
    assert!((odd.l_one.unwrap() - l1).norm() < 1e-12);
    assert!((l_one_series(&table, 1, 1_000_000).unwrap() - l1).norm() < 1e-4);
    assert!(table.character(0).l_zero.norm() < 1e-12);
}

#[test]
fn series_vs_functional_equation() {
    let q = 101u64;
    let x = 100_000u64;
    let table = CharacterTable::build(q, 1000).unwrap();
    for j in 1..q - 1 {
        let series = l_one_series(&table, j, x).unwrap();
        if table.is_odd(j) {
            let fe = table.character(j).l_one.unwrap();
            assert!((series - fe).norm() <= 10.0 * q as f64 / x as f64, "j={j}");
        } else {
            assert!(series.is_finite() && series.norm() > 0.0);
            assert!(table.character(j).l_zero.norm() < 1e-12);
        }
    }
}

#[test]
fn conjugate_pairs() {
    let q = 1009u64;
    let table = CharacterTable::build(q, 1000).unwrap();
    for j in 1..q - 1 {
        let (a, b) = (table.character(j), table.character(q - 1 - j));
        assert!((a.l_zero - b.l_zero.conj()).norm() < 1e-10);
        assert!((a.l_one.unwrap() - b.l_one.unwrap().conj()).norm() < 1e-10);
        assert!((a.a_q_chi - b.a_q_chi.conj()).norm() < 1e-10);
    }
}

#[test]
fn principal_a_value_is_one() {
    for q in [3u64, 101, 1009] {
        let table = CharacterTable::build(q, DEFAULT_A_CUTOFF).unwrap();
        let a0 = table.character(0).a_q_chi;
        assert!((a0 - 1.0).norm() <= table.a_tail_bound(), "q={q}: {a0}");
    }
}

#[test]
fn a_series_tail_shrinks_with_cutoff() {
    let q = 101u64;
    let cutoffs = [2_000u64, 8_000, 32_000];
    let tables: Vec<_> = cutoffs.iter().map(|&n| CharacterTable::build(q, n).unwrap()).collect();
    for j in [1u64, 2, 25, 50] {
        let v: Vec<Complex64> = tables.iter().map(|t| t.character(j).a_q_chi).collect();
        let first = (v[1] - v[0]).norm();
        let second = (v[2] - v[1]).norm();
        assert!(first >= 1.5 * second, "j={j}: {first} vs {second}");
    }
}

#[test]
fn fast_table_matches_direct_build() {
    let fast = CharacterTable::build(101, 2000).unwrap();
    let direct = CharacterTable::build_direct(101, 2000).unwrap();
    for j in 0..100 {
        let (a, b) = (fast.character(j), direct.character(j));
        assert!((a.gauss_sum - b.gauss_sum).norm() < 1e-9);
        assert!((a.l_zero - b.l_zero).norm() < 1e-10);
        assert!((a.a_q_chi - b.a_q_chi).norm() < 1e-10);
    }
}
