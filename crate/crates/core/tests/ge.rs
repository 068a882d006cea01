mod common;

use common::*;
use growthbound::ge::{
    eliminate, growth_factor, iterate, solve_linear_system, solve_linear_system_f64,
    wilkinson_matrix, FloatConfig, PivotStrategy,
};
use growthbound::svd::condition_number;
use growthbound::{Matrix, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn identity_pivots() {
    let t = eliminate(&Matrix::<BigRational>::identity(5), PivotStrategy::Complete).unwrap();
    assert!(t.pivots().iter().all(|p| p.is_one()));
    assert_eq!(growth_factor(&t), 1.0);
}

#[test]
fn wilkinson_matrix_pattern() {
    let w: Matrix<BigRational> = wilkinson_matrix(3);
    let expect = growthbound::ge::rational_matrix(&[&[1, 0, 1], &[-1, 1, 1], &[-1, -1, 1]]).unwrap();
    assert_eq!(w, expect);
    let one: Matrix<f64> = wilkinson_matrix(1);
    assert_eq!(one.data(), &[1.0]);
}

#[test]
fn wilkinson_three_partial_pivots() {
    let t = eliminate(&wilkinson_matrix::<BigRational>(3), PivotStrategy::Partial).unwrap();
    let p: Vec<BigRational> = t.pivots().to_vec();
    assert_eq!(p, vec![r(1, 1), r(1, 1), r(4, 1)]);
}

#[test]
fn partial_pivoting_growth_is_power_of_two() {
    for n in 1..=30usize {
        let t = eliminate(&wilkinson_matrix::<BigRational>(n), PivotStrategy::Partial).unwrap();
        let expect = BigRational::from_integer(Pow::pow(BigInt::from(2), n as u32 - 1));
        assert_eq!(t.growth_factor_exact(), expect, "n = {n}");
    }
}

#[test]
fn pivot_products_match_bareiss() {
    let mut g = rng(11);
    for case in 0..500 {
        let n = g.random_range(1..=8);
        let a = random_rational(&mut g, n, n);
        let det = bareiss_det(&a);
        if det.is_zero() {
            continue;
        }
        let strategy = if case % 2 == 0 { PivotStrategy::Complete } else { PivotStrategy::Partial };
        let t = eliminate(&a, strategy).unwrap();
        let prod = t.pivots().iter().fold(BigRational::one(), |s, p| s * p);
        assert_eq!(prod.abs(), det.abs(), "case {case}");
    }
}

#[test]
fn six_by_six_against_cofactors() {
    let mut g = rng(12);
    for _ in 0..20 {
        let a = random_rational(&mut g, 6, 6);
        let det = cofactor_det(&to_rows(&a));
        assert_eq!(det, bareiss_det(&a));
        if det.is_zero() {
            continue;
        }
        let t = eliminate(&a, PivotStrategy::Complete).unwrap();
        let prod = t.pivots().iter().fold(BigRational::one(), |s, p| s * p);
        assert_eq!(prod.abs(), det.abs());
    }
}

#[test]
fn leading_minors_of_iterates() {
    let mut g = rng(13);
    for _ in 0..40 {
        let n = g.random_range(2..=7);
        let a = random_rational(&mut g, n, n);
        if bareiss_det(&a).is_zero() {
            continue;
        }
        let t = eliminate(&a, PivotStrategy::Complete).unwrap();
        for k in 1..=n {
            let ak = iterate(&t, k).unwrap();
            let prod = (1..=k).fold(BigRational::one(), |s, i| s * t.pivot(i));
            assert_eq!(prod.abs(), bareiss_det(&ak).abs(), "k = {k}");
            assert_eq!(ak.get(0, 0), t.pivot(k));
            for e in ak.data() {
                assert!(e.abs() <= t.pivot(k).abs());
            }
            assert_eq!(t.max_entry(k).abs(), t.pivot(k).abs());
        }
    }
}

#[test]
fn reconstruction_is_exact() {
    let mut g = rng(14);
    for _ in 0..30 {
        let n = g.random_range(1..=7);
        let a = random_rational(&mut g, n, n);
        if bareiss_det(&a).is_zero() {
            continue;
        }
        for strategy in [PivotStrategy::Complete, PivotStrategy::Partial] {
            let t = eliminate(&a, strategy).unwrap();
            let pa = a.permuted(t.row_perm(), t.col_perm());
            assert_eq!(t.lower().matmul(t.upper()).unwrap(), pa);
            assert_eq!(iterate(&t, n).unwrap(), pa);
        }
    }
}

#[test]
fn iterate_matches_rank_one_update() {
    let mut g = rng(15);
    let a = loop {
        let a = random_rational(&mut g, 4, 4);
        if !bareiss_det(&a).is_zero() {
            break a;
        }
    };
    let t = eliminate(&a, PivotStrategy::Complete).unwrap();
    let m = iterate(&t, 4).unwrap();
    let m11 = m.get(0, 0).clone();
    let direct = Matrix::from_fn(3, 3, |i, j| {
        m.get(i + 1, j + 1).clone() - m.get(i + 1, 0).clone() * m.get(0, j + 1).clone() / m11.clone()
    });
    assert_eq!(iterate(&t, 3).unwrap(), direct);
}

#[test]
fn complete_pivoting_growth_is_permutation_invariant() {
    let mut g = rng(16);
    for _ in 0..30 {
        let n = g.random_range(2..=7);
        let a = random_rational(&mut g, n, n);
        if bareiss_det(&a).is_zero() {
            continue;
        }
        let mut rp: Vec<usize> = (0..n).collect();
        let mut cp: Vec<usize> = (0..n).collect();
        rp.shuffle(&mut g);
        cp.shuffle(&mut g);
        let b = a.permuted(&rp, &cp);
        let ga = eliminate(&a, PivotStrategy::Complete).unwrap().growth_factor_exact();
        let gb = eliminate(&b, PivotStrategy::Complete).unwrap().growth_factor_exact();
        // Ties may pick different pivots, so compare growth only when the
        // entry moduli are distinct.
        let mut mods: Vec<BigRational> = a.data().iter().map(|x| x.abs()).collect();
        mods.sort();
        mods.dedup();
        if mods.len() == n * n {
            assert_eq!(ga, gb);
        }
    }
}

#[test]
fn rational_solve_is_exact() {
    let mut g = rng(17);
    for _ in 0..20 {
        let n = g.random_range(1..=6);
        let a = random_rational(&mut g, n, n);
        if bareiss_det(&a).is_zero() {
            continue;
        }
        let x: Vec<BigRational> = (0..n).map(|_| r(g.random_range(-5..=5), 3)).collect();
        let b = a.matvec(&x).unwrap();
        for strategy in [PivotStrategy::Complete, PivotStrategy::Partial] {
            assert_eq!(solve_linear_system(&a, &b, strategy).unwrap(), x);
        }
    }
    let id = Matrix::<f64>::identity(4);
    let b = vec![1.5, -2.0, 0.25, 7.0];
    assert_eq!(
        solve_linear_system_f64(&id, &b, PivotStrategy::Partial, FloatConfig::BINARY64).unwrap(),
        b
    );
}

#[test]
fn wilkinson_system_partial_vs_complete() {
    let n = 100;
    let mut g = rng(0);
    let x0: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut g)).collect();
    let a: Matrix<f64> = wilkinson_matrix(n);
    let b = a.matvec(&x0).unwrap();
    let exact: Vec<f64> = solve_linear_system(
        &wilkinson_matrix::<BigRational>(n),
        &b.iter().map(|v| BigRational::from_float(*v).unwrap()).collect::<Vec<_>>(),
        PivotStrategy::Partial,
    )
    .unwrap()
    .iter()
    .map(growthbound::scalar::rational_to_f64)
    .collect();
    let err = |x: &[f64]| {
        let num: f64 = x.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = exact.iter().map(|b| b * b).sum();
        (num / den).sqrt()
    };
    let pp = solve_linear_system_f64(&a, &b, PivotStrategy::Partial, FloatConfig::BINARY64).unwrap();
    let cp = solve_linear_system_f64(&a, &b, PivotStrategy::Complete, FloatConfig::BINARY64).unwrap();
    assert!(err(&pp) > 1e-2);
    assert!(err(&cp) < 1e-10);
    let c = condition_number(&a).unwrap();
    assert!((c - 45.0).abs() <= 1.0, "{c}");
}

#[test]
fn small_wilkinson_system_is_harmless() {
    let a: Matrix<f64> = wilkinson_matrix(5);
    let x0 = vec![0.3, -1.2, 2.5, 0.7, -0.4];
    let b = a.matvec(&x0).unwrap();
    for s in [PivotStrategy::Partial, PivotStrategy::Complete] {
        let x = solve_linear_system_f64(&a, &b, s, FloatConfig::BINARY64).unwrap();
        for (u, v) in x.iter().zip(&x0) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

#[test]
fn reduced_precision_loses_accuracy() {
    let a: Matrix<f64> = wilkinson_matrix(30);
    let x0 = vec![1.0 / 3.0; 30];
    let b = a.matvec(&x0).unwrap();
    let lo = FloatConfig::new(12).unwrap();
    let x = solve_linear_system_f64(&a, &b, PivotStrategy::Partial, lo).unwrap();
    let err = x.iter().zip(&x0).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(err > 1e-4);
    assert!(FloatConfig::new(1).is_err());
}

#[test]
fn complex_modes_agree() {
    let mut g = rng(18);
    for _ in 0..10 {
        let a = random_c64(&mut g, 5);
        let exact = c64_to_exact(&a);
        let det = complex_det(&exact);
        let t = eliminate(&exact, PivotStrategy::Complete).unwrap();
        let prod = t.pivots().iter().fold(
            num_complex::Complex::new(BigRational::one(), BigRational::zero()),
            |s, p| s * p.clone(),
        );
        assert_eq!(prod.abs_sq(), det.abs_sq());
        let tf = eliminate(&a, PivotStrategy::Complete).unwrap();
        let lnf: f64 = tf.pivot_moduli().iter().map(|p| p.ln()).sum();
        let lne = 0.5 * growthbound::scalar::rational_to_f64(&det.abs_sq()).ln();
        assert!((lnf - lne).abs() < 1e-10);
    }
}

#[test]
fn complete_pivoting_growth_is_small_on_wilkinson() {
    let t = eliminate(&wilkinson_matrix::<f64>(100), PivotStrategy::Complete).unwrap();
    assert!(growth_factor(&t) <= 2.0 + 1e-12);
}

#[test]
fn singular_input_is_reported() {
    let a = growthbound::ge::rational_matrix(&[&[1, 2], &[2, 4]]).unwrap();
    assert!(matches!(
        eliminate(&a, PivotStrategy::Complete),
        Err(growthbound::Error::SingularMatrix { .. })
    ));
    let f = Matrix::<f64>::zeros(2, 3);
    assert!(matches!(
        eliminate(&f, PivotStrategy::Complete),
        Err(growthbound::Error::DimensionMismatch(_))
    ));
}
