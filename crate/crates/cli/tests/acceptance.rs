//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use growthbound::asymptotics::{
    check_base_case, check_g_tail, constant_expression, gamma_of_t, optimal_t, theorem1_bound_lower,
    ConstantsTable, BETA,
};
use growthbound::det_bounds::relaxation::{case_split_factor, entropy_factor, maximize_unit_interval};
use growthbound::det_bounds::{
    hadamard_bound_sq, ln_sv_det_bound, longrange_pivot_rhs_sq, lowrank_hadamard_rhs_sq,
};
use growthbound::ge::{eliminate, growth_factor, wilkinson_matrix, PivotStrategy};
use growthbound::lp::model::sandwich_log_pivots;
use growthbound::lp::{
    build_geomean_lp, build_improved_lp, build_wilkinson_lp, certify, check_log_pivot_feasibility,
    exact_simplex, solve_float, wilkinson_closed_form_dual, wilkinson_closed_form_lower, ClosedFormObjective, FeasibilityProgram,
    LpInstance, Selector, Status,
};
use growthbound::scalar::{rational_to_f64, ComplexRational};
use growthbound::{Matrix, Scalar};
use growthbound_cli::demo::appendix_a;
use growthbound_cli::figure::geometric_samples;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const LP_TOL: f64 = 1e-7;
const SV_SLACK: f64 = 1e-8;
const PROPERTY_CASES: usize = 1000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn within(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

fn wilkinson_sum(n: usize) -> f64 {
    0.5 * ((n as f64).ln() + geomean_sum(n))
}

fn geomean_sum(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln() / (k - 1) as f64).sum()
}

fn float_optimum(lp: &LpInstance) -> Option<f64> {
    let sol = solve_float(lp).ok()?;
    (sol.status == Status::Optimal).then_some(sol.objective)
}

/// Certified band bound, or `None` when solving or certification fails.
fn certified_band(n: usize) -> Option<BigRational> {
    let lp = build_improved_lp(n, Selector::Band { width: 4 }).ok()?;
    let sol = solve_float(&lp).ok()?;
    let c = certify(&lp, &sol).ok()?;
    c.verified.then_some(c.bound)
}

fn wilkinson_certified(n: usize) -> BigRational {
    if n < 2 {
        return BigRational::zero();
    }
    wilkinson_closed_form_dual(n, ClosedFormObjective::HeadTail)
        .expect("closed form for n >= 2")
        .bound
}

// Independent determinant oracles: plain elimination with the first nonzero
// pivot, no relation to the library's pivoting.

fn det_real(m: &Matrix<BigRational>) -> BigRational {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let v = &a[k][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}

fn det_complex(m: &Matrix<ComplexRational>) -> ComplexRational {
    let n = m.rows();
    let mut a: Vec<Vec<ComplexRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = Complex::new(BigRational::one(), BigRational::zero());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Complex::new(BigRational::zero(), BigRational::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det = det * a[k][k].clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / a[k][k].clone();
            for j in k..n {
                let v = a[k][j].clone() * f.clone();
                a[i][j] = a[i][j].clone() - v;
            }
        }
    }
    det
}

fn rational(g: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix<BigRational> {
    Matrix::from_fn(n, m, |_, _| {
        BigRational::new(g.random_range(-9..=9).into(), g.random_range(1..=4).into())
    })
}

fn unit(g: &mut ChaCha8Rng, n: usize, m: usize, den: i64) -> Matrix<BigRational> {
    Matrix::from_fn(n, m, |_, _| BigRational::new(g.random_range(-den..=den).into(), den.into()))
}

fn c64(g: &mut ChaCha8Rng, n: usize) -> Matrix<Complex64> {
    Matrix::from_fn(n, n, |_, _| Complex64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)))
}

fn exact_c(m: &Matrix<Complex64>) -> Matrix<ComplexRational> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m.get(i, j);
        Complex::new(
            BigRational::from_float(z.re).unwrap(),
            BigRational::from_float(z.im).unwrap(),
        )
    })
}

fn frob(m: &Matrix<BigRational>) -> BigRational {
    m.data().iter().fold(BigRational::zero(), |s, x| s + x * x)
}

fn ceil_sqrt(x: &BigRational) -> BigInt {
    let c = x.ceil().to_integer();
    let mut s = num_integer::Roots::sqrt(&c);
    if &s * &s < c {
        s += 1;
    }
    s
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 10, 50, 100, 500] {
        let Some(v) = float_optimum(&build_wilkinson_lp(n).unwrap()) else {
            return outcome(false, format!("solve failed at n = {n}"));
        };
        worst = worst.max((v - wilkinson_sum(n)).abs());
    }
    let mut exact_ok = true;
    for n in 2..=20 {
        let e = exact_simplex(&build_wilkinson_lp(n).unwrap());
        let c = wilkinson_closed_form_dual(n, ClosedFormObjective::HeadTail).unwrap();
        exact_ok &= matches!(e, Ok(e) if e.bound == c.bound);
    }
    outcome(
        worst < LP_TOL && exact_ok,
        format!("max |float - closed form| = {worst:.2e}; exact simplex == closed-form dual for n <= 20: {exact_ok}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut below = true;
    for n in [10, 100, 1000] {
        let Some(v) = float_optimum(&build_geomean_lp(n, None).unwrap()) else {
            return outcome(false, format!("solve failed at n = {n}"));
        };
        worst = worst.max((v - 0.5 * geomean_sum(n)).abs());
        let l = (n as f64).ln();
        below &= v <= l * l / 4.0 + 2f64.ln();
    }
    outcome(
        worst < LP_TOL && below,
        format!("max |float - sum| = {worst:.2e}; below ln^2 n / 4 + ln 2: {below}"),
    )
}

/// The gap is measured from a lower enclosure of Wilkinson's bound, so a
/// positive value is rigorous.
fn criterion_3(cache: &BTreeMap<usize, Option<BigRational>>, t5000: Duration) -> Outcome {
    let gap = |n: usize| -> Option<BigRational> {
        cache.get(&n).cloned().flatten().map(|b| wilkinson_closed_form_lower(n, 80) - b)
    };
    let (Some(g500), Some(g1000), Some(g5000)) = (gap(500), gap(1000), gap(5000)) else {
        return outcome(false, "certification failed at one of n = 500, 1000, 5000");
    };
    let passed = g1000.is_positive() && g5000 > g500 && within(t5000, 300.0);
    outcome(
        passed,
        format!(
            "certified gap: n=500 {:.4}, n=1000 {:.4}, n=5000 {:.4}; n=5000 solve+certify {:.1}s (target < 300s)",
            rational_to_f64(&g500),
            rational_to_f64(&g1000),
            rational_to_f64(&g5000),
            t5000.as_secs_f64()
        ),
    )
}

fn criterion_4(grid: &[usize], cache: &BTreeMap<usize, Option<BigRational>>) -> Outcome {
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for &n in grid {
        let w = wilkinson_certified(n);
        let best = match cache.get(&n).cloned().flatten() {
            Some(b) if b < w => b,
            _ => w,
        };
        let rhs = theorem1_bound_lower(n, 80);
        if best > rhs {
            failures.push(n);
        }
        tightest = tightest.min(rational_to_f64(&(&rhs - &best)));
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} grid points in [2, 5000], min certified margin {:.4}, failures {:?}",
            grid.len(),
            tightest,
            failures
        ),
    )
}

fn criterion_5() -> Outcome {
    let t = ConstantsTable::compute();
    let (ts, gs) = optimal_t();
    let grid_min = (1..100_000)
        .map(|i| gamma_of_t(i as f64 / 100_000.0).unwrap())
        .fold(f64::INFINITY, f64::min);
    let (_, ent) = maximize_unit_interval(entropy_factor, 10_000);
    let (_, cs) = maximize_unit_interval(case_split_factor, 10_000);
    let checks = [
        (t.alpha - 0.20781).abs() <= 1e-5,
        (ts - 0.4547).abs() <= 1e-3,
        (gs - 0.207576).abs() <= 1e-5,
        gs <= grid_min + 1e-12,
        t.alpha - gs < 0.00024,
        (ent - std::f64::consts::SQRT_2).abs() <= 1e-9,
        (1.167..=1.169).contains(&cs) && cs < (11f64 / 8.0).sqrt(),
    ];
    outcome(
        checks.iter().all(|c| *c),
        format!(
            "alpha {:.7}, t* {:.6}, min gamma {:.7}, alpha - min gamma {:.2e}, entropy max {:.12}, case-split max {:.6}",
            t.alpha,
            ts,
            gs,
            t.alpha - gs,
            ent,
            cs
        ),
    )
}

fn criterion_6() -> Outcome {
    let base = check_base_case(BETA, 0.1);
    let tail = check_g_tail(BETA, 1700.0, 1e7, 20_000, -0.08);
    let c = constant_expression(BETA);
    match (base, tail) {
        (Ok(b), Ok(g)) => outcome(
            b.passed && g.passed && c > 0.086,
            format!(
                "base case min margin {:.5} over {} points; g min {:.5} over {} points; constant {:.6}",
                b.min_margin, b.points, g.min_margin, g.points, c
            ),
        ),
        (b, g) => outcome(false, format!("evaluation error: {:?} {:?}", b.err(), g.err())),
    }
}

fn criterion_7() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(7);
    let mut violations = [0usize; 4];
    let mut cases = [0usize; 4];

    // Hadamard, exact.
    while cases[0] < PROPERTY_CASES {
        let n = g.random_range(1..=12);
        let a = rational(&mut g, n, n);
        let d = det_real(&a);
        cases[0] += 1;
        if &d * &d > hadamard_bound_sq(&a).unwrap() {
            violations[0] += 1;
        }
    }

    // Singular-value sum bound, complex binary64 against an exact determinant.
    while cases[1] < PROPERTY_CASES {
        let n = g.random_range(1..=6);
        let (a, b) = (c64(&mut g, n), c64(&mut g, n));
        let sum = exact_c(&a).try_add(&exact_c(&b)).unwrap();
        let d2 = rational_to_f64(&det_complex(&sum).abs_sq());
        if d2 == 0.0 {
            continue;
        }
        cases[1] += 1;
        let bound = ln_sv_det_bound(&a, &b).unwrap();
        let lhs = 0.5 * d2.ln();
        if lhs > bound + SV_SLACK * (1.0 + bound.abs()) {
            violations[1] += 1;
        }
    }

    // Low-rank Hadamard, exact.
    while cases[2] < PROPERTY_CASES {
        let n = g.random_range(1..=12);
        let ell = g.random_range(0..=n);
        let a = unit(&mut g, n, n, 8);
        let b = if ell == 0 {
            Matrix::zeros(n, n)
        } else {
            let scale = g.random_range(1..=6);
            let f = Matrix::from_fn(n, ell, |_, _| {
                BigRational::new(g.random_range(-scale..=scale).into(), 2.into())
            });
            f.matmul(&unit(&mut g, ell, n, 4)).unwrap()
        };
        let c = BigRational::new(ceil_sqrt(&frob(&b)), BigInt::from(n));
        let d = det_real(&a.try_add(&b).unwrap());
        cases[2] += 1;
        if &d * &d > lowrank_hadamard_rhs_sq(n, ell, &c).unwrap() {
            violations[2] += 1;
        }
    }

    // Long-range pivot bound on complete pivoting traces, exact.
    while cases[3] < PROPERTY_CASES {
        let n = g.random_range(2..=12);
        let a = rational(&mut g, n, n);
        if det_real(&a).is_zero() {
            continue;
        }
        let t = eliminate(&a, PivotStrategy::Complete).unwrap();
        let p2: Vec<BigRational> = (1..=n).map(|k| t.pivot(k) * t.pivot(k)).collect();
        for k in 2..=n {
            let lhs = p2[..k].iter().fold(BigRational::one(), |s, v| s * v);
            for ell in 1..k.min(n - k + 1) {
                cases[3] += 1;
                let rhs = longrange_pivot_rhs_sq(k, ell, &p2[k - 1], &p2[k + ell - 1]).unwrap();
                if lhs > rhs {
                    violations[3] += 1;
                }
            }
        }
    }

    outcome(
        violations.iter().all(|v| *v == 0),
        format!(
            "cases/violations: hadamard {}/{}, sv-sum {}/{}, low-rank {}/{}, long-range {}/{}",
            cases[0], violations[0], cases[1], violations[1], cases[2], violations[2], cases[3], violations[3]
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut powers = true;
    for n in 1..=30usize {
        let t = eliminate(&wilkinson_matrix::<BigRational>(n), PivotStrategy::Partial).unwrap();
        powers &= t.growth_factor_exact() == BigRational::from_integer(Pow::pow(BigInt::from(2), n as u32 - 1));
    }
    let mut g = ChaCha8Rng::seed_from_u64(8);
    let bounds: Vec<Option<f64>> = (0..=12)
        .into_par_iter()
        .map(|n| {
            if n < 2 {
                return Some(0.0);
            }
            let lp = build_improved_lp(n, Selector::Full).ok()?;
            let c = certify(&lp, &solve_float(&lp).ok()?).ok()?;
            c.verified.then(|| c.bound_f64())
        })
        .collect();
    let (mut dets, mut growth, mut tested) = (0, 0, 0);
    while tested < 500 {
        let n = g.random_range(1..=12);
        let a = rational(&mut g, n, n);
        let d = det_real(&a);
        if d.is_zero() {
            continue;
        }
        tested += 1;
        let strategy = if tested % 2 == 0 { PivotStrategy::Partial } else { PivotStrategy::Complete };
        let t = eliminate(&a, strategy).unwrap();
        let prod = t.pivots().iter().fold(BigRational::one(), |s, p| s * p);
        if prod.abs() != d.abs() {
            dets += 1;
        }
        let cp = eliminate(&a, PivotStrategy::Complete).unwrap();
        match bounds[n] {
            Some(b) if growth_factor(&cp).ln() <= b + 1e-12 => {}
            _ => growth += 1,
        }
    }
    outcome(
        powers && dets == 0 && growth == 0,
        format!(
            "partial growth 2^(n-1) for n <= 30: {powers}; pivot product mismatches {dets}/500; CP growth above certified bound {growth}/500"
        ),
    )
}

fn criterion_9() -> Outcome {
    match appendix_a(100, 0) {
        Ok(r) => outcome(
            r.relative_error_partial > 1e-2
                && r.relative_error_complete < 1e-10
                && (40.0..=50.0).contains(&r.condition_estimate),
            format!(
                "partial {:.3e}, complete {:.3e}, condition {:.3}",
                r.relative_error_partial, r.relative_error_complete, r.condition_estimate
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_10() -> Outcome {
    let mut detail = Vec::new();
    let mut passed = true;
    for n in [10, 50, 100] {
        let lp = build_improved_lp(n, Selector::Full).unwrap();
        let Ok(sol) = solve_float(&lp) else {
            return outcome(false, format!("solve failed at n = {n}"));
        };
        let rep = check_log_pivot_feasibility(&sandwich_log_pivots(&sol.primal), FeasibilityProgram::ImprovedOpt);
        passed &= rep.feasible();
        detail.push(format!("n={n}: {} rows, {} violations", rep.checked, rep.violations.len()));
    }
    outcome(passed, detail.join("; "))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Outcome, Duration, Option<f64>)> = Vec::new();
    let mut report = |id: usize, (o, d): (Outcome, Duration), target: Option<f64>| {
        let ok = o.passed && target.is_none_or(|t| within(d, t));
        let budget = target.map(|t| format!(" / {t:.0}s")).unwrap_or_default();
        println!(
            "[{}] criterion {id:>2} ({:.2}s{budget}): {}",
            if ok { "PASS" } else { "FAIL" },
            d.as_secs_f64(),
            o.detail
        );
        results.push((id, Outcome { passed: ok, detail: o.detail }, d, target));
    };

    report(1, timed(criterion_1), Some(10.0));
    report(2, timed(criterion_2), None);

    // Certified band bounds shared by criteria 3 and 4.
    let t = Instant::now();
    let b5000 = certified_band(5000);
    let t5000 = t.elapsed();
    let grid: Vec<usize> = geometric_samples(5000, 40).into_iter().filter(|&n| n >= 2).collect();
    let mut ns: Vec<usize> = grid.iter().copied().chain([500, 1000]).filter(|&n| n != 5000).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut cache: BTreeMap<usize, Option<BigRational>> =
        ns.par_iter().rev().map(|&n| (n, certified_band(n))).collect();
    cache.insert(5000, b5000);
    let sweep = t.elapsed();

    report(3, (criterion_3(&cache, t5000), t5000), Some(300.0));
    report(4, (criterion_4(&grid, &cache), sweep), None);
    report(5, timed(criterion_5), None);
    report(6, timed(criterion_6), Some(30.0));
    report(7, timed(criterion_7), None);
    report(8, timed(criterion_8), None);
    report(9, timed(criterion_9), Some(1.0));
    report(10, timed(criterion_10), None);

    let failed: Vec<usize> = results.iter().filter(|r| !r.1.passed).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
