//! Closed-form bounds, the constants of the asymptotic argument and the
//! numerical checks behind its base case and inductive step.
//!
//! Log-pivot profiles are normalised so that `q_1 = 0`. The step function
//! `f(x) = q_ceil(x) - q_1` and its running mean `F(x) = (1/x) int_0^x f` are
//! evaluated exactly by piecewise summation.

use std::f64::consts::{E, LN_2, SQRT_2};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::enclosure::{ln_interval, sqrt_interval, Interval};
use crate::error::{Error, Result};
use crate::ge::{log_pivots, EliminationTrace};
use crate::lp::model::{build_improved_lp, Selector};
use crate::scalar::Scalar;

/// Coefficient of `ln n` in the headline bound.
pub const THEOREM1_LINEAR: f64 = 0.91;

/// Coefficient of `ln x` in the induction hypothesis.
pub const BETA: f64 = 0.41;

/// Lower end of the interval on which the base case is verified.
pub const BASE_CASE_LO: f64 = 100.0;

/// Upper end of the base-case interval, where the inductive step takes over.
pub const BASE_CASE_HI: f64 = 1700.0;

/// `2 + (2 - sqrt 2) ln 2`, the denominator shared by most constants.
fn denom() -> f64 {
    2.0 + (2.0 - SQRT_2) * LN_2
}

/// `1 / (2 (2 + (2 - sqrt 2) ln 2))`.
pub fn alpha() -> f64 {
    1.0 / (2.0 * denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilkinsonClosedForm {
    /// `(1/2)(ln n + sum_{k=2}^n ln k / (k-1))`.
    pub exact_sum: f64,
    /// `ln(2 sqrt(n) n^(ln n / 4))`.
    pub simplified: f64,
}

/// Wilkinson's bound on the log growth factor, summed exactly and in the
/// simplified form `2 sqrt(n) n^(ln n / 4)`.
pub fn wilkinson_bound_closed_form(n: usize) -> WilkinsonClosedForm {
    if n <= 1 {
        return WilkinsonClosedForm {
            exact_sum: 0.0,
            simplified: if n == 1 { LN_2 } else { 0.0 },
        };
    }
    let ln_n = (n as f64).ln();
    let sum: f64 = (2..=n).map(|k| (k as f64).ln() / (k - 1) as f64).sum();
    WilkinsonClosedForm {
        exact_sum: 0.5 * (ln_n + sum),
        simplified: LN_2 + 0.5 * ln_n + 0.25 * ln_n * ln_n,
    }
}

/// `alpha ln^2 n + 0.91 ln n`.
pub fn theorem1_bound(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let l = (n as f64).ln();
    alpha() * l * l + THEOREM1_LINEAR * l
}

/// Rigorous enclosure of `alpha ln^2 n + 0.91 ln n`.
pub fn theorem1_bound_enclosure(n: usize, bits: u32) -> Interval {
    if n <= 1 {
        return Interval::from_int(0);
    }
    let w = bits + 16;
    let two = BigRational::from_integer(BigInt::from(2));
    let ln2 = ln_interval(&two, w);
    let sqrt2 = sqrt_interval(&two, w);
    let d = Interval::from_int(2).add(&Interval::from_int(2).sub(&sqrt2).mul(&ln2));
    let alpha = d
        .scale(&two)
        .recip()
        .expect("positive denominator");
    let l = ln_interval(&BigRational::from_integer(BigInt::from(n)), w);
    alpha
        .mul(&l.square())
        .add(&l.scale(&BigRational::new(91.into(), 100.into())))
}

/// Rational lower bound of [`theorem1_bound`].
pub fn theorem1_bound_lower(n: usize, bits: u32) -> BigRational {
    theorem1_bound_enclosure(n, bits).lo
}

/// `1 / (4 (1 + (1 - t) ln(1 + t)))`, the growth rate allowed by one
/// long-range split at ratio `1 + t`.
pub fn gamma_of_t(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t = {t} is outside [0, 1]")));
    }
    Ok(1.0 / (4.0 * (1.0 + (1.0 - t) * t.ln_1p())))
}

/// Principal branch of Lambert's W for `x >= 0`, by Newton's method from a
/// logarithmic starting point.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("lambert_w needs a finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < E { x / E } else { x.ln() - x.ln().ln().max(0.0) };
    for _ in 0..100 {
        let ew = w.exp();
        let r = w * ew - x;
        if r.abs() <= 1e-14 * x.max(1.0) {
            break;
        }
        w -= r / (ew * (w + 1.0));
    }
    Ok(w)
}

/// The minimiser `t* = exp(W(2e) - 1) - 1` of [`gamma_of_t`] and the minimum.
pub fn optimal_t() -> (f64, f64) {
    let w = lambert_w(2.0 * E).expect("2e is in the domain");
    let t = (w - 1.0).exp() - 1.0;
    (t, gamma_of_t(t).expect("t* lies in [0, 1]"))
}

/// The explicit lower bound for `F(x)` used in the base case:
/// `-(1/x)((ln x + 1/x)^2/4 + (ln x + 1/x)/2 + ln 2) - (ln^2 x / 4 + ln 2)`.
pub fn base_case_lower(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::invalid(format!("base case needs x > 1, got {x}")));
    }
    let l = x.ln();
    let u = l + 1.0 / x;
    Ok(-(u * u / 4.0 + u / 2.0 + LN_2) / x - (l * l / 4.0 + LN_2))
}

/// `base_case_lower(x) + alpha ln^2 x + beta ln x`; positive where the base
/// case holds.
pub fn base_case_margin(x: f64, beta: f64) -> Result<f64> {
    let l = x.ln();
    Ok(base_case_lower(x)? + alpha() * l * l + beta * l)
}

/// Lower bound of [`base_case_margin`] over `[a, b]` with `1 < a <= b`.
///
/// Each summand is monotone there: `(ln x + 1/x)` increases, so the first
/// term is bounded by its numerator at `b` over `a`; `-ln^2 x / 4` is smallest
/// at `b`; `alpha ln^2 x + beta ln x` is smallest at `a`.
pub fn base_case_cell_lower(a: f64, b: f64, beta: f64) -> Result<f64> {
    if !(a > 1.0 && b >= a) {
        return Err(Error::invalid(format!("bad cell [{a}, {b}]")));
    }
    let ub = b.ln() + 1.0 / b;
    let (la, lb) = (a.ln(), b.ln());
    Ok(-(ub * ub / 4.0 + ub / 2.0 + LN_2) / a - (lb * lb / 4.0 + LN_2) + alpha() * la * la + beta * la)
}

/// The four coefficients of `g(beta, y)` on `ln^2 y / y`, `ln y / y`, `1/y`
/// and `1/y^2`.
pub fn g_coefficients(beta: f64) -> [f64; 4] {
    let d = denom();
    let ln2 = LN_2;
    [
        -(2.0 + SQRT_2) / d,
        -((4.0 + 2.0 * SQRT_2) * beta + (5.0 + 3.0 * SQRT_2) * ln2 / d),
        (11.0 + 7.0 * SQRT_2) * ln2 * ln2 / (4.0 * d)
            - (5.0 + 3.0 * SQRT_2) * beta * ln2
            - (SQRT_2 + 1.0) * ln2 / 2.0,
        -SQRT_2 / d,
    ]
}

/// The lower-order remainder `g(beta, y)` of the inductive step.
pub fn g_beta_y(beta: f64, y: f64) -> f64 {
    let c = g_coefficients(beta);
    let l = y.ln();
    c[0] * l * l / y + c[1] * l / y + c[2] / y + c[3] / (y * y)
}

/// The `beta`-linear constant term of the inductive step, which must dominate
/// `-g`.
pub fn constant_expression(beta: f64) -> f64 {
    let ln2 = LN_2;
    let l114 = (11.0f64 / 4.0).ln();
    ((SQRT_2 - 1.0) * ln2 + SQRT_2) / SQRT_2 * beta
        + ((2.0 - SQRT_2) * ln2 * ln2 - 4.0 * (2.0 - SQRT_2) * (l114 - 1.0) * ln2 - 8.0 * l114)
            / (8.0 * denom())
}

/// Outcome of a "for all x" claim checked on a finite grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCheck {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Smallest margin seen; the claim is `margin > threshold`.
    pub min_margin: f64,
    pub argmin: f64,
    pub threshold: f64,
    pub passed: bool,
    pub method: String,
}

/// Base case on the grid `lo + step, lo + 2 step, ..., hi`, with a monotone
/// lower bound on every cell between consecutive grid points.
pub fn check_base_case(beta: f64, step: f64) -> Result<GridCheck> {
    if !(step > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let count = ((BASE_CASE_HI - BASE_CASE_LO) / step).round() as usize;
    let mut min_margin = f64::INFINITY;
    let mut argmin = BASE_CASE_LO;
    let mut cells_ok = true;
    let mut prev = BASE_CASE_LO;
    for i in 1..=count {
        let x = BASE_CASE_LO + i as f64 * step;
        let m = base_case_margin(x, beta)?;
        if m < min_margin {
            min_margin = m;
            argmin = x;
        }
        if base_case_cell_lower(prev, x, beta)? <= 0.0 {
            cells_ok = false;
        }
        prev = x;
    }
    Ok(GridCheck {
        name: "base-case".into(),
        lo: BASE_CASE_LO,
        hi: BASE_CASE_HI,
        points: count,
        min_margin,
        argmin,
        threshold: 0.0,
        passed: min_margin > 0.0 && cells_ok,
        method: if cells_ok {
            "grid-verified with monotone cell bounds".into()
        } else {
            "grid-verified".into()
        },
    })
}

/// `g(beta, y) > threshold` on a geometric grid over `(lo, hi]`.
///
/// When every coefficient of `g` is negative, each term is a negative
/// multiple of a function decreasing for `y > e^2`, so `g` increases there
/// and the check at the left end covers the whole tail.
pub fn check_g_tail(beta: f64, lo: f64, hi: f64, points: usize, threshold: f64) -> Result<GridCheck> {
    if !(lo > 0.0 && hi > lo && points >= 1) {
        return Err(Error::invalid("bad geometric grid"));
    }
    let ratio = (hi / lo).ln() / points as f64;
    let mut min_margin = f64::INFINITY;
    let mut argmin = lo;
    for i in 1..=points {
        let y = if i == points { hi } else { lo * (ratio * i as f64).exp() };
        let g = g_beta_y(beta, y);
        if g < min_margin {
            min_margin = g;
            argmin = y;
        }
    }
    let monotone = lo >= E * E && g_coefficients(beta).iter().all(|c| *c < 0.0);
    let left = g_beta_y(beta, lo);
    let passed = min_margin > threshold && (!monotone || left > threshold);
    Ok(GridCheck {
        name: "g-tail".into(),
        lo,
        hi,
        points,
        min_margin: if monotone { min_margin.min(left) } else { min_margin },
        argmin: if monotone && left <= min_margin { lo } else { argmin },
        threshold,
        passed,
        method: if monotone {
            "grid-verified with monotone tail".into()
        } else {
            "grid-verified".into()
        },
    })
}

/// Log-pivot profile with `q_1 = 0`, extended by `q_k = q_n` for `k > n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProfile {
    q: Vec<f64>,
    /// `prefix[m] = sum_{i <= m} q_i`.
    prefix: Vec<f64>,
    allow_positive: bool,
}

impl GrowthProfile {
    /// Shifts `q` so that `q_1 = 0`. Values above `q_1` are rejected by
    /// [`induction_rhs_check`] unless allowed with [`Self::allowing_positive`].
    pub fn new(q: &[f64]) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::invalid("empty profile"));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile has non-finite entries"));
        }
        let q1 = q[0];
        let q: Vec<f64> = q.iter().map(|v| v - q1).collect();
        let mut prefix = Vec::with_capacity(q.len() + 1);
        prefix.push(0.0);
        let mut s = 0.0;
        for v in &q {
            s += v;
            prefix.push(s);
        }
        Ok(GrowthProfile {
            q,
            prefix,
            allow_positive: false,
        })
    }

    pub fn from_trace<T: Scalar>(trace: &EliminationTrace<T>) -> Result<Self> {
        Self::new(&log_pivots(trace))
    }

    pub fn allowing_positive(mut self) -> Self {
        self.allow_positive = true;
        self
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `q_k - q_1` for `k >= 1`, padded past `n`.
    pub fn q_at(&self, k: usize) -> f64 {
        let k = k.clamp(1, self.n());
        self.q[k - 1]
    }

    /// Largest `q_k - q_1`; the padded profile is admissible when this is `<= 0`.
    pub fn max_excess(&self) -> f64 {
        self.q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum_{i <= m} (q_i - q_1)`, padded.
    fn partial_sum(&self, m: usize) -> f64 {
        let n = self.n();
        if m <= n {
            self.prefix[m]
        } else {
            self.prefix[n] + (m - n) as f64 * self.q[n - 1]
        }
    }

    /// `f(x) = q_ceil(x) - q_1`.
    pub fn f(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("f needs x > 0, got {x}")));
        }
        Ok(self.q_at(x.ceil() as usize))
    }

    /// `F(x) = (1/x) int_0^x f(t) dt`.
    pub fn big_f(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("F needs x > 0, got {x}")));
        }
        let m = x.floor() as usize;
        let frac = x - m as f64;
        let head = if frac > 0.0 { frac * self.q_at(m + 1) } else { 0.0 };
        Ok((head + self.partial_sum(m)) / x)
    }

    /// `F(m)` for an integer `m >= 1`: the mean of `q_1..q_m`.
    pub fn mean(&self, m: usize) -> f64 {
        self.partial_sum(m) / m as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionCheck {
    pub x: f64,
    pub k: usize,
    pub ell: usize,
    /// `F(ceil x)`.
    pub lhs: f64,
    /// Right-hand side of the `(k, l)` row divided by `k`.
    pub rhs_row: f64,
    /// `ln(11x/4)/2 + 1/(2x) + (sqrt2 - 1 - sqrt2/x)(sqrt2 f(sqrt2 x) + f(x))`.
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the relaxed long-range constraint at `k = ceil(x)`,
/// `k + l = ceil(sqrt2 x)` in terms of `F` and `f`.
///
/// The relaxation replaces the exact coefficients of `f` by smaller ones,
/// which is only valid for `f <= 0`; profiles with `q_k > q_1` are rejected.
pub fn induction_rhs_check(profile: &GrowthProfile, x: f64) -> Result<InductionCheck> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::invalid(format!("induction check needs x > 1, got {x}")));
    }
    if SQRT_2 * x > profile.n() as f64 {
        return Err(Error::invalid(format!(
            "sqrt2 x = {} exceeds n = {}",
            SQRT_2 * x,
            profile.n()
        )));
    }
    if !profile.allow_positive && profile.max_excess() > 0.0 {
        return Err(Error::invalid(format!(
            "padding precondition violated: q_k - q_1 reaches {:e} > 0",
            profile.max_excess()
        )));
    }
    let k = x.ceil() as usize;
    let j = (SQRT_2 * x).ceil() as usize;
    let ell = j.saturating_sub(k);
    let kf = k as f64;
    let lhs = profile.mean(k);
    let f_x = profile.f(x)?;
    let f_sx = profile.f(SQRT_2 * x)?;
    let rhs_row = 0.5 * (11.0 * kf / 4.0).ln()
        + (kf - ell as f64) / kf * f_sx
        + ell as f64 / kf * f_x;
    let coef = SQRT_2 - 1.0 - SQRT_2 / x;
    let rhs = 0.5 * (11.0 * x / 4.0).ln() + 0.5 / x + coef * (SQRT_2 * f_sx + f_x);
    let tol = 1e-9 * (1.0 + lhs.abs().max(rhs.abs()));
    Ok(InductionCheck {
        x,
        k,
        ell,
        lhs,
        rhs_row,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

/// `q_1 = 0`, `q_k = -gamma ln^2 k + shift` for `k >= 2`.
pub fn candidate_profile(gamma: f64, n: usize) -> Result<GrowthProfile> {
    shifted_candidate_profile(gamma, n, 0.0)
}

pub fn shifted_candidate_profile(gamma: f64, n: usize, shift: f64) -> Result<GrowthProfile> {
    if !(gamma >= 0.0) || n == 0 {
        return Err(Error::invalid("candidate profile needs gamma >= 0 and n >= 1"));
    }
    let q: Vec<f64> = (1..=n)
        .map(|k| {
            if k == 1 {
                0.0
            } else {
                let l = (k as f64).ln();
                -gamma * l * l + shift
            }
        })
        .collect();
    Ok(GrowthProfile::new(&q)?.allowing_positive())
}

/// Smallest `shift >= 0` making the candidate profile satisfy every row of
/// the improved program.
///
/// Raising `q_2..q_n` together by `s` lowers the left-hand side of every row
/// with `k >= 2` by exactly `s`, so feasibility is monotone in the shift and
/// the threshold is the largest row violation of the unshifted profile.
pub fn minimal_candidate_shift(gamma: f64, n: usize, selector: Selector) -> Result<f64> {
    let profile = candidate_profile(gamma, n)?;
    let lp = build_improved_lp(n, selector)?;
    Ok(lp.max_violation_q(profile.q()))
}

/// Largest `gamma` in `[0, hi]` whose candidate profile is feasible with a
/// shift of at most `shift_budget`, by bisection to `tol`.
pub fn largest_feasible_gamma(
    n: usize,
    selector: Selector,
    shift_budget: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let lp = build_improved_lp(n, selector)?;
    let fits = |g: f64| -> Result<bool> {
        Ok(lp.max_violation_q(candidate_profile(g, n)?.q()) <= shift_budget)
    };
    if !fits(0.0)? {
        return Ok(0.0);
    }
    if fits(hi)? {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub value: f64,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_star: f64,
    pub t_star: f64,
    /// Coefficient of `ln^2 n` in Wilkinson's bound.
    pub wilkinson_exponent: f64,
    pub entries: Vec<Constant>,
}

impl ConstantsTable {
    pub fn compute() -> Self {
        let (t_star, gamma_star) = optimal_t();
        let alpha = alpha();
        let entry = |name: &str, value: f64, formula: &str| Constant {
            name: name.into(),
            value,
            formula: formula.into(),
        };
        let entries = vec![
            entry("alpha", alpha, "1/(2(2+(2-sqrt2) ln 2))"),
            entry("beta", BETA, "0.41"),
            entry("gamma-star", gamma_star, "gamma(t*) = 1/(4(1+(1-t*) ln(1+t*)))"),
            entry("t-star", t_star, "exp(W(2e)-1)-1"),
            entry("wilkinson-exponent", 0.25, "1/4"),
            entry("theorem1-linear", THEOREM1_LINEAR, "0.91"),
            entry("alpha-minus-gamma-star", alpha - gamma_star, "alpha - gamma(t*)"),
            entry(
                "constant-term",
                constant_expression(BETA),
                "((sqrt2-1)ln2+sqrt2)/sqrt2 beta + ((2-sqrt2)ln^2 2 - 4(2-sqrt2)(ln(11/4)-1)ln2 - 8 ln(11/4))/(8(2+(2-sqrt2)ln2))",
            ),
        ];
        ConstantsTable {
            alpha,
            beta: BETA,
            gamma_star,
            t_star,
            wilkinson_exponent: 0.25,
            entries,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_matches_gamma_at_sqrt2_minus_1() {
        let g = gamma_of_t(SQRT_2 - 1.0).unwrap();
        assert!((g - alpha()).abs() < 1e-15);
    }

    #[test]
    fn lambert_w_inverts() {
        for &x in &[0.1, 1.0, E, 2.0 * E, 10.0, 1e6] {
            let w = lambert_w(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-13 * x.max(1.0));
        }
        assert!((lambert_w(E).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn profile_mean_and_padding() {
        let p = GrowthProfile::new(&[1.0, 0.5, -1.0]).unwrap();
        assert_eq!(p.q(), &[0.0, -0.5, -2.0]);
        assert_eq!(p.f(2.5).unwrap(), -2.0);
        assert_eq!(p.f(7.0).unwrap(), -2.0);
        assert!((p.big_f(1.5).unwrap() - (-0.25 / 1.5)).abs() < 1e-15);
        assert!((p.big_f(5.0).unwrap() - (-6.5 / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn theorem1_enclosure_contains_float() {
        for n in [2usize, 17, 100, 5000] {
            let e = theorem1_bound_enclosure(n, 60);
            assert!((e.mid_f64() - theorem1_bound(n)).abs() < 1e-12);
            assert!(e.lo < e.hi);
        }
    }
}
