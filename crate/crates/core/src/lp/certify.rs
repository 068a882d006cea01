//! Floating point solves, exact certification and the closed-form Wilkinson
//! solutions.
//!
//! A certified bound is a vector of nonnegative rational multipliers `y` with
//! `sum_r y_r a_r = c` exactly; weak duality then gives
//! `max c^T q <= sum_r y_r rhs_upper_r`. The right-hand sides of record are
//! the rational upper enclosures, never their binary64 roundings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::model::{
    build_geomean_lp_with, build_improved_lp_with, build_wilkinson_lp_with, Form, LpInstance,
    Objective, Program, RhsExpr, Selector,
};
use super::simplex::{
    any_negative, exact_basis_solution, run, wilkinson_basis, Reduced, SimplexOptions, SimplexRun,
    Status,
};
use crate::error::{Error, Result};
use crate::matrix::{fmt_rational, parse_rational};
use crate::scalar::rational_to_f64;

/// Largest `n - 1` for which `certify` refactors the final basis exactly.
pub const EXACT_REFACTOR_LIMIT: usize = 1200;
/// Largest `n - 1` for which `certify` finishes with exact simplex pivots so
/// that the certified bound is the exact optimum.
pub const EXACT_POLISH_LIMIT: usize = 200;
/// Row-count guard of [`exact_simplex`].
pub const EXACT_SIMPLEX_MAX_ROWS: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualSolution {
    pub status: Status,
    /// `q_1..q_n` with the gauge `q_1 = 0`.
    pub primal: Vec<f64>,
    /// One multiplier per row of the instance.
    pub dual: Vec<f64>,
    pub objective: f64,
    /// Basic row indices.
    pub basis: Vec<usize>,
    pub iterations: usize,
    pub bland_switches: usize,
}

impl PrimalDualSolution {
    /// `max(0, max_r a_r q - rhs_float_r)`.
    pub fn primal_residual(&self, lp: &LpInstance) -> f64 {
        lp.max_violation_q(&self.primal)
    }

    pub fn primal_objective(&self, lp: &LpInstance) -> f64 {
        lp.objective.eval_q(&self.primal)
    }

    pub fn dual_objective(&self, lp: &LpInstance) -> f64 {
        lp.rows
            .iter()
            .zip(&self.dual)
            .map(|(row, y)| row.rhs_float * y)
            .sum()
    }

    /// Indices of rows whose slack is at most `tol (1 + |rhs|)`.
    pub fn active_rows(&self, lp: &LpInstance, tol: f64) -> Vec<usize> {
        lp.slacks_q(&self.primal)
            .iter()
            .enumerate()
            .filter(|(r, s)| **s <= tol * (1.0 + lp.rows[*r].rhs_float.abs()))
            .map(|(r, _)| r)
            .collect()
    }
}

fn q_from_reduced(x: &[f64]) -> Vec<f64> {
    // x holds Q(2)..Q(n); Q(1) = 0.
    let mut big_q = Vec::with_capacity(x.len() + 1);
    big_q.push(0.0);
    big_q.extend_from_slice(x);
    super::model::q_from_cumulative(&big_q)
}

/// Solve in binary64 against `rhs_float`.
pub fn solve_float(lp: &LpInstance) -> Result<PrimalDualSolution> {
    solve_float_with(lp, &SimplexOptions::default())
}

pub fn solve_float_with(lp: &LpInstance, opts: &SimplexOptions) -> Result<PrimalDualSolution> {
    let red = Reduced::<f64>::new(lp, |r| lp.rows[r].rhs_float);
    let res = run(&red, wilkinson_basis(lp), opts)?;
    let mut dual = vec![0.0; lp.rows.len()];
    for (p, &r) in res.basis.iter().enumerate() {
        dual[r] = res.y[p];
    }
    Ok(PrimalDualSolution {
        status: res.status,
        primal: q_from_reduced(&res.x),
        dual,
        objective: res.objective,
        basis: res.basis,
        iterations: res.iterations,
        bland_switches: res.bland_switches,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    /// Exact duals of the final floating point basis.
    BasisRefactor,
    /// Floating point duals rounded to dyadic rationals, with the exact
    /// residual absorbed by the Wilkinson rows.
    RoundedDual,
    ClosedForm,
    ExactSimplex,
}

impl CertMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CertMethod::BasisRefactor => "basis-refactor",
            CertMethod::RoundedDual => "rounded-dual",
            CertMethod::ClosedForm => "closed-form",
            CertMethod::ExactSimplex => "exact-simplex",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedBound {
    pub bound: BigRational,
    /// `(row index, multiplier)` for the nonzero multipliers, ascending.
    pub multipliers: Vec<(usize, BigRational)>,
    pub verified: bool,
    pub method: CertMethod,
    pub diagnostics: Vec<String>,
}

impl CertifiedBound {
    pub fn bound_f64(&self) -> f64 {
        rational_to_f64(&self.bound)
    }

    fn from_multipliers(
        lp: &LpInstance,
        multipliers: Vec<(usize, BigRational)>,
        method: CertMethod,
        mut diagnostics: Vec<String>,
    ) -> Self {
        let multipliers: Vec<(usize, BigRational)> =
            multipliers.into_iter().filter(|(_, y)| !y.is_zero()).collect();
        match verify_multipliers(lp, &multipliers) {
            Ok(bound) => CertifiedBound {
                bound,
                multipliers,
                verified: true,
                method,
                diagnostics,
            },
            Err(msg) => {
                diagnostics.push(msg);
                CertifiedBound {
                    bound: BigRational::zero(),
                    multipliers,
                    verified: false,
                    method,
                    diagnostics,
                }
            }
        }
    }
}

/// Exact check of a dual certificate. Returns `sum_r y_r rhs_upper_r` when
/// every multiplier is nonnegative and `sum_r y_r a_r` equals the objective.
///
/// The comparison runs in cumulative variables whatever the instance form:
/// the change of variables is unimodular, so equality there is equivalent to
/// equality over `q`, and every row has at most four nonzeros.
pub fn verify_multipliers(
    lp: &LpInstance,
    multipliers: &[(usize, BigRational)],
) -> std::result::Result<BigRational, String> {
    let c = lp.objective.cumulative();
    if c.len() != lp.n {
        return Err("objective length does not match n".into());
    }
    for (r, y) in multipliers {
        if *r >= lp.rows.len() {
            return Err(format!("multiplier for nonexistent row {r}"));
        }
        if y.is_negative() {
            let row = &lp.rows[*r];
            return Err(format!("negative multiplier on row ({}, {})", row.k, row.ell));
        }
    }
    // Common denominator integer arithmetic.
    let den = multipliers
        .iter()
        .map(|(_, y)| y.denom())
        .chain(c.iter().map(|v| v.denom()))
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let mut combo = vec![BigInt::zero(); lp.n];
    for (r, y) in multipliers {
        let scaled = y.numer() * (&den / y.denom());
        for (i, a) in lp.rows[*r].coeffs_cumulative() {
            combo[i] += &scaled * a;
        }
    }
    for (i, ci) in c.iter().enumerate() {
        let target = ci.numer() * (&den / ci.denom());
        if combo[i] != target {
            return Err(format!(
                "multipliers do not reproduce the objective at variable {}",
                i + 1
            ));
        }
    }
    // sum_r y_r rhs_r over the common denominator den * lcm(rhs denominators).
    let rden = multipliers
        .iter()
        .fold(BigInt::one(), |acc, (r, _)| acc.lcm(lp.rows[*r].rhs_upper.denom()));
    let mut total = BigInt::zero();
    for (r, y) in multipliers {
        let rhs = &lp.rows[*r].rhs_upper;
        total += y.numer() * (&den / y.denom()) * rhs.numer() * (&rden / rhs.denom());
    }
    Ok(BigRational::new(total, den * rden))
}

/// Certify an optimal floating point solution.
pub fn certify(lp: &LpInstance, sol: &PrimalDualSolution) -> Result<CertifiedBound> {
    if sol.status != Status::Optimal {
        return Err(Error::Certification(format!(
            "solution status is {:?}, not optimal",
            sol.status
        )));
    }
    let d = lp.n.saturating_sub(1);
    let mut diagnostics = Vec::new();
    if d <= EXACT_REFACTOR_LIMIT {
        let red = exact_reduced(lp);
        match exact_basis_solution(&red, &sol.basis) {
            Ok((y, _)) if !any_negative(&y) => {
                let (basis, y) = if d <= EXACT_POLISH_LIMIT {
                    let res = run(&red, sol.basis.clone(), &exact_options())?;
                    if res.status != Status::Optimal {
                        return Err(Error::Certification(format!(
                            "exact polish ended with status {:?}",
                            res.status
                        )));
                    }
                    if res.iterations > 0 {
                        diagnostics.push(format!("{} exact polish pivots", res.iterations));
                    }
                    (res.basis, res.y)
                } else {
                    (sol.basis.clone(), y)
                };
                let mult = basis.into_iter().zip(y).collect();
                let cert =
                    CertifiedBound::from_multipliers(lp, sorted(mult), CertMethod::BasisRefactor, diagnostics.clone());
                if cert.verified {
                    return Ok(cert);
                }
                diagnostics = cert.diagnostics;
            }
            Ok(_) => diagnostics.push("exact basis duals have a negative entry".into()),
            Err(e) => diagnostics.push(format!("exact refactorization failed: {e}")),
        }
    } else {
        diagnostics.push(format!("n - 1 = {d} exceeds the exact refactor limit"));
    }
    Ok(rounded_dual(lp, &sol.dual, diagnostics))
}

fn sorted(mut v: Vec<(usize, BigRational)>) -> Vec<(usize, BigRational)> {
    v.sort_by_key(|e| e.0);
    v
}

fn exact_options() -> SimplexOptions {
    SimplexOptions {
        refactor_every: 32,
        ..SimplexOptions::default()
    }
}

fn exact_reduced(lp: &LpInstance) -> Reduced<BigRational> {
    Reduced::<BigRational>::new(lp, |r| lp.rows[r].rhs_upper.clone())
}

/// Multipliers on the Wilkinson rows `k = 2..n` reproducing a q-form vector
/// `v` whose entries sum to zero: with `U_j = -sum_{i>=j} v_i` and
/// `S_j = U_j / (j - 1)`, `z_j = S_j - S_{j+1}` (`S_{n+1} = 0`).
/// Index `j - 2` of the result holds `z_j`.
fn wilkinson_absorb(v: &[BigRational]) -> Vec<BigRational> {
    let n = v.len();
    let mut s = vec![BigRational::zero(); n + 2];
    let mut u = BigRational::zero();
    for j in (2..=n).rev() {
        u -= &v[j - 1];
        s[j] = &u / BigRational::from_integer(BigInt::from(j - 1));
    }
    (2..=n).map(|j| &s[j] - &s[j + 1]).collect()
}

const ROUNDING_BITS: usize = 64;

fn rounded_dual(lp: &LpInstance, dual: &[f64], mut diagnostics: Vec<String>) -> CertifiedBound {
    let n = lp.n;
    if n < 2 {
        return CertifiedBound::from_multipliers(lp, Vec::new(), CertMethod::RoundedDual, diagnostics);
    }
    let scale = BigInt::one() << ROUNDING_BITS;
    // Integer multipliers Y_r = round(y_r 2^64), clamped at zero.
    let ys: Vec<BigInt> = dual
        .iter()
        .map(|&y| {
            if y > 0.0 && y.is_finite() {
                let v = BigRational::from_float(y).unwrap_or_else(BigRational::zero);
                (v * BigRational::from_integer(scale.clone())).round().to_integer()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    // Residual c - sum y_r a_r, in cumulative form, times den.
    let c = lp.objective.cumulative();
    let cden = c.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let den = &cden * &scale;
    let mut res_q_big: Vec<BigInt> = c.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    for (r, y) in ys.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        let yy = y * &cden;
        for (i, a) in lp.rows[r].coeffs_cumulative() {
            res_q_big[i] -= &yy * a;
        }
    }
    // Back to q-form: suffix sums.
    let mut residual = vec![BigRational::zero(); n];
    let mut acc = BigInt::zero();
    let den_r = BigRational::from_integer(den);
    for i in (0..n).rev() {
        acc += &res_q_big[i];
        residual[i] = BigRational::from_integer(acc.clone()) / &den_r;
    }
    let z = wilkinson_absorb(&residual);
    let mut y: Vec<BigRational> = ys
        .into_iter()
        .map(|v| BigRational::new(v, scale.clone()))
        .collect();
    for (j, zj) in (2..=n).zip(z) {
        y[j - 1] += zj;
    }
    // Mix in the Wilkinson dual of the objective to restore nonnegativity.
    let yw = wilkinson_absorb(&lp.objective.q);
    let mut lambda = BigRational::zero();
    for j in 2..=n {
        let v = &y[j - 1];
        if v.is_negative() {
            let w = &yw[j - 2];
            if !w.is_positive() {
                diagnostics.push(format!(
                    "cannot repair negative multiplier on Wilkinson row {j}"
                ));
                return CertifiedBound::from_multipliers(
                    lp,
                    y.into_iter().enumerate().collect(),
                    CertMethod::RoundedDual,
                    diagnostics,
                );
            }
            let need = -v / w;
            if need > lambda {
                lambda = need;
            }
        }
    }
    if lambda.is_positive() {
        diagnostics.push(format!(
            "mixed with the Wilkinson dual, weight {:.3e}",
            rational_to_f64(&lambda)
        ));
        for j in 2..=n {
            y[j - 1] += &lambda * &yw[j - 2];
        }
        let norm = BigRational::one() + &lambda;
        for v in y.iter_mut() {
            *v /= &norm;
        }
    }
    CertifiedBound::from_multipliers(
        lp,
        y.into_iter().enumerate().collect(),
        CertMethod::RoundedDual,
        diagnostics,
    )
}

/// Which objective [`wilkinson_closed_form_dual`] certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormObjective {
    HeadTail,
    Geomean,
}

/// The closed-form dual of Wilkinson's program: `y_1 = 0`,
/// `y_k = 1/((k-1)k)` for `2 <= k < n`, and `y_n = 1/(n-1)` for `q_1 - q_n`
/// (`1/((n-1)n)` for the geometric mean).
pub fn wilkinson_closed_form_dual(n: usize, objective: ClosedFormObjective) -> Result<CertifiedBound> {
    wilkinson_closed_form_dual_with(n, objective, super::model::DEFAULT_PRECISION_BITS)
}

pub fn wilkinson_closed_form_dual_with(
    n: usize,
    objective: ClosedFormObjective,
    bits: u32,
) -> Result<CertifiedBound> {
    if n < 2 {
        return Err(Error::invalid("closed-form dual needs n >= 2"));
    }
    let lp = match objective {
        ClosedFormObjective::HeadTail => build_wilkinson_lp_with(n, bits)?,
        ClosedFormObjective::Geomean => build_geomean_lp_with(n, None, bits)?,
    };
    let mult = (2..=n)
        .map(|k| {
            let kk = BigInt::from(k);
            let y = if k == n && objective == ClosedFormObjective::HeadTail {
                BigRational::new(BigInt::one(), kk - 1)
            } else {
                BigRational::new(BigInt::one(), (&kk - 1) * &kk)
            };
            (k - 1, y)
        })
        .collect();
    Ok(CertifiedBound::from_multipliers(
        &lp,
        mult,
        CertMethod::ClosedForm,
        Vec::new(),
    ))
}

/// Multipliers on the Wilkinson rows for an arbitrary objective; nonnegative
/// exactly when the Wilkinson basis is dual feasible.
pub fn wilkinson_dual_for(objective: &Objective) -> Vec<BigRational> {
    let mut y = vec![BigRational::zero()];
    y.extend(wilkinson_absorb(&objective.q));
    y.truncate(objective.q.len());
    y
}

/// The vertex of Wilkinson's program at which every row is tight:
/// `q_1 = 0`, `q_k = (S_{k-1} - (k/2) ln k) / (k - 1)`, `S_k = S_{k-1} + q_k`.
pub fn wilkinson_primal_point(n: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(n);
    let mut s = 0.0;
    for k in 1..=n {
        let v = if k == 1 {
            0.0
        } else {
            let kf = k as f64;
            (s - 0.5 * kf * kf.ln()) / (kf - 1.0)
        };
        q.push(v);
        s += v;
    }
    q
}

/// Ground-truth exact dual simplex on `rhs_upper`.
pub fn exact_simplex(lp: &LpInstance) -> Result<CertifiedBound> {
    Ok(exact_simplex_with_vertex(lp)?.0)
}

/// [`exact_simplex`] together with the optimal vertex `q_1..q_n` (`q_1 = 0`).
pub fn exact_simplex_with_vertex(lp: &LpInstance) -> Result<(CertifiedBound, Vec<BigRational>)> {
    if lp.rows.len() > EXACT_SIMPLEX_MAX_ROWS {
        return Err(Error::invalid(format!(
            "exact simplex is limited to {EXACT_SIMPLEX_MAX_ROWS} rows, instance has {}",
            lp.rows.len()
        )));
    }
    let red = exact_reduced(lp);
    let res: SimplexRun<BigRational> = run(&red, wilkinson_basis(lp), &exact_options())?;
    if res.status != Status::Optimal {
        return Err(Error::Certification(format!(
            "exact simplex ended with status {:?}",
            res.status
        )));
    }
    let diagnostics = vec![format!("{} exact pivots", res.iterations)];
    let mut q = Vec::with_capacity(lp.n);
    let mut prev = BigRational::zero();
    if lp.n > 0 {
        q.push(BigRational::zero());
    }
    for v in &res.x {
        q.push(v - &prev);
        prev = v.clone();
    }
    let mult = sorted(res.basis.into_iter().zip(res.y).collect());
    let cert = CertifiedBound::from_multipliers(lp, mult, CertMethod::ExactSimplex, diagnostics);
    if cert.bound != res.objective && cert.verified {
        return Err(Error::Certification(
            "exact simplex objective disagrees with its dual bound".into(),
        ));
    }
    Ok((cert, q))
}

/// Self-contained certificate file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub program: Program,
    pub selector: String,
    pub objective: String,
    pub objective_q: Vec<String>,
    pub form: Form,
    pub precision_bits: u32,
    pub method: CertMethod,
    pub multipliers: Vec<CertificateEntry>,
    pub bound: String,
    pub bound_f64: f64,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub k: usize,
    pub ell: usize,
    pub y: String,
}

impl Certificate {
    pub fn new(lp: &LpInstance, cert: &CertifiedBound) -> Self {
        Certificate {
            n: lp.n,
            program: lp.program,
            selector: lp.selector.to_string(),
            objective: lp.objective.label.clone(),
            objective_q: lp.objective.q.iter().map(fmt_rational).collect(),
            form: lp.form,
            precision_bits: lp.precision_bits,
            method: cert.method,
            multipliers: cert
                .multipliers
                .iter()
                .map(|(r, y)| CertificateEntry {
                    k: lp.rows[*r].k,
                    ell: lp.rows[*r].ell,
                    y: fmt_rational(y),
                })
                .collect(),
            bound: fmt_rational(&cert.bound),
            bound_f64: cert.bound_f64(),
            verified: cert.verified,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Re-verify a certificate from scratch: rebuild the instance, recompute the
/// right-hand side enclosures, check the multipliers exactly and compare the
/// recomputed bound with the recorded one.
pub fn verify_certificate(cert: &Certificate) -> Result<BigRational> {
    let selector: Selector = cert.selector.parse()?;
    let objective_q = cert
        .objective_q
        .iter()
        .map(|s| parse_rational(s).map_err(Error::invalid))
        .collect::<Result<Vec<_>>>()?;
    let mut lp = match cert.program {
        Program::Wilkinson => build_wilkinson_lp_with(cert.n, cert.precision_bits)?,
        Program::Geomean => build_geomean_lp_with(cert.n, None, cert.precision_bits)?,
        Program::Improved => build_improved_lp_with(cert.n, selector, cert.precision_bits)?,
    };
    lp.objective = Objective {
        label: cert.objective.clone(),
        q: objective_q,
    };
    lp.form = cert.form;
    if lp.objective.q.iter().fold(BigRational::zero(), |s, v| s + v) != BigRational::zero() {
        return Err(Error::Certification("objective coefficients do not sum to zero".into()));
    }
    let mut mult = Vec::with_capacity(cert.multipliers.len());
    for e in &cert.multipliers {
        let r = lp.find_row(e.k, e.ell).ok_or_else(|| {
            Error::Certification(format!("row ({}, {}) is not in the instance", e.k, e.ell))
        })?;
        let y = parse_rational(&e.y).map_err(Error::Certification)?;
        mult.push((r, y));
    }
    let bound = verify_multipliers(&lp, &mult).map_err(Error::Certification)?;
    let recorded = parse_rational(&cert.bound).map_err(Error::Certification)?;
    if bound != recorded {
        return Err(Error::Certification(format!(
            "recomputed bound {} differs from the recorded {}",
            fmt_rational(&bound),
            cert.bound
        )));
    }
    Ok(bound)
}

/// Rigorous lower enclosure of `(1/2)(ln n + sum_{k=2}^n ln k / (k-1))`.
pub fn wilkinson_closed_form_lower(n: usize, bits: u32) -> BigRational {
    let mut total = BigRational::zero();
    if n < 2 {
        return total;
    }
    for k in 2..=n {
        let lo = crate::enclosure::ln_interval(
            &BigRational::from_integer(BigInt::from(k)),
            bits + 16,
        )
        .lo;
        total += lo / BigRational::from_integer(BigInt::from(2 * (k - 1)));
    }
    let ln_n = crate::enclosure::ln_interval(&BigRational::from_integer(BigInt::from(n)), bits + 16).lo;
    total + ln_n / BigRational::from_integer(BigInt::from(2))
}

/// The binary64 value of a row's true right-hand side, for reports.
pub fn rhs_true_f64(expr: RhsExpr) -> f64 {
    expr.value_f64()
}

/// Approximate bit size of a certificate, for diagnostics.
pub fn certificate_bits(cert: &CertifiedBound) -> u64 {
    cert.multipliers
        .iter()
        .map(|(_, y)| y.numer().bits() + y.denom().bits())
        .sum::<u64>()
        + cert.bound.denom().bits()
        + cert.bound.numer().abs().bits()
}

/// `n` as i64 helper used by reports.
pub fn n_i64(n: usize) -> i64 {
    n.to_i64().unwrap_or(i64::MAX)
}
