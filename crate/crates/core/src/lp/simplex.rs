//! Dual simplex over the cumulative variables.
//!
//! The program `max c^T x s.t. A x <= b` has free variables, so a basis is a
//! set of `d` rows whose matrix `A_B` is nonsingular. The basis is dual
//! feasible when `y_B = A_B^{-T} c >= 0`, and optimal when in addition the
//! vertex `x = A_B^{-1} b_B` satisfies every row. Iterations pick a violated
//! row, bring it into the basis and drop the basic row found by the ratio test
//! on the duals, so the dual objective `b_B^T y_B` never increases.
//!
//! The gauge `q_1 = 0` (equivalently `Q(1) = 0`) removes the one-dimensional
//! shift symmetry, leaving `d = n - 1` variables `Q(2)..Q(n)`. The rows
//! `(k, 0)`, `k = 2..n`, form a lower bidiagonal starting basis that is dual
//! feasible for every objective with nonnegative weights.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::model::LpInstance;
use super::sparse_lu::{LuField, SparseLu};
use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pricing {
    /// Largest violation relative to the row norm.
    Normalized,
    /// Lowest-index violated row and lowest-index ratio-test ties.
    Bland,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub refactor_every: usize,
    /// Iterations without a dual objective decrease before switching to
    /// Bland's rule.
    pub stall_limit: usize,
    pub pricing: Pricing,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 500_000,
            refactor_every: 64,
            stall_limit: 50,
            pricing: Pricing::Normalized,
        }
    }
}

/// Tolerances of a field; all zero for exact arithmetic.
pub trait SimplexField: LuField {
    fn primal_tol(rhs: &Self) -> Self;
    fn pivot_tol() -> Self;
    fn harris_tol() -> Self;
    fn from_rational(r: &BigRational) -> Self;
}

impl SimplexField for f64 {
    fn primal_tol(rhs: &f64) -> f64 {
        1e-9 * (1.0 + f64::abs(*rhs))
    }
    fn pivot_tol() -> f64 {
        1e-9
    }
    fn harris_tol() -> f64 {
        1e-11
    }
    fn from_rational(r: &BigRational) -> f64 {
        rational_to_f64(r)
    }
}

impl SimplexField for BigRational {
    fn primal_tol(_: &Self) -> Self {
        BigRational::zero()
    }
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn harris_tol() -> Self {
        BigRational::zero()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Rows and objective over `Q(2)..Q(n)` in the field `T`.
pub(crate) struct Reduced<T> {
    pub d: usize,
    pub rows: Vec<Vec<(usize, T)>>,
    pub rhs: Vec<T>,
    pub norm_sq: Vec<T>,
    pub c: Vec<T>,
}

impl<T: SimplexField> Reduced<T> {
    pub fn new(lp: &LpInstance, rhs_of: impl Fn(usize) -> T) -> Self {
        let d = lp.n.saturating_sub(1);
        let rows: Vec<Vec<(usize, T)>> = lp
            .rows
            .iter()
            .map(|row| {
                row.coeffs_cumulative()
                    .into_iter()
                    .filter(|&(i, _)| i >= 1)
                    .map(|(i, c)| (i - 1, T::from_i64(c)))
                    .collect()
            })
            .collect();
        let norm_sq = rows
            .iter()
            .map(|r| r.iter().fold(T::zero(), |s, (_, v)| s + v.clone() * v.clone()))
            .collect();
        let rhs = (0..lp.rows.len()).map(rhs_of).collect();
        let c = lp
            .objective
            .cumulative()
            .iter()
            .skip(1)
            .map(T::from_rational)
            .collect();
        Reduced {
            d,
            rows,
            rhs,
            norm_sq,
            c,
        }
    }

    fn column(&self, r: usize) -> &[(usize, T)] {
        &self.rows[r]
    }

    fn dot(&self, r: usize, x: &[T]) -> T {
        self.rows[r]
            .iter()
            .fold(T::zero(), |s, (i, v)| s + v.clone() * x[*i].clone())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SimplexRun<T> {
    pub status: Status,
    /// Basic row per basis position.
    pub basis: Vec<usize>,
    /// `Q(2)..Q(n)` at the final vertex.
    pub x: Vec<T>,
    /// Duals per basis position.
    pub y: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    pub bland_switches: usize,
}

/// The Wilkinson rows `k = 2..n`, which occupy row indices `1..n`.
pub(crate) fn wilkinson_basis(lp: &LpInstance) -> Vec<usize> {
    (1..lp.n).collect()
}

fn factor<T: SimplexField>(red: &Reduced<T>, basis: &[usize]) -> Result<SparseLu<T>> {
    let cols: Vec<Vec<(usize, T)>> = basis.iter().map(|&r| red.column(r).to_vec()).collect();
    SparseLu::factor(red.d, &cols)
}

pub(crate) fn run<T: SimplexField>(
    red: &Reduced<T>,
    start: Vec<usize>,
    opts: &SimplexOptions,
) -> Result<SimplexRun<T>> {
    let d = red.d;
    let m = red.rows.len();
    if start.len() != d {
        return Err(Error::invalid(format!(
            "basis has {} rows, expected {d}",
            start.len()
        )));
    }
    let mut basis = start;
    let mut position = vec![usize::MAX; m];
    for (p, &r) in basis.iter().enumerate() {
        if r >= m || position[r] != usize::MAX {
            return Err(Error::invalid("basis rows must be distinct row indices"));
        }
        position[r] = p;
    }
    let mut lu = factor(red, &basis)?;
    let mut y = lu.ftran(&red.c);
    let neg_tol = T::zero() - T::from_f64_lossy(1e-9);
    if y.iter().any(|v| *v < neg_tol) {
        return Err(Error::Unbounded);
    }
    clamp_nonnegative(&mut y);

    let mut pricing = opts.pricing;
    let mut bland_switches = 0;
    let mut iterations = 0;
    let mut best_obj: Option<T> = None;
    let mut since_improvement = 0;

    loop {
        let b_basis: Vec<T> = basis.iter().map(|&r| red.rhs[r].clone()).collect();
        let x = lu.btran(&b_basis);
        let objective = b_basis
            .iter()
            .zip(&y)
            .fold(T::zero(), |s, (b, v)| s + b.clone() * v.clone());

        match &best_obj {
            Some(best) if !(objective.clone() < best.clone() - T::harris_tol()) => {
                since_improvement += 1;
                if since_improvement >= opts.stall_limit && pricing != Pricing::Bland {
                    pricing = Pricing::Bland;
                    bland_switches += 1;
                }
            }
            _ => {
                best_obj = Some(objective.clone());
                since_improvement = 0;
            }
        }

        // Entering row.
        let mut entering: Option<(usize, T)> = None;
        let mut best_score = T::zero();
        for r in 0..m {
            if position[r] != usize::MAX || red.rows[r].is_empty() {
                continue;
            }
            let slack = red.rhs[r].clone() - red.dot(r, &x);
            if !(slack < T::zero() - T::primal_tol(&red.rhs[r])) {
                continue;
            }
            match pricing {
                Pricing::Bland => {
                    entering = Some((r, slack));
                    break;
                }
                Pricing::Normalized => {
                    let score = slack.clone() * slack.clone() / red.norm_sq[r].clone();
                    if entering.is_none() || score > best_score {
                        best_score = score;
                        entering = Some((r, slack));
                    }
                }
            }
        }
        let Some((r, _)) = entering else {
            return Ok(SimplexRun {
                status: Status::Optimal,
                basis,
                x,
                y,
                objective,
                iterations,
                bland_switches,
            });
        };
        if iterations >= opts.max_iterations {
            return Ok(SimplexRun {
                status: Status::IterationLimit,
                basis,
                x,
                y,
                objective,
                iterations,
                bland_switches,
            });
        }
        iterations += 1;

        // a_r = sum_p w_p a_{B_p}
        let mut a_r = vec![T::zero(); d];
        for (i, v) in red.column(r) {
            a_r[*i] = v.clone();
        }
        let w = lu.ftran(&a_r);
        let Some(p) = ratio_test(&w, &y, &basis, pricing) else {
            return Ok(SimplexRun {
                status: Status::Infeasible,
                basis,
                x,
                y,
                objective,
                iterations,
                bland_switches,
            });
        };
        let mut t = y[p].clone() / w[p].clone();
        if t < T::zero() {
            t = T::zero();
        }
        for i in 0..d {
            if !w[i].is_zero() {
                y[i] = y[i].clone() - t.clone() * w[i].clone();
            }
        }
        y[p] = t;
        clamp_nonnegative(&mut y);
        position[basis[p]] = usize::MAX;
        basis[p] = r;
        position[r] = p;

        if lu.num_updates() + 1 >= opts.refactor_every {
            lu = factor(red, &basis)?;
            if !T::IS_EXACT {
                y = lu.ftran(&red.c);
                clamp_nonnegative(&mut y);
            }
        } else {
            lu.update(p, &w)?;
        }
    }
}

/// Leaving position: minimum ratio `y_p / w_p` over `w_p > 0`, with a Harris
/// two-pass choice in floating point and lowest-row-index ties.
fn ratio_test<T: SimplexField>(w: &[T], y: &[T], basis: &[usize], pricing: Pricing) -> Option<usize> {
    let tol = T::pivot_tol();
    let harris = T::harris_tol();
    let mut bound: Option<T> = None;
    for i in 0..w.len() {
        if w[i] > tol {
            let ratio = (y[i].clone() + harris.clone()) / w[i].clone();
            if bound.as_ref().map_or(true, |b| ratio < *b) {
                bound = Some(ratio);
            }
        }
    }
    let bound = bound?;
    let mut best: Option<usize> = None;
    for i in 0..w.len() {
        if !(w[i] > tol) {
            continue;
        }
        let ratio = y[i].clone() / w[i].clone();
        if ratio > bound {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let better = if T::IS_EXACT || pricing == Pricing::Bland {
                    let rb = y[b].clone() / w[b].clone();
                    ratio < rb || (ratio == rb && basis[i] < basis[b])
                } else {
                    w[i] > w[b] || (w[i] == w[b] && basis[i] < basis[b])
                };
                if better {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

fn clamp_nonnegative<T: SimplexField>(y: &mut [T]) {
    for v in y.iter_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

/// Exact duals on a basis: `A_B^{-T} c`, plus the vertex `A_B^{-1} b_B`.
pub(crate) fn exact_basis_solution(
    red: &Reduced<BigRational>,
    basis: &[usize],
) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let lu = factor(red, basis)?;
    let y = lu.ftran(&red.c);
    let b: Vec<BigRational> = basis.iter().map(|&r| red.rhs[r].clone()).collect();
    let x = lu.btran(&b);
    Ok((y, x))
}

pub(crate) fn any_negative(y: &[BigRational]) -> bool {
    y.iter().any(|v| v.is_negative())
}
