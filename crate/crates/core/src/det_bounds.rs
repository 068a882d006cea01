//! Determinant inequalities behind the pivot constraints.
//!
//! * Hadamard: `|det A| <= prod_j ||a_j||_2`.
//! * Singular-value sum bound: `|det(A + B)| <= prod_i (sigma_i(A) + sigma_{n-i+1}(B))`.
//! * Low-rank Hadamard: if `||A||_F <= n`, `||B||_F <= C n` and `rank B <= l`,
//!   then `|det(A + B)| <= n^n / ((n-l)^((n-l)/2) l^(l/2)) (1 + C)^l`.
//! * Long-range pivot bound: the low-rank bound applied to the split of
//!   `A^(k)` against `A^(k+l)`.
//!
//! Closed forms are evaluated in log space. The `*_sq` variants return the
//! exact square of a bound as a rational so that exact determinants can be
//! compared without any rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::ge::{iterate, EliminationTrace};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::svd::singular_values;

/// `prod_j ||column_j||_2`.
pub fn hadamard_bound<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    Ok(ln_hadamard_bound(a)?.exp())
}

pub fn ln_hadamard_bound<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    require_square(a)?;
    Ok((0..a.cols())
        .map(|j| {
            let s: f64 = (0..a.rows()).map(|i| a.get(i, j).modulus_f64().powi(2)).sum();
            0.5 * s.ln()
        })
        .sum())
}

/// `prod_j ||column_j||_2^2`, exact for rational entries.
pub fn hadamard_bound_sq<T: Scalar>(a: &Matrix<T>) -> Result<T::Real> {
    require_square(a)?;
    let mut acc = T::Real::one();
    for j in 0..a.cols() {
        let col = (0..a.rows()).fold(T::Real::zero(), |s, i| s + a.get(i, j).abs_sq());
        acc = acc * col;
    }
    Ok(acc)
}

/// `prod_i (sigma_i(A) + sigma_{n-i+1}(B))`.
pub fn sv_det_bound<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<f64> {
    Ok(ln_sv_det_bound(a, b)?.exp())
}

pub fn ln_sv_det_bound<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<f64> {
    require_square(a)?;
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let sa = singular_values(a)?.values;
    let sb = singular_values(b)?.values;
    Ok(sa
        .iter()
        .zip(sb.iter().rev())
        .map(|(x, y)| (x + y).ln())
        .sum())
}

/// `ln[ n^n / ((n-l)^((n-l)/2) l^(l/2)) ]` with `0^0 = 1`.
pub fn ln_lowrank_base(n: usize, ell: usize) -> f64 {
    let xlnx = |m: usize| if m == 0 { 0.0 } else { m as f64 * (m as f64).ln() };
    xlnx(n) - 0.5 * xlnx(n - ell) - 0.5 * xlnx(ell)
}

/// Natural log of the low-rank Hadamard right-hand side
/// `n^n / ((n-l)^((n-l)/2) l^(l/2)) (1 + C)^l`.
pub fn ln_lowrank_hadamard_rhs(n: usize, ell: usize, c: f64) -> Result<f64> {
    if ell > n {
        return Err(Error::invalid(format!("rank bound {ell} exceeds dimension {n}")));
    }
    if !(c >= 0.0) {
        return Err(Error::invalid("C must be nonnegative"));
    }
    Ok(ln_lowrank_base(n, ell) + ell as f64 * c.ln_1p())
}

pub fn lowrank_hadamard_rhs(n: usize, ell: usize, c: f64) -> Result<f64> {
    Ok(ln_lowrank_hadamard_rhs(n, ell, c)?.exp())
}

/// Exact square of the low-rank Hadamard right-hand side for rational `C`:
/// `n^(2n) (1 + C)^(2l) / ((n-l)^(n-l) l^l)`.
pub fn lowrank_hadamard_rhs_sq(n: usize, ell: usize, c: &BigRational) -> Result<BigRational> {
    if ell > n {
        return Err(Error::invalid(format!("rank bound {ell} exceeds dimension {n}")));
    }
    let num = int_pow(n, 2 * n);
    let den = int_pow(n - ell, n - ell) * int_pow(ell, ell);
    let one_plus: BigRational = BigRational::one() + c;
    Ok(BigRational::new(num, den) * Pow::pow(one_plus, 2 * ell))
}

fn int_pow(base: usize, exp: usize) -> BigInt {
    // 0^0 = 1
    Pow::pow(BigInt::from(base), exp)
}

/// Natural log of the long-range pivot bound
/// `p_{k+l}^k k^k / ((k-l)^((k-l)/2) l^(l/2)) (1 + p_k/p_{k+l})^l`.
pub fn ln_longrange_pivot_rhs(k: usize, ell: usize, p_k: f64, p_kl: f64) -> Result<f64> {
    check_longrange(k, ell)?;
    if !(p_k > 0.0 && p_kl > 0.0) {
        return Err(Error::invalid("pivots must be positive"));
    }
    Ok(k as f64 * p_kl.ln() + ln_lowrank_base(k, ell) + ell as f64 * (p_k / p_kl).ln_1p())
}

pub fn longrange_pivot_rhs(k: usize, ell: usize, p_k: f64, p_kl: f64) -> Result<f64> {
    Ok(ln_longrange_pivot_rhs(k, ell, p_k, p_kl)?.exp())
}

/// Exact square of the long-range pivot bound from squared pivot moduli.
pub fn longrange_pivot_rhs_sq(
    k: usize,
    ell: usize,
    p_k_sq: &BigRational,
    p_kl_sq: &BigRational,
) -> Result<BigRational> {
    check_longrange(k, ell)?;
    if p_kl_sq.is_zero() {
        return Err(Error::invalid("pivots must be positive"));
    }
    // (1 + p_k/p_kl)^(2l) needs the unsquared ratio; for real pivots the
    // moduli are rational square roots of the inputs.
    let ratio = rational_sqrt(&(p_k_sq / p_kl_sq))
        .ok_or_else(|| Error::invalid("pivot ratio is not a rational square"))?;
    let c = ratio;
    let base = lowrank_hadamard_rhs_sq(k, ell, &c)?;
    Ok(base * Pow::pow(p_kl_sq.clone(), k))
}

fn check_longrange(k: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell >= k {
        return Err(Error::invalid(format!("need 0 < l < k, got k={k}, l={ell}")));
    }
    Ok(())
}

/// Exact square root of a rational square, if it is one.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x < &BigRational::zero() {
        return None;
    }
    let n = num_integer::Roots::sqrt(x.numer());
    let d = num_integer::Roots::sqrt(x.denom());
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Square of the relaxed long-range bound `(11k/4)^(k/2) p_{k+l}^(k-l) p_k^l`.
pub fn relaxed_longrange_rhs_sq(
    k: usize,
    ell: usize,
    p_k_sq: &BigRational,
    p_kl_sq: &BigRational,
) -> BigRational {
    let base = BigRational::new(BigInt::from(11 * k), BigInt::from(4));
    Pow::pow(base, k) * Pow::pow(p_kl_sq.clone(), k - ell) * Pow::pow(p_k_sq.clone(), ell)
}

/// The orthogonal-projection split `A = X - Y = small + lowrank`, with
/// `small = X - tau Y`, `lowrank = (tau - 1) Y` and
/// `tau = Re<X, Y>_F / ||Y||_F^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPair<T: Scalar> {
    pub small: Matrix<T>,
    pub lowrank: Matrix<T>,
    pub tau: T::Real,
    pub rank_bound: usize,
}

impl<T: Scalar> SplitPair<T> {
    /// `small + lowrank`, which equals `X - Y`.
    pub fn recombined(&self) -> Matrix<T> {
        self.small
            .try_add(&self.lowrank)
            .expect("split parts share a shape")
    }
}

pub fn split_iterate<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<SplitPair<T>> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let y_sq = y.frobenius_sq();
    if y_sq.is_zero() {
        return Err(Error::invalid("split needs a nonzero Y"));
    }
    let tau = x.frobenius_re_inner(y) / y_sq;
    let small = x.try_sub(&y.scaled(&tau))?;
    let lowrank = y.scaled(&(tau.clone() - T::Real::one()));
    Ok(SplitPair {
        small,
        lowrank,
        tau,
        rank_bound: y.rows().min(y.cols()),
    })
}

/// Split `A^(k)` against `A^(k+l)` for a trace: `X` is the trailing k x k
/// block of `A^(k+l)` and `Y = N21 N11^{-1} N12` has rank at most `l`.
pub fn split_from_trace<T: Scalar>(
    trace: &EliminationTrace<T>,
    k: usize,
    ell: usize,
) -> Result<SplitPair<T>> {
    if ell == 0 || k + ell > trace.n() {
        return Err(Error::invalid(format!(
            "need 0 < l and k + l <= n, got k={k}, l={ell}, n={}",
            trace.n()
        )));
    }
    let big = iterate(trace, k + ell)?;
    let x = big.submatrix(ell, ell, k, k);
    let small = iterate(trace, k)?;
    let y = x.try_sub(&small)?;
    let mut pair = split_iterate(&x, &y)?;
    pair.rank_bound = ell;
    Ok(pair)
}

fn require_square<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// Extremal constants used to relax the long-range constraints.
pub mod relaxation {
    /// `(1/t)^(t/2) (1/(1-t))^((1-t)/2)`, maximal (`sqrt 2`) at `t = 1/2`.
    pub fn entropy_factor(t: f64) -> f64 {
        (-(0.5 * t * t.ln() + 0.5 * (1.0 - t) * (1.0 - t).ln())).exp()
    }

    /// `(1 + (2/sqrt 11)^(1/(1-t)))^t`.
    pub fn case_split_factor(t: f64) -> f64 {
        let r = 2.0 / 11f64.sqrt();
        (1.0 + r.powf(1.0 / (1.0 - t))).powf(t)
    }

    /// Maximum of `f` on `(0, 1)`: dense grid, then golden-section refinement
    /// around the best grid point.
    pub fn maximize_unit_interval(f: impl Fn(f64) -> f64, grid: usize) -> (f64, f64) {
        let h = 1.0 / grid as f64;
        let mut best_t = h;
        let mut best = f(h);
        for i in 1..grid {
            let t = i as f64 * h;
            let v = f(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let (mut a, mut b) = ((best_t - h).max(1e-12), (best_t + h).min(1.0 - 1e-12));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) >= f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        let v = f(t);
        if v > best {
            (t, v)
        } else {
            (best_t, best)
        }
    }
}
