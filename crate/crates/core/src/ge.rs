//! Gaussian elimination with complete, partial or no pivoting.
//!
//! The k-th iterate `A^(k)` is the k x k Schur complement left after `n - k`
//! elimination steps; its top-left entry is the pivot `p_k`. Traces keep the
//! pivots in elimination order (`p_n` first) together with the permutations and
//! the L/U factors. Iterates are not stored; [`iterate`] rebuilds them from the
//! trailing blocks of L and U.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{RealScalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotStrategy {
    Complete,
    Partial,
    None,
}

/// Working precision for the binary64 solver.
///
/// `mantissa_bits < 53` is emulated by rounding to nearest (ties to even)
/// after every arithmetic operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatConfig {
    mantissa_bits: u32,
}

impl FloatConfig {
    pub const BINARY64: FloatConfig = FloatConfig { mantissa_bits: 53 };

    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < 2 {
            return Err(Error::invalid("mantissa bits must be at least 2"));
        }
        Ok(FloatConfig { mantissa_bits })
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// Unit roundoff `2^-mantissa_bits`.
    pub fn unit_roundoff(&self) -> f64 {
        2f64.powi(-(self.mantissa_bits.min(1000) as i32))
    }

    pub fn round(&self, x: f64) -> f64 {
        if self.mantissa_bits >= 53 || x == 0.0 || !x.is_finite() {
            return x;
        }
        let exp = x.abs().log2().floor() as i32;
        let scale = 2f64.powi(self.mantissa_bits as i32 - 1 - exp);
        (x * scale).round_ties_even() / scale
    }
}

impl Default for FloatConfig {
    fn default() -> Self {
        Self::BINARY64
    }
}

#[derive(Clone, Debug)]
pub struct EliminationTrace<T: Scalar> {
    n: usize,
    strategy: PivotStrategy,
    /// Pivots in elimination order: `pivots[0] = p_n`, ..., `pivots[n-1] = p_1`.
    pivots: Vec<T>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    lower: Matrix<T>,
    upper: Matrix<T>,
    /// An entry of maximal modulus of each iterate, in elimination order.
    max_entries: Vec<T>,
}

impl<T: Scalar> EliminationTrace<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn strategy(&self) -> PivotStrategy {
        self.strategy
    }

    /// Pivots in elimination order (`p_n, p_{n-1}, ..., p_1`).
    pub fn pivots(&self) -> &[T] {
        &self.pivots
    }

    /// The pivot `p_k` of the k x k iterate, `1 <= k <= n`.
    pub fn pivot(&self, k: usize) -> &T {
        &self.pivots[self.n - k]
    }

    /// `|p_1|, ..., |p_n|` as binary64 (index `k - 1` holds `|p_k|`).
    pub fn pivot_moduli(&self) -> Vec<f64> {
        (1..=self.n).map(|k| self.pivot(k).modulus_f64()).collect()
    }

    /// Position `i` of the permuted matrix holds original row `row_perm[i]`.
    pub fn row_perm(&self) -> &[usize] {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &[usize] {
        &self.col_perm
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Matrix<T> {
        &self.upper
    }

    /// Entry of maximal modulus of `A^(k)`.
    pub fn max_entry(&self, k: usize) -> &T {
        &self.max_entries[self.n - k]
    }

    /// `||A^(k)||_max^2`.
    pub fn max_abs_sq(&self, k: usize) -> T::Real {
        self.max_entry(k).abs_sq()
    }

    /// Squared growth factor, exact in the rational modes.
    pub fn growth_factor_sq(&self) -> T::Real {
        let base = self.max_entries[0].abs_sq();
        let mut best = base.clone();
        for e in &self.max_entries[1..] {
            let m = e.abs_sq();
            if m > best {
                best = m;
            }
        }
        best / base
    }
}

impl<T: RealScalar> EliminationTrace<T> {
    /// Growth factor of a real trace, exact in rational mode.
    pub fn growth_factor_exact(&self) -> T {
        let base = self.max_entries[0].abs();
        let mut best = base.clone();
        for e in &self.max_entries[1..] {
            let m = e.abs();
            if m > best {
                best = m;
            }
        }
        best / base
    }
}

/// `max_k ||A^(k)||_max / ||A||_max`.
pub fn growth_factor<T: Scalar>(trace: &EliminationTrace<T>) -> f64 {
    trace.growth_factor_sq().approx_f64().sqrt()
}

pub fn eliminate<T: Scalar>(a: &Matrix<T>, strategy: PivotStrategy) -> Result<EliminationTrace<T>> {
    eliminate_with(a, strategy, |x| x)
}

/// Elimination with a rounding hook applied after every arithmetic operation.
fn eliminate_with<T: Scalar>(
    a: &Matrix<T>,
    strategy: PivotStrategy,
    round: impl Fn(T) -> T,
) -> Result<EliminationTrace<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "elimination needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut row_perm: Vec<usize> = (0..n).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    let mut max_entries = Vec::with_capacity(n);

    for s in 0..n {
        // Largest entry of the active block; first hit wins ties, which scans
        // rows then columns in ascending order.
        let (mut mi, mut mj) = (s, s);
        let mut best = w.get(s, s).abs_sq();
        for i in s..n {
            for j in s..n {
                let m = w.get(i, j).abs_sq();
                if m > best {
                    best = m;
                    mi = i;
                    mj = j;
                }
            }
        }
        max_entries.push(w.get(mi, mj).clone());

        let (pi, pj) = match strategy {
            PivotStrategy::Complete => (mi, mj),
            PivotStrategy::Partial => {
                let mut pi = s;
                let mut best = w.get(s, s).abs_sq();
                for i in s + 1..n {
                    let m = w.get(i, s).abs_sq();
                    if m > best {
                        best = m;
                        pi = i;
                    }
                }
                (pi, s)
            }
            PivotStrategy::None => (s, s),
        };
        if w.get(pi, pj).is_zero() {
            return Err(Error::SingularMatrix { step: s + 1 });
        }
        if pi != s {
            for j in 0..n {
                let tmp = w.get(s, j).clone();
                let other = w.get(pi, j).clone();
                w.set(s, j, other);
                w.set(pi, j, tmp);
            }
            row_perm.swap(s, pi);
        }
        if pj != s {
            for i in 0..n {
                let tmp = w.get(i, s).clone();
                let other = w.get(i, pj).clone();
                w.set(i, s, other);
                w.set(i, pj, tmp);
            }
            col_perm.swap(s, pj);
        }

        let pivot = w.get(s, s).clone();
        pivots.push(pivot.clone());
        for i in s + 1..n {
            let factor = w.get(i, s).clone();
            if factor.is_zero() {
                continue;
            }
            let l = round(factor / pivot.clone());
            for j in s + 1..n {
                let u = w.get(s, j);
                if u.is_zero() {
                    continue;
                }
                let prod = round(l.clone() * u.clone());
                let v = round(w.get(i, j).clone() - prod);
                w.set(i, j, v);
            }
            w.set(i, s, l);
        }
    }

    let lower = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => w.get(i, j).clone(),
        std::cmp::Ordering::Equal => T::one(),
        std::cmp::Ordering::Less => T::zero(),
    });
    let upper = Matrix::from_fn(n, n, |i, j| {
        if i <= j {
            w.get(i, j).clone()
        } else {
            T::zero()
        }
    });
    Ok(EliminationTrace {
        n,
        strategy,
        pivots,
        row_perm,
        col_perm,
        lower,
        upper,
        max_entries,
    })
}

/// The iterate `A^(k)` (in the trace's permuted coordinates), rebuilt as the
/// product of the trailing k x k blocks of L and U.
pub fn iterate<T: Scalar>(trace: &EliminationTrace<T>, k: usize) -> Result<Matrix<T>> {
    let n = trace.n;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("iterate index {k} outside 1..={n}")));
    }
    let s = n - k;
    let l = trace.lower.submatrix(s, s, k, k);
    let u = trace.upper.submatrix(s, s, k, k);
    l.matmul(&u)
}

/// Wilkinson's matrix: 1 on the diagonal and in the last column, -1 below the
/// diagonal, 0 elsewhere. Partial pivoting grows it by `2^(n-1)`.
pub fn wilkinson_matrix<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        if i > j {
            T::from_i64(-1)
        } else if i == j || j == n - 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Exact (or plain binary64) solve of `A x = b`.
pub fn solve_linear_system<T: Scalar>(a: &Matrix<T>, b: &[T], strategy: PivotStrategy) -> Result<Vec<T>> {
    solve_with(a, b, strategy, |x| x)
}

/// Binary64 solve at the working precision given by `cfg`.
pub fn solve_linear_system_f64(
    a: &Matrix<f64>,
    b: &[f64],
    strategy: PivotStrategy,
    cfg: FloatConfig,
) -> Result<Vec<f64>> {
    solve_with(a, b, strategy, |x| cfg.round(x))
}

fn solve_with<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    strategy: PivotStrategy,
    round: impl Fn(T) -> T + Copy,
) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let trace = eliminate_with(a, strategy, round)?;
    Ok(substitute(&trace, b, round))
}

/// Forward and back substitution with the factors of a trace.
fn substitute<T: Scalar>(trace: &EliminationTrace<T>, b: &[T], round: impl Fn(T) -> T) -> Vec<T> {
    let n = trace.n;
    let (l, u) = (&trace.lower, &trace.upper);
    let mut y: Vec<T> = trace.row_perm.iter().map(|&r| b[r].clone()).collect();
    for i in 0..n {
        let mut acc = y[i].clone();
        for j in 0..i {
            let lij = l.get(i, j);
            if !lij.is_zero() {
                acc = round(acc - round(lij.clone() * y[j].clone()));
            }
        }
        y[i] = acc;
    }
    for i in (0..n).rev() {
        let mut acc = y[i].clone();
        for j in i + 1..n {
            let uij = u.get(i, j);
            if !uij.is_zero() {
                acc = round(acc - round(uij.clone() * y[j].clone()));
            }
        }
        y[i] = round(acc / u.get(i, i).clone());
    }
    let mut x = vec![T::zero(); n];
    for (pos, &c) in trace.col_perm.iter().enumerate() {
        x[c] = y[pos].clone();
    }
    x
}

/// Log-pivots `q_k = ln |p_k|`, `k = 1..n`.
pub fn log_pivots<T: Scalar>(trace: &EliminationTrace<T>) -> Vec<f64> {
    (1..=trace.n)
        .map(|k| 0.5 * trace.pivot(k).abs_sq().ln_f64())
        .collect()
}

/// Convenience: exact rational matrix from integer rows.
pub fn rational_matrix(rows: &[&[i64]]) -> Result<Matrix<BigRational>> {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| BigRational::from_i64(v)).collect())
            .collect(),
    )
}
