//! Singular values by cyclic one-sided Jacobi sweeps.
//!
//! Complex inputs are handled through the real embedding
//! `[[Re M, -Im M], [Im M, Re M]]`, whose singular values are those of `M`,
//! each repeated twice.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const MAX_SWEEPS: usize = 30;
pub const RESIDUAL_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    /// Nonincreasing singular values.
    pub values: Vec<f64>,
    /// Off-diagonal mass of the Gram matrix divided by `||A||_F` at exit.
    pub residual: f64,
    pub sweeps: usize,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// 2-norm condition number `sigma_1 / sigma_n`.
    pub fn condition_number(&self) -> f64 {
        self.largest() / self.smallest()
    }

    pub fn ln_product(&self) -> f64 {
        self.values.iter().map(|s| s.ln()).sum()
    }
}

pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> Result<SingularSpectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "singular values need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if T::IS_COMPLEX {
        let c = a.to_f64_complex();
        let m = 2 * n;
        let mut cols = vec![vec![0.0; m]; m];
        for i in 0..n {
            for j in 0..n {
                let z = c.get(i, j);
                cols[j][i] = z.re;
                cols[j][i + n] = z.im;
                cols[j + n][i] = -z.im;
                cols[j + n][i + n] = z.re;
            }
        }
        let mut spec = jacobi(cols)?;
        spec.values = spec.values.chunks(2).map(|p| p[0].max(p[1])).collect();
        // The embedding doubles ||A||_F^2.
        spec.residual /= std::f64::consts::SQRT_2;
        Ok(spec)
    } else {
        let cols = (0..n)
            .map(|j| (0..n).map(|i| a.get(i, j).to_c64().re).collect())
            .collect();
        jacobi(cols)
    }
}

/// One-sided Jacobi on a real matrix given by its columns.
fn jacobi(mut cols: Vec<Vec<f64>>) -> Result<SingularSpectrum> {
    let n = cols.len();
    let fro_sq: f64 = cols.iter().flatten().map(|x| x * x).sum();
    let fro = fro_sq.sqrt();
    if fro == 0.0 {
        return Ok(SingularSpectrum {
            values: vec![0.0; n],
            residual: 0.0,
            sweeps: 0,
        });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut sweeps = 0;
    let mut residual = off_diagonal(&cols) / fro;
    while residual >= RESIDUAL_TOL * fro {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        residual = off_diagonal(&cols) / fro;
    }

    let mut values: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularSpectrum {
        values,
        residual,
        sweeps,
    })
}

/// Frobenius norm of the off-diagonal part of the Gram matrix `A^T A`.
fn off_diagonal(cols: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for p in 0..cols.len() {
        for q in p + 1..cols.len() {
            let g: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
            acc += 2.0 * g * g;
        }
    }
    acc.sqrt()
}

/// 2-norm condition number via singular values.
pub fn condition_number<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    Ok(singular_values(a)?.condition_number())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn identity_and_diagonal() {
        let s = singular_values(&Matrix::<f64>::identity(4)).unwrap();
        assert_eq!(s.values, vec![1.0; 4]);
        let d = Matrix::from_rows(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert_eq!(singular_values(&d).unwrap().values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = Matrix::from_rows(vec![vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        // sigma^2 are the eigenvalues of A^T A = [[25, 20], [20, 25]].
        assert!((s.values[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((s.values[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn complex_scalar_multiple_of_unitary() {
        let i = Complex64::new(0.0, 1.0);
        let a = Matrix::from_rows(vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), i * 2.0],
        ])
        .unwrap();
        let s = singular_values(&a).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!(s.values.iter().all(|v| (v - 2.0).abs() < 1e-14));
    }

    #[test]
    fn zero_matrix() {
        let s = singular_values(&Matrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(s.values, vec![0.0; 3]);
    }
}
