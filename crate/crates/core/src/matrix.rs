//! Dense row-major matrices and the plain-text matrix file format.
//!
//! File layout: a header line `rows cols mode`, then one matrix row per line
//! with whitespace-separated entries. Rationals are written `p/q` (or just
//! `p`), complex entries `re,im`. Modes are `rational-real`,
//! `rational-complex`, `binary64-real` and `binary64-complex`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ComplexRational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// `result[i][j] = self[row_perm[i]][col_perm[j]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(row_perm[i], col_perm[j]).clone()
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scaled(&self, r: &T::Real) -> Self {
        self.map(|x| x.scale(r))
    }

    /// Largest squared entry modulus.
    pub fn max_abs_sq(&self) -> T::Real {
        let mut best = T::Real::zero();
        for x in &self.data {
            let m = x.abs_sq();
            if m > best {
                best = m;
            }
        }
        best
    }

    pub fn frobenius_sq(&self) -> T::Real {
        self.data
            .iter()
            .fold(T::Real::zero(), |acc, x| acc + x.abs_sq())
    }

    /// `Re <self, other>_F`.
    pub fn frobenius_re_inner(&self, other: &Self) -> T::Real {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::Real::zero(), |acc, (a, b)| acc + a.re_mul_conj(b))
    }

    pub fn to_f64_complex(&self) -> Matrix<Complex64> {
        self.map(Scalar::to_c64)
    }
}

impl Matrix<f64> {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Runtime tag for a matrix entry mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    RationalReal,
    RationalComplex,
    Binary64Real,
    Binary64Complex,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::RationalReal => "rational-real",
            ScalarMode::RationalComplex => "rational-complex",
            ScalarMode::Binary64Real => "binary64-real",
            ScalarMode::Binary64Complex => "binary64-complex",
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational-real" => Ok(ScalarMode::RationalReal),
            "rational-complex" => Ok(ScalarMode::RationalComplex),
            "binary64-real" => Ok(ScalarMode::Binary64Real),
            "binary64-complex" => Ok(ScalarMode::Binary64Complex),
            other => Err(Error::invalid(format!("unknown scalar mode `{other}`"))),
        }
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A matrix whose entry mode is only known at runtime (e.g. read from a file).
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    RationalReal(Matrix<BigRational>),
    RationalComplex(Matrix<ComplexRational>),
    Binary64Real(Matrix<f64>),
    Binary64Complex(Matrix<Complex64>),
}

impl AnyMatrix {
    pub fn mode(&self) -> ScalarMode {
        match self {
            AnyMatrix::RationalReal(_) => ScalarMode::RationalReal,
            AnyMatrix::RationalComplex(_) => ScalarMode::RationalComplex,
            AnyMatrix::Binary64Real(_) => ScalarMode::Binary64Real,
            AnyMatrix::Binary64Complex(_) => ScalarMode::Binary64Complex,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: hline + 1,
                msg: "header must be `rows cols mode`".into(),
            });
        }
        let rows: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: hline + 1,
            msg: format!("bad row count `{}`", parts[0]),
        })?;
        let cols: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: hline + 1,
            msg: format!("bad column count `{}`", parts[1]),
        })?;
        let mode: ScalarMode = parts[2].parse().map_err(|e: Error| Error::Parse {
            line: hline + 1,
            msg: e.to_string(),
        })?;
        let body: Vec<(usize, &str)> = lines.collect();
        if body.len() != rows {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("expected {rows} rows, found {}", body.len()),
            });
        }
        match mode {
            ScalarMode::RationalReal => {
                parse_body(&body, rows, cols, parse_rational).map(AnyMatrix::RationalReal)
            }
            ScalarMode::RationalComplex => parse_body(&body, rows, cols, |s| {
                let (re, im) = split_complex(s)?;
                Ok(Complex::new(parse_rational(re)?, parse_rational(im)?))
            })
            .map(AnyMatrix::RationalComplex),
            ScalarMode::Binary64Real => {
                parse_body(&body, rows, cols, parse_f64).map(AnyMatrix::Binary64Real)
            }
            ScalarMode::Binary64Complex => parse_body(&body, rows, cols, |s| {
                let (re, im) = split_complex(s)?;
                Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?))
            })
            .map(AnyMatrix::Binary64Complex),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            AnyMatrix::RationalReal(m) => write_body(m, self.mode(), |x| fmt_rational(x)),
            AnyMatrix::RationalComplex(m) => write_body(m, self.mode(), |x| {
                format!("{},{}", fmt_rational(&x.re), fmt_rational(&x.im))
            }),
            AnyMatrix::Binary64Real(m) => write_body(m, self.mode(), |x| format!("{x:?}")),
            AnyMatrix::Binary64Complex(m) => {
                write_body(m, self.mode(), |x| format!("{:?},{:?}", x.re, x.im))
            }
        }
    }
}

fn parse_body<T: Scalar>(
    body: &[(usize, &str)],
    rows: usize,
    cols: usize,
    parse: impl Fn(&str) -> std::result::Result<T, String>,
) -> Result<Matrix<T>> {
    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in body {
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected {cols} entries, found {}", entries.len()),
            });
        }
        for e in entries {
            data.push(parse(e).map_err(|msg| Error::Parse {
                line: lineno + 1,
                msg,
            })?);
        }
    }
    Matrix::new(rows, cols, data)
}

fn write_body<T: Scalar>(m: &Matrix<T>, mode: ScalarMode, f: impl Fn(&T) -> String) -> String {
    let mut out = format!("{} {} {}\n", m.rows(), m.cols(), mode);
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(&f).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn split_complex(s: &str) -> std::result::Result<(&str, &str), String> {
    s.split_once(',')
        .ok_or_else(|| format!("complex entry `{s}` must be `re,im`"))
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let bad = || format!("bad rational `{s}`");
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad binary64 value `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite entry `{s}`"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(Matrix::<f64>::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::<f64>::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn parses_every_mode() {
        let m = AnyMatrix::parse("2 2 rational-real\n1 -1/2\n3/4 0\n").unwrap();
        let AnyMatrix::RationalReal(r) = &m else { panic!() };
        assert_eq!(r.get(0, 1), &BigRational::new((-1).into(), 2.into()));
        assert_eq!(AnyMatrix::parse(&m.to_text()).unwrap(), m);

        let c = AnyMatrix::parse("1 2 rational-complex\n1,2 -1/3,0\n").unwrap();
        assert_eq!(c.mode(), ScalarMode::RationalComplex);
        assert_eq!(AnyMatrix::parse(&c.to_text()).unwrap(), c);

        let f = AnyMatrix::parse("1 2 binary64-real\n0.1 -2e-3\n").unwrap();
        assert_eq!(AnyMatrix::parse(&f.to_text()).unwrap(), f);

        let fc = AnyMatrix::parse("1 1 binary64-complex\n0.5,-1.25\n").unwrap();
        assert_eq!(AnyMatrix::parse(&fc.to_text()).unwrap(), fc);
    }

    #[test]
    fn reports_bad_lines() {
        let err = AnyMatrix::parse("2 2 rational-real\n1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(AnyMatrix::parse("1 1 rational-real\n1/0\n").is_err());
        assert!(AnyMatrix::parse("1 1 quaternion\n1\n").is_err());
    }
}
