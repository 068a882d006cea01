#![allow(dead_code)]

use growthbound::scalar::ComplexRational;
use growthbound::Matrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Entries `p/q` with `|p| <= 9`, `1 <= q <= 4`.
pub fn random_rational(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<BigRational> {
    Matrix::from_fn(rows, cols, |_, _| r(rng.random_range(-9..=9), rng.random_range(1..=4)))
}

/// Entries uniform rationals in `[-1, 1]` on the grid `1/den`.
pub fn random_unit_rational(rng: &mut ChaCha8Rng, rows: usize, cols: usize, den: i64) -> Matrix<BigRational> {
    Matrix::from_fn(rows, cols, |_, _| r(rng.random_range(-den..=den), den))
}

pub fn random_f64(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_c64(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Complex64> {
    Matrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn to_rows<T: growthbound::Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Fraction-free (Bareiss) determinant after clearing denominators row by row.
pub fn bareiss_det(m: &Matrix<BigRational>) -> BigRational {
    let n = m.rows();
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let l = m.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            m.row(i)
                .iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    BigRational::new(sign * &a[n - 1][n - 1], scale)
}

/// Cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigRational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Exact determinant over complex rationals by elimination with the first
/// nonzero pivot.
pub fn complex_det(m: &Matrix<ComplexRational>) -> ComplexRational {
    let n = m.rows();
    let mut a = to_rows(m);
    let mut det = Complex::new(BigRational::one(), BigRational::zero());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Complex::new(BigRational::zero(), BigRational::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det = det * piv.clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / piv.clone();
            for j in k..n {
                let v = a[k][j].clone() * f.clone();
                a[i][j] = a[i][j].clone() - v;
            }
        }
    }
    det
}

pub fn c64_to_exact(m: &Matrix<Complex64>) -> Matrix<ComplexRational> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m.get(i, j);
        Complex::new(
            BigRational::from_float(z.re).unwrap(),
            BigRational::from_float(z.im).unwrap(),
        )
    })
}

pub fn f64_to_exact(m: &Matrix<f64>) -> Matrix<BigRational> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| BigRational::from_float(*m.get(i, j)).unwrap())
}

pub fn abs_rational(x: &BigRational) -> BigRational {
    x.abs()
}

pub fn frobenius_sq(m: &Matrix<BigRational>) -> BigRational {
    m.data().iter().fold(BigRational::zero(), |s, x| s + x * x)
}

/// Exact rank by row reduction.
pub fn rank(m: &Matrix<BigRational>) -> usize {
    let mut a = to_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let v = &a[r][j] * &f;
                a[i][j] -= v;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Smallest integer `s` with `s^2 >= x`.
pub fn ceil_sqrt(x: &BigRational) -> BigInt {
    let c = x.ceil().to_integer();
    let mut s = num_integer::Roots::sqrt(&c);
    if &s * &s < c {
        s += 1;
    }
    s
}
