//! Scalar abstraction shared by the elimination engine and the determinant
//! bounds.
//!
//! Four entry modes are supported: exact rationals, exact complex rationals
//! (pairs of rationals), binary64 reals and binary64 complex numbers. All
//! magnitude comparisons go through the squared modulus, which is exact in the
//! rational modes.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type ComplexRational = Complex<BigRational>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Field of the real and imaginary parts.
    type Real: RealScalar;

    const IS_COMPLEX: bool;
    const IS_EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_real(r: Self::Real) -> Self;

    /// Squared modulus `|x|^2`.
    fn abs_sq(&self) -> Self::Real;

    /// `Re(x * conj(y))`.
    fn re_mul_conj(&self, other: &Self) -> Self::Real;

    fn scale(&self, r: &Self::Real) -> Self;

    fn to_c64(&self) -> Complex64;

    fn modulus_f64(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// Ordered real field (binary64 or exact rationals).
pub trait RealScalar: Scalar<Real = Self> + PartialOrd {
    fn abs(&self) -> Self;
    fn approx_f64(&self) -> f64;
    fn from_f64_lossy(v: f64) -> Self;
    /// Natural logarithm of a positive value, as binary64.
    fn ln_f64(&self) -> f64;
}

impl Scalar for f64 {
    type Real = f64;
    const IS_COMPLEX: bool = false;
    const IS_EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_real(r: f64) -> Self {
        r
    }
    fn abs_sq(&self) -> f64 {
        self * self
    }
    fn re_mul_conj(&self, other: &Self) -> f64 {
        self * other
    }
    fn scale(&self, r: &f64) -> Self {
        self * r
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn modulus_f64(&self) -> f64 {
        f64::abs(*self)
    }
}

impl RealScalar for f64 {
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
    fn ln_f64(&self) -> f64 {
        self.ln()
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const IS_COMPLEX: bool = true;
    const IS_EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn re_mul_conj(&self, other: &Self) -> f64 {
        self.re * other.re + self.im * other.im
    }
    fn scale(&self, r: &f64) -> Self {
        Complex64::new(self.re * r, self.im * r)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl Scalar for BigRational {
    type Real = BigRational;
    const IS_COMPLEX: bool = false;
    const IS_EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_real(r: BigRational) -> Self {
        r
    }
    fn abs_sq(&self) -> BigRational {
        self * self
    }
    fn re_mul_conj(&self, other: &Self) -> BigRational {
        self * other
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn modulus_f64(&self) -> f64 {
        rational_to_f64(self).abs()
    }
}

impl RealScalar for BigRational {
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn approx_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn ln_f64(&self) -> f64 {
        rational_ln(self)
    }
}

impl Scalar for ComplexRational {
    type Real = BigRational;
    const IS_COMPLEX: bool = true;
    const IS_EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_i64(v), Zero::zero())
    }
    fn from_real(r: BigRational) -> Self {
        Complex::new(r, Zero::zero())
    }
    fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn re_mul_conj(&self, other: &Self) -> BigRational {
        &self.re * &other.re + &self.im * &other.im
    }
    fn scale(&self, r: &BigRational) -> Self {
        Complex::new(&self.re * r, &self.im * r)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Nearest-ish binary64 value of a rational, robust to numerators and
/// denominators far outside the binary64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || Zero::is_zero(r)) {
            return v;
        }
    }
    // Shift both parts down to 64 significant bits and divide.
    let num = r.numer();
    let den = r.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (num >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (den >> ds as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

/// Natural logarithm of a positive rational as binary64, usable when the
/// rational itself over- or underflows.
pub fn rational_ln(r: &BigRational) -> f64 {
    big_ln(r.numer()) - big_ln(r.denom())
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits() as i64;
    let shift = (bits - 60).max(0);
    let top = (v.abs() >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
