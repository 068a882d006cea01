//! Rigorous rational enclosures of logarithms and square roots.
//!
//! Everything here is exact rational arithmetic: truncated series come with
//! explicit tail bounds, so `lo <= value <= hi` holds as a theorem and not as a
//! floating point approximation.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::rational_to_f64;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(BigRational::from_integer(v.into()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::point(BigRational::new(p.into(), q.into()))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        match BigRational::from_float(v) {
            Some(r) => self.lo <= r && r <= self.hi,
            None => false,
        }
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (rational_to_f64(&self.lo) + rational_to_f64(&self.hi))
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Interval { lo, hi }
    }

    pub fn scale(&self, r: &BigRational) -> Interval {
        self.mul(&Interval::point(r.clone()))
    }

    /// Reciprocal of an interval that does not contain zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Some(Interval {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        } else {
            None
        }
    }

    pub fn div(&self, other: &Interval) -> Option<Interval> {
        Some(self.mul(&other.recip()?))
    }

    pub fn square(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            Interval {
                lo: BigRational::zero(),
                hi: &m * &m,
            }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            Interval {
                lo: std::cmp::min(a.clone(), b.clone()),
                hi: std::cmp::max(a, b),
            }
        }
    }

    /// Strictly below `other` everywhere.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Fixed-point bounds on `S(x) = atanh(x) = sum_j x^(2j+1)/(2j+1)` for
/// `0 <= x <= 1/2`, given `x` in `[z, z + 1] / 2^w`. All intermediate values
/// are rounded down for the lower bound and up for the upper bound, and the
/// truncated tail is added to the upper bound, so `lo <= 2^w S(x) <= hi`.
fn atanh_fixed(z: &BigInt, w: u32) -> (BigInt, BigInt) {
    if z.is_zero() {
        // x in [0, 2^-w]: S(x) <= x / (1 - x^2) <= 2 * 2^-w
        return (BigInt::zero(), BigInt::from(2));
    }
    let one = pow2(w);
    let series = |x: &BigInt, up: bool| -> BigInt {
        let div = |a: BigInt, b: &BigInt| -> BigInt {
            if up {
                a.div_ceil(b)
            } else {
                a.div_floor(b)
            }
        };
        let x2 = div(x * x, &one);
        let mut power = x.clone();
        let mut sum = BigInt::zero();
        let mut j: u64 = 0;
        loop {
            let d = BigInt::from(2 * j + 1);
            sum += div(power.clone(), &d);
            power = div(&power * &x2, &one);
            j += 1;
            if power.is_zero() {
                return sum;
            }
            if up && power <= BigInt::from(1) {
                // tail <= power (49/48) / (2j+1) < 2 ulp
                return sum + BigInt::from(2);
            }
        }
    };
    let lo = series(z, false);
    let hi = series(&(z + 1), true);
    (lo, hi)
}

/// `ln 2 = 2 atanh(1/3)` at 2^-w resolution, as integer bounds.
fn ln2_fixed(w: u32) -> (BigInt, BigInt) {
    static CACHE: OnceLock<(BigInt, BigInt)> = OnceLock::new();
    const CACHED_BITS: u32 = 400;
    let third = |w: u32| (pow2(w) / 3u32, w);
    if w <= CACHED_BITS {
        let (lo, hi) = CACHE.get_or_init(|| {
            let (z, w) = third(CACHED_BITS);
            let (lo, hi) = atanh_fixed(&z, w);
            (lo * BigInt::from(2), hi * BigInt::from(2))
        });
        let shift = (CACHED_BITS - w) as usize;
        return (lo >> shift, (hi >> shift) + BigInt::one());
    }
    let (z, w) = third(w);
    let (lo, hi) = atanh_fixed(&z, w);
    (lo * BigInt::from(2), hi * BigInt::from(2))
}

/// Enclosure of `ln x` for a positive rational, width about `2^-bits` times
/// the binary exponent of `x`.
pub fn ln_interval(x: &BigRational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of a non-positive rational");
    if x.is_one() {
        return Interval::point(BigRational::zero());
    }
    // x = 2^e * r with r in [2/3, 4/3).
    let mut e: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut r = scale_pow2(x, -e);
    let two_thirds = BigRational::new(2.into(), 3.into());
    let four_thirds = BigRational::new(4.into(), 3.into());
    while r < two_thirds {
        r *= BigRational::from_integer(2.into());
        e -= 1;
    }
    while r >= four_thirds {
        r /= BigRational::from_integer(2.into());
        e += 1;
    }
    // ln r = 2 atanh(z), z = (r - 1)/(r + 1), |z| <= 1/7.
    let z = (&r - BigRational::one()) / (&r + BigRational::one());
    let extra = 64 - (e.unsigned_abs() | 1).leading_zeros();
    let w = bits + extra + 12;
    let scaled = (z.abs() * BigRational::from_integer(pow2(w))).floor().to_integer();
    let (slo, shi) = atanh_fixed(&scaled, w);
    let two = BigInt::from(2);
    let (slo, shi) = (&slo * &two, &shi * &two);
    let (llo, lhi) = if z.is_negative() { (-shi, -slo) } else { (slo, shi) };
    let (l2lo, l2hi) = ln2_fixed(w);
    let (elo, ehi) = if e >= 0 {
        (&l2lo * e, &l2hi * e)
    } else {
        (&l2hi * e, &l2lo * e)
    };
    let den = pow2(w);
    Interval {
        lo: BigRational::new(llo + elo, den.clone()),
        hi: BigRational::new(lhi + ehi, den),
    }
}

fn scale_pow2(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        x * BigRational::from_integer(pow2(e as u32))
    } else {
        x / BigRational::from_integer(pow2((-e) as u32))
    }
}

/// Enclosure of `sqrt(x)` for a nonnegative rational on the dyadic grid
/// `2^-bits`.
pub fn sqrt_interval(x: &BigRational, bits: u32) -> Interval {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    // floor(sqrt(x * 4^bits)) computed as floor(sqrt(floor(x * 4^bits))).
    let scaled = (x * BigRational::from_integer(pow2(2 * bits))).floor().to_integer();
    let root = scaled.sqrt();
    let den = pow2(bits);
    let lo = BigRational::new(root.clone(), den.clone());
    let exact = &root * &root == scaled
        && (x * BigRational::from_integer(pow2(2 * bits))).is_integer();
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(root + 1, den)
    };
    Interval { lo, hi }
}

/// Smallest multiple of `2^-bits` that is `>=` the (irrational or rational)
/// value enclosed by the refinable interval family `f`.
///
/// `f(p)` must return an enclosure of width at most about `2^-p`. When the
/// value is itself on the grid this loops until `max_bits` and then returns
/// the upper end of the last enclosure, which is still a valid upper bound.
pub fn dyadic_ceil(f: impl Fn(u32) -> Interval, bits: u32) -> BigRational {
    dyadic_round(f, bits, true)
}

/// Largest multiple of `2^-bits` that is `<=` the enclosed value.
pub fn dyadic_floor(f: impl Fn(u32) -> Interval, bits: u32) -> BigRational {
    dyadic_round(f, bits, false)
}

fn dyadic_round(f: impl Fn(u32) -> Interval, bits: u32, up: bool) -> BigRational {
    let den = BigRational::from_integer(pow2(bits));
    let mut prec = bits + 16;
    loop {
        let iv = f(prec);
        let lo = (&iv.lo * &den).floor().to_integer();
        let hi = (&iv.hi * &den).floor().to_integer();
        // Both ends in the same open grid cell: the cell is determined.
        if lo == hi && (&iv.lo * &den) != BigRational::from_integer(lo.clone()) {
            let cell = if up { lo + 1 } else { lo };
            return BigRational::new(cell, pow2(bits));
        }
        if prec > bits + 512 {
            let v = if up { &iv.hi } else { &iv.lo };
            let scaled = v * &den;
            let cell = if up { scaled.ceil() } else { scaled.floor() };
            return cell / den;
        }
        prec += 32;
    }
}

/// `2^-bits * max(1, |v|)` style slack helper used by tests and callers.
pub fn relative_slack(v: &BigRational, bits: u32) -> BigRational {
    let one = BigRational::one();
    let m = if v.abs() > one { v.abs() } else { one };
    m / BigRational::from_integer(pow2(bits))
}

/// Greatest common divisor-free reduction helper: rational `p/q` from `i64`s.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// `lcm` of a set of denominators.
pub fn lcm_of<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_two_digits() {
        let iv = ln_interval(&rat(2, 1), 80);
        assert!(iv.contains_f64(std::f64::consts::LN_2) || iv.mid_f64() == std::f64::consts::LN_2);
        assert!(iv.width() < rat(1, 1 << 60));
    }

    #[test]
    fn ln_of_large_and_small() {
        for (p, q) in [(5000, 1), (13751, 4), (1, 7), (3, 1000)] {
            let x = rat(p, q);
            let iv = ln_interval(&x, 70);
            let f = (p as f64 / q as f64).ln();
            assert!((iv.mid_f64() - f).abs() < 1e-14 * f.abs().max(1.0), "{p}/{q}");
            assert!(iv.lo <= iv.hi);
        }
        assert_eq!(ln_interval(&rat(1, 1), 60), Interval::point(rat(0, 1)));
    }

    #[test]
    fn sqrt_enclosure() {
        let iv = sqrt_interval(&rat(2, 1), 64);
        assert!(&iv.lo * &iv.lo <= rat(2, 1));
        assert!(&iv.hi * &iv.hi >= rat(2, 1));
        assert_eq!(sqrt_interval(&rat(9, 4), 10), Interval::point(rat(3, 2)));
    }

    #[test]
    fn dyadic_rounding_brackets_value() {
        let up = dyadic_ceil(|p| ln_interval(&rat(3, 1), p), 40);
        let down = dyadic_floor(|p| ln_interval(&rat(3, 1), p), 40);
        assert_eq!(&up - &down, rat(1, 1 << 40));
        let f = 3f64.ln();
        assert!(rational_to_f64(&down) <= f && f <= rational_to_f64(&up));
    }
}
