//! Midpoint–radius enclosures of real numbers.
//!
//! A [`RealBall`] stands for the closed interval
//! `[(mid − rad)·2^exp, (mid + rad)·2^exp]` with integer `mid` and `rad`.
//! Every operation rounds outward, so the true value of the computed
//! quantity always stays inside the result.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::precision::digits_to_bits;
use super::roots::integer_nth_root;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: BigInt,
    rad: BigUint,
    exp: i64,
    digits: u32,
}

/// Outcome of [`RealBall::floor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Floor {
    Exact(BigInt),
    Ambiguous,
}

impl Floor {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            Floor::Exact(v) => Some(v),
            Floor::Ambiguous => None,
        }
    }
}

/// `⌊v·2^shift⌋` for integer `v`.
fn floor_shift(v: &BigInt, shift: i64) -> BigInt {
    if shift >= 0 {
        v << shift as u64
    } else {
        // Shr on BigInt rounds toward negative infinity.
        v >> (-shift) as u64
    }
}

/// `⌊p·2^shift / q⌋` for `q > 0`, plus whether the division was exact.
fn scaled_floor_div(p: &BigInt, q: &BigInt, shift: i64) -> (BigInt, bool) {
    debug_assert!(q.is_positive());
    let (num, den) = if shift >= 0 {
        (p << shift as u64, q.clone())
    } else {
        (p.clone(), q << (-shift) as u64)
    };
    let (f, r) = num.div_mod_floor(&den);
    (f, r.is_zero())
}

fn ceil_root(v: &BigUint, n: u32) -> BigUint {
    let (r, exact) = integer_nth_root(v, n);
    if exact {
        r
    } else {
        r + 1u32
    }
}

fn bits_i64(v: &BigInt) -> i64 {
    v.bits() as i64
}

impl RealBall {
    /// The exact integer `v` (radius zero).
    pub fn from_integer(v: impl Into<BigInt>, digits: u32) -> Self {
        RealBall {
            mid: v.into(),
            rad: BigUint::zero(),
            exp: 0,
            digits: digits.max(1),
        }
    }

    /// A ball around `p/q` (`q ≠ 0`), exact when `p/q` is a dyadic rational
    /// that fits at this precision.
    pub fn from_ratio(p: &BigInt, q: &BigInt, digits: u32) -> Self {
        assert!(!q.is_zero(), "division by zero");
        let (p, q) = if q.is_negative() {
            (-p, -q)
        } else {
            (p.clone(), q.clone())
        };
        let prec = digits_to_bits(digits) as i64 + 8;
        let shift = prec + bits_i64(&q) - bits_i64(&p);
        let (f, exact) = scaled_floor_div(&p, &q, shift);
        let hi = if exact { f.clone() } else { &f + 1 };
        Self::from_endpoints(f, hi, -shift, digits)
    }

    /// The interval `[lo·2^exp, hi·2^exp]`.
    pub fn from_endpoints(lo: BigInt, hi: BigInt, exp: i64, digits: u32) -> Self {
        assert!(lo <= hi, "ball endpoints out of order");
        let rad = (&hi - &lo).magnitude().clone();
        let mut ball = RealBall {
            mid: lo + hi,
            rad,
            exp: exp - 1,
            digits: digits.max(1),
        };
        ball.normalize();
        ball
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Same enclosure, accounted at `digits` of working precision (rounding outward if fewer).
    pub fn with_digits(&self, digits: u32) -> Self {
        let mut b = self.clone();
        b.digits = digits.max(1);
        b.normalize();
        b
    }

    fn prec_bits(&self) -> u64 {
        digits_to_bits(self.digits) + 16
    }

    /// Drops midpoint bits beyond the working precision, widening the radius to compensate.
    fn normalize(&mut self) {
        let limit = self.prec_bits();
        let bits = self.mid.bits().max(self.rad.bits());
        if bits <= limit + 8 {
            return;
        }
        let shift = bits - limit;
        let ulp_mask = (BigUint::one() << shift) - 1u32;
        let rad_up = (&self.rad + &ulp_mask) >> shift;
        self.mid = &self.mid >> shift;
        self.rad = rad_up + 1u32;
        self.exp += shift as i64;
    }

    /// Lower endpoint as `(value, exp)` meaning `value·2^exp`.
    pub fn lower(&self) -> (BigInt, i64) {
        (&self.mid - BigInt::from(self.rad.clone()), self.exp)
    }

    /// Upper endpoint as `(value, exp)` meaning `value·2^exp`.
    pub fn upper(&self) -> (BigInt, i64) {
        (&self.mid + BigInt::from(self.rad.clone()), self.exp)
    }

    /// Radius as `(value, exp)` meaning `value·2^exp`.
    pub fn radius(&self) -> (BigUint, i64) {
        (self.rad.clone(), self.exp)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// The common floor of every point of the ball, if there is one.
    pub fn floor(&self) -> Floor {
        let (lo, e) = self.lower();
        let (hi, _) = self.upper();
        let f_lo = floor_shift(&lo, e);
        let f_hi = floor_shift(&hi, e);
        if f_lo == f_hi {
            Floor::Exact(f_lo)
        } else {
            Floor::Ambiguous
        }
    }

    /// `⌊lower endpoint⌋`.
    pub fn lower_floor(&self) -> BigInt {
        let (lo, e) = self.lower();
        floor_shift(&lo, e)
    }

    /// `⌈upper endpoint⌉`.
    pub fn upper_ceil(&self) -> BigInt {
        let (hi, e) = self.upper();
        -floor_shift(&-hi, e)
    }

    /// Whether the rational `p/q` lies in the ball.
    pub fn contains_ratio(&self, p: &BigInt, q: &BigInt) -> bool {
        assert!(!q.is_zero());
        let (p, q) = if q.is_negative() {
            (-p, -q)
        } else {
            (p.clone(), q.clone())
        };
        let (lo, e) = self.lower();
        let (hi, _) = self.upper();
        // compare x·2^e with p/q  <=>  x·q·2^e with p
        let scaled = |x: &BigInt| -> (BigInt, BigInt) {
            if e >= 0 {
                ((x * &q) << e as u64, p.clone())
            } else {
                (x * &q, &p << (-e) as u64)
            }
        };
        let (l, pl) = scaled(&lo);
        let (h, ph) = scaled(&hi);
        l <= pl && ph <= h
    }

    /// Sign of every point of the ball, when it is the same everywhere.
    pub fn sign(&self) -> Option<Ordering> {
        let (lo, _) = self.lower();
        let (hi, _) = self.upper();
        if lo.is_positive() {
            Some(Ordering::Greater)
        } else if hi.is_negative() {
            Some(Ordering::Less)
        } else if lo.is_zero() && hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison with another ball, `None` when they overlap.
    pub fn compare(&self, other: &RealBall) -> Option<Ordering> {
        (self - other).sign()
    }

    /// Certified comparison with an integer.
    pub fn compare_integer(&self, k: &BigInt) -> Option<Ordering> {
        self.compare(&RealBall::from_integer(k.clone(), self.digits))
    }

    fn align(&self, other: &RealBall) -> (BigInt, BigUint, BigInt, BigUint, i64) {
        let exp = self.exp.min(other.exp);
        let s1 = (self.exp - exp) as u64;
        let s2 = (other.exp - exp) as u64;
        (
            &self.mid << s1,
            &self.rad << s1,
            &other.mid << s2,
            &other.rad << s2,
            exp,
        )
    }

    fn combine_digits(&self, other: &RealBall) -> u32 {
        self.digits.min(other.digits)
    }

    /// `1/x`, or `None` when the ball contains zero.
    pub fn recip(&self) -> Option<RealBall> {
        match self.sign()? {
            Ordering::Equal => None,
            Ordering::Less => Some(-(-self).recip()?),
            Ordering::Greater => {
                let (lo, e) = self.lower();
                let (hi, _) = self.upper();
                // 1/(x·2^e) scaled by 2^t, t = prec + bits(hi) + e
                let t = self.prec_bits() as i64 + 8 + bits_i64(&hi) + e;
                let one = BigInt::one();
                let (l, _) = scaled_floor_div(&one, &hi, t - e);
                let (u, exact) = scaled_floor_div(&one, &lo, t - e);
                let u = if exact { u } else { u + 1 };
                Some(RealBall::from_endpoints(l, u, -t, self.digits))
            }
        }
    }

    /// `self / other`, or `None` when `other` contains zero.
    pub fn checked_div(&self, other: &RealBall) -> Option<RealBall> {
        if other.is_exact() && other.exp == 0 {
            // Division by an exact integer keeps one rounding instead of two.
            let q = &other.mid;
            if q.is_zero() {
                return None;
            }
            let (lo, e) = self.lower();
            let (hi, _) = self.upper();
            let (lo, hi) = if q.is_negative() {
                (-hi, -lo)
            } else {
                (lo, hi)
            };
            let q = q.abs();
            let shift = self.prec_bits() as i64 + 8 + bits_i64(&q);
            let (l, _) = scaled_floor_div(&lo, &q, shift);
            let (u, exact) = scaled_floor_div(&hi, &q, shift);
            let u = if exact { u } else { u + 1 };
            return Some(RealBall::from_endpoints(l, u, e - shift, self.digits));
        }
        Some(self * &other.recip()?)
    }

    /// `self^k`.
    pub fn powi(&self, k: u32) -> RealBall {
        let mut acc = RealBall::from_integer(1, self.digits);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal `k`-th root of a nonnegative ball, or `None` if the ball reaches below zero.
    pub fn nth_root(&self, k: u32) -> Option<RealBall> {
        assert!(k >= 1);
        if k == 1 {
            return Some(self.clone());
        }
        let (lo, e) = self.lower();
        let (hi, _) = self.upper();
        if lo.is_negative() {
            return None;
        }
        let k64 = i64::from(k);
        let prec = self.prec_bits() as i64 + 8;
        let magnitude = bits_i64(&hi) + e;
        let out_exp = e.div_euclid(k64).min(magnitude.div_euclid(k64) - prec);
        let shift = (e - k64 * out_exp) as u64;
        let lo_scaled = lo.magnitude() << shift;
        let hi_scaled = hi.magnitude() << shift;
        let (l, _) = integer_nth_root(&lo_scaled, k);
        let u = ceil_root(&hi_scaled, k);
        Some(RealBall::from_endpoints(
            BigInt::from(l),
            BigInt::from(u),
            out_exp,
            self.digits,
        ))
    }

    /// Midpoint as an `f64` (for display and diagnostics only).
    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.exp)
    }

    /// Upper bound of `log2(radius)`, `-inf` for exact balls.
    pub fn radius_log2(&self) -> f64 {
        if self.rad.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.rad.bits() as f64 + self.exp as f64
    }
}

fn scaled_to_f64(v: &BigInt, exp: i64) -> f64 {
    let bits = v.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (v >> shift as u64).to_f64().unwrap_or(0.0);
    let e = exp + shift;
    top * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± 2^{:.1}", self.to_f64(), self.radius_log2())
    }
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall {
            mid: -&self.mid,
            rad: self.rad.clone(),
            exp: self.exp,
            digits: self.digits,
        }
    }
}

impl Neg for RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        -&self
    }
}

impl Add for &RealBall {
    type Output = RealBall;
    fn add(self, other: &RealBall) -> RealBall {
        let (m1, r1, m2, r2, exp) = self.align(other);
        let mut b = RealBall {
            mid: m1 + m2,
            rad: r1 + r2,
            exp,
            digits: self.combine_digits(other),
        };
        b.normalize();
        b
    }
}

impl Sub for &RealBall {
    type Output = RealBall;
    fn sub(self, other: &RealBall) -> RealBall {
        self + &(-other)
    }
}

impl Mul for &RealBall {
    type Output = RealBall;
    fn mul(self, other: &RealBall) -> RealBall {
        let a1 = self.mid.magnitude();
        let a2 = other.mid.magnitude();
        let rad = a1 * &other.rad + a2 * &self.rad + &self.rad * &other.rad;
        let mut b = RealBall {
            mid: &self.mid * &other.mid,
            rad,
            exp: self.exp + other.exp,
            digits: self.combine_digits(other),
        };
        b.normalize();
        b
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for RealBall {
            type Output = RealBall;
            fn $method(self, other: RealBall) -> RealBall {
                (&self).$method(&other)
            }
        }
        impl $tr<&RealBall> for RealBall {
            type Output = RealBall;
            fn $method(self, other: &RealBall) -> RealBall {
                (&self).$method(other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
