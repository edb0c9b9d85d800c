//! Just enough certified trigonometry to evaluate products of sines at rational multiples of π.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::ball::RealBall;
use super::precision::digits_to_bits;

/// `arctan(1/x)` for an integer `x ≥ 2`.
fn atan_inv(x: u32, digits: u32) -> RealBall {
    assert!(x >= 2);
    let width = digits_to_bits(digits) + 32;
    let x2 = BigUint::from(x) * x;
    // power = ⌊2^width / x^(2i+1)⌋, exact floor at every step
    let mut power = (BigUint::one() << width) / x;
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut i: u64 = 0;
    while !power.is_zero() {
        let term = BigInt::from(&power / (2 * i + 1));
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        terms += 1;
        power /= &x2;
        i += 1;
    }
    // each truncated term is off by less than one unit, and the tail is below one unit
    let err = BigInt::from(terms + 1);
    RealBall::from_endpoints(&sum - &err, &sum + &err, -(width as i64), digits)
}

/// π, via Machin's formula.
pub fn pi(digits: u32) -> RealBall {
    let a = atan_inv(5, digits);
    let b = atan_inv(239, digits);
    let sixteen = RealBall::from_integer(16, digits);
    let four = RealBall::from_integer(4, digits);
    &(&sixteen * &a) - &(&four * &b)
}

fn magnitude_bound(b: &RealBall) -> (BigInt, i64) {
    let (lo, e) = b.lower();
    let (hi, _) = b.upper();
    let m = lo.magnitude().max(hi.magnitude()).clone();
    (BigInt::from(m), e)
}

/// `sin(x)` by its Taylor series; requires `|x| ≤ 2` so the terms decrease from the start.
fn sin_taylor(x: &RealBall) -> RealBall {
    let digits = x.digits();
    let stop = -(digits_to_bits(digits) as i64 + 24);
    let x2 = x * x;
    let mut term = x.clone();
    let mut sum = x.clone();
    let mut i: u32 = 0;
    loop {
        let denom = RealBall::from_integer((2 * i + 2) * (2 * i + 3), digits);
        term = -(&term * &x2)
            .checked_div(&denom)
            .expect("nonzero denominator");
        let (m, e) = magnitude_bound(&term);
        if m.bits() as i64 + e < stop {
            // alternating series with decreasing terms: the tail is bounded by this term
            let tail = RealBall::from_endpoints(-m.clone(), m, e, digits);
            return &sum + &tail;
        }
        sum = &sum + &term;
        i += 1;
    }
}

/// `sin(π·num/den)` for `den ≥ 1`.
pub fn sin_pi_ratio(num: u64, den: u64, digits: u32) -> RealBall {
    assert!(den >= 1);
    let period = 2 * den;
    let r = num % period;
    let (negative, r) = if r >= den {
        (true, r - den)
    } else {
        (false, r)
    };
    let r = r.min(den - r);
    if r == 0 {
        return RealBall::from_integer(0, digits);
    }
    let x = (&pi(digits) * &RealBall::from_integer(r, digits))
        .checked_div(&RealBall::from_integer(den, digits))
        .expect("nonzero denominator");
    let s = sin_taylor(&x);
    if negative {
        -s
    } else {
        s
    }
}
