//! Exact integer roots and certified fixed-point roots of integers.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

/// `(⌊N^(1/n)⌋, exact)` where `exact` is true iff the root is an integer.
pub fn integer_nth_root(value: &BigUint, n: u32) -> (BigUint, bool) {
    assert!(n >= 2, "root exponent must be at least 2");
    if let Some(small) = value.to_u128() {
        let (r, exact) = integer_nth_root_u128(small, n);
        return (BigUint::from(r), exact);
    }
    let r = value.nth_root(n);
    let exact = &r.pow(n) == value;
    (r, exact)
}

/// Machine-word version of [`integer_nth_root`].
pub fn integer_nth_root_u128(value: u128, n: u32) -> (u128, bool) {
    assert!(n >= 2, "root exponent must be at least 2");
    let r = if let Ok(small) = u64::try_from(value) {
        u128::from(small.nth_root(n))
    } else {
        value.nth_root(n)
    };
    let exact = r.checked_pow(n) == Some(value);
    (r, exact)
}

/// Product of two fixed-point numbers with `frac` fractional bits, rounded down or up.
fn mul_fixed(a: &BigUint, b: &BigUint, frac: u64, round_up: bool) -> BigUint {
    let p = a * b;
    let q = &p >> frac;
    if round_up && (&q << frac) != p {
        q + 1u32
    } else {
        q
    }
}

/// `x^k` for a nonnegative fixed-point `x`, with every product rounded in one direction.
/// Rounding down yields a lower bound of the true power, rounding up an upper bound.
fn pow_fixed(x: &BigUint, k: u32, frac: u64, round_up: bool) -> BigUint {
    let mut acc: Option<BigUint> = None;
    let mut base = x.clone();
    let mut e = k;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => mul_fixed(&a, &base, frac, round_up),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = mul_fixed(&base, &base, frac, round_up);
    }
    acc.unwrap_or_else(|| BigUint::one() << frac)
}

/// One Newton step for `x^n = m` in fixed point with `frac` fractional bits.
///
/// By the AM–GM inequality the exact Newton iterate from any positive point is
/// at least `m^(1/n)`. Here the divisor power is rounded down and the two
/// floors lose less than one unit each, so the result plus 2 units is a
/// certified upper bound of the root.
fn newton_step(x: &BigUint, m: u64, n: u32, frac: u64) -> BigUint {
    let y = pow_fixed(x, n - 1, frac, false);
    if y.is_zero() {
        return x.clone();
    }
    let q = (BigUint::from(m) << (2 * frac)) / y;
    (x * (n - 1) + q) / n
}

/// Integers `(lo, hi)` with `lo ≤ m^(1/n)·2^frac ≤ hi` and `hi − lo` at most a few thousand units.
///
/// Newton iteration with precision doubling supplies the upper bound; the lower
/// bound is `m / hi^(n−1)` with the power rounded up. If the bracket is too
/// wide after a few attempts the exact integer root is used instead.
pub(crate) fn certified_root_bounds(m: u64, n: u32, frac: u64) -> (BigUint, BigUint) {
    assert!(m >= 1 && n >= 2);
    const START_BITS: u64 = 48;
    const MAX_WIDTH: u32 = 1 << 12;
    let scaled_m = BigUint::from(m) << (2 * frac);

    let approx = (m as f64).powf(1.0 / f64::from(n));
    let mut p = START_BITS.min(frac);
    let mut x = BigUint::from((approx * (1u64 << p) as f64) as u128);
    while p < frac {
        let next = (2 * p).saturating_sub(10).max(p + 1).min(frac);
        x <<= next - p;
        p = next;
        x = newton_step(&x, m, n, p);
    }
    if p == 0 {
        x = newton_step(&x, m, n, 0);
    }

    for _ in 0..3 {
        let hi = &x + 2u32;
        let z = pow_fixed(&hi, n - 1, frac, true);
        let lo = &scaled_m / z;
        if &hi - &lo <= BigUint::from(MAX_WIDTH) {
            return (lo, hi);
        }
        x = newton_step(&hi, m, n, frac);
    }

    let (r, exact) = integer_nth_root(&(BigUint::from(m) << (u64::from(n) * frac)), n);
    let hi = if exact { r.clone() } else { &r + 1u32 };
    (r, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(
            integer_nth_root(&BigUint::from(27u32), 3),
            (BigUint::from(3u32), true)
        );
        assert_eq!(
            integer_nth_root(&BigUint::from(28u32), 3),
            (BigUint::from(3u32), false)
        );
        assert_eq!(
            integer_nth_root(&BigUint::from(47_045_881u32), 3),
            (BigUint::from(361u32), true)
        );
        assert_eq!(
            integer_nth_root(&BigUint::zero(), 7),
            (BigUint::zero(), true)
        );
        assert_eq!(integer_nth_root(&BigUint::one(), 7), (BigUint::one(), true));
    }

    #[test]
    fn large_values_use_bignum_path() {
        let r = BigUint::from(10u32).pow(60) + 7u32;
        for n in [2u32, 3, 5, 29] {
            let v = r.pow(n);
            assert_eq!(integer_nth_root(&v, n), (r.clone(), true));
            assert_eq!(integer_nth_root(&(&v - 1u32), n), (&r - 1u32, false));
            assert_eq!(integer_nth_root(&(&v + 1u32), n), (r.clone(), false));
        }
    }

    #[test]
    fn round_trip_small_range() {
        for n in 2u32..=29 {
            for r in 0u32..=1000 {
                let v = BigUint::from(r).pow(n);
                assert_eq!(
                    integer_nth_root(&v, n),
                    (BigUint::from(r), true),
                    "r={r} n={n}"
                );
                if r >= 1 {
                    let (s, exact) = integer_nth_root(&(&v + 1u32), n);
                    assert_eq!(s, BigUint::from(r));
                    // r^n + 1 is a perfect n-th power only for r = 0.
                    assert_eq!(exact, s.pow(n) == &v + 1u32);
                    assert!(!exact);
                }
            }
        }
    }

    #[test]
    fn certified_bounds_bracket_the_root() {
        for &(m, n) in &[
            (2u64, 3u32),
            (8, 3),
            (1, 5),
            (894_661, 5),
            (9_999_999, 29),
            (3, 4),
        ] {
            for frac in [10u64, 100, 1000, 4000] {
                let (lo, hi) = certified_root_bounds(m, n, frac);
                let target = BigUint::from(m) << (u64::from(n) * frac);
                assert!(lo.pow(n) <= target, "m={m} n={n} frac={frac}");
                assert!(hi.pow(n) >= target, "m={m} n={n} frac={frac}");
                assert!(&hi - &lo <= BigUint::from(1u32 << 12));
            }
        }
    }
}
