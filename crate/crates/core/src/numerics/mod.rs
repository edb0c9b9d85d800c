//! Certified real arithmetic and exact integer roots.

mod ball;
mod precision;
mod roots;
mod trig;

pub use ball::{Floor, RealBall};
pub use precision::{digits_to_bits, PrecisionPolicy, MAX_REPRESENTABLE_DIGITS};
pub use roots::{integer_nth_root, integer_nth_root_u128};
pub use trig::{pi, sin_pi_ratio};

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A ball containing `m^(1/n)` with relative radius at most `10^(-digits)`.
pub fn nth_root_ball(m: u64, n: u32, digits: u32) -> Result<RealBall> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "root exponent must be >= 2, got {n}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("radicand must be positive".into()));
    }
    if digits == 0 || digits > MAX_REPRESENTABLE_DIGITS {
        return Err(Error::InvalidInput(format!(
            "precision of {digits} digits is outside 1..={MAX_REPRESENTABLE_DIGITS}"
        )));
    }
    let frac = digits_to_bits(digits) + 16;
    let (lo, hi) = roots::certified_root_bounds(m, n, frac);
    Ok(RealBall::from_endpoints(
        BigInt::from(lo),
        BigInt::from(hi),
        -(frac as i64),
        digits,
    ))
}

/// The integer part shared by every point of `ball`, or [`Floor::Ambiguous`].
pub fn floor_of_ball(ball: &RealBall) -> Floor {
    ball.floor()
}
