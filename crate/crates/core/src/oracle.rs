//! Brute-force search over `y`, used to cross-check the solver.
//!
//! Nothing here touches continued fractions; the only shared piece is the
//! exact integer root.

use num_bigint::{BigInt, BigUint};

use crate::numerics::{integer_nth_root, integer_nth_root_u128};
use crate::thue::{check_exponent, sort_solutions, SolutionTriple};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleQuery {
    pub n: u32,
    pub m: u64,
    pub y_max: u64,
}

impl OracleQuery {
    pub fn new(n: u32, m: u64, y_max: u64) -> Result<Self> {
        check_exponent(n)?;
        if y_max == 0 {
            return Err(Error::InvalidInput("y_max must be at least 1".into()));
        }
        Ok(OracleQuery { n, m, y_max })
    }
}

/// Every `1 ≤ y ≤ y_max` for which `m·yⁿ ± 1` is a perfect n-th power, sorted by `y`.
pub fn brute_solve(q: &OracleQuery) -> Vec<SolutionTriple> {
    let mut found = Vec::new();
    for y in 1..=q.y_max {
        match small_base(q.m, y, q.n) {
            Some(base) => {
                for candidate in [base.checked_add(1), base.checked_sub(1)]
                    .into_iter()
                    .flatten()
                {
                    let (x, exact) = integer_nth_root_u128(candidate, q.n);
                    if exact {
                        push(q, BigInt::from(x), y, &mut found);
                    }
                }
            }
            None => {
                let base = BigUint::from(q.m) * BigUint::from(y).pow(q.n);
                for candidate in [&base + 1u32, &base - 1u32] {
                    let (x, exact) = integer_nth_root(&candidate, q.n);
                    if exact {
                        push(q, BigInt::from(x), y, &mut found);
                    }
                }
            }
        }
    }
    sort_solutions(&mut found);
    found
}

fn small_base(m: u64, y: u64, n: u32) -> Option<u128> {
    // leave headroom so `base + 1` cannot overflow
    (y as u128)
        .checked_pow(n)?
        .checked_mul(m as u128)
        .filter(|b| *b < u128::MAX)
}

fn push(q: &OracleQuery, x: BigInt, y: u64, found: &mut Vec<SolutionTriple>) {
    let t = SolutionTriple::new(q.n, q.m, x, BigInt::from(y)).expect("exact root gives a solution");
    found.push(t);
}
