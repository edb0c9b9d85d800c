//! Certified continued-fraction expansion of `m^(1/n)`.
//!
//! The expansion runs on an interval `[lo, hi]` with exact rational endpoints
//! that encloses `m^(1/n)`. A partial quotient is emitted only when both
//! endpoints have the same floor, so every emitted quotient is a true digit of
//! the expansion. Most quotients are peeled off in blocks using the leading
//! machine words of the endpoints (Lehmer's idea, applied to an interval); the
//! accumulated 2×2 transform is then applied to the full-size integers.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{integer_nth_root, nth_root_ball, PrecisionPolicy, RealBall};

/// Which side of `m^(1/n)` a fraction `h/k` lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Below,
    Above,
    Equal,
}

/// Exact comparison of `h/k` with `m^(1/n)` via `h^n` against `m·k^n`.
pub fn validate_convergent(m: u64, n: u32, h: &BigInt, k: &BigUint) -> Side {
    assert!(!k.is_zero(), "denominator must be positive");
    if !h.is_positive() {
        return if m == 0 {
            if h.is_zero() {
                Side::Equal
            } else {
                Side::Below
            }
        } else {
            Side::Below
        };
    }
    let lhs = h.magnitude().pow(n);
    let rhs = k.pow(n) * m;
    match lhs.cmp(&rhs) {
        Ordering::Less => Side::Below,
        Ordering::Greater => Side::Above,
        Ordering::Equal => Side::Equal,
    }
}

/// One step `h_j/k_j` of a continued-fraction expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub partial_quotient: BigUint,
    pub numerator: BigInt,
    pub denominator: BigUint,
}

/// Partial quotients `a_0, a_1, …`, kept as machine words with the rare
/// oversized quotient stored separately.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialQuotients {
    words: Vec<u64>,
    /// `(index, value)` for quotients that do not fit below `u64::MAX`; sorted by index.
    large: Vec<(usize, BigUint)>,
}

const LARGE_MARK: u64 = u64::MAX;

impl PartialQuotients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<BigUint> {
        let w = *self.words.get(index)?;
        if w != LARGE_MARK {
            return Some(BigUint::from(w));
        }
        let pos = self
            .large
            .binary_search_by_key(&index, |(i, _)| *i)
            .expect("oversized quotient recorded");
        Some(self.large[pos].1.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = BigUint> + '_ {
        (0..self.len()).map(move |j| self.get(j).expect("index in range"))
    }

    pub fn push(&mut self, q: BigUint) {
        match q.to_u64() {
            Some(w) if w != LARGE_MARK => self.words.push(w),
            _ => {
                self.large.push((self.words.len(), q));
                self.words.push(LARGE_MARK);
            }
        }
    }

    fn push_word(&mut self, q: u64) {
        if q == LARGE_MARK {
            self.push(BigUint::from(q));
        } else {
            self.words.push(q);
        }
    }

    fn truncate(&mut self, len: usize) {
        self.words.truncate(len);
        self.large.retain(|(i, _)| *i < len);
    }

    /// Largest quotient with index `>= from`, zero if there is none.
    pub fn max_from(&self, from: usize) -> BigUint {
        let best_word = self
            .words
            .iter()
            .skip(from)
            .copied()
            .filter(|&w| w != LARGE_MARK)
            .max()
            .unwrap_or(0);
        let best_large = self
            .large
            .iter()
            .filter(|(i, _)| *i >= from)
            .map(|(_, q)| q)
            .max();
        match best_large {
            Some(q) if *q > BigUint::from(best_word) => q.clone(),
            _ => BigUint::from(best_word),
        }
    }
}

impl FromIterator<BigUint> for PartialQuotients {
    fn from_iter<I: IntoIterator<Item = BigUint>>(iter: I) -> Self {
        let mut pq = PartialQuotients::new();
        for q in iter {
            pq.push(q);
        }
        pq
    }
}

/// Iterator producing convergents from a list of partial quotients.
#[derive(Clone, Debug)]
pub struct Convergents<'a> {
    quotients: &'a PartialQuotients,
    index: usize,
    h: (BigInt, BigInt),
    k: (BigUint, BigUint),
}

impl<'a> Convergents<'a> {
    pub fn new(quotients: &'a PartialQuotients) -> Self {
        Convergents {
            quotients,
            index: 0,
            // (h_{j-1}, h_{j-2}) and (k_{j-1}, k_{j-2}) before the first step
            h: (BigInt::one(), BigInt::zero()),
            k: (BigUint::zero(), BigUint::one()),
        }
    }
}

impl Iterator for Convergents<'_> {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let a = self.quotients.get(self.index)?;
        let h = BigInt::from(a.clone()) * &self.h.0 + &self.h.1;
        let k = &a * &self.k.0 + &self.k.1;
        self.h = (h.clone(), std::mem::replace(&mut self.h.0, BigInt::zero()));
        self.k = (k.clone(), std::mem::replace(&mut self.k.0, BigUint::zero()));
        let c = Convergent {
            index: self.index,
            partial_quotient: a,
            numerator: h,
            denominator: k,
        };
        self.index += 1;
        Some(c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.quotients.len() - self.index;
        (left, Some(left))
    }
}

/// Continued fraction of `m^(1/n)` up to the first denominator above a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionResult {
    m: u64,
    n: u32,
    quotients: PartialQuotients,
    max_quotient: BigUint,
    digits_used: u32,
}

impl ExpansionResult {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `a_0, …, a_s`.
    pub fn partial_quotients(&self) -> &PartialQuotients {
        &self.quotients
    }

    /// Index of the first convergent whose denominator exceeds the bound.
    pub fn s(&self) -> usize {
        self.quotients.len() - 1
    }

    /// `A = max(a_1, …, a_s)`.
    pub fn max_partial_quotient(&self) -> &BigUint {
        &self.max_quotient
    }

    /// Decimal precision at which every quotient was certified.
    pub fn digits_used(&self) -> u32 {
        self.digits_used
    }

    /// Convergents `0..=s`, computed on demand from the stored quotients.
    pub fn convergents(&self) -> Convergents<'_> {
        Convergents::new(&self.quotients)
    }
}

/// Expands `m^(1/n)` until the first convergent denominator `k_s > bound`,
/// restarting at higher precision whenever a quotient cannot be certified.
pub fn expand_root(
    m: u64,
    n: u32,
    bound: &BigUint,
    policy: &PrecisionPolicy,
) -> Result<ExpansionResult> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidInput(format!(
            "expansion needs m >= 2 and n >= 2, got m={m}, n={n}"
        )));
    }
    if bound.is_zero() {
        return Err(Error::InvalidInput(
            "height bound must be at least 1".into(),
        ));
    }
    policy.validate()?;
    if integer_nth_root(&BigUint::from(m), n).1 {
        // rational root: the expansion terminates and nothing downstream applies
        return Err(Error::ReducibleInput { n, m });
    }

    let mut digits = policy.initial_digits;
    loop {
        let alpha = nth_root_ball(m, n, digits)?;
        match expand_ball(&alpha, bound) {
            Ok(quotients) => {
                let max_quotient = quotients.max_from(1);
                return Ok(ExpansionResult {
                    m,
                    n,
                    quotients,
                    max_quotient,
                    digits_used: digits,
                });
            }
            Err(Stalled { index }) => match policy.escalate(digits) {
                Some(next) => digits = next,
                None => {
                    return Err(Error::PrecisionExhausted {
                        m,
                        n,
                        index,
                        digits,
                    })
                }
            },
        }
    }
}

/// The interval ran out of precision before quotient `index` could be certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Stalled {
    pub index: usize,
}

/// Certified partial quotients of any positive real enclosed by `ball`,
/// stopping at the first convergent denominator above `bound`.
pub(crate) fn expand_ball(ball: &RealBall, bound: &BigUint) -> Result<PartialQuotients, Stalled> {
    let (lo, e) = ball.lower();
    let (hi, _) = ball.upper();
    if !lo.is_positive() {
        return Err(Stalled { index: 0 });
    }
    let (lo, hi, den) = if e >= 0 {
        (lo << e as u64, hi << e as u64, BigInt::one())
    } else {
        (lo, hi, BigInt::one() << (-e) as u64)
    };
    let mut state = IntervalExpansion::new([(lo, den.clone()), (hi, den)]);
    state.run(bound)?;
    Ok(state.quotients)
}

const WORD_CAP: u128 = 1 << 62;

/// `⌊v / 2^shift⌋` for values with at most `shift + 127` bits.
fn top_word(v: &BigUint, shift: u64) -> u128 {
    let idx = (shift / 64) as usize;
    let off = shift % 64;
    let mut digits = v.iter_u64_digits().skip(idx);
    let d0 = u128::from(digits.next().unwrap_or(0));
    let d1 = u128::from(digits.next().unwrap_or(0));
    let d2 = u128::from(digits.next().unwrap_or(0));
    let low = d0 | (d1 << 64);
    if off == 0 {
        low
    } else {
        (low >> off) | (d2 << (128 - off))
    }
}

/// Full 256-bit product as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let low = (p00 & MASK) | (mid << 64);
    let high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (high, low)
}

/// `p/q ≤ r/s` for positive denominators.
fn frac_le(p: u128, q: u128, r: u128, s: u128) -> bool {
    mul_wide(p, s) <= mul_wide(r, q)
}

/// `⌊a/b⌋`, with the common small quotients handled without a wide division.
#[inline]
fn word_quotient(a: u128, b: u128) -> u128 {
    if a < b {
        0
    } else if a - b < b {
        1
    } else {
        a / b
    }
}

struct IntervalExpansion {
    /// Endpoints `num/den` of the current complete quotient, both `den > 0`.
    ends: [(BigInt, BigInt); 2],
    quotients: PartialQuotients,
    /// `(k_j, k_{j-1})`.
    k: (BigUint, BigUint),
}

/// Quotients certified from the leading words, with the transforms they induce.
struct Block {
    quotients: Vec<u64>,
    /// Maps endpoint pairs `(num, den)` forward over the block.
    ends: [[i64; 2]; 2],
    /// Maps `(k_j, k_{j-1})` forward over the block.
    cont: [[u64; 2]; 2],
}

impl IntervalExpansion {
    fn new(ends: [(BigInt, BigInt); 2]) -> Self {
        IntervalExpansion {
            ends,
            quotients: PartialQuotients {
                words: Vec::with_capacity(1280),
                large: Vec::new(),
            },
            k: (BigUint::zero(), BigUint::one()),
        }
    }

    fn run(&mut self, bound: &BigUint) -> Result<(), Stalled> {
        loop {
            let block = self.word_block();
            if block.quotients.is_empty() {
                self.exact_step()?;
                if self.k.0 > *bound {
                    return Ok(());
                }
                continue;
            }
            let before = self.k.clone();
            self.apply_block(&block);
            if self.k.0 > *bound {
                // replay the block one quotient at a time to stop at the first k_j > bound
                self.quotients
                    .truncate(self.quotients.len() - block.quotients.len());
                self.k = before;
                for &q in &block.quotients {
                    let (k, kp) = &self.k;
                    self.k = (k * q + kp, k.clone());
                    self.quotients.push_word(q);
                    if self.k.0 > *bound {
                        return Ok(());
                    }
                }
                unreachable!("block crossed the bound without a crossing quotient");
            }
        }
    }

    /// Leading-word approximation of the interval as `[ln/ld, un/ud]`, if it is bounded.
    fn word_interval(&self) -> Option<(u128, u128, u128, u128)> {
        let bits = self
            .ends
            .iter()
            .flat_map(|(a, b)| [a.bits(), b.bits()])
            .max()
            .unwrap_or(0);
        let shift = bits.saturating_sub(127);
        let word = |v: &BigInt| top_word(v.magnitude(), shift);
        let [(a1, b1), (a2, b2)] = &self.ends;
        let (a1, b1, a2, b2) = (word(a1), word(b1), word(a2), word(b2));
        if b1 == 0 || b2 == 0 {
            return None;
        }
        if shift == 0 {
            return Some(if frac_le(a1, b1, a2, b2) {
                (a1, b1, a2, b2)
            } else {
                (a2, b2, a1, b1)
            });
        }
        // each endpoint lies in [a/(b+1), (a+1)/b]
        let (l1, l2) = ((a1, b1 + 1), (a2, b2 + 1));
        let (u1, u2) = ((a1 + 1, b1), (a2 + 1, b2));
        let lower = if frac_le(l1.0, l1.1, l2.0, l2.1) {
            l1
        } else {
            l2
        };
        let upper = if frac_le(u1.0, u1.1, u2.0, u2.1) {
            u2
        } else {
            u1
        };
        Some((lower.0, lower.1, upper.0, upper.1))
    }

    fn word_block(&self) -> Block {
        let mut block = Block {
            quotients: Vec::new(),
            ends: [[1, 0], [0, 1]],
            cont: [[1, 0], [0, 1]],
        };
        let Some((mut ln, mut ld, mut un, mut ud)) = self.word_interval() else {
            return block;
        };
        let mut ends: [[i128; 2]; 2] = [[1, 0], [0, 1]];
        let mut cont: [[u128; 2]; 2] = [[1, 0], [0, 1]];
        while ld != 0 && ud != 0 {
            let q = word_quotient(ln, ld);
            if q != word_quotient(un, ud) || q > WORD_CAP {
                break;
            }
            let c0 = [q * cont[0][0] + cont[1][0], q * cont[0][1] + cont[1][1]];
            if c0[0] > WORD_CAP || c0[1] > WORD_CAP {
                break;
            }
            cont = [c0, cont[0]];
            let qi = q as i128;
            let e1 = [ends[0][0] - qi * ends[1][0], ends[0][1] - qi * ends[1][1]];
            ends = [ends[1], e1];
            block.quotients.push(q as u64);

            let rl = ln - q * ld;
            let ru = un - q * ud;
            if rl == 0 || ru == 0 {
                break;
            }
            // x -> 1/(x - q) reverses the interval
            (ln, ld, un, ud) = (ud, ru, ld, rl);
        }
        block.ends = ends.map(|row| row.map(|v| v as i64));
        block.cont = cont.map(|row| row.map(|v| v as u64));
        block
    }

    fn apply_block(&mut self, block: &Block) {
        let [[m00, m01], [m10, m11]] = block.ends;
        for (a, b) in self.ends.iter_mut() {
            let mut na = &*a * m00;
            na += &*b * m01;
            *a *= m10;
            *b *= m11;
            *b += &*a;
            *a = na;
        }
        let [[t00, t01], [t10, t11]] = block.cont;
        let (k, kp) = &mut self.k;
        let mut nk = &*k * t00;
        nk += &*kp * t01;
        *k *= t10;
        *kp *= t11;
        *kp += &*k;
        *k = nk;
        for &q in &block.quotients {
            self.quotients.push_word(q);
        }
    }

    /// One quotient from the full-size endpoints.
    fn exact_step(&mut self) -> Result<(), Stalled> {
        let stalled = Stalled {
            index: self.quotients.len(),
        };
        let [(a1, b1), (a2, b2)] = &self.ends;
        if !b1.is_positive() || !b2.is_positive() {
            return Err(stalled);
        }
        let (q1, r1) = a1.div_mod_floor(b1);
        let (q2, r2) = a2.div_mod_floor(b2);
        if q1 != q2 || r1.is_zero() || r2.is_zero() || q1.is_negative() {
            return Err(stalled);
        }
        let q = q1.magnitude().clone();
        let [(a1, b1), (a2, b2)] = &mut self.ends;
        *a1 = std::mem::replace(b1, r1);
        *a2 = std::mem::replace(b2, r2);
        let (k, kp) = &self.k;
        self.k = (&q * k + kp, k.clone());
        self.quotients.push(q);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bu(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn validate_examples() {
        assert_eq!(
            validate_convergent(2, 3, &BigInt::from(1), &bu(1)),
            Side::Below
        );
        assert_eq!(
            validate_convergent(2, 3, &BigInt::from(4), &bu(3)),
            Side::Above
        );
        assert_eq!(
            validate_convergent(8, 3, &BigInt::from(2), &bu(1)),
            Side::Equal
        );
        assert_eq!(
            validate_convergent(2, 3, &BigInt::from(-5), &bu(1)),
            Side::Below
        );
        assert_eq!(
            validate_convergent(2, 3, &BigInt::zero(), &bu(1)),
            Side::Below
        );
    }

    #[test]
    fn cube_root_of_two_quotients() {
        let expect = [1u64, 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14, 1, 10, 2];
        let res = expand_root(2, 3, &bu(1000), &PrecisionPolicy::default()).unwrap();
        // denominators 1, 3, 4, 23, 27, 50, 227, 277, 504, 4309
        assert_eq!(res.s(), 9);
        let head: Vec<u64> = res
            .partial_quotients()
            .iter()
            .map(|q| q.to_u64().unwrap())
            .collect();
        assert_eq!(&head[..], &expect[..10]);
        let longer = expand_root(2, 3, &bu(10u64.pow(12)), &PrecisionPolicy::default()).unwrap();
        let head: Vec<u64> = longer
            .partial_quotients()
            .iter()
            .take(15)
            .map(|q| q.to_u64().unwrap())
            .collect();
        assert_eq!(head, expect);
        let conv: Vec<(i64, u64)> = res
            .convergents()
            .take(6)
            .map(|c| {
                (
                    c.numerator.to_i64().unwrap(),
                    c.denominator.to_u64().unwrap(),
                )
            })
            .collect();
        assert_eq!(
            conv,
            vec![(1, 1), (4, 3), (5, 4), (29, 23), (34, 27), (63, 50)]
        );
    }

    #[test]
    fn first_quotient_brackets_by_cubes() {
        let res = expand_root(9, 3, &bu(10), &PrecisionPolicy::default()).unwrap();
        let c0 = res.convergents().next().unwrap();
        assert_eq!(c0.numerator, BigInt::from(2));
        assert_eq!(c0.denominator, bu(1));
    }

    #[test]
    fn stops_at_first_denominator_above_bound() {
        let bound = bu(1000);
        let res = expand_root(2, 3, &bound, &PrecisionPolicy::default()).unwrap();
        let conv: Vec<Convergent> = res.convergents().collect();
        assert_eq!(conv.len(), res.s() + 1);
        assert!(conv[res.s()].denominator > bound);
        assert!(conv[res.s() - 1].denominator <= bound);
        let a = conv[1..]
            .iter()
            .map(|c| c.partial_quotient.clone())
            .max()
            .unwrap();
        assert_eq!(res.partial_quotients().len(), res.s() + 1);
        assert_eq!(&a, res.max_partial_quotient());
    }

    #[test]
    fn perfect_power_is_rejected() {
        let err = expand_root(8, 3, &bu(100), &PrecisionPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::ReducibleInput { n: 3, m: 8 }));
    }

    #[test]
    fn tiny_precision_escalates_then_exhausts() {
        let big = BigUint::from(10u32).pow(60);
        // 100 digits cannot certify k up to 10^60, but 400 can
        let policy = PrecisionPolicy::new(20, 2.0, 400).unwrap();
        let res = expand_root(2, 3, &big, &policy).unwrap();
        assert!(res.digits_used() > 20);
        let capped = PrecisionPolicy::new(20, 2.0, 40).unwrap();
        match expand_root(2, 3, &big, &capped).unwrap_err() {
            Error::PrecisionExhausted {
                m: 2,
                n: 3,
                digits: 40,
                index,
            } => assert!(index > 10),
            other => panic!("unexpected {other:?}"),
        }
    }
}
