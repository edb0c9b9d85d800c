//! Solving `x^n − m·y^n = ±1` for one coefficient `m`.
//!
//! For odd prime `n` every solution with `y` above a small threshold is a
//! convergent of `m^(1/n)` whose denominator is bounded in terms of the
//! largest partial quotient met before the height bound. Solutions at or below
//! the threshold are found by testing each `y` directly. For `n = 4` every
//! solution with `x, y > 0` is a convergent.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{expand_root, ExpansionResult};
use crate::error::{Error, Result};
use crate::numerics::{
    integer_nth_root, nth_root_ball, sin_pi_ratio, Floor, PrecisionPolicy, RealBall,
};

/// Working precision of the bound constants (c₁, c₂, c₃ and the small-`y` threshold).
pub const BOUND_DIGITS: u32 = 60;

/// Direct-test limits on `m` as published alongside the method, per exponent.
pub const PUBLISHED_DIRECT_TEST_LIMITS: [(u32, u64); 9] = [
    (3, 4),
    (5, 10),
    (7, 29),
    (11, 314),
    (13, 1078),
    (17, 13489),
    (19, 48699),
    (23, 652_798),
    (29, 7_960_210),
];

/// `10^500`, the default height bound.
pub fn default_bound() -> BigUint {
    BigUint::from(10u32).pow(500)
}

pub fn is_odd_prime(n: u32) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_exponent(n: u32) -> Result<()> {
    if n == 4 || is_odd_prime(n) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "exponent must be 4 or an odd prime, got {n}"
        )))
    }
}

/// One equation `x^n − m·y^n = ±1`, solved for `max(|x|, |y|) < bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationInstance {
    n: u32,
    m: u64,
    bound: BigUint,
}

impl EquationInstance {
    pub fn new(n: u32, m: u64, bound: BigUint) -> Result<Self> {
        check_exponent(n)?;
        if m < 2 {
            return Err(Error::InvalidInput(format!(
                "coefficient must be >= 2, got {m}"
            )));
        }
        if bound.is_zero() {
            return Err(Error::InvalidInput(
                "height bound must be at least 1".into(),
            ));
        }
        Ok(EquationInstance { n, m, bound })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn bound(&self) -> &BigUint {
        &self.bound
    }
}

/// Right-hand side of the equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rhs {
    Minus,
    Plus,
}

impl Rhs {
    pub fn value(self) -> i32 {
        match self {
            Rhs::Minus => -1,
            Rhs::Plus => 1,
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Rhs {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" | "+1" => Ok(Rhs::Plus),
            "-1" => Ok(Rhs::Minus),
            other => Err(format!("right-hand side must be 1 or -1, got {other:?}")),
        }
    }
}

/// `x^n − m·y^n` reduced to its sign when it is `±1`, `None` otherwise.
pub fn verify_exact(n: u32, m: u64, x: &BigInt, y: &BigInt) -> Option<Rhs> {
    let value = x.pow(n) - BigInt::from(m) * y.pow(n);
    if value.is_one() {
        Some(Rhs::Plus)
    } else if value == BigInt::from(-1) {
        Some(Rhs::Minus)
    } else {
        None
    }
}

/// A verified nontrivial solution, normalized so that `y ≥ 1` (and `x ≥ 1` for even `n`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionTriple {
    pub n: u32,
    pub m: u64,
    pub x: BigInt,
    pub y: BigInt,
    pub rhs: Rhs,
}

impl SolutionTriple {
    /// Checks `(x, y)` exactly and normalizes its sign; `None` for non-solutions and for `y = 0`.
    pub fn new(n: u32, m: u64, x: BigInt, y: BigInt) -> Option<Self> {
        if y.is_zero() {
            return None;
        }
        let (x, y) = if n % 2 == 0 {
            (x.abs(), y.abs())
        } else if y.is_negative() {
            (-x, -y)
        } else {
            (x, y)
        };
        let rhs = verify_exact(n, m, &x, &y)?;
        Some(SolutionTriple { n, m, x, y, rhs })
    }

    /// `max(|x|, |y|)`.
    pub fn height(&self) -> BigUint {
        self.x.magnitude().max(self.y.magnitude()).clone()
    }

    fn sort_key(&self) -> (u64, &BigInt, &BigInt) {
        (self.m, &self.y, &self.x)
    }
}

/// Sorts by `(m, y)` and drops duplicates.
pub fn sort_solutions(solutions: &mut Vec<SolutionTriple>) {
    solutions.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    solutions.dedup();
}

/// `∏_{k=1}^{n−1} |sin(2πk/n)|`, the product of `|Im ζ^k|` over the nontrivial `n`-th roots of unity.
pub fn c2_of(n: u32) -> Result<RealBall> {
    c2_at(n, BOUND_DIGITS)
}

fn c2_at(n: u32, digits: u32) -> Result<RealBall> {
    if !is_odd_prime(n) {
        return Err(Error::InvalidInput(format!(
            "c2 is defined here for odd primes, got {n}"
        )));
    }
    let mut acc = RealBall::from_integer(1, digits);
    for k in 1..u64::from(n) {
        let s = sin_pi_ratio(2 * k, u64::from(n), digits);
        let s = if s.sign() == Some(std::cmp::Ordering::Less) {
            -s
        } else {
            s
        };
        acc = &acc * &s;
    }
    Ok(acc)
}

fn two_over(c: &RealBall) -> RealBall {
    RealBall::from_integer(2, c.digits())
        .checked_div(c)
        .expect("c2 is bounded away from zero")
}

/// Small-`y` threshold given c₂ and a ball around `α = m^(1/n)`, using
/// `m^((n−1)/(n(n−2))) = (α^(n−1))^(1/(n−2))` to keep root orders small.
fn small_y_bound_with(n: u32, c2: &RealBall, alpha: &RealBall) -> RealBall {
    let head = two_over(c2).nth_root(n - 2).expect("positive");
    let tail = alpha
        .powi(n - 1)
        .nth_root(n - 2)
        .expect("positive")
        .recip()
        .expect("positive");
    &head * &tail
}

/// `(2/c₂)^(1/(n−2)) · m^(−(n−1)/(n(n−2)))`: every solution with a larger `y` is a convergent.
pub fn small_y_bound(n: u32, m: u64) -> Result<RealBall> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "coefficient must be >= 2, got {m}"
        )));
    }
    let c2 = c2_of(n)?;
    let alpha = nth_root_ball(m, n, BOUND_DIGITS)?;
    Ok(small_y_bound_with(n, &c2, &alpha))
}

/// `⌊(2/c₂)^(n/(n−1))⌋`, the largest `m` whose small-`y` threshold is at least 1.
pub fn m_max_for_direct_test(n: u32) -> Result<u64> {
    let mut digits = BOUND_DIGITS;
    loop {
        let c2 = c2_at(n, digits)?;
        let v = two_over(&c2).powi(n).nth_root(n - 1).expect("positive");
        if let Floor::Exact(f) = v.floor() {
            return f.to_u64().ok_or_else(|| {
                Error::InvalidInput(format!("direct-test limit for n={n} overflows"))
            });
        }
        digits *= 2;
    }
}

/// The larger of the computed and the published direct-test limits.
pub fn direct_test_limit(n: u32) -> Result<u64> {
    let computed = m_max_for_direct_test(n)?;
    let published = PUBLISHED_DIRECT_TEST_LIMITS
        .iter()
        .find(|(e, _)| *e == n)
        .map_or(0, |(_, v)| *v);
    Ok(computed.max(published))
}

/// False when `x^n − m` factors over the rationals.
pub fn is_irreducible(n: u32, m: u64) -> bool {
    let root = if n == 4 { 2 } else { n };
    !integer_nth_root(&BigUint::from(m), root).1
}

/// `((A+2)/c₁)^(1/(n−2))`: solutions beyond the small-`y` range have `y = k_j` below this.
pub fn denominator_bound(n: u32, c1: &RealBall, a: &BigUint) -> Result<RealBall> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "denominator bound needs n >= 3, got {n}"
        )));
    }
    if c1.sign() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput("c1 must be positive".into()));
    }
    let a2 = RealBall::from_integer(BigInt::from(a.clone()) + 2, c1.digits());
    let ratio = a2.checked_div(c1).expect("c1 is bounded away from zero");
    Ok(ratio.nth_root(n - 2).expect("positive"))
}

/// Constants used for one equation.
#[derive(Clone, Debug)]
pub struct BoundSet {
    /// `None` for `n = 4`.
    pub c2: Option<RealBall>,
    pub c1: RealBall,
    /// `None` for `n = 4`, where no direct testing is needed.
    pub small_y_bound: Option<RealBall>,
    pub c3: RealBall,
}

/// Everything computed while solving one equation.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solutions: Vec<SolutionTriple>,
    pub bounds: BoundSet,
    pub expansion: ExpansionResult,
    /// Largest `y` tested directly (0 when none).
    pub direct_y_max: u64,
    /// Number of convergents checked exactly.
    pub convergents_tested: usize,
}

/// Solver for a fixed exponent and height bound; shares the exponent constants across `m`.
#[derive(Clone, Debug)]
pub struct ThueSolver {
    n: u32,
    bound: BigUint,
    policy: PrecisionPolicy,
    c2: Option<RealBall>,
    direct_limit: u64,
}

impl ThueSolver {
    pub fn new(n: u32, bound: BigUint, policy: PrecisionPolicy) -> Result<Self> {
        check_exponent(n)?;
        policy.validate()?;
        if bound.is_zero() {
            return Err(Error::InvalidInput(
                "height bound must be at least 1".into(),
            ));
        }
        let (c2, direct_limit) = if n == 4 {
            (None, 0)
        } else {
            (Some(c2_of(n)?), direct_test_limit(n)?)
        };
        Ok(ThueSolver {
            n,
            bound,
            policy,
            c2,
            direct_limit,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bound(&self) -> &BigUint {
        &self.bound
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    /// Normalized solutions with `y ≥ 1` and height below the bound, sorted by `y`.
    pub fn solve(&self, m: u64) -> Result<Vec<SolutionTriple>> {
        Ok(self.solve_detailed(m)?.solutions)
    }

    pub fn solve_detailed(&self, m: u64) -> Result<SolveReport> {
        let n = self.n;
        if m < 2 {
            return Err(Error::InvalidInput(format!(
                "coefficient must be >= 2, got {m}"
            )));
        }
        if !is_irreducible(n, m) {
            return Err(Error::ReducibleInput { n, m });
        }
        let mut found = Vec::new();
        let alpha = nth_root_ball(m, n, BOUND_DIGITS)?;

        let small_y = self.c2.as_ref().map(|c2| small_y_bound_with(n, c2, &alpha));
        let mut direct_y_max = match &small_y {
            Some(b) => b
                .lower_floor()
                .max(b.upper_ceil() - 1)
                .to_u64()
                .unwrap_or(u64::MAX),
            None => 0,
        };
        if small_y.is_some() && m <= self.direct_limit {
            direct_y_max = direct_y_max.max(1);
        }
        for y in 1..=direct_y_max {
            self.test_small_y(m, y, &mut found);
        }

        let expansion = expand_root(m, n, &self.bound, &self.policy)?;
        // c₁ = m^((n−1)/n)·c₂ = c₂·m/α, and m^(3/4) for n = 4
        let m_over_alpha = RealBall::from_integer(m, BOUND_DIGITS)
            .checked_div(&alpha)
            .expect("root is positive");
        let c1 = match &self.c2 {
            Some(c2) => c2 * &m_over_alpha,
            None => m_over_alpha,
        };
        let c3 = denominator_bound(n, &c1, expansion.max_partial_quotient())?;
        let limit = c3.upper_ceil();

        let mut tested = 0;
        for c in expansion.convergents() {
            if c.index >= 2 && BigInt::from(c.denominator.clone()) >= limit {
                break;
            }
            tested += 1;
            let y = BigInt::from(c.denominator);
            if let Some(t) = SolutionTriple::new(n, m, c.numerator, y) {
                found.push(t);
            }
        }

        found.retain(|t| t.height() < self.bound);
        sort_solutions(&mut found);
        Ok(SolveReport {
            solutions: found,
            bounds: BoundSet {
                c2: self.c2.clone(),
                c1,
                small_y_bound: small_y,
                c3,
            },
            expansion,
            direct_y_max,
            convergents_tested: tested,
        })
    }

    fn test_small_y(&self, m: u64, y: u64, found: &mut Vec<SolutionTriple>) {
        let base = BigUint::from(m) * BigUint::from(y).pow(self.n);
        for candidate in [&base + 1u32, &base - 1u32] {
            let (x, exact) = integer_nth_root(&candidate, self.n);
            if exact {
                if let Some(t) = SolutionTriple::new(self.n, m, x.into(), BigInt::from(y)) {
                    found.push(t);
                }
            }
        }
    }
}

/// Solves a single equation with a freshly built [`ThueSolver`].
pub fn solve_instance(
    eq: &EquationInstance,
    policy: &PrecisionPolicy,
) -> Result<Vec<SolutionTriple>> {
    ThueSolver::new(eq.n(), eq.bound().clone(), *policy)?.solve(eq.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn exponent_screen() {
        for n in [3u32, 4, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            assert!(check_exponent(n).is_ok(), "{n}");
        }
        for n in [0u32, 1, 2, 6, 8, 9, 15, 25] {
            assert!(check_exponent(n).is_err(), "{n}");
        }
        assert!(EquationInstance::new(3, 1, default_bound()).is_err());
        assert!(EquationInstance::new(3, 2, BigUint::zero()).is_err());
    }

    #[test]
    fn verify_examples() {
        assert_eq!(verify_exact(3, 635, &bi(361), &bi(42)), Some(Rhs::Plus));
        assert_eq!(verify_exact(5, 894_661, &bi(31), &bi(2)), Some(Rhs::Minus));
        assert_eq!(verify_exact(4, 7140, &bi(239), &bi(26)), Some(Rhs::Plus));
        assert_eq!(verify_exact(3, 7, &bi(2), &bi(1)), Some(Rhs::Plus));
        assert_eq!(verify_exact(3, 9, &bi(2), &bi(1)), Some(Rhs::Minus));
        assert_eq!(verify_exact(7, 12345, &bi(1), &bi(0)), Some(Rhs::Plus));
        assert_eq!(verify_exact(3, 6, &bi(2), &bi(1)), None);
    }

    #[test]
    fn triples_are_normalized() {
        let t = SolutionTriple::new(3, 17, bi(-18), bi(-7)).unwrap();
        assert_eq!(
            (t.x.clone(), t.y.clone(), t.rhs),
            (bi(18), bi(7), Rhs::Plus)
        );
        let t = SolutionTriple::new(4, 5, bi(-3), bi(2)).unwrap();
        assert_eq!((t.x, t.y), (bi(3), bi(2)));
        assert!(SolutionTriple::new(3, 17, bi(1), bi(0)).is_none());
        assert!(SolutionTriple::new(3, 17, bi(5), bi(2)).is_none());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!is_irreducible(3, 8));
        assert!(is_irreducible(3, 9));
        assert!(!is_irreducible(4, 16));
        assert!(!is_irreducible(4, 9));
        assert!(is_irreducible(4, 8));
        assert!(!is_irreducible(29, 1 << 29));
    }

    #[test]
    fn c2_values() {
        let c = c2_of(3).unwrap();
        assert!(c.contains_ratio(&bi(3), &bi(4)));
        let c = c2_of(5).unwrap();
        assert!(c.contains_ratio(&bi(5), &bi(16)));
        assert!(c2_of(4).is_err());
        assert!(c2_of(9).is_err());
    }

    #[test]
    fn small_y_bound_examples() {
        let b = small_y_bound(3, 2).unwrap();
        assert!((b.to_f64() - 8.0 / 3.0 * 2f64.powf(-2.0 / 3.0)).abs() < 1e-12);
        let one = RealBall::from_integer(1, BOUND_DIGITS);
        assert_eq!(
            small_y_bound(3, 5).unwrap().compare(&one),
            Some(Ordering::Less)
        );
        // the crossover sits between 652797 and 652798; the published limit is 652798
        assert_eq!(
            small_y_bound(23, 652_797).unwrap().compare(&one),
            Some(Ordering::Greater)
        );
        assert_eq!(
            small_y_bound(23, 652_798).unwrap().compare(&one),
            Some(Ordering::Less)
        );
        assert!(direct_test_limit(23).unwrap() >= 652_798);
    }

    #[test]
    fn denominator_bound_examples() {
        let one = RealBall::from_integer(1, BOUND_DIGITS);
        let b = denominator_bound(3, &one, &BigUint::from(14u32)).unwrap();
        assert!(b.contains_ratio(&bi(16), &bi(1)));
        assert!(b.radius_log2() < -150.0);
        assert!(denominator_bound(5, &-one.clone(), &BigUint::one()).is_err());
    }

    #[test]
    fn solve_small_cases() {
        let p = PrecisionPolicy::default();
        let solve =
            |n, m| solve_instance(&EquationInstance::new(n, m, default_bound()).unwrap(), &p);
        let s = solve(3, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            (s[0].x.clone(), s[0].y.clone(), s[0].rhs),
            (bi(1), bi(1), Rhs::Minus)
        );
        let s = solve(3, 17).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            (s[0].x.clone(), s[0].y.clone(), s[0].rhs),
            (bi(18), bi(7), Rhs::Plus)
        );
        assert!(solve(3, 6).unwrap().is_empty());
        assert!(matches!(
            solve(3, 27),
            Err(Error::ReducibleInput { n: 3, m: 27 })
        ));
        let s = solve(29, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            (s[0].x.clone(), s[0].y.clone(), s[0].rhs),
            (bi(1), bi(1), Rhs::Minus)
        );
        let s = solve(4, 7140).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            (s[0].x.clone(), s[0].y.clone(), s[0].rhs),
            (bi(239), bi(26), Rhs::Plus)
        );
    }
}
