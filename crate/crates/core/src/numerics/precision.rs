use crate::error::{Error, Result};

/// Largest working precision, in decimal digits, this crate will attempt.
pub const MAX_REPRESENTABLE_DIGITS: u32 = 10_000_000;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision needed to carry `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u64 {
    (f64::from(digits) * LOG2_10).ceil() as u64
}

/// How much decimal precision an expansion starts with and how far it may escalate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub initial_digits: u32,
    pub growth_factor: f64,
    pub max_digits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_digits: 1200,
            growth_factor: 2.0,
            max_digits: 20_000,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(initial_digits: u32, growth_factor: f64, max_digits: u32) -> Result<Self> {
        let policy = PrecisionPolicy {
            initial_digits,
            growth_factor,
            max_digits,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_digits == 0 {
            return Err(Error::InvalidInput(
                "initial precision must be at least 1 digit".into(),
            ));
        }
        if self.initial_digits > self.max_digits {
            return Err(Error::InvalidInput(format!(
                "initial precision {} exceeds the cap {}",
                self.initial_digits, self.max_digits
            )));
        }
        if self.max_digits > MAX_REPRESENTABLE_DIGITS {
            return Err(Error::InvalidInput(format!(
                "precision cap {} exceeds the supported maximum {}",
                self.max_digits, MAX_REPRESENTABLE_DIGITS
            )));
        }
        if !(self.growth_factor.is_finite() && self.growth_factor > 1.0) {
            return Err(Error::InvalidInput(format!(
                "growth factor must be > 1, got {}",
                self.growth_factor
            )));
        }
        Ok(())
    }

    /// The precision to retry with after an ambiguous floor at `digits`, or `None` at the cap.
    pub fn escalate(&self, digits: u32) -> Option<u32> {
        if digits >= self.max_digits {
            return None;
        }
        let grown = (f64::from(digits) * self.growth_factor).ceil();
        let next = if grown >= f64::from(self.max_digits) {
            self.max_digits
        } else {
            (grown as u32).max(digits + 1)
        };
        Some(next)
    }

    /// Default policy with overrides from `BINTHUE_DIGITS`, `BINTHUE_GROWTH` and
    /// `BINTHUE_MAX_DIGITS` when set.
    pub fn from_env() -> Result<Self> {
        let mut policy = PrecisionPolicy::default();
        if let Some(v) = env_var("BINTHUE_DIGITS")? {
            policy.initial_digits = v;
        }
        if let Some(v) = env_var("BINTHUE_MAX_DIGITS")? {
            policy.max_digits = v;
        }
        if let Some(v) = env_var::<f64>("BINTHUE_GROWTH")? {
            policy.growth_factor = v;
        }
        policy.validate()?;
        Ok(policy)
    }
}

fn env_var<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("{name}={raw:?} is not a valid number"))),
        Err(_) => Ok(None),
    }
}
