use std::fmt;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Progress record: everything up to `last_complete_m` is in the first
/// `rows_written` rows of the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: u32,
    pub bound: BigUint,
    pub digits: u32,
    pub config_hash: String,
    pub last_complete_m: u64,
    pub rows_written: u64,
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} C={} digits={} config_hash={} last_complete_m={} rows_written={}",
            self.n,
            format_bound(&self.bound),
            self.digits,
            self.config_hash,
            self.last_complete_m,
            self.rows_written
        )
    }
}

impl Checkpoint {
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message,
        };
        let line = text.lines().next().unwrap_or("");
        let mut fields = std::collections::HashMap::new();
        for token in line.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| err(format!("malformed field {token:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| err(format!("missing field {k}")))
        };
        let num =
            |k: &str| -> Result<u64> { get(k)?.parse().map_err(|e| err(format!("{k}: {e}"))) };
        Ok(Checkpoint {
            n: u32::try_from(num("n")?).map_err(|e| err(format!("n: {e}")))?,
            bound: parse_bound(get("C")?).map_err(|e| err(format!("C: {e}")))?,
            digits: u32::try_from(num("digits")?).map_err(|e| err(format!("digits: {e}")))?,
            config_hash: get("config_hash")?.to_string(),
            last_complete_m: num("last_complete_m")?,
            rows_written: num("rows_written")?,
        })
    }

    /// `None` when the file does not exist yet.
    pub fn load(path: &Path) -> Result<Option<Self>> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(path, &text).map(Some),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Write-then-rename, so readers see either the old record or the new one.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = tmp_path(path);
        fs::write(&tmp, format!("{self}\n")).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Decimal, or `b^k` when that is shorter (`10^500`).
pub fn format_bound(c: &BigUint) -> String {
    let ten = BigUint::from(10u32);
    let mut k = 0u32;
    let mut rest = c.clone();
    while rest > BigUint::one() && (&rest % &ten).is_zero() {
        rest /= &ten;
        k += 1;
    }
    if rest.is_one() && k >= 3 {
        format!("10^{k}")
    } else {
        c.to_string()
    }
}

/// Accepts a decimal integer or `b^k`.
pub fn parse_bound(s: &str) -> std::result::Result<BigUint, String> {
    let s = s.trim();
    let value = match s.split_once('^') {
        Some((b, k)) => {
            let b: BigUint = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
            let k: u32 = k
                .trim()
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            if k > 1_000_000 {
                return Err(format!("exponent too large in {s:?}"));
            }
            b.pow(k)
        }
        None => s.parse().map_err(|_| format!("not an integer: {s:?}"))?,
    };
    if value.is_zero() {
        return Err("bound must be positive".into());
    }
    Ok(value)
}
