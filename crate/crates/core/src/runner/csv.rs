//! The solutions file: header `n,m,x,y,rhs`, decimal fields, LF endings.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::thue::{Rhs, SolutionTriple};
use crate::{Error, Result};

pub const HEADER: &str = "n,m,x,y,rhs";

/// One CSV line, newline included.
pub fn format_row(t: &SolutionTriple) -> String {
    format!("{},{},{},{},{}\n", t.n, t.m, t.x, t.y, t.rhs)
}

pub fn write_solutions(path: &Path, rows: &[SolutionTriple]) -> Result<()> {
    let mut text = String::with_capacity(16 * (rows.len() + 1));
    text.push_str(HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&format_row(row));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a solutions file as written. Rows are taken at face value, not re-verified.
pub fn read_solutions(path: &Path) -> Result<Vec<SolutionTriple>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_solutions(path, &text)
}

pub(crate) fn parse_solutions(path: &Path, text: &str) -> Result<Vec<SolutionTriple>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        Some((line, h)) => {
            return Err(parse_err(
                line,
                format!("expected header {HEADER:?}, got {h:?}"),
            ))
        }
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(parse_err(
                line,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let n = fields[0]
            .parse::<u32>()
            .map_err(|e| parse_err(line, format!("n: {e}")))?;
        let m = fields[1]
            .parse::<u64>()
            .map_err(|e| parse_err(line, format!("m: {e}")))?;
        let x = fields[2]
            .parse::<BigInt>()
            .map_err(|e| parse_err(line, format!("x: {e}")))?;
        let y = fields[3]
            .parse::<BigInt>()
            .map_err(|e| parse_err(line, format!("y: {e}")))?;
        let rhs = fields[4].parse::<Rhs>().map_err(|e| parse_err(line, e))?;
        rows.push(SolutionTriple { n, m, x, y, rhs });
    }
    Ok(rows)
}

/// Rows present in only one of two files.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixtureDiff {
    /// In the fixture but not in the output.
    pub missing: Vec<SolutionTriple>,
    /// In the output but not in the fixture.
    pub extra: Vec<SolutionTriple>,
}

impl FixtureDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Canonical sign: `(x, y)` and `(−x, −y)` describe the same solution
/// (with the sign of the right-hand side flipped when `n` is odd).
pub fn normalize_row(t: &SolutionTriple) -> SolutionTriple {
    let mut t = t.clone();
    if t.n % 2 == 0 {
        t.x = t.x.abs();
        t.y = t.y.abs();
    } else if t.y.is_negative() || (t.y == BigInt::from(0) && t.x.is_negative()) {
        t.x = -t.x;
        t.y = -t.y;
        t.rhs = match t.rhs {
            Rhs::Plus => Rhs::Minus,
            Rhs::Minus => Rhs::Plus,
        };
    }
    t
}

pub fn diff_rows(output: &[SolutionTriple], fixture: &[SolutionTriple]) -> FixtureDiff {
    let out: BTreeSet<SolutionTriple> = output.iter().map(normalize_row).collect();
    let fix: BTreeSet<SolutionTriple> = fixture.iter().map(normalize_row).collect();
    FixtureDiff {
        missing: fix.difference(&out).cloned().collect(),
        extra: out.difference(&fix).cloned().collect(),
    }
}

/// Set difference of two solutions files in both directions.
pub fn compare_fixture(output_path: &Path, fixture_path: &Path) -> Result<FixtureDiff> {
    let output = read_solutions(output_path)?;
    let fixture = read_solutions(fixture_path)?;
    Ok(diff_rows(&output, &fixture))
}
