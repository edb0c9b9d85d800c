//! Batch sweeps over a range of `m` with a worker pool, ordered output and resumable checkpoints.

mod checkpoint;
mod csv;

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::numerics::PrecisionPolicy;
use crate::thue::{default_bound, is_irreducible, SolutionTriple, ThueSolver};
use crate::{Error, Result};

pub use checkpoint::{format_bound, parse_bound, Checkpoint};
pub use csv::{
    compare_fixture, diff_rows, format_row, normalize_row, read_solutions, write_solutions,
    FixtureDiff, HEADER,
};

/// Completed values of `m` between checkpoint writes.
pub const DEFAULT_CHECKPOINT_STRIDE: u64 = 256;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n: u32,
    pub m_lo: u64,
    pub m_hi: u64,
    pub bound: BigUint,
    pub policy: PrecisionPolicy,
    pub workers: usize,
    pub output_path: PathBuf,
    pub checkpoint_path: Option<PathBuf>,
    pub fixture_path: Option<PathBuf>,
    pub checkpoint_stride: u64,
}

impl SweepConfig {
    /// Default bound, precision and a single worker.
    pub fn new(n: u32, m_lo: u64, m_hi: u64, output_path: impl Into<PathBuf>) -> Self {
        SweepConfig {
            n,
            m_lo,
            m_hi,
            bound: default_bound(),
            policy: PrecisionPolicy::default(),
            workers: 1,
            output_path: output_path.into(),
            checkpoint_path: None,
            fixture_path: None,
            checkpoint_stride: DEFAULT_CHECKPOINT_STRIDE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_lo < 2 || self.m_lo > self.m_hi {
            return Err(Error::InvalidInput(format!(
                "need 2 <= m_lo <= m_hi, got [{}, {}]",
                self.m_lo, self.m_hi
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("need at least one worker".into()));
        }
        if self.checkpoint_stride == 0 {
            return Err(Error::InvalidInput(
                "checkpoint stride must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Identifies the settings a checkpoint may be resumed under. The upper end
    /// of the range and the worker count are left out, so a finished sweep can
    /// be extended and the pool resized.
    pub fn config_hash(&self) -> String {
        let p = &self.policy;
        let text = format!(
            "n={};m_lo={};C={};digits={};growth={};max_digits={}",
            self.n, self.m_lo, self.bound, p.initial_digits, p.growth_factor, p.max_digits
        );
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// Irreducible `m` in the range, including any finished before a resume.
    pub solved_count: u64,
    pub skipped_reducible_count: u64,
    /// Rows in the output file.
    pub solutions_found: u64,
    pub wall_time: Duration,
    /// `None` when this run had nothing left to solve.
    pub max_digits_used: Option<u32>,
    /// `(m, digits)` for every `m` in this run that needed more than the initial precision.
    pub escalations: Vec<(u64, u32)>,
    /// First `m` solved by this run (`m_hi + 1` when the checkpoint already covered everything).
    pub resumed_at: u64,
    pub fixture_diff: Option<FixtureDiff>,
}

enum Outcome {
    Solved {
        solutions: Vec<SolutionTriple>,
        digits: u32,
    },
    Reducible,
}

struct Progress {
    next_m: u64,
    rows: u64,
    since_checkpoint: u64,
}

/// Solves every `m` in `[m_lo, m_hi]`, writing rows in `(m, y)` order.
///
/// With a checkpoint path, an existing matching checkpoint is resumed from and
/// the output is truncated back to what it vouches for.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let started = Instant::now();
    let solver = ThueSolver::new(cfg.n, cfg.bound.clone(), cfg.policy)?;
    let hash = cfg.config_hash();

    let resume = match &cfg.checkpoint_path {
        Some(path) => Checkpoint::load(path)?,
        None => None,
    };
    let (start, rows) = match &resume {
        Some(ck) => {
            if ck.config_hash != hash || ck.n != cfg.n || ck.bound != cfg.bound {
                return Err(Error::InvalidInput(format!(
                    "checkpoint {} was written for a different configuration",
                    cfg.checkpoint_path.as_ref().unwrap().display()
                )));
            }
            truncate_output(&cfg.output_path, ck.rows_written)?;
            (ck.last_complete_m + 1, ck.rows_written)
        }
        None => {
            fs::write(&cfg.output_path, format!("{HEADER}\n"))
                .map_err(|e| Error::io(&cfg.output_path, e))?;
            (cfg.m_lo, 0)
        }
    };

    let file = OpenOptions::new()
        .append(true)
        .open(&cfg.output_path)
        .map_err(|e| Error::io(&cfg.output_path, e))?;
    let mut out = BufWriter::new(file);
    let mut progress = Progress {
        next_m: start,
        rows,
        since_checkpoint: 0,
    };
    let mut max_digits = None;
    let mut escalations = Vec::new();
    let mut failure = None;

    if start <= cfg.m_hi {
        let next = AtomicU64::new(start);
        let stop = AtomicBool::new(false);
        let (tx, rx) = mpsc::channel::<(u64, Result<Outcome>)>();
        thread::scope(|scope| -> Result<()> {
            for _ in 0..cfg.workers {
                let tx = tx.clone();
                let (next, stop, solver) = (&next, &stop, &solver);
                scope.spawn(move || {
                    while !stop.load(Ordering::Relaxed) {
                        let m = next.fetch_add(1, Ordering::Relaxed);
                        if m > cfg.m_hi {
                            break;
                        }
                        let outcome = solve_one(solver, m);
                        if outcome.is_err() {
                            stop.store(true, Ordering::Relaxed);
                        }
                        if tx.send((m, outcome)).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(tx);

            let mut pending = BTreeMap::new();
            for (m, outcome) in rx {
                pending.insert(m, outcome);
                while failure.is_none() {
                    let Some(outcome) = pending.remove(&progress.next_m) else {
                        break;
                    };
                    match outcome {
                        Ok(Outcome::Solved { solutions, digits }) => {
                            for t in &solutions {
                                out.write_all(format_row(t).as_bytes())
                                    .map_err(|e| Error::io(&cfg.output_path, e))?;
                            }
                            progress.rows += solutions.len() as u64;
                            max_digits = max_digits.max(Some(digits));
                            if digits > cfg.policy.initial_digits {
                                escalations.push((progress.next_m, digits));
                            }
                        }
                        Ok(Outcome::Reducible) => {}
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                    progress.next_m += 1;
                    progress.since_checkpoint += 1;
                    if progress.since_checkpoint >= cfg.checkpoint_stride {
                        save_progress(cfg, &hash, &mut out, &mut progress)?;
                    }
                }
            }
            Ok(())
        })?;
    }

    save_progress(cfg, &hash, &mut out, &mut progress)?;
    if let Some(e) = failure {
        return Err(e);
    }

    let skipped = (cfg.m_lo..=cfg.m_hi)
        .filter(|&m| !is_irreducible(cfg.n, m))
        .count() as u64;
    let fixture_diff = match &cfg.fixture_path {
        Some(path) => {
            let output = read_solutions(&cfg.output_path)?;
            let fixture: Vec<_> = read_solutions(path)?
                .into_iter()
                .filter(|t| t.n == cfg.n && (cfg.m_lo..=cfg.m_hi).contains(&t.m))
                .collect();
            Some(diff_rows(&output, &fixture))
        }
        None => None,
    };
    Ok(SweepReport {
        solved_count: cfg.m_hi - cfg.m_lo + 1 - skipped,
        skipped_reducible_count: skipped,
        solutions_found: progress.rows,
        wall_time: started.elapsed(),
        max_digits_used: max_digits,
        escalations,
        resumed_at: start,
        fixture_diff,
    })
}

fn solve_one(solver: &ThueSolver, m: u64) -> Result<Outcome> {
    if !is_irreducible(solver.n(), m) {
        return Ok(Outcome::Reducible);
    }
    let report = solver.solve_detailed(m)?;
    Ok(Outcome::Solved {
        digits: report.expansion.digits_used(),
        solutions: report.solutions,
    })
}

/// Flushes the rows written so far, then records them in the checkpoint.
fn save_progress(
    cfg: &SweepConfig,
    hash: &str,
    out: &mut BufWriter<File>,
    progress: &mut Progress,
) -> Result<()> {
    out.flush().map_err(|e| Error::io(&cfg.output_path, e))?;
    progress.since_checkpoint = 0;
    let Some(path) = &cfg.checkpoint_path else {
        return Ok(());
    };
    Checkpoint {
        n: cfg.n,
        bound: cfg.bound.clone(),
        digits: cfg.policy.initial_digits,
        config_hash: hash.to_string(),
        last_complete_m: progress.next_m - 1,
        rows_written: progress.rows,
    }
    .store(path)
}

/// Cuts the output back to the header plus `rows` complete rows.
fn truncate_output(path: &Path, rows: u64) -> Result<()> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = format!("{HEADER}\n");
    if !bytes.starts_with(header.as_bytes()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "output does not start with the expected header".into(),
        });
    }
    let mut keep = header.len();
    for row in 0..rows {
        match bytes[keep..].iter().position(|&b| b == b'\n') {
            Some(i) => keep += i + 1,
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: row as usize + 2,
                    message: format!("checkpoint promises {rows} rows but the output is shorter"),
                })
            }
        }
    }
    let file = OpenOptions::new()
        .write(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    file.set_len(keep as u64).map_err(|e| Error::io(path, e))
}
