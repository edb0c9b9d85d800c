use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use binthue::numerics::PrecisionPolicy;
use binthue::oracle::{brute_solve, OracleQuery};
use binthue::runner::{
    compare_fixture, format_row, parse_bound, sweep, FixtureDiff, SweepConfig,
    DEFAULT_CHECKPOINT_STRIDE, HEADER,
};
use binthue::thue::{default_bound, EquationInstance, ThueSolver};
use binthue::Error;

/// Small solutions of x^n - m y^n = ±1.
///
/// The starting precision, escalation factor and precision cap default to
/// 1200 digits, 2.0 and 20000 digits; BINTHUE_DIGITS, BINTHUE_GROWTH and
/// BINTHUE_MAX_DIGITS override them.
#[derive(Parser)]
#[command(name = "binthue", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equation and print its solutions as CSV.
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        /// Height bound: an integer or 10^k.
        #[arg(long = "C", value_parser = bound_arg)]
        bound: Option<BigUint>,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Solve every m in a range and write the solutions to a CSV file.
    Sweep {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m_lo: u64,
        #[arg(long)]
        m_hi: u64,
        #[arg(long = "C", value_parser = bound_arg)]
        bound: Option<BigUint>,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
        /// Resume from (and keep updating) this progress file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Compare the output against these rows, restricted to n and the m range.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Completed m values between checkpoint writes.
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT_STRIDE)]
        checkpoint_every: u64,
    },
    /// Brute-force search over 1 <= y <= y-max.
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        y_max: u64,
    },
    /// Rows that appear in only one of two solution files.
    Compare {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        fixture: PathBuf,
    },
}

fn bound_arg(s: &str) -> Result<BigUint, String> {
    parse_bound(s)
}

fn policy(digits: Option<u32>) -> Result<PrecisionPolicy, Error> {
    let mut p = PrecisionPolicy::from_env()?;
    if let Some(d) = digits {
        p.initial_digits = d;
        p.max_digits = p.max_digits.max(d);
    }
    p.validate()?;
    Ok(p)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::ReducibleInput { .. } | Error::Parse { .. } => 2,
        Error::PrecisionExhausted { .. } => 3,
        Error::Io { .. } => 4,
    }
}

fn print_diff(diff: &FixtureDiff) {
    for t in &diff.missing {
        eprint!("missing {}", format_row(t));
    }
    for t in &diff.extra {
        eprint!("extra {}", format_row(t));
    }
    eprintln!("{} missing, {} extra", diff.missing.len(), diff.extra.len());
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Solve {
            n,
            m,
            bound,
            digits,
        } => {
            let eq = EquationInstance::new(n, m, bound.unwrap_or_else(default_bound))?;
            let solver = ThueSolver::new(eq.n(), eq.bound().clone(), policy(digits)?)?;
            let solutions = solver.solve(eq.m())?;
            println!("{HEADER}");
            for t in &solutions {
                print!("{}", format_row(t));
            }
            Ok(0)
        }
        Command::Sweep {
            n,
            m_lo,
            m_hi,
            bound,
            digits,
            workers,
            out,
            checkpoint,
            fixture,
            checkpoint_every,
        } => {
            let mut cfg = SweepConfig::new(n, m_lo, m_hi, out);
            cfg.bound = bound.unwrap_or_else(default_bound);
            cfg.policy = policy(digits)?;
            cfg.workers = workers;
            cfg.checkpoint_path = checkpoint;
            cfg.fixture_path = fixture;
            cfg.checkpoint_stride = checkpoint_every;
            let report = sweep(&cfg)?;
            eprintln!(
                "n={n} m=[{m_lo},{m_hi}]: {} solved, {} reducible, {} rows, {:.2?}",
                report.solved_count,
                report.skipped_reducible_count,
                report.solutions_found,
                report.wall_time
            );
            if let Some(d) = report.max_digits_used {
                eprintln!(
                    "max precision {d} digits, {} escalations",
                    report.escalations.len()
                );
            }
            for (m, d) in &report.escalations {
                eprintln!("  m={m} needed {d} digits");
            }
            match &report.fixture_diff {
                Some(diff) => {
                    print_diff(diff);
                    Ok(if diff.is_empty() { 0 } else { 1 })
                }
                None => Ok(0),
            }
        }
        Command::Oracle { n, m, y_max } => {
            let q = OracleQuery::new(n, m, y_max)?;
            println!("{HEADER}");
            for t in brute_solve(&q) {
                print!("{}", format_row(&t));
            }
            Ok(0)
        }
        Command::Compare { out, fixture } => {
            let diff = compare_fixture(&out, &fixture)?;
            print_diff(&diff);
            Ok(if diff.is_empty() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
