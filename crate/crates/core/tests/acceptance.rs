//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the full set by default; `ACCEPTANCE_ONLY=1,6,9` restricts it.
//! Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::{Rng, SeedableRng};

use binthue::cf::{expand_root, validate_convergent, Side};
use binthue::numerics::{PrecisionPolicy, RealBall};
use binthue::oracle::{brute_solve, OracleQuery};
use binthue::runner::{sweep, Checkpoint, SweepConfig};
use binthue::thue::{
    c2_of, default_bound, direct_test_limit, is_irreducible, m_max_for_direct_test, ThueSolver,
    PUBLISHED_DIRECT_TEST_LIMITS,
};

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn fixture(n: u32) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("n{n}.csv"))
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_binthue"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli_sweep(
    dir: &Path,
    name: &str,
    n: u32,
    m_hi: u64,
    extra: &[&str],
) -> Result<(PathBuf, i32), String> {
    let out = dir.join(name);
    let status = cli()
        .args([
            "sweep",
            "--n",
            &n.to_string(),
            "--m-lo",
            "2",
            "--m-hi",
            &m_hi.to_string(),
        ])
        .args(["--C", "10^500", "--out"])
        .arg(&out)
        .args(extra)
        .stderr(Stdio::null())
        .status()
        .map_err(|e| format!("could not start the CLI: {e}"))?;
    Ok((out, status.code().unwrap_or(-1)))
}

/// Library sweep of `[2, m_hi]` compared against the fixture restricted to that range.
fn table(n: u32, m_hi: u64) -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = SweepConfig::new(n, 2, m_hi, dir.path().join("out.csv"));
    cfg.fixture_path = Some(fixture(n));
    let report = sweep(&cfg).map_err(|e| e.to_string())?;
    let diff = report.fixture_diff.expect("fixture given");
    let summary = format!(
        "n={n} m<={m_hi}: {} rows, {} missing, {} extra, {:.0?}",
        report.solutions_found,
        diff.missing.len(),
        diff.extra.len(),
        report.wall_time
    );
    ensure(diff.is_empty(), || summary.clone())?;
    Ok(summary)
}

fn criterion_1() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let fixture = fixture(3);
    let (out, code) = cli_sweep(
        dir.path(),
        "n3.csv",
        3,
        10_000,
        &["--fixture", fixture.to_str().unwrap()],
    )?;
    let took = start.elapsed();
    let rows = fs::read_to_string(&out)
        .map_err(|e| e.to_string())?
        .lines()
        .count()
        - 1;
    ensure(code == 0, || {
        format!("CLI exit code {code} (1 = fixture mismatch)")
    })?;
    ensure(took <= Duration::from_secs(30 * 60), || {
        format!("took {took:?}")
    })?;
    Ok(format!(
        "n=3 m<=10^4 matches the fixture, {rows} rows, {took:.1?}"
    ))
}

fn criterion_2() -> Verdict {
    table(4, 100_000)
}

fn criterion_3() -> Verdict {
    table(5, 1_000_000)
}

fn criterion_4() -> Verdict {
    let mut parts = Vec::new();
    for (n, m_hi) in [
        (13, 1_600_000),
        (17, 140_000),
        (19, 1_000_000),
        (23, 1_000_000),
        (29, 1_000_000),
    ] {
        parts.push(table(n, m_hi)?);
    }
    Ok(parts.join("; "))
}

fn criterion_5() -> Verdict {
    let mut notes = Vec::new();
    for &(n, published) in PUBLISHED_DIRECT_TEST_LIMITS.iter() {
        let computed = m_max_for_direct_test(n).map_err(|e| e.to_string())?;
        if n == 29 {
            ensure(computed > published, || {
                format!("n=29: computed {computed} does not exceed {published}")
            })?;
            let used = direct_test_limit(n).map_err(|e| e.to_string())?;
            ensure(used == computed.max(published), || {
                format!("n=29 direct-test range {used}")
            })?;
            notes.push(format!(
                "n=29 computed {computed} > published {published}, using {used}"
            ));
        } else {
            ensure(computed.abs_diff(published) <= 1, || {
                format!("n={n}: computed {computed}, published {published}")
            })?;
        }
    }
    Ok(format!("all within ±1; {}", notes.join(", ")))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let solver = ThueSolver::new(3, default_bound(), PrecisionPolicy::default())
        .map_err(|e| e.to_string())?;
    let y_max = 5000u64;
    let mut checked = 0;
    let mut hits = 0;
    for m in 2..=2000u64 {
        if !is_irreducible(3, m) {
            continue;
        }
        let fast: BTreeSet<_> = solver
            .solve(m)
            .map_err(|e| format!("m={m}: {e}"))?
            .into_iter()
            .filter(|t| t.y <= BigInt::from(y_max))
            .collect();
        let slow: BTreeSet<_> = brute_solve(&OracleQuery::new(3, m, y_max).unwrap())
            .into_iter()
            .collect();
        ensure(fast == slow, || {
            format!("m={m}: solver {fast:?} vs oracle {slow:?}")
        })?;
        checked += 1;
        hits += slow.len();
    }
    let took = start.elapsed();
    ensure(took <= Duration::from_secs(10 * 60), || {
        format!("took {took:?}")
    })?;
    Ok(format!(
        "{checked} values of m agree, {hits} solutions with y<=5000, {took:.1?}"
    ))
}

fn criterion_7() -> Verdict {
    let digits = 60;
    let tol = RealBall::from_ratio(&BigInt::one(), &BigInt::from(10u32).pow(25), digits);
    let neg_tol = -tol.clone();
    let mut worst = f64::NEG_INFINITY;
    for n in [3u32, 5, 7, 11, 13, 17, 19, 23, 29] {
        let c2 = c2_of(n).map_err(|e| e.to_string())?;
        let closed = RealBall::from_ratio(&BigInt::from(n), &(BigInt::one() << (n - 1)), digits);
        let diff = &c2 - &closed;
        ensure(
            diff.compare(&tol) == Some(std::cmp::Ordering::Less)
                && diff.compare(&neg_tol) == Some(std::cmp::Ordering::Greater),
            || format!("n={n}: c2 - n/2^(n-1) = {diff} not certified below 1e-25"),
        )?;
        worst = worst.max(diff.radius_log2() + 1.0);
    }
    Ok(format!(
        "certified for all nine exponents, worst enclosure width 2^{worst:.0}"
    ))
}

fn criterion_8() -> Verdict {
    let policy = PrecisionPolicy::default();
    let exp =
        expand_root(2, 3, &BigUint::from(10u64).pow(40), &policy).map_err(|e| e.to_string())?;
    let conv: Vec<_> = exp.convergents().take(20).collect();
    ensure(conv.len() == 20, || {
        format!("only {} quotients", conv.len())
    })?;
    for (j, c) in conv.iter().enumerate() {
        let side = validate_convergent(2, 3, &c.numerator, &c.denominator);
        let want = if j % 2 == 0 { Side::Below } else { Side::Above };
        ensure(side == want, || format!("convergent {j} on the wrong side"))?;
        if j > 0 {
            let p = &conv[j - 1];
            let det = &c.numerator * BigInt::from(p.denominator.clone())
                - &p.numerator * BigInt::from(c.denominator.clone());
            let sign = if j % 2 == 1 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            ensure(det == sign, || format!("determinant at {j} is {det}"))?;
        }
    }

    let doubled = PrecisionPolicy::new(
        2 * policy.initial_digits,
        policy.growth_factor,
        policy.max_digits,
    )
    .map_err(|e| e.to_string())?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let exponents = [3u32, 4, 5, 7, 11, 13, 17, 19, 23, 29];
    let mut pairs = 0;
    while pairs < 50 {
        let n = exponents[rng.gen_range(0..exponents.len())];
        let m = rng.gen_range(2..10_000_000u64);
        if !is_irreducible(n, m) {
            continue;
        }
        let a = expand_root(m, n, &default_bound(), &policy).map_err(|e| e.to_string())?;
        let b = expand_root(m, n, &default_bound(), &doubled).map_err(|e| e.to_string())?;
        ensure(a.partial_quotients() == b.partial_quotients(), || {
            format!("(m={m}, n={n}) differs at doubled precision")
        })?;
        pairs += 1;
    }
    Ok("20 quotients of 2^(1/3) bracketed with determinant ±1; 50 random pairs stable at 2400 digits".into())
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (one, c1) = cli_sweep(dir.path(), "w1.csv", 3, 10_000, &["--workers", "1"])?;
    let (eight, c8) = cli_sweep(dir.path(), "w8.csv", 3, 10_000, &["--workers", "8"])?;
    ensure(c1 == 0 && c8 == 0, || format!("exit codes {c1}, {c8}"))?;
    let reference = fs::read(&one).map_err(|e| e.to_string())?;
    ensure(
        reference == fs::read(&eight).map_err(|e| e.to_string())?,
        || "workers=1 and workers=8 outputs differ".into(),
    )?;

    let out = dir.path().join("killed.csv");
    let ck = dir.path().join("killed.ck");
    let args = |cmd: &mut Command| {
        cmd.args([
            "sweep", "--n", "3", "--m-lo", "2", "--m-hi", "10000", "--C", "10^500",
        ])
        .args(["--workers", "2", "--checkpoint-every", "50", "--out"])
        .arg(&out)
        .arg("--checkpoint")
        .arg(&ck)
        .stderr(Stdio::null());
    };
    let mut child = {
        let mut cmd = cli();
        args(&mut cmd);
        cmd.spawn().map_err(|e| e.to_string())?
    };
    let waited = Instant::now();
    let killed_at = loop {
        if let Ok(Some(c)) = Checkpoint::load(&ck) {
            if c.last_complete_m >= 2_000 {
                child.kill().map_err(|e| e.to_string())?;
                child.wait().map_err(|e| e.to_string())?;
                break Checkpoint::load(&ck)
                    .ok()
                    .flatten()
                    .map_or(0, |c| c.last_complete_m);
            }
        }
        if let Ok(Some(status)) = child.try_wait() {
            return Err(format!(
                "sweep finished ({status}) before it could be killed"
            ));
        }
        if waited.elapsed() > Duration::from_secs(600) {
            let _ = child.kill();
            return Err("no checkpoint progress within 10 minutes".into());
        }
        thread::sleep(Duration::from_millis(5));
    };
    ensure(killed_at < 10_000, || {
        "sweep completed before the kill landed".into()
    })?;
    let mut cmd = cli();
    args(&mut cmd);
    let status = cmd.status().map_err(|e| e.to_string())?;
    ensure(status.success(), || {
        format!("resumed run exited with {status}")
    })?;
    ensure(
        reference == fs::read(&out).map_err(|e| e.to_string())?,
        || "resumed output differs from the uninterrupted run".into(),
    )?;
    Ok(format!(
        "workers 1/8 byte-identical; killed after m={killed_at}, resumed output byte-identical ({} bytes)",
        reference.len()
    ))
}

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [Criterion; 9] = [
        (1, "table reproduction n=3", criterion_1),
        (2, "table reproduction n=4", criterion_2),
        (3, "table reproduction n=5", criterion_3),
        (4, "table reproduction n=13,17,19,23,29", criterion_4),
        (5, "direct-test threshold table", criterion_5),
        (6, "oracle equivalence n=3", criterion_6),
        (7, "c2 closed form", criterion_7),
        (8, "continued fraction validation", criterion_8),
        (9, "determinism and resume", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id}: PASS  {title} — {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id}: FAIL  {title} — {detail} [{secs:.1}s]");
            }
        }
    }
    if only.as_ref().is_none_or(|o| o.contains(&10)) {
        println!("criterion 10: NOTE  full 2<=m<10^7 sweeps are out of scope; criteria 1-4 are the scaled reproductions");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
