//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;

use fredholm_kp::checks;

const SEED: u64 = 2026;

fn main() -> ExitCode {
    let outcomes = checks::all(SEED);
    let mut failed = 0;
    for c in &outcomes {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] {:>2} {:<24} {}", c.id, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
