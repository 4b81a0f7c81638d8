//! Acceptance gate: runs every criterion suite at full scale and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use spantopos_cli::report::{Check, Report, Status};
use spantopos_cli::suites::{run_criterion, SuiteConfig, CRITERIA};

const SEED: u64 = 0;
/// Per-suite wall-clock budget.
const TIME_BUDGET: Duration = Duration::from_secs(60);

/// Minimum instance counts: (criterion, op, substring of check name, minimum total).
const MINIMA: &[(u8, &str, &str, usize)] = &[
    (1, "exists_along/forall_along", "FinSet", 1),
    (1, "exists_along/forall_along", "Sierpinski", 1),
    (2, "modular_law_holds", "all triples", 16 * 16 * 16),
    (2, "right_division", "size 3 random", 10_000),
    (3, "power_laws_check", "FinSet", 1),
    (3, "power_laws_check", "Sierpinski", 1),
    (4, "is_map/maps_category", "FinSet sizes <= 3", 16),
    (5, "exp_in_pi", "uncurry(curry u)", 100),
    (5, "exp_in_pi", "curry(uncurry w)", 100),
    (5, "colimit_check", "", 1),
    (6, "dummy_invariance_check", "", 2 * 50),
    (7, "lemma_forall_check", "", 2 * 100),
    (7, "k_class/generated_congruence", "invertible", 1),
    (8, "reflection_check", "F(g)∘F(f)^{-1}", 50),
    (8, "reflection_check", "Bool(F) ∘ η", 1),
    (9, "run", "identical", 5),
];

fn matching<'a>(report: &'a Report, op: &str, name: &str) -> Vec<&'a Check> {
    report
        .checks()
        .filter(|c| c.op == op && c.name.contains(name))
        .collect()
}

/// Problems with a criterion's report: failing or inconclusive checks, or too few instances.
fn problems(n: u8, report: &Report, elapsed: Duration) -> Vec<String> {
    let mut out: Vec<String> = report
        .checks()
        .filter(|c| c.status() != Status::Pass)
        .map(|c| {
            let detail = c.counterexample.as_deref().unwrap_or("inconclusive");
            format!("{} \"{}\" {}/{}: {detail}", c.op, c.name, c.passed, c.total)
        })
        .collect();
    for &(_, op, name, min) in MINIMA.iter().filter(|m| m.0 == n) {
        let total: usize = matching(report, op, name).iter().map(|c| c.total).sum();
        if total < min {
            out.push(format!("{op} \"{name}\": {total} instances, need {min}"));
        }
    }
    if report.checks().next().is_none() {
        out.push("no checks ran".into());
    }
    if elapsed > TIME_BUDGET {
        out.push(format!("took {elapsed:?}, budget {TIME_BUDGET:?}"));
    }
    out
}

fn main() -> ExitCode {
    let cfg = SuiteConfig {
        seed: SEED,
        full_scale: true,
    };
    let mut failed = 0;
    for (n, name) in CRITERIA {
        let start = Instant::now();
        let report = run_criterion(n, &cfg);
        let elapsed = start.elapsed();
        let checks: usize = report.checks().map(|c| c.total).sum();
        let issues = problems(n, &report, elapsed);
        let verdict = if issues.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n} {name:<20} {verdict}  {checks} instances, failures 0 tolerated, {:.1}s",
            elapsed.as_secs_f64()
        );
        for issue in &issues {
            println!("    {issue}");
        }
        failed += usize::from(!issues.is_empty());
    }
    println!(
        "acceptance: {} of {} criteria pass",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
