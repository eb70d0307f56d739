//! Runs the nine reproduction criteria at their pinned tolerances and time budgets.

use tate::suite::{run_criterion, CRITERIA};

fn seed() -> u64 {
    std::env::var("TATE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

#[test]
fn acceptance() {
    let seed = seed();
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let report = run_criterion(id, seed).expect("known criterion");
        println!("{}", report.line());
        for f in report.failures.iter().skip(1).take(10) {
            println!("    {f}");
        }
        if !report.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
