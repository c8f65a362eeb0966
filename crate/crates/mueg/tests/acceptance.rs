//! Full acceptance gate: one line per criterion, nonzero exit if any criterion fails.
//! Runs without the libtest harness so the lines are never captured.

use mueg::acceptance::{run_all, AcceptanceOptions};

fn main() {
    let outcomes = run_all(&AcceptanceOptions::default());
    for o in &outcomes {
        println!("{}", o.line());
        if !o.passed {
            for c in o.checks.iter().filter(|c| !c.passed) {
                println!("{}", c.to_text());
            }
            if let Some(e) = &o.error {
                println!("error: {e}");
            }
        }
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", outcomes.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
