//! One line per acceptance criterion; exits nonzero if any fails.

use dpt_cli::accept::{run_criterion, CRITERIA};

const SEED: u64 = 7;

fn main() {
    println!("acceptance suite, seed {SEED}");
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let o = run_criterion(id, SEED);
        println!("{}", o.line());
        for n in &o.notes {
            println!("       note: {n}");
        }
        if !o.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {CRITERIA}/{CRITERIA} passed");
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
