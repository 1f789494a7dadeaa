//! Runs the full acceptance suite and prints one pass/fail line per
//! criterion.

use scet_core::acceptance::run_all;

#[test]
fn acceptance_suite() {
    let results = run_all();
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.render());
        if !r.passed {
            failed.push(r.index);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
