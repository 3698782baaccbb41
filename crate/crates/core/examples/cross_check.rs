//! Three-way cross-check on the seeded corpus: brute-force semantics,
//! word-level 1-AJA acceptance and stack-tree membership.
//!
//! cargo run --release --example cross_check -- [seed] [count] [--no-trees] [--tree-cap N]

use std::sync::Arc;
use std::time::Instant;

use vldl::corpus::test_alphabet;
use vldl::crosscheck::{cross_check, seeded_corpus, Trees};

fn main() -> vldl::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.first().and_then(|s| s.parse().ok()).unwrap_or(1);
    let count = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let cap = args.iter().position(|a| a == "--tree-cap").and_then(|i| args.get(i + 1)).and_then(|s| s.parse().ok());
    let trees = if args.iter().any(|a| a == "--no-trees") { Trees::Off } else { Trees::Capped(cap.unwrap_or(5_000)) };
    let alpha = Arc::new(test_alphabet());
    let (formulas, lassos) = seeded_corpus(&alpha, seed, count);
    let t0 = Instant::now();
    let report = cross_check(&alpha, &formulas, &lassos, trees)?;
    println!(
        "{} formulas x {} lassos, {} pairs ({} word-only) in {:.2?}",
        report.formulas,
        lassos.len(),
        report.pairs,
        report.word_only,
        t0.elapsed()
    );
    for d in &report.disagreements {
        println!("disagreement: {} on {} -> {:?}", d.formula, d.lasso, d.outcome);
    }
    println!("{}", if report.ok() { "all paths agree" } else { "DISAGREEMENTS FOUND" });
    Ok(())
}
