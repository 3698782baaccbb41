//! Word-level acceptance of random 1-AJAs against membership of the encoded
//! lasso in the breakpoint tree automaton.
//!
//! cargo run --release --example aja_equivalence -- [seed] [automata] [lassos]

use std::sync::Arc;
use std::time::Instant;

use vldl::aja::lasso_accepts;
use vldl::aja2tree::aja_to_stacktree_automaton;
use vldl::alphabet::PushdownAlphabet;
use vldl::corpus::{random_aja, random_restricted_lasso, rng};
use vldl::stacktree::encode_lasso;
use vldl::treeauto::contains;

fn main() -> vldl::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (seed, automata, lassos) = (args.first().copied().unwrap_or(1), args.get(1).copied().unwrap_or(100), args.get(2).copied().unwrap_or(20));
    let alpha = Arc::new(PushdownAlphabet::crl());
    let mut r = rng(seed);
    let t0 = Instant::now();
    let (mut pairs, mut accepted, mut bad) = (0, 0, 0);
    for i in 0..automata {
        let a = random_aja(&mut r, &alpha, 4);
        let t = aja_to_stacktree_automaton(&a)?;
        for _ in 0..lassos {
            let w = random_restricted_lasso(&mut r, &alpha, 6, 6);
            let word = lasso_accepts(&a, &w)?;
            let tree = contains(&t, &encode_lasso(&alpha, &w)?)?;
            pairs += 1;
            accepted += word as usize;
            if word != tree {
                bad += 1;
                println!("automaton {i}: {} word={word} tree={tree}\n{}", alpha.fmt_lasso(&w), a.dump());
            }
        }
    }
    println!("{pairs} pairs, {accepted} accepted, {bad} disagreements, {:.2?}", t0.elapsed());
    Ok(())
}
