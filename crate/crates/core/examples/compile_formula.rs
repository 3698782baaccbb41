//! Compiling a formula into a one-way alternating jump automaton and
//! checking the automaton against the brute-force semantics on lassos.
//!
//! cargo run --example compile_formula

use std::sync::Arc;

use vldl::aja::lasso_accepts;
use vldl::alphabet::PushdownAlphabet;
use vldl::formula::{formula_size, to_nnf, TvpaLibrary};
use vldl::oracle::eval_lasso;
use vldl::vldl2aja::compile;

fn main() -> vldl::Result<()> {
    let alpha = PushdownAlphabet::new(&["c"], &["r"], &["l", "m"])?.with_props("l", &["p"])?.with_props("m", &["q"])?;
    let mut lib = TvpaLibrary::new(alpha.clone());
    // Every finite word, with unmatched returns allowed.
    lib.define("Any", "states: s; initial: s; final: s; stack: A; s -c push A-> s; s -r pop A-> s; s -r pop bot-> s; s -l-> s; s -m-> s;")?;
    // One call and its matching return, skipping the infix in between.
    lib.define("Skip", "states: a b z; initial: a; final: z; stack: A; a -c push A-> b; b -l-> b; b -r pop A-> z;")?;
    let alpha = Arc::new(alpha);

    for text in ["<Any> q", "[Any] (p | q)", "<Skip> q", "!<Any> (q & [Skip] p)"] {
        let f = lib.parse(text)?;
        let a = compile(&alpha, &f)?;
        println!("{text}\n  nnf: {}\n  size {}, 1-AJA states {}", to_nnf(&f), formula_size(&f), a.len());
        for (u, v) in [("", "l"), ("m", "l"), ("c l r", "m"), ("c m r", "l")] {
            let w = alpha.lasso(u, v)?;
            let word = lasso_accepts(&a, &w)?;
            let oracle = eval_lasso(&alpha, &f, &w)?;
            println!("  {:<14} automaton {word:<5} semantics {oracle}", alpha.fmt_lasso(&w));
        }
    }
    Ok(())
}
