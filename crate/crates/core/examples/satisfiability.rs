//! Satisfiability: formula, 1-AJA, stack-tree automaton, emptiness game,
//! and a lasso model read off the winning strategy.
//!
//! cargo run --release --example satisfiability -- [formula]

use std::sync::Arc;

use vldl::alphabet::PushdownAlphabet;
use vldl::formula::TvpaLibrary;
use vldl::pipeline::{satisfiable, Answer};

fn main() -> vldl::Result<()> {
    let alpha = PushdownAlphabet::new(&["c"], &["r"], &["l", "m"])?.with_props("l", &["p"])?.with_props("m", &["q"])?;
    let mut lib = TvpaLibrary::new(alpha.clone());
    lib.define("Any", "states: s; initial: s; final: s; stack: A; s -c push A-> s; s -r pop A-> s; s -r pop bot-> s; s -l-> s; s -m-> s;")?;
    lib.define("Never", "states: s t; initial: s; final: t; s -l-> s;")?;
    lib.define("Call", "states: a b; initial: a; final: b; stack: A; a -c push A-> b;")?;
    let alpha = Arc::new(alpha);

    let given: Vec<String> = std::env::args().skip(1).collect();
    let formulas: Vec<String> = if given.is_empty() {
        ["p", "p & !p", "<Never> true", "<Call> q", "<Any> q & [Any] (q | p)"].map(String::from).to_vec()
    } else {
        given
    };
    for text in &formulas {
        let f = lib.parse(text)?;
        let v = satisfiable(&alpha, &f)?;
        match &v.answer {
            Answer::Satisfiable(w) => println!("{text}: satisfiable, model {}", alpha.fmt_lasso(w)),
            other => println!("{text}: {}", other.label()),
        }
        for s in &v.stages {
            println!("    {:<10} {:>7} states {:>9.2} ms", s.name, s.size, s.millis);
        }
    }
    Ok(())
}
