//! Model checking a visibly pushdown system: the system becomes a tree
//! automaton over its stack trees, the negated specification a breakpoint
//! automaton, and a lasso in their intersection is a counterexample.
//!
//! cargo run --release --example model_checking

use std::sync::Arc;

use vldl::alphabet::PushdownAlphabet;
use vldl::formula::TvpaLibrary;
use vldl::pipeline::{is_trace, model_check, model_check_bound, Answer};
use vldl::vps::{parse_system, System};

fn main() -> vldl::Result<()> {
    let alpha = PushdownAlphabet::new(&["c"], &["r"], &["l"])?.with_props("l", &["p"])?.with_props("c", &["q"])?;
    let mut lib = TvpaLibrary::new(alpha.clone());
    lib.define("Any", "states: s; initial: s; final: s; stack: A; s -c push A-> s; s -r pop A-> s; s -r pop bot-> s; s -l-> s;")?;
    lib.define("Skip", "states: a z; initial: a; final: z; stack: A; a -c push A-> a; a -r pop A-> z;")?;
    let alpha = Arc::new(alpha);

    // Generates (c r)^w only.
    let System::Vps(s) = parse_system("states: s t; initial: s; stack: A; s -c push A-> t; t -r pop A-> s;", &alpha, &lib)? else {
        unreachable!()
    };
    for text in ["[Any] !p", "q", "p", "<Skip> !p"] {
        let f = lib.parse(text)?;
        let v = model_check(&alpha, &s, &f)?;
        match &v.answer {
            Answer::Violated(w) => println!("{text}: violated by {} (trace: {})", alpha.fmt_lasso(w), is_trace(&alpha, &s, w)),
            other => println!("{text}: {}", other.label()),
        }
        let explored = v.stage("emptiness").map_or(0, |st| st.size);
        println!("    explored {explored} states, bound {:.3e}", model_check_bound(&alpha, &s, &f)?);
    }
    Ok(())
}
