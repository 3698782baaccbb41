//! Büchi tree automata over stack trees: the breakpoint translation of a
//! small 1-AJA, membership of encoded lassos, emptiness with a regular
//! witness tree, and a DOT dump of the stack-tree recognizer.
//!
//! cargo run --release --example tree_automata

use std::sync::Arc;

use vldl::aja::{lasso_accepts, Command, OneAja, PosBool};
use vldl::aja2tree::aja_to_stacktree_automaton;
use vldl::alphabet::PushdownAlphabet;
use vldl::stacktree::{decode, encode_lasso, stack_tree_recognizer};
use vldl::treeauto::{contains, emptiness, intersect, materialize, BuchiTreeAutomaton};

fn main() -> vldl::Result<()> {
    let alpha = Arc::new(PushdownAlphabet::crl());
    let (c, r, l) = (alpha.lookup("c")?, alpha.lookup("r")?, alpha.lookup("l")?);

    // Infinitely many calls, with a jump over each matched infix.
    let mut a = OneAja::new(alpha.clone());
    let wait = a.add_state("wait", false);
    let seen = a.add_state("seen", true);
    a.set_initial(wait);
    for q in [wait, seen] {
        a.set(q, l, PosBool::leaf(Command::next(wait)));
        a.set(q, r, PosBool::leaf(Command::next(wait)));
        a.set(q, c, PosBool::or(vec![PosBool::leaf(Command::next(seen)), PosBool::leaf(Command::jump(seen, seen))]));
    }
    println!("{}", a.dump());

    let t = aja_to_stacktree_automaton(&a)?;
    for (u, v) in [("", "c r"), ("", "l"), ("l", "c l r"), ("c", "c")] {
        let w = alpha.lasso(u, v)?;
        println!("{:<12} word {:<5} tree {}", alpha.fmt_lasso(&w), lasso_accepts(&a, &w)?, contains(&t, &encode_lasso(&alpha, &w)?)?);
    }

    let e = emptiness(&t, 1_000_000)?;
    println!("explored {} states, {} game vertices", e.states, e.vertices);
    if let Some(tree) = e.witness {
        println!("witness lasso {}", alpha.fmt_lasso(&decode(&alpha, &tree)?));
    }

    let ts = stack_tree_recognizer(&alpha);
    let all = BuchiTreeAutomaton::universal(BuchiTreeAutomaton::labels_of(&alpha));
    let both = intersect(&ts, &all)?;
    let eager = materialize(&t, 100_000)?;
    println!("recognizer {} states, intersected {} states, materialized breakpoint product {} states", ts.len(), both.len(), eager.len());
    print!("{}", ts.to_dot(&alpha));
    Ok(())
}
