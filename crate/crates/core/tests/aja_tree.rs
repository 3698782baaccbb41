use std::sync::Arc;

use vldl::aja::lasso_accepts;
use vldl::aja2tree::{aja_to_stacktree_automaton, aja_to_tree};
use vldl::alphabet::PushdownAlphabet;
use vldl::corpus::{random_aja, random_restricted_lasso, rng};
use vldl::stacktree::encode_lasso;
use vldl::treeauto::{contains, materialize};

#[test]
fn word_and_tree_acceptance_agree() {
    let alpha = Arc::new(PushdownAlphabet::crl());
    let mut r = rng(3);
    for _ in 0..30 {
        let a = random_aja(&mut r, &alpha, 4);
        let t = aja_to_stacktree_automaton(&a).unwrap();
        for _ in 0..10 {
            let w = random_restricted_lasso(&mut r, &alpha, 6, 6);
            let t_in = contains(&t, &encode_lasso(&alpha, &w).unwrap()).unwrap();
            assert_eq!(lasso_accepts(&a, &w).unwrap(), t_in, "{}\n{}", alpha.fmt_lasso(&w), a.dump());
        }
    }
}

#[test]
fn reachable_breakpoint_states_stay_below_bound() {
    let alpha = Arc::new(PushdownAlphabet::crl());
    let mut r = rng(4);
    for _ in 0..30 {
        let a = random_aja(&mut r, &alpha, 3);
        let t = aja_to_tree(&a);
        let bound = t.state_bound();
        let m = materialize(&t, bound as usize + 1).unwrap();
        assert!((m.len() as f64) < bound, "{} states, bound {bound}", m.len());
    }
}
