mod common;

use common::{crl, is_stack_tree, mutate, random_crl_lasso, same_tree};
use proptest::prelude::*;
use vldl::alphabet::{matching_horizon, matching_return, matching_return_finite, Kind, LassoWord, PushdownAlphabet};
use vldl::corpus::{random_lasso, rng, test_alphabet};
use vldl::stacktree::{cardinal_branch, decode, encode_lasso, stack_tree_recognizer};
use vldl::treeauto::contains;

fn lasso_from(alpha: &PushdownAlphabet, u: &[usize], v: &[usize]) -> LassoWord {
    let syms: Vec<_> = alpha.symbols().collect();
    let pick = |i: &usize| syms[i % syms.len()];
    LassoWord::new(u.iter().map(pick).collect(), v.iter().map(pick).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decode_inverts_encode(u in prop::collection::vec(0usize..3, 0..7), v in prop::collection::vec(0usize..3, 1..7)) {
        let a = crl();
        let w = lasso_from(&a, &u, &v);
        let t = encode_lasso(&a, &w).unwrap();
        let back = decode(&a, &t).unwrap();
        prop_assert_eq!(a.fmt_lasso(&back), a.fmt_lasso(&w));
        prop_assert!(same_tree(&encode_lasso(&a, &back).unwrap(), &t));
    }

    #[test]
    fn encodings_are_stack_trees(u in prop::collection::vec(0usize..7, 0..6), v in prop::collection::vec(0usize..7, 1..6)) {
        let a = test_alphabet();
        let w = lasso_from(&a, &u, &v);
        let t = encode_lasso(&a, &w).unwrap();
        prop_assert!(contains(&stack_tree_recognizer(&a), &t).unwrap());
    }

    #[test]
    fn matching_horizon_bounds_matches(seed in any::<u64>()) {
        let a = crl();
        let w = random_lasso(&mut rng(seed), &a, 6, 6);
        let h = matching_horizon(&a, &w);
        let window = w.take(w.prefix().len() + 2 * w.period().len() + h + 1);
        for k in 0..w.prefix().len() + 2 * w.period().len() {
            if a.kind(w.letter(k)) != Kind::Call {
                continue;
            }
            let m = matching_return(&a, &w, k).unwrap();
            prop_assert_eq!(m, matching_return_finite(&a, &window, k), "call at {}", k);
            if let Some(p) = m {
                prop_assert!(p - k <= h);
            }
        }
    }
}

#[test]
fn reference_tree_and_cardinal_positions() {
    let a = crl();
    let t = encode_lasso(&a, &a.lasso("l c l r c l", "l").unwrap()).unwrap();
    let marks: Vec<usize> = cardinal_branch(&a, &t, 5).unwrap().into_iter().map(|(_, k)| k).collect();
    assert_eq!(&marks[..4], &[0, 1, 3, 4]);
}

#[test]
fn recognizer_rejects_every_condition() {
    let a = crl();
    let ts = stack_tree_recognizer(&a);
    let mut r = rng(11);
    let mut per_condition = [0usize; 4];
    let mut made = 0;
    while made < 120 {
        let w = random_crl_lasso(&mut r, &a);
        let t = encode_lasso(&a, &w).unwrap();
        assert!(is_stack_tree(&a, &t));
        assert!(contains(&ts, &t).unwrap(), "{}", a.fmt_lasso(&w));
        let cond = (made % 4) as u8 + 1;
        let Some(m) = mutate(&a, &t, cond, &mut r) else { continue };
        assert!(!is_stack_tree(&a, &m), "condition {cond} on {}", a.fmt_lasso(&w));
        assert!(!contains(&ts, &m).unwrap(), "condition {cond} on {}", a.fmt_lasso(&w));
        per_condition[cond as usize - 1] += 1;
        made += 1;
    }
    assert!(per_condition.iter().all(|&n| n == 30));
}
