//! Three-way agreement between the brute-force semantics, word-level 1-AJA
//! acceptance and stack-tree membership.

use std::sync::Arc;

use serde::Serialize;

use crate::aja::{lasso_accepts, OneAja};
use crate::aja2tree::{aja_to_tree, StackTreeAutomaton};
use crate::alphabet::{LassoWord, PushdownAlphabet};
use crate::corpus::{random_restricted_lasso, rng, FormulaGen};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::oracle::eval_lasso;
use crate::stacktree::{encode_lasso, stack_tree_recognizer};
use crate::treeauto::{contains_bounded, Product};
use crate::vldl2aja::compile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub oracle: bool,
    pub word: bool,
    pub tree: Option<bool>,
}

impl Outcome {
    pub fn agrees(&self) -> bool {
        self.oracle == self.word && self.tree.is_none_or(|t| t == self.oracle)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub formula: String,
    pub lasso: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub formulas: usize,
    pub pairs: usize,
    /// Pairs where the tree path was skipped.
    pub word_only: usize,
    pub disagreements: Vec<Disagreement>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// How the tree path runs. `Capped(n)` bounds each membership game and the
/// summary table of each formula by `n`; pairs over the cap count as
/// word-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trees {
    Off,
    Capped(usize),
}

/// Evaluates one pair.
pub fn check_pair(alpha: &Arc<PushdownAlphabet>, f: &Formula, w: &LassoWord, trees: Trees) -> Result<Outcome> {
    let aja = compile(alpha, f)?;
    let tree = match trees {
        Trees::Off => None,
        Trees::Capped(cap) => Some(tree_automaton(alpha, &aja, cap)?),
    };
    check_compiled(alpha, f, &aja, tree.as_ref(), w, trees)
}

fn tree_automaton(alpha: &PushdownAlphabet, aja: &OneAja, cap: usize) -> Result<StackTreeAutomaton> {
    Product::new(stack_tree_recognizer(alpha), aja_to_tree(aja).with_summary_cap(cap))
}

fn check_compiled(
    alpha: &Arc<PushdownAlphabet>,
    f: &Formula,
    aja: &OneAja,
    tree: Option<&StackTreeAutomaton>,
    w: &LassoWord,
    trees: Trees,
) -> Result<Outcome> {
    let oracle = eval_lasso(alpha, f, w)?;
    let word = lasso_accepts(aja, w)?;
    let tree = match (tree, trees) {
        (Some(t), Trees::Capped(_)) if t.second.overflowed() => None,
        (Some(t), Trees::Capped(cap)) => match contains_bounded(t, &encode_lasso(alpha, w)?, cap) {
            Ok(_) if t.second.overflowed() => None,
            Ok(b) => Some(b),
            Err(Error::Resource { .. }) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    Ok(Outcome { oracle, word, tree })
}

/// Greedily drops symbols from the lasso while the pair still disagrees
/// and the period stays well-matched.
pub fn minimize(alpha: &Arc<PushdownAlphabet>, f: &Formula, w: &LassoWord, trees: Trees) -> LassoWord {
    let mut best = w.clone();
    loop {
        let mut improved = false;
        let (u, v) = (best.prefix().to_vec(), best.period().to_vec());
        let mut candidates = Vec::new();
        for i in 0..u.len() {
            let mut u2 = u.clone();
            u2.remove(i);
            candidates.push((u2, v.clone()));
        }
        for i in 0..v.len() {
            for j in i + 1..=v.len().min(i + 2) {
                let mut v2 = v.clone();
                v2.drain(i..j);
                if !v2.is_empty() {
                    candidates.push((u.clone(), v2));
                }
            }
        }
        for (u2, v2) in candidates {
            let Ok(c) = LassoWord::new(u2, v2) else { continue };
            if c.well_matched_split(alpha).is_none() {
                continue;
            }
            if matches!(check_pair(alpha, f, &c, trees), Ok(o) if !o.agrees()) {
                best = c;
                improved = true;
                break;
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Runs the cross-check on explicit corpora.
pub fn cross_check(alpha: &Arc<PushdownAlphabet>, formulas: &[Formula], lassos: &[LassoWord], trees: Trees) -> Result<Report> {
    let mut report = Report { formulas: formulas.len(), ..Report::default() };
    for f in formulas {
        let aja = compile(alpha, f)?;
        let tree = match trees {
            Trees::Off => None,
            Trees::Capped(cap) => Some(tree_automaton(alpha, &aja, cap)?),
        };
        for w in lassos {
            let o = check_compiled(alpha, f, &aja, tree.as_ref(), w, trees)?;
            report.pairs += 1;
            if o.tree.is_none() {
                report.word_only += 1;
            }
            if !o.agrees() {
                let small = minimize(alpha, f, w, trees);
                let outcome = check_pair(alpha, f, &small, trees)?;
                report.disagreements.push(Disagreement { formula: f.to_string(), lasso: alpha.fmt_lasso(&small), outcome });
            }
        }
    }
    Ok(report)
}

/// The seeded corpus: `count` formulas with `|φ| ≤ 10`, automata with at
/// most three states and test nesting one, and 20 restricted lassos.
pub fn seeded_corpus(alpha: &PushdownAlphabet, seed: u64, count: usize) -> (Vec<Formula>, Vec<LassoWord>) {
    let mut r = rng(seed);
    let mut gen = FormulaGen::new(alpha);
    let formulas = (0..count).map(|_| gen.formula(&mut r, 10)).collect();
    let lassos = (0..20).map(|_| random_restricted_lasso(&mut r, alpha, 4, 6)).collect();
    (formulas, lassos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_alphabet;

    #[test]
    fn contradiction_is_false_everywhere() {
        let a = Arc::new(test_alphabet());
        let p = Formula::atom("p");
        let (_, lassos) = seeded_corpus(&a, 1, 0);
        for w in &lassos {
            let o = check_pair(&a, &Formula::and(p.clone(), Formula::neg_atom("p")), w, Trees::Capped(100_000)).unwrap();
            assert_eq!(o, Outcome { oracle: false, word: false, tree: Some(false) });
        }
    }

    #[test]
    fn small_seeded_run_agrees() {
        let a = Arc::new(test_alphabet());
        let (fs, ws) = seeded_corpus(&a, 11, 8);
        let report = cross_check(&a, &fs, &ws, Trees::Off).unwrap();
        assert!(report.ok(), "{:?}", report.disagreements);
        assert_eq!(report.pairs, 160);
    }
}
