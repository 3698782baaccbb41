//! Brute-force VLDL semantics on lasso words whose period can be chosen
//! well-matched. Used as ground truth by the cross-checks.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::alphabet::{is_well_matched, PushdownAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::formula::{closure, Formula};
use crate::limits::Limits;
use crate::vps::{Configuration, Tvpa};

pub const DEFAULT_MAX_TEST_DEPTH: usize = 4;

/// Evaluation over one lasso `u · v^ω` with a well-matched `v`. Positions
/// are identified by class: indices below `|u|` individually, the rest
/// modulo `|v|`. Class `c` is represented by position `c`.
pub struct EvalContext<'a> {
    alpha: &'a PushdownAlphabet,
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
    max_configs: usize,
    max_test_depth: usize,
    memo: HashMap<Formula, Vec<bool>>,
}

impl<'a> EvalContext<'a> {
    pub fn new(alpha: &'a PushdownAlphabet, prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::input("the period of a lasso word must be nonempty"));
        }
        if !is_well_matched(alpha, &period) {
            return Err(Error::Unsupported("the oracle needs a well-matched period".into()));
        }
        alpha.check_word(&prefix)?;
        alpha.check_word(&period)?;
        Ok(EvalContext {
            alpha,
            prefix,
            period,
            max_configs: Limits::from_env().max_configs,
            max_test_depth: DEFAULT_MAX_TEST_DEPTH,
            memo: HashMap::new(),
        })
    }

    /// Context for a lasso given in any form, rotated to a well-matched period.
    pub fn for_lasso(alpha: &'a PushdownAlphabet, w: &crate::alphabet::LassoWord) -> Result<Self> {
        let (u, v) = w
            .well_matched_split(alpha)
            .ok_or_else(|| Error::Unsupported("the oracle needs a lasso with a well-matched period".into()))?;
        Self::new(alpha, u, v)
    }

    pub fn with_caps(mut self, max_configs: usize, max_test_depth: usize) -> Self {
        self.max_configs = max_configs;
        self.max_test_depth = max_test_depth;
        self
    }

    pub fn classes(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn class(&self, i: usize) -> usize {
        let u = self.prefix.len();
        if i < u {
            i
        } else {
            u + (i - u) % self.period.len()
        }
    }

    fn letter(&self, c: usize) -> Symbol {
        if c < self.prefix.len() {
            self.prefix[c]
        } else {
            self.period[c - self.prefix.len()]
        }
    }

    /// Truth value of `f` at every position class.
    pub fn eval(&mut self, f: &Formula) -> Result<Vec<bool>> {
        if f.test_depth() > self.max_test_depth {
            return Err(Error::Unsupported(format!("test nesting deeper than {}", self.max_test_depth)));
        }
        for g in closure(f) {
            if self.memo.contains_key(&g) {
                continue;
            }
            let v = self.eval_node(&g)?;
            self.memo.insert(g, v);
        }
        Ok(self.memo[f].clone())
    }

    pub fn holds_at(&mut self, f: &Formula, position: usize) -> Result<bool> {
        let c = self.class(position);
        Ok(self.eval(f)?[c])
    }

    fn eval_node(&mut self, f: &Formula) -> Result<Vec<bool>> {
        let n = self.classes();
        let get = |g: &Formula, memo: &HashMap<Formula, Vec<bool>>| memo[g].clone();
        Ok(match f {
            Formula::Atom(p) => (0..n).map(|c| self.alpha.has_prop(self.letter(c), p)).collect(),
            Formula::NegAtom(p) => (0..n).map(|c| !self.alpha.has_prop(self.letter(c), p)).collect(),
            Formula::Not(g) => get(g, &self.memo).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (x, y) = (get(a, &self.memo), get(b, &self.memo));
                x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (get(a, &self.memo), get(b, &self.memo));
                x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
            }
            Formula::Diamond(a, g) | Formula::Box(a, g) => {
                let inner = get(g, &self.memo);
                let diamond = matches!(f, Formula::Diamond(..));
                let mut out = Vec::with_capacity(n);
                for c in 0..n {
                    let ends = self.run_endpoints(a, c)?;
                    out.push(if diamond { ends.iter().any(|e| inner[*e]) } else { ends.iter().all(|e| inner[*e]) });
                }
                out
            }
        })
    }

    /// Classes `k'` with `(k, k') ∈ R_A` for `k` of class `start`: ends of
    /// accepting runs from the empty stack whose every visited state passes
    /// its test at the position where it is visited.
    pub fn run_endpoints(&self, a: &Tvpa, start: usize) -> Result<BTreeSet<usize>> {
        let tests: HashMap<usize, Vec<bool>> =
            a.tests.iter().map(|(q, t)| (*q, self.memo.get(t).cloned().expect("tests are evaluated first"))).collect();
        let passes = |q: usize, c: usize| tests.get(&q).is_none_or(|v| v[c]);
        let mut ends = BTreeSet::new();
        let init = (start, Configuration { state: a.vps.initial, stack: Vec::new() });
        if !passes(init.1.state, start) {
            return Ok(ends);
        }
        let mut seen: HashSet<(usize, Configuration)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(init.clone());
        queue.push_back(init);
        while let Some((c, cfg)) = queue.pop_front() {
            if a.is_final(cfg.state) {
                ends.insert(c);
            }
            let next = self.class(c + 1);
            for s in a.vps.successors(self.alpha, &cfg, self.letter(c)) {
                if !passes(s.state, next) {
                    continue;
                }
                let key = (next, s);
                if seen.contains(&key) {
                    continue;
                }
                if seen.len() >= self.max_configs {
                    return Err(Error::resource("oracle runs", self.max_configs));
                }
                seen.insert(key.clone());
                queue.push_back(key);
            }
        }
        Ok(ends)
    }
}

/// `(α, 0) ⊨ φ`.
pub fn eval_lasso(alpha: &PushdownAlphabet, f: &Formula, w: &crate::alphabet::LassoWord) -> Result<bool> {
    let mut ctx = EvalContext::for_lasso(alpha, w)?;
    ctx.holds_at(f, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::TvpaLibrary;
    use std::sync::Arc;

    fn alpha() -> PushdownAlphabet {
        PushdownAlphabet::new(&["c"], &["r"], &["l", "m"]).unwrap().with_props("m", &["q"]).unwrap().with_props("c", &["p"]).unwrap()
    }

    fn tvpa(lib: &mut TvpaLibrary, name: &str, text: &str) -> Arc<Tvpa> {
        lib.define(name, text).unwrap()
    }

    #[test]
    fn atoms_and_connectives() {
        let a = alpha();
        let w = a.lasso("c r", "l").unwrap();
        assert!(eval_lasso(&a, &Formula::atom("p"), &w).unwrap());
        assert!(!eval_lasso(&a, &Formula::atom("q"), &w).unwrap());
        assert!(eval_lasso(&a, &Formula::tt(), &w).unwrap());
        assert!(!eval_lasso(&a, &Formula::ff(), &w).unwrap());
        assert!(eval_lasso(&a, &Formula::not(Formula::and(Formula::atom("p"), Formula::atom("q"))), &w).unwrap());
    }

    #[test]
    fn modalities() {
        let a = alpha();
        let mut lib = TvpaLibrary::new(a.clone());
        let none = tvpa(&mut lib, "None", "states: s; initial: s;");
        let cr = tvpa(&mut lib, "Cr", "states: s t u; initial: s; final: u; stack: A; s -c push A-> t; t -r pop A-> u;");
        let w = a.lasso("c r", "m").unwrap();
        assert!(eval_lasso(&a, &Formula::boxed(&none, Formula::ff()), &w).unwrap());
        assert!(!eval_lasso(&a, &Formula::diamond(&none, Formula::tt()), &w).unwrap());
        assert!(eval_lasso(&a, &Formula::diamond(&cr, Formula::atom("q")), &w).unwrap());
        assert!(!eval_lasso(&a, &Formula::diamond(&cr, Formula::atom("p")), &w).unwrap());
    }

    #[test]
    fn tests_apply_along_the_run() {
        let a = alpha();
        let mut lib = TvpaLibrary::new(a.clone());
        // Walk over locals while every visited position carries `q`.
        let walk = tvpa(&mut lib, "Walk", "states: s; initial: s; final: s; s -l-> s; s -m-> s; test s: q;");
        let all_q = a.lasso("", "m").unwrap();
        let later_q = a.lasso("l", "m").unwrap();
        // Box over the walk: every reachable end sees q, vacuous where the
        // first test fails.
        assert!(eval_lasso(&a, &Formula::boxed(&walk, Formula::atom("q")), &all_q).unwrap());
        assert!(eval_lasso(&a, &Formula::boxed(&walk, Formula::ff()), &later_q).unwrap());
        assert!(!eval_lasso(&a, &Formula::diamond(&walk, Formula::tt()), &later_q).unwrap());
        assert!(eval_lasso(&a, &Formula::diamond(&walk, Formula::tt()), &all_q).unwrap());
    }

    #[test]
    fn restrictions_are_enforced() {
        let a = alpha();
        let w = a.lasso("", "c").unwrap();
        assert!(matches!(eval_lasso(&a, &Formula::atom("p"), &w), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unrolled_representation_agrees() {
        let a = alpha();
        let mut lib = TvpaLibrary::new(a.clone());
        let any = tvpa(
            &mut lib,
            "Any",
            "states: s t; initial: s; final: s; stack: A; s -c push A-> s; s -r pop A-> s; s -r pop bot-> s; s -l-> s; s -m-> t; t -m-> t;",
        );
        let f = Formula::diamond(&any, Formula::atom("q"));
        let (u, v) = (a.word("l c r").unwrap().0, a.word("c l r m").unwrap().0);
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let x = EvalContext::new(&a, u, v.clone()).unwrap().holds_at(&f, 0).unwrap();
        let y = EvalContext::new(&a, uv, v).unwrap().holds_at(&f, 0).unwrap();
        assert!(x);
        assert_eq!(x, y);
    }
}
