//! End-to-end satisfiability and model checking.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::aja::{lasso_accepts, OneAja};
use crate::aja2tree::aja_to_stacktree_automaton;
use crate::alphabet::{LassoWord, PushdownAlphabet};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::limits::Limits;
use crate::oracle::eval_lasso;
use crate::stacktree::{decode, stack_tree_recognizer, TreeLabel};
use crate::treeauto::{emptiness, materialize, BuchiTreeAutomaton, Emptiness, Product};
use crate::vldl2aja::compile;
use crate::vps::{StackSym, Vps};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Satisfiable(LassoWord),
    Unsatisfiable,
    Holds,
    Violated(LassoWord),
}

impl Answer {
    /// `true` for Satisfiable and Holds.
    pub fn is_positive(&self) -> bool {
        matches!(self, Answer::Satisfiable(_) | Answer::Holds)
    }

    pub fn word(&self) -> Option<&LassoWord> {
        match self {
            Answer::Satisfiable(w) | Answer::Violated(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Answer::Satisfiable(_) => "satisfiable",
            Answer::Unsatisfiable => "unsatisfiable",
            Answer::Holds => "holds",
            Answer::Violated(_) => "violated",
        }
    }
}

/// Size and time of one construction stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub size: usize,
    pub millis: f64,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub answer: Answer,
    pub stages: Vec<Stage>,
    pub millis: f64,
}

impl Verdict {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

struct Clock {
    start: Instant,
    stages: Vec<Stage>,
}

impl Clock {
    fn new() -> Self {
        Clock { start: Instant::now(), stages: Vec::new() }
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>, size: impl FnOnce(&T) -> usize) -> Result<T> {
        let t0 = Instant::now();
        let out = f()?;
        self.stages.push(Stage { name: name.into(), size: size(&out), millis: t0.elapsed().as_secs_f64() * 1e3 });
        Ok(out)
    }

    fn finish(self, answer: Answer) -> Verdict {
        Verdict { answer, stages: self.stages, millis: self.start.elapsed().as_secs_f64() * 1e3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VpsTreeState {
    Plain(usize),
    /// Simulating an infix from the first state; it must end in the second.
    Pair(usize, usize),
    /// At a matched return after an infix left in the given state.
    Ret(usize, StackSym),
    RetPair(usize, StackSym, usize),
    Sink,
}

/// Tree automaton for the stack trees of the traces of `s`, already
/// intersected with the stack-tree recognizer.
pub fn vps_to_tree(alpha: &PushdownAlphabet, s: &Vps) -> Result<BuchiTreeAutomaton> {
    s.validate(alpha)?;
    let raw = vps_tree_raw(alpha, s);
    materialize(&Product::new(stack_tree_recognizer(alpha), &raw)?, usize::MAX)
}

/// The simulation automaton alone; every state is accepting.
pub fn vps_tree_raw(alpha: &PushdownAlphabet, s: &Vps) -> BuchiTreeAutomaton {
    use VpsTreeState::*;
    let n = s.state_count();
    let g = s.stack_symbols.len() as StackSym;
    let mut states: Vec<VpsTreeState> = (0..n).map(Plain).collect();
    for q in 0..n {
        states.extend((0..n).map(|qg| Pair(q, qg)));
        states.extend((0..g).map(|a| Ret(q, a)));
        for a in 0..g {
            states.extend((0..n).map(|qg| RetPair(q, a, qg)));
        }
    }
    states.push(Sink);
    let index: HashMap<VpsTreeState, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut t = BuchiTreeAutomaton::new(BuchiTreeAutomaton::labels_of(alpha), index[&Plain(s.initial)]);
    for st in &states {
        let name = match *st {
            Plain(q) => s.states[q].clone(),
            Pair(q, qg) => format!("({},{})", s.states[q], s.states[qg]),
            Ret(q, a) => format!("({},{})", s.states[q], s.stack_symbols[a as usize]),
            RetPair(q, a, qg) => format!("({},{},{})", s.states[q], s.stack_symbols[a as usize], s.states[qg]),
            Sink => "sink".into(),
        };
        t.add_state(name, true);
    }
    let mut add = |from: VpsTreeState, label: TreeLabel, l: VpsTreeState, r: VpsTreeState| {
        t.add_transition(index[&from], label, index[&l], index[&r]);
    };
    for rule in &s.locals {
        add(Plain(rule.from), TreeLabel::Sym(rule.sym), Plain(rule.to), Sink);
        for qg in 0..n {
            add(Pair(rule.from, qg), TreeLabel::Sym(rule.sym), Pair(rule.to, qg), Sink);
        }
    }
    for rule in &s.calls {
        let c = TreeLabel::Sym(rule.sym);
        add(Plain(rule.from), c, Sink, Plain(rule.to));
        for qg in 0..n {
            add(Plain(rule.from), c, Ret(qg, rule.push), Pair(rule.to, qg));
            for qg2 in 0..n {
                add(Pair(rule.from, qg), c, RetPair(qg2, rule.push, qg), Pair(rule.to, qg2));
            }
        }
    }
    for rule in &s.returns {
        let r = TreeLabel::Sym(rule.sym);
        match rule.pop {
            None => add(Plain(rule.from), r, Plain(rule.to), Sink),
            Some(a) => {
                add(Ret(rule.from, a), r, Plain(rule.to), Sink);
                for qg in 0..n {
                    add(RetPair(rule.from, a, qg), r, Pair(rule.to, qg), Sink);
                }
            }
        }
    }
    // An infix ends where its guess is met.
    for q in 0..n {
        add(Pair(q, q), TreeLabel::Bot, Sink, Sink);
    }
    add(Sink, TreeLabel::Bot, Sink, Sink);
    t
}

fn check_size(stage: &str, got: usize, cap: usize) -> Result<()> {
    if got > cap {
        return Err(Error::resource(stage, cap));
    }
    Ok(())
}

/// Checks a decoded witness against the formula. The oracle is used where
/// it applies; other lassos fall back to word-level acceptance.
fn formula_holds(alpha: &Arc<PushdownAlphabet>, aja: &OneAja, f: &Formula, w: &LassoWord) -> Result<bool> {
    if w.well_matched_split(alpha).is_some() {
        match eval_lasso(alpha, f, w) {
            Ok(b) => return Ok(b),
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e),
        }
    }
    lasso_accepts(aja, w)
}

pub fn satisfiable(alpha: &Arc<PushdownAlphabet>, f: &Formula) -> Result<Verdict> {
    satisfiable_with(alpha, f, &Limits::from_env())
}

pub fn satisfiable_with(alpha: &Arc<PushdownAlphabet>, f: &Formula, limits: &Limits) -> Result<Verdict> {
    let mut clock = Clock::new();
    let aja = clock.time("1-AJA", || compile(alpha, f), OneAja::len)?;
    check_size("1-AJA", aja.len(), limits.max_states)?;
    let tree = aja_to_stacktree_automaton(&aja)?;
    let tree = Product { first: tree.first, second: tree.second.with_summary_cap(limits.max_states).with_canonical_infixes() };
    let e = clock.time("emptiness", || emptiness(&tree, limits.max_vertices), |e: &Emptiness| e.states)?;
    if tree.second.overflowed() {
        return Err(Error::resource("infix summaries", limits.max_states));
    }
    check_size("tree automaton", e.states, limits.max_states)?;
    let answer = match e.witness {
        None => Answer::Unsatisfiable,
        Some(t) => {
            let w = decode(alpha, &t)?;
            if !formula_holds(alpha, &aja, f, &w)? {
                return Err(Error::MalformedWitness(format!("model {} does not satisfy the formula", alpha.fmt_lasso(&w))));
            }
            Answer::Satisfiable(w)
        }
    };
    Ok(clock.finish(answer))
}

pub fn model_check(alpha: &Arc<PushdownAlphabet>, s: &Vps, f: &Formula) -> Result<Verdict> {
    model_check_with(alpha, s, f, &Limits::from_env())
}

pub fn model_check_with(alpha: &Arc<PushdownAlphabet>, s: &Vps, f: &Formula, limits: &Limits) -> Result<Verdict> {
    let mut clock = Clock::new();
    let system = clock.time("system tree automaton", || vps_to_tree(alpha, s), BuchiTreeAutomaton::len)?;
    check_size("system tree automaton", system.len(), limits.max_states)?;
    let negated = Formula::not(f.clone());
    let aja = clock.time("1-AJA", || compile(alpha, &negated), OneAja::len)?;
    check_size("1-AJA", aja.len(), limits.max_states)?;
    let spec = crate::aja2tree::aja_to_tree(&aja).with_summary_cap(limits.max_states);
    let product = Product::new(&system, &spec)?;
    let e = clock.time("emptiness", || emptiness(&product, limits.max_vertices), |e: &Emptiness| e.states)?;
    if spec.overflowed() {
        return Err(Error::resource("infix summaries", limits.max_states));
    }
    check_size("tree automaton", e.states, limits.max_states)?;
    let answer = match e.witness {
        None => Answer::Holds,
        Some(t) => {
            let w = decode(alpha, &t)?;
            if !is_trace(alpha, s, &w) {
                return Err(Error::MalformedWitness(format!("counterexample {} is not a trace", alpha.fmt_lasso(&w))));
            }
            if !formula_holds(alpha, &aja, &negated, &w)? {
                return Err(Error::MalformedWitness(format!("counterexample {} satisfies the formula", alpha.fmt_lasso(&w))));
            }
            Answer::Violated(w)
        }
    };
    Ok(clock.finish(answer))
}

/// Bounded unrolling: the prefix plus enough periods for the set of
/// reachable configurations to repeat or for the cap to pass.
pub fn is_trace(alpha: &PushdownAlphabet, s: &Vps, w: &LassoWord) -> bool {
    s.accepts_trace(alpha, w.prefix(), w.period(), 2 + 4 * s.state_count() * (1 + s.stack_symbols.len()))
}

/// Ceiling on the states explored by model checking, read off the
/// constructions. The system automaton has at most
/// `14·((|S|+|S|²)(|Γ|+1)+1)` states: its simulation states times the seven
/// recognizer states and the product flag. The breakpoint automaton of the
/// negated formula has at most `4^|Q|+16^|Q|+1`, with `|Q|` the size of the
/// compiled 1-AJA, and the lazy product at most twice their product.
pub fn model_check_bound(alpha: &Arc<PushdownAlphabet>, s: &Vps, f: &Formula) -> Result<f64> {
    let q = compile(alpha, &Formula::not(f.clone()))?.len() as f64;
    Ok(2.0 * system_bound(s) * (4f64.powf(q) + 16f64.powf(q) + 1.0))
}

/// Ceiling on the states of [`vps_to_tree`].
pub fn system_bound(s: &Vps) -> f64 {
    let n = s.state_count() as f64;
    let g = s.stack_symbols.len() as f64;
    14.0 * ((n + n * n) * (g + 1.0) + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::TvpaLibrary;
    use crate::stacktree::encode_lasso;
    use crate::treeauto::{contains, witness};
    use crate::vps::{parse_system, System};

    fn alpha() -> Arc<PushdownAlphabet> {
        Arc::new(PushdownAlphabet::new(&["c"], &["r"], &["l"]).unwrap().with_props("l", &["p"]).unwrap().with_props("c", &["q"]).unwrap())
    }

    fn system(a: &PushdownAlphabet, text: &str) -> Vps {
        match parse_system(text, a, &TvpaLibrary::new(a.clone())).unwrap() {
            System::Vps(v) => v,
            System::Tvpa(_) => panic!("plain system expected"),
        }
    }

    const CR: &str = "states: s t; initial: s; stack: A; s -c push A-> t; t -r pop A-> s;";

    #[test]
    fn system_trees() {
        let a = alpha();
        let loop_l = vps_to_tree(&a, &system(&a, "states: s; initial: s; s -l-> s;")).unwrap();
        assert!(contains(&loop_l, &encode_lasso(&a, &a.lasso("", "l").unwrap()).unwrap()).unwrap());
        assert!(!contains(&loop_l, &encode_lasso(&a, &a.lasso("", "c r").unwrap()).unwrap()).unwrap());
        let cr = vps_to_tree(&a, &system(&a, CR)).unwrap();
        let w = decode(&a, &witness(&cr).unwrap().unwrap()).unwrap();
        assert_eq!(a.fmt_lasso(&w), "(c r)^w");
        let stuck = vps_to_tree(&a, &system(&a, "states: s t; initial: s; t -l-> t;")).unwrap();
        assert!(witness(&stuck).unwrap().is_none());
    }

    #[test]
    fn satisfiability() {
        let a = alpha();
        let p = Formula::atom("p");
        assert_eq!(satisfiable(&a, &Formula::and(p.clone(), Formula::not(p.clone()))).unwrap().answer, Answer::Unsatisfiable);
        let v = satisfiable(&a, &p).unwrap();
        let w = v.answer.word().unwrap().clone();
        assert!(a.has_prop(w.letter(0), "p"));
        let mut lib = TvpaLibrary::new((*a).clone());
        let never = lib.define("Never", "states: s t; initial: s; final: t; s -l-> s;").unwrap();
        assert_eq!(satisfiable(&a, &Formula::diamond(&never, Formula::tt())).unwrap().answer, Answer::Unsatisfiable);
    }

    #[test]
    fn model_checking() {
        let a = alpha();
        let s = system(&a, CR);
        let p = Formula::atom("p");
        assert_eq!(model_check(&a, &s, &Formula::or(p.clone(), Formula::not(p.clone()))).unwrap().answer, Answer::Holds);
        let v = model_check(&a, &s, &p).unwrap();
        match &v.answer {
            Answer::Violated(w) => assert_eq!(a.fmt_lasso(w), "(c r)^w"),
            other => panic!("{other:?}"),
        }
        assert!(v.stage("emptiness").is_some());
    }

    #[test]
    fn caps_are_resource_errors() {
        let a = alpha();
        let e = satisfiable_with(&a, &Formula::atom("p"), &Limits::uniform(2)).unwrap_err();
        assert!(matches!(e, Error::Resource { .. }));
    }
}
