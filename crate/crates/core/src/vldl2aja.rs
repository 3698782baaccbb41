//! Compilation of NNF VLDL formulas into language-equivalent 1-AJAs.
//!
//! Modalities simulate the guarding automaton along the cardinal positions:
//! a main copy per run state, with a flag recording whether an unmatched
//! call has been skipped, and verifier copies `(q, q'', A)` that check the
//! summary guessed at a matched call on its nested infix. Box modalities
//! track all runs universally; diamond modalities follow one run
//! existentially and must eventually hand over to the inner formula.

use std::collections::HashMap;
use std::sync::Arc;

use crate::aja::{Command, Direction, OneAja, PosBool, State};
use crate::alphabet::{Kind, PushdownAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::formula::{to_nnf, Formula};
use crate::vps::Tvpa;

/// Compiles `φ` after converting it to negation normal form.
pub fn compile(alpha: &Arc<PushdownAlphabet>, f: &Formula) -> Result<OneAja> {
    Compiler::new(alpha.clone()).compile(&to_nnf(f))
}

/// Memoizing compiler; equal subformulas are compiled once.
pub struct Compiler {
    alpha: Arc<PushdownAlphabet>,
    memo: HashMap<Formula, OneAja>,
}

impl Compiler {
    pub fn new(alpha: Arc<PushdownAlphabet>) -> Self {
        Compiler { alpha, memo: HashMap::new() }
    }

    pub fn compile(&mut self, f: &Formula) -> Result<OneAja> {
        if let Some(a) = self.memo.get(f) {
            return Ok(a.clone());
        }
        let a = match f {
            Formula::Atom(p) => literal(&self.alpha, p, true),
            Formula::NegAtom(p) => literal(&self.alpha, p, false),
            Formula::Not(_) => return Err(Error::input("compilation expects a formula in negation normal form")),
            Formula::And(x, y) => OneAja::conjoin(&self.compile(x)?, &self.compile(y)?),
            Formula::Or(x, y) => OneAja::disjoin(&self.compile(x)?, &self.compile(y)?),
            Formula::Box(t, g) => {
                let inner = self.compile(g)?;
                let mut tests = HashMap::new();
                for test in t.tests.values() {
                    if !tests.contains_key(test) {
                        let neg = self.compile(&to_nnf(&Formula::not(test.clone())))?;
                        tests.insert(test.clone(), neg);
                    }
                }
                compile_box(&self.alpha, t, &inner, &tests)
            }
            Formula::Diamond(t, g) => {
                let inner = self.compile(g)?;
                let mut tests = HashMap::new();
                for test in t.tests.values() {
                    if !tests.contains_key(test) {
                        let pos = self.compile(&to_nnf(test))?;
                        tests.insert(test.clone(), pos);
                    }
                }
                compile_diamond(&self.alpha, t, &inner, &tests)
            }
        };
        self.memo.insert(f.clone(), a.clone());
        Ok(a)
    }
}

/// Three states: the initial one checks the first symbol and moves to an
/// accepting or a rejecting sink.
fn literal(alpha: &Arc<PushdownAlphabet>, p: &str, positive: bool) -> OneAja {
    let mut a = OneAja::new(alpha.clone());
    let q0 = a.add_state(if positive { p.to_string() } else { format!("!{p}") }, false);
    let top = a.add_state("top", true);
    let rej = a.add_state("rej", false);
    for s in alpha.symbols() {
        let ok = alpha.has_prop(s, p) == positive;
        a.set(q0, s, PosBool::leaf(Command::next(if ok { top } else { rej })));
    }
    a.set_all(top, PosBool::leaf(Command::next(top)));
    a.set_all(rej, PosBool::leaf(Command::next(rej)));
    a.set_initial(q0);
    a
}

/// Number of simulation states `2(2|Q| + |Q|²|Γ|)` added by a modality.
pub fn simulation_states(t: &Tvpa) -> usize {
    let n = t.state_count();
    let g = t.vps.stack_symbols.len();
    2 * (2 * n + n * n * g)
}

/// State layout shared by both modality constructions.
struct Layout {
    n: usize,
    g: usize,
    top: State,
    rej: State,
}

impl Layout {
    fn main(&self, q: usize, flag: bool) -> State {
        2 * q + flag as usize
    }

    fn ver(&self, q: usize, target: usize, a: u16) -> State {
        2 * self.n + (q * self.n + target) * self.g + a as usize
    }

    fn wait(&self, s: State) -> State {
        s + 2 * self.n + self.n * self.n * self.g
    }
}

/// `(→, q)`, i.e. `(→, q, ⊤)`.
fn next(l: &Layout, q: State) -> PosBool {
    PosBool::leaf(Command { dir: Direction::Direct, direct: q, jump: l.top })
}

/// `(↷, q)`, i.e. `(↷, ⊤, q)`.
fn jump(l: &Layout, q: State) -> PosBool {
    PosBool::leaf(Command { dir: Direction::Jump, direct: l.top, jump: q })
}

fn conj(l: &Layout, parts: Vec<PosBool>) -> PosBool {
    if parts.is_empty() {
        next(l, l.top)
    } else {
        PosBool::and(parts)
    }
}

fn disj(l: &Layout, parts: Vec<PosBool>) -> PosBool {
    if parts.is_empty() {
        next(l, l.rej)
    } else {
        PosBool::or(parts)
    }
}

struct Parts {
    out: OneAja,
    layout: Layout,
    inner_init: State,
    /// Initial state of the test automaton for each guarded state.
    test_init: Vec<Option<State>>,
}

fn skeleton(alpha: &Arc<PushdownAlphabet>, t: &Tvpa, inner: &OneAja, tests: &HashMap<Formula, OneAja>, accepting: bool) -> Parts {
    let n = t.state_count();
    let g = t.vps.stack_symbols.len();
    let mut out = OneAja::new(alpha.clone());
    let names = &t.vps.states;
    let stack = &t.vps.stack_symbols;
    for q in 0..n {
        for flag in [0, 1] {
            out.add_state(format!("({},{flag})", names[q]), accepting);
        }
    }
    for q in 0..n {
        for target in 0..n {
            for a in 0..g {
                out.add_state(format!("({},{},{})", names[q], names[target], stack[a]), accepting);
            }
        }
    }
    let sim = out.len();
    for s in 0..sim {
        let name = format!("{}.wait", out.name(s));
        out.add_state(name, false);
    }
    let top = out.add_state("top", true);
    let rej = out.add_state("rej", false);
    let layout = Layout { n, g, top, rej };
    let inner_init = absorb(&mut out, inner, "in.");
    let mut test_init = vec![None; n];
    let mut offsets: HashMap<&Formula, State> = HashMap::new();
    for (i, (f, a)) in sorted_tests(tests).into_iter().enumerate() {
        offsets.insert(f, absorb(&mut out, a, &format!("t{i}.")));
    }
    for (q, f) in &t.tests {
        test_init[*q] = Some(offsets[f]);
    }
    for s in 0..sim {
        out.set_all(layout.wait(s), next(&layout, s));
    }
    out.set_all(top, PosBool::leaf(Command::next(top)));
    out.set_all(rej, PosBool::leaf(Command::next(rej)));
    out.set_initial(layout.main(t.vps.initial, false));
    Parts { out, layout, inner_init, test_init }
}

/// Test automata in a deterministic order.
fn sorted_tests(tests: &HashMap<Formula, OneAja>) -> Vec<(&Formula, &OneAja)> {
    let mut v: Vec<(&Formula, &OneAja)> = tests.iter().collect();
    v.sort_by_key(|(f, _)| f.to_string());
    v
}

/// Copies `a` into `out` and returns the new index of its initial state.
fn absorb(out: &mut OneAja, a: &OneAja, prefix: &str) -> State {
    let off = out.len();
    for q in 0..a.len() {
        out.add_state(format!("{prefix}{}", a.name(q)), a.is_accepting(q));
    }
    for q in 0..a.len() {
        for s in a.alphabet().symbols() {
            out.set(off + q, s, a.delta(q, s).map_states(&|x| x + off));
        }
    }
    off + a.initial()
}

/// Rules of the guarding automaton, grouped by source state and symbol.
struct Rules {
    locals: HashMap<(usize, Symbol), Vec<usize>>,
    calls: HashMap<(usize, Symbol), Vec<(usize, u16)>>,
    returns: HashMap<(usize, Symbol), Vec<(Option<u16>, usize)>>,
}

impl Rules {
    fn new(t: &Tvpa) -> Self {
        let mut r = Rules { locals: HashMap::new(), calls: HashMap::new(), returns: HashMap::new() };
        for x in &t.vps.locals {
            r.locals.entry((x.from, x.sym)).or_default().push(x.to);
        }
        for x in &t.vps.calls {
            r.calls.entry((x.from, x.sym)).or_default().push((x.to, x.push));
        }
        for x in &t.vps.returns {
            r.returns.entry((x.from, x.sym)).or_default().push((x.pop, x.to));
        }
        r
    }

    fn locals(&self, q: usize, a: Symbol) -> &[usize] {
        self.locals.get(&(q, a)).map_or(&[], Vec::as_slice)
    }

    fn calls(&self, q: usize, a: Symbol) -> &[(usize, u16)] {
        self.calls.get(&(q, a)).map_or(&[], Vec::as_slice)
    }

    fn returns(&self, q: usize, a: Symbol) -> &[(Option<u16>, usize)] {
        self.returns.get(&(q, a)).map_or(&[], Vec::as_slice)
    }
}

/// `[A]φ'`. `negated_tests` maps each test of `t` to an automaton for its
/// negation.
pub fn compile_box(alpha: &Arc<PushdownAlphabet>, t: &Tvpa, inner: &OneAja, negated_tests: &HashMap<Formula, OneAja>) -> OneAja {
    let Parts { mut out, layout: l, inner_init, test_init } = skeleton(alpha, t, inner, negated_tests, true);
    let rules = Rules::new(t);
    let n = l.n;
    for a in alpha.symbols() {
        let kind = alpha.kind(a);
        for q in 0..n {
            let chi = if t.is_final(q) { out.delta(inner_init, a).clone() } else { next(&l, l.top) };
            let theta = test_init[q].map(|i| out.delta(i, a).clone());
            let refute = |f: PosBool| match &theta {
                Some(th) => PosBool::or(vec![f, th.clone()]),
                None => f,
            };
            for flag in [false, true] {
                let body = match kind {
                    Kind::Local => {
                        let mut parts = vec![chi.clone()];
                        parts.extend(rules.locals(q, a).iter().map(|q2| next(&l, l.main(*q2, flag))));
                        refute(conj(&l, parts))
                    }
                    Kind::Call => {
                        let mut parts = vec![chi.clone()];
                        for (q2, push) in rules.calls(q, a) {
                            for q3 in 0..n {
                                parts.push(PosBool::or(vec![
                                    next(&l, l.ver(*q2, q3, *push)),
                                    jump(&l, l.wait(l.main(q3, flag))),
                                ]));
                            }
                        }
                        for (q2, _) in rules.calls(q, a) {
                            parts.push(next(&l, l.main(*q2, true)));
                        }
                        refute(conj(&l, parts))
                    }
                    Kind::Return if !flag => {
                        let mut parts = vec![chi.clone()];
                        for (pop, q2) in rules.returns(q, a) {
                            if pop.is_none() {
                                parts.push(next(&l, l.main(*q2, false)));
                            }
                        }
                        refute(conj(&l, parts))
                    }
                    // A return read directly after skipping a call closes the
                    // infix of a matched call: only the run ending here counts.
                    Kind::Return => refute(chi.clone()),
                };
                out.set(l.main(q, flag), a, body);
            }
            for target in 0..n {
                for push in 0..l.g as u16 {
                    let body = match kind {
                        Kind::Local => {
                            let parts = rules.locals(q, a).iter().map(|q2| next(&l, l.ver(*q2, target, push))).collect();
                            refute(conj(&l, parts))
                        }
                        Kind::Call => {
                            let mut parts = Vec::new();
                            for (q1, push2) in rules.calls(q, a) {
                                for q3 in 0..n {
                                    parts.push(PosBool::or(vec![
                                        next(&l, l.ver(*q1, q3, *push2)),
                                        jump(&l, l.wait(l.ver(q3, target, push))),
                                    ]));
                                }
                            }
                            refute(conj(&l, parts))
                        }
                        Kind::Return => {
                            let reaches = rules.returns(q, a).iter().any(|(pop, q2)| *pop == Some(push) && *q2 == target);
                            if reaches {
                                theta.clone().unwrap_or_else(|| next(&l, l.rej))
                            } else {
                                next(&l, l.top)
                            }
                        }
                    };
                    out.set(l.ver(q, target, push), a, body);
                }
            }
        }
    }
    out
}

/// `⟨A⟩φ'`. `tests` maps each test of `t` to an automaton for the test itself.
pub fn compile_diamond(alpha: &Arc<PushdownAlphabet>, t: &Tvpa, inner: &OneAja, tests: &HashMap<Formula, OneAja>) -> OneAja {
    let Parts { mut out, layout: l, inner_init, test_init } = skeleton(alpha, t, inner, tests, false);
    let rules = Rules::new(t);
    let n = l.n;
    for a in alpha.symbols() {
        let kind = alpha.kind(a);
        for q in 0..n {
            let tau = test_init[q].map(|i| out.delta(i, a).clone());
            let guard = |f: PosBool| match &tau {
                Some(t) => PosBool::and(vec![t.clone(), f]),
                None => f,
            };
            for flag in [false, true] {
                let mut parts = Vec::new();
                if t.is_final(q) {
                    parts.push(out.delta(inner_init, a).clone());
                }
                match kind {
                    Kind::Local => parts.extend(rules.locals(q, a).iter().map(|q2| next(&l, l.main(*q2, flag)))),
                    Kind::Call => {
                        for (q2, push) in rules.calls(q, a) {
                            for q3 in 0..n {
                                parts.push(PosBool::and(vec![
                                    next(&l, l.ver(*q2, q3, *push)),
                                    jump(&l, l.wait(l.main(q3, flag))),
                                ]));
                            }
                            parts.push(next(&l, l.main(*q2, true)));
                        }
                    }
                    Kind::Return if !flag => {
                        for (pop, q2) in rules.returns(q, a) {
                            if pop.is_none() {
                                parts.push(next(&l, l.main(*q2, false)));
                            }
                        }
                    }
                    Kind::Return => {}
                }
                out.set(l.main(q, flag), a, guard(disj(&l, parts)));
            }
            for target in 0..n {
                for push in 0..l.g as u16 {
                    let mut parts = Vec::new();
                    match kind {
                        Kind::Local => parts.extend(rules.locals(q, a).iter().map(|q2| next(&l, l.ver(*q2, target, push)))),
                        Kind::Call => {
                            for (q1, push2) in rules.calls(q, a) {
                                for q3 in 0..n {
                                    parts.push(PosBool::and(vec![
                                        next(&l, l.ver(*q1, q3, *push2)),
                                        jump(&l, l.wait(l.ver(q3, target, push))),
                                    ]));
                                }
                            }
                        }
                        Kind::Return => {
                            if rules.returns(q, a).iter().any(|(pop, q2)| *pop == Some(push) && *q2 == target) {
                                parts.push(next(&l, l.top));
                            }
                        }
                    }
                    out.set(l.ver(q, target, push), a, guard(disj(&l, parts)));
                }
            }
        }
    }
    out
}
