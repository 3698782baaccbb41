//! Seeded random instances: lassos, 1-AJAs, automata with tests, formulas
//! and games. Shared by the cross-check driver, the examples and the tests.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aja::{Command, Direction, OneAja, PosBool};
use crate::alphabet::{Kind, LassoWord, PushdownAlphabet, Symbol};
use crate::formula::Formula;
use crate::treeauto::{BuchiGame, Player};
use crate::vps::{CallRule, LocalRule, ReturnRule, Tvpa, Vps};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Calls `c`, `d{p}`; returns `r`, `s{q}`; locals `l`, `m{p}`, `n{q}`.
pub fn test_alphabet() -> PushdownAlphabet {
    PushdownAlphabet::new(&["c", "d"], &["r", "s"], &["l", "m", "n"])
        .and_then(|a| a.with_props("d", &["p"]))
        .and_then(|a| a.with_props("s", &["q"]))
        .and_then(|a| a.with_props("m", &["p"]))
        .and_then(|a| a.with_props("n", &["q"]))
        .expect("fixed alphabet")
}

fn pick(rng: &mut impl Rng, syms: &[Symbol]) -> Symbol {
    *syms.choose(rng).expect("nonempty symbol class")
}

pub fn random_word(rng: &mut impl Rng, alpha: &PushdownAlphabet, len: usize) -> Vec<Symbol> {
    let all: Vec<Symbol> = alpha.symbols().collect();
    (0..len).map(|_| pick(rng, &all)).collect()
}

/// A well-matched word of exactly `len` symbols (`len` is rounded down to
/// what the alphabet allows).
pub fn random_well_matched(rng: &mut impl Rng, alpha: &PushdownAlphabet, len: usize) -> Vec<Symbol> {
    let calls = alpha.symbols_of(Kind::Call);
    let rets = alpha.symbols_of(Kind::Return);
    let locals = alpha.symbols_of(Kind::Local);
    let nest = !calls.is_empty() && !rets.is_empty();
    let len = if locals.is_empty() { len & !1 } else { len };
    let mut out = Vec::with_capacity(len);
    let mut open = 0usize;
    while out.len() < len {
        let left = len - out.len();
        let mut options = Vec::new();
        if open > 0 {
            options.push(Kind::Return);
        }
        if nest && open + 2 <= left {
            options.push(Kind::Call);
        }
        if !locals.is_empty() && open < left {
            options.push(Kind::Local);
        }
        if options.is_empty() {
            break;
        }
        let k = if left == open { Kind::Return } else { *options.choose(rng).expect("nonempty") };
        match k {
            Kind::Call => {
                out.push(pick(rng, &calls));
                open += 1;
            }
            Kind::Return => {
                out.push(pick(rng, &rets));
                open -= 1;
            }
            Kind::Local => out.push(pick(rng, &locals)),
        }
    }
    out
}

/// `u · v^ω` with `|u| ≤ max_u`, `1 ≤ |v| ≤ max_v`.
pub fn random_lasso(rng: &mut impl Rng, alpha: &PushdownAlphabet, max_u: usize, max_v: usize) -> LassoWord {
    let (lu, lv) = (rng.gen_range(0..=max_u), rng.gen_range(1..=max_v));
    let u = random_word(rng, alpha, lu);
    let v = random_word(rng, alpha, lv);
    LassoWord::new(u, v).expect("nonempty period")
}

/// A lasso whose period is well-matched.
pub fn random_restricted_lasso(rng: &mut impl Rng, alpha: &PushdownAlphabet, max_u: usize, max_v: usize) -> LassoWord {
    let lu = rng.gen_range(0..=max_u);
    let u = random_word(rng, alpha, lu);
    loop {
        let lv = rng.gen_range(1..=max_v.max(1));
        let v = random_well_matched(rng, alpha, lv);
        if !v.is_empty() {
            return LassoWord::new(u, v).expect("nonempty period");
        }
    }
}

fn random_command(rng: &mut impl Rng, n: usize) -> Command {
    let dir = if rng.gen_bool(0.35) { Direction::Jump } else { Direction::Direct };
    Command { dir, direct: rng.gen_range(0..n), jump: rng.gen_range(0..n) }
}

fn random_posbool(rng: &mut impl Rng, n: usize, depth: usize) -> PosBool {
    if depth == 0 || rng.gen_bool(0.45) {
        return PosBool::leaf(random_command(rng, n));
    }
    let parts = (0..rng.gen_range(2..=3)).map(|_| random_posbool(rng, n, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        PosBool::and(parts)
    } else {
        PosBool::or(parts)
    }
}

/// A 1-AJA with `1..=max_states` states and random command formulas.
pub fn random_aja(rng: &mut impl Rng, alpha: &Arc<PushdownAlphabet>, max_states: usize) -> OneAja {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut a = OneAja::new(alpha.clone());
    for i in 0..n {
        a.add_state(format!("q{i}"), rng.gen_bool(0.5));
    }
    for q in 0..n {
        for s in alpha.symbols() {
            let f = random_posbool(rng, n, 2);
            a.set(q, s, f);
        }
    }
    a.set_initial(0);
    a
}

/// Boolean combination of literals over the alphabet's propositions.
pub fn random_propositional(rng: &mut impl Rng, props: &[String], size: usize) -> Formula {
    if size <= 1 || props.is_empty() {
        return match props.choose(rng) {
            Some(p) if rng.gen_bool(0.5) => Formula::atom(p),
            Some(p) => Formula::neg_atom(p),
            None => Formula::tt(),
        };
    }
    let l = rng.gen_range(1..size);
    let (a, b) = (random_propositional(rng, props, l), random_propositional(rng, props, size - l));
    if rng.gen_bool(0.5) {
        Formula::and(a, b)
    } else {
        Formula::or(a, b)
    }
}

/// Automaton with `1..=max_states` states and a single stack symbol.
/// With `tests`, some states get a propositional test.
pub fn random_tvpa(rng: &mut impl Rng, alpha: &PushdownAlphabet, name: &str, max_states: usize, tests: bool) -> Tvpa {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut vps = Vps {
        states: (0..n).map(|i| format!("s{i}")).collect(),
        stack_symbols: vec!["A".into()],
        calls: Vec::new(),
        returns: Vec::new(),
        locals: Vec::new(),
        initial: 0,
    };
    for from in 0..n {
        for sym in alpha.symbols() {
            for to in 0..n {
                if !rng.gen_bool(0.3) {
                    continue;
                }
                match alpha.kind(sym) {
                    Kind::Local => vps.locals.push(LocalRule { from, sym, to }),
                    Kind::Call => vps.calls.push(CallRule { from, sym, to, push: 0 }),
                    Kind::Return => {
                        let pop = if rng.gen_bool(0.7) { Some(0) } else { None };
                        vps.returns.push(ReturnRule { from, sym, pop, to });
                    }
                }
            }
        }
    }
    let mut finals: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if finals.is_empty() && rng.gen_bool(0.8) {
        finals.insert(rng.gen_range(0..n));
    }
    let props: Vec<String> = alpha.propositions().into_iter().collect();
    let mut t = BTreeMap::new();
    if tests {
        for q in 0..n {
            if rng.gen_bool(0.3) {
                let size = rng.gen_range(1..=2);
                t.insert(q, random_propositional(rng, &props, size));
            }
        }
    }
    Tvpa { name: name.into(), vps, finals, tests: t }
}

/// Generator of formulas with `|φ| ≤ max_size` (automaton states included)
/// over fresh random automata.
pub struct FormulaGen<'a> {
    pub alpha: &'a PushdownAlphabet,
    pub max_tvpa_states: usize,
    /// Allow propositional tests inside automata (test nesting one).
    pub tests: bool,
    /// Emit `¬` above modalities as well as at literals.
    pub negations: bool,
    counter: usize,
}

impl<'a> FormulaGen<'a> {
    pub fn new(alpha: &'a PushdownAlphabet) -> Self {
        FormulaGen { alpha, max_tvpa_states: 3, tests: true, negations: false, counter: 0 }
    }

    pub fn formula(&mut self, rng: &mut impl Rng, max_size: usize) -> Formula {
        let props: Vec<String> = self.alpha.propositions().into_iter().collect();
        loop {
            let size = rng.gen_range(1..=max_size.max(1));
            let f = self.gen(rng, &props, size);
            if crate::formula::formula_size(&f) <= max_size.max(1) {
                return f;
            }
        }
    }

    fn gen(&mut self, rng: &mut impl Rng, props: &[String], size: usize) -> Formula {
        if size <= 1 {
            return random_propositional(rng, props, 1);
        }
        match rng.gen_range(0..5) {
            0 if size >= 3 => {
                let l = rng.gen_range(1..size - 1);
                let (a, b) = (self.gen(rng, props, l), self.gen(rng, props, size - 1 - l));
                Formula::and(a, b)
            }
            1 if size >= 3 => {
                let l = rng.gen_range(1..size - 1);
                let (a, b) = (self.gen(rng, props, l), self.gen(rng, props, size - 1 - l));
                Formula::or(a, b)
            }
            2 if self.negations => Formula::not(self.gen(rng, props, size - 1)),
            3 => {
                let t = self.tvpa(rng);
                Formula::boxed(&t, self.gen(rng, props, size - 1))
            }
            _ => {
                let t = self.tvpa(rng);
                Formula::diamond(&t, self.gen(rng, props, size - 1))
            }
        }
    }

    fn tvpa(&mut self, rng: &mut impl Rng) -> Arc<Tvpa> {
        self.counter += 1;
        Arc::new(random_tvpa(rng, self.alpha, &format!("A{}", self.counter), self.max_tvpa_states, self.tests))
    }
}

/// Random game arena with at most `max_vertices` vertices. For each player
/// the product of the out-degrees of its vertices is kept at most
/// `max_strategies`.
pub fn random_game(rng: &mut impl Rng, max_vertices: usize, max_strategies: usize) -> BuchiGame {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let owner: Vec<Player> = (0..n).map(|_| if rng.gen_bool(0.5) { Player::Automaton } else { Player::Pathfinder }).collect();
    let accepting: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    let mut budgets = [max_strategies.max(1); 2];
    let mut succ = Vec::with_capacity(n);
    for v in 0..n {
        let mut deg = if rng.gen_bool(0.05) { 0 } else { rng.gen_range(1..=3) };
        let budget = &mut budgets[(owner[v] == Player::Pathfinder) as usize];
        while deg > 1 && *budget / deg == 0 {
            deg -= 1;
        }
        if deg > 1 {
            *budget /= deg;
        }
        let mut out: Vec<usize> = (0..deg).map(|_| rng.gen_range(0..n)).collect();
        out.sort_unstable();
        out.dedup();
        succ.push(out);
    }
    BuchiGame::new(owner, succ, accepting, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::is_well_matched;

    #[test]
    fn well_matched_words() {
        let a = test_alphabet();
        let mut r = rng(7);
        for len in 0..12 {
            for _ in 0..20 {
                let w = random_well_matched(&mut r, &a, len);
                assert!(is_well_matched(&a, &w), "{}", a.fmt_word(&w));
                assert_eq!(w.len(), len);
            }
        }
        let cr = PushdownAlphabet::new(&["c"], &["r"], &[]).unwrap();
        assert_eq!(random_well_matched(&mut r, &cr, 5).len(), 4);
    }

    #[test]
    fn restricted_lassos_split() {
        let a = test_alphabet();
        let mut r = rng(1);
        for _ in 0..50 {
            let w = random_restricted_lasso(&mut r, &a, 6, 6);
            assert!(w.well_matched_split(&a).is_some());
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = Arc::new(test_alphabet());
        let x = random_aja(&mut rng(3), &a, 4).dump();
        let y = random_aja(&mut rng(3), &a, 4).dump();
        assert_eq!(x, y);
        let f = FormulaGen::new(&a).formula(&mut rng(9), 10);
        let g = FormulaGen::new(&a).formula(&mut rng(9), 10);
        assert_eq!(f.to_string(), g.to_string());
        assert!(crate::formula::formula_size(&f) <= 10 && f.test_depth() <= 1);
    }

    #[test]
    fn games_respect_strategy_budget() {
        let mut r = rng(5);
        for _ in 0..50 {
            let g = random_game(&mut r, 30, 4096);
            for p in [Player::Automaton, Player::Pathfinder] {
                let product: usize = (0..g.user_vertices()).filter(|v| g.owner(*v) == p).map(|v| g.successors(v).len()).product();
                assert!(product <= 4096);
            }
        }
    }
}
