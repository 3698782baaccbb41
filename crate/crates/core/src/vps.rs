//! Visibly pushdown systems and testing visibly pushdown automata.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use crate::alphabet::{Kind, PushdownAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::formula::{Formula, TvpaLibrary};
use crate::syntax::{Cursor, Tok, Token};

/// Stack symbol index into `Vps::stack_symbols`. The bottom marker is not a
/// stack symbol; pops of the bottom marker are written with `None`.
pub type StackSym = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRule {
    pub from: usize,
    pub sym: Symbol,
    pub to: usize,
    pub push: StackSym,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnRule {
    pub from: usize,
    pub sym: Symbol,
    /// `None` pops the bottom marker, which stays in place.
    pub pop: Option<StackSym>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    pub from: usize,
    pub sym: Symbol,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vps {
    pub states: Vec<String>,
    pub stack_symbols: Vec<String>,
    pub calls: Vec<CallRule>,
    pub returns: Vec<ReturnRule>,
    pub locals: Vec<LocalRule>,
    pub initial: usize,
}

/// A configuration `(q, γ⊥)`; the stack lists symbols bottom first and the
/// bottom marker itself is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub stack: Vec<StackSym>,
}

impl Vps {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration { state: self.initial, stack: Vec::new() }
    }

    /// One labeled step of the configuration graph.
    pub fn successors(&self, alpha: &PushdownAlphabet, cfg: &Configuration, a: Symbol) -> Vec<Configuration> {
        let mut out = Vec::new();
        match alpha.kind(a) {
            Kind::Call => {
                for r in self.calls.iter().filter(|r| r.from == cfg.state && r.sym == a) {
                    let mut stack = cfg.stack.clone();
                    stack.push(r.push);
                    out.push(Configuration { state: r.to, stack });
                }
            }
            Kind::Return => {
                let top = cfg.stack.last().copied();
                for r in self.returns.iter().filter(|r| r.from == cfg.state && r.sym == a && r.pop == top) {
                    let mut stack = cfg.stack.clone();
                    stack.pop();
                    out.push(Configuration { state: r.to, stack });
                }
            }
            Kind::Local => {
                for r in self.locals.iter().filter(|r| r.from == cfg.state && r.sym == a) {
                    out.push(Configuration { state: r.to, stack: cfg.stack.clone() });
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn validate(&self, alpha: &PushdownAlphabet) -> Result<()> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(Error::input("initial state out of range"));
        }
        let g = self.stack_symbols.len();
        let bad = |q: usize| q >= n;
        for r in &self.calls {
            if bad(r.from) || bad(r.to) || r.push as usize >= g || alpha.kind(r.sym) != Kind::Call {
                return Err(Error::input("malformed call transition"));
            }
        }
        for r in &self.returns {
            if bad(r.from) || bad(r.to) || r.pop.is_some_and(|p| p as usize >= g) || alpha.kind(r.sym) != Kind::Return {
                return Err(Error::input("malformed return transition"));
            }
        }
        for r in &self.locals {
            if bad(r.from) || bad(r.to) || alpha.kind(r.sym) != Kind::Local {
                return Err(Error::input("malformed local transition"));
            }
        }
        Ok(())
    }

    /// Whether `prefix · period^ω` labels an infinite run. Configurations are
    /// tracked exactly; once the stack height at period boundaries stops
    /// changing, repetition of the boundary configuration set closes the loop.
    pub fn accepts_trace(&self, alpha: &PushdownAlphabet, prefix: &[Symbol], period: &[Symbol], max_periods: usize) -> bool {
        let mut cur: BTreeSet<Configuration> = [self.initial_configuration()].into_iter().collect();
        for s in prefix {
            cur = cur.iter().flat_map(|c| self.successors(alpha, c, *s)).collect();
            if cur.is_empty() {
                return false;
            }
        }
        let mut seen: Vec<BTreeSet<Configuration>> = Vec::new();
        for _ in 0..max_periods {
            if seen.contains(&cur) {
                return true;
            }
            seen.push(cur.clone());
            for s in period {
                cur = cur.iter().flat_map(|c| self.successors(alpha, c, *s)).collect();
                if cur.is_empty() {
                    return false;
                }
            }
        }
        !cur.is_empty()
    }

    pub fn to_text(&self, alpha: &PushdownAlphabet) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "states: {};", self.states.join(" "));
        let _ = writeln!(s, "initial: {};", self.states[self.initial]);
        self.write_rules(alpha, &mut s);
        s
    }

    fn write_rules(&self, alpha: &PushdownAlphabet, s: &mut String) {
        for r in &self.calls {
            let _ = writeln!(
                s,
                "{} -{} push {}-> {};",
                self.states[r.from],
                alpha.name(r.sym),
                self.stack_symbols[r.push as usize],
                self.states[r.to]
            );
        }
        for r in &self.returns {
            let pop = match r.pop {
                Some(p) => self.stack_symbols[p as usize].as_str(),
                None => "bot",
            };
            let _ = writeln!(s, "{} -{} pop {}-> {};", self.states[r.from], alpha.name(r.sym), pop, self.states[r.to]);
        }
        for r in &self.locals {
            let _ = writeln!(s, "{} -{}-> {};", self.states[r.from], alpha.name(r.sym), self.states[r.to]);
        }
    }
}

/// A system with final states and state tests. States without an entry in
/// `tests` carry the trivial test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tvpa {
    pub name: String,
    pub vps: Vps,
    pub finals: BTreeSet<usize>,
    pub tests: BTreeMap<usize, Formula>,
}

impl Hash for Tvpa {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.name.hash(h);
        self.vps.states.len().hash(h);
    }
}

impl Tvpa {
    pub fn state_count(&self) -> usize {
        self.vps.states.len()
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn test(&self, q: usize) -> Option<&Formula> {
        self.tests.get(&q)
    }

    /// All runs on `w` from `(q0, ⊥)`, each reported as its last state and
    /// the visited state sequence.
    pub fn run_relation(
        &self,
        alpha: &PushdownAlphabet,
        w: &[Symbol],
        q0: usize,
        cap: usize,
    ) -> Result<Vec<(usize, Vec<usize>)>> {
        alpha.check_word(w)?;
        let mut runs: Vec<(Configuration, Vec<usize>)> = vec![(Configuration { state: q0, stack: Vec::new() }, vec![q0])];
        for s in w {
            let mut next = Vec::new();
            for (cfg, trace) in &runs {
                for c in self.vps.successors(alpha, cfg, *s) {
                    let mut t = trace.clone();
                    t.push(c.state);
                    next.push((c, t));
                    if next.len() > cap {
                        return Err(Error::resource("run enumeration", cap));
                    }
                }
            }
            runs = next;
        }
        let mut out: Vec<(usize, Vec<usize>)> = runs.into_iter().map(|(c, t)| (c.state, t)).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn to_text(&self, alpha: &PushdownAlphabet) -> String {
        let v = &self.vps;
        let mut s = String::new();
        let _ = writeln!(s, "states: {};", v.states.join(" "));
        let _ = writeln!(s, "initial: {};", v.states[v.initial]);
        let finals: Vec<&str> = self.finals.iter().map(|q| v.states[*q].as_str()).collect();
        let _ = writeln!(s, "final: {};", finals.join(" "));
        v.write_rules(alpha, &mut s);
        for (q, t) in &self.tests {
            let _ = writeln!(s, "test {}: {};", v.states[*q], t);
        }
        s
    }
}

/// Result of reading a system description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    Vps(Vps),
    Tvpa(Tvpa),
}

/// A system description whose test formulas are still unparsed.
#[derive(Debug, Clone)]
pub(crate) struct RawSystem {
    pub vps: Vps,
    pub finals: Option<BTreeSet<usize>>,
    pub tests: Vec<(usize, Vec<Token>)>,
}

impl RawSystem {
    pub fn test_tokens(&self) -> impl Iterator<Item = &Vec<Token>> {
        self.tests.iter().map(|(_, t)| t)
    }
}

/// Reads the system text format. Tests may use atoms and the automata of
/// `library`.
pub fn parse_system(text: &str, alpha: &PushdownAlphabet, library: &TvpaLibrary) -> Result<System> {
    let mut cur = Cursor::new(text)?;
    let raw = parse_raw_system(&mut cur, alpha)?;
    finish_system(raw, "S", alpha, library)
}

pub(crate) fn finish_system(raw: RawSystem, name: &str, alpha: &PushdownAlphabet, library: &TvpaLibrary) -> Result<System> {
    if raw.finals.is_none() && raw.tests.is_empty() {
        return Ok(System::Vps(raw.vps));
    }
    let mut tests = BTreeMap::new();
    for (q, toks) in raw.tests {
        let f = crate::formula::parse_formula_tokens(toks, alpha, library)?;
        if tests.insert(q, f).is_some() {
            return Err(Error::input(format!("state `{}` has two tests", raw.vps.states[q])));
        }
    }
    Ok(System::Tvpa(Tvpa { name: name.to_string(), vps: raw.vps, finals: raw.finals.unwrap_or_default(), tests }))
}

pub(crate) fn parse_raw_system(cur: &mut Cursor, alpha: &PushdownAlphabet) -> Result<RawSystem> {
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<(String, (usize, usize))> = None;
    let mut finals_raw: Option<(Vec<String>, (usize, usize))> = None;
    let mut stack_decl: Option<Vec<String>> = None;
    enum R {
        Call(String, String, String, String),
        Ret(String, String, String, String),
        Loc(String, String, String),
    }
    let mut rules: Vec<(R, (usize, usize))> = Vec::new();
    let mut tests_raw: Vec<(String, Vec<Token>, (usize, usize))> = Vec::new();

    while !cur.at_eof() {
        let at = cur.here();
        let head = cur.ident()?;
        if cur.peek() == &Tok::Punct(':') && matches!(head.as_str(), "states" | "initial" | "final" | "stack") {
            cur.next();
            match head.as_str() {
                "states" => states = Some(cur.ident_list()?),
                "initial" => {
                    let q = cur.ident()?;
                    cur.expect_punct(';')?;
                    initial = Some((q, at));
                }
                "final" => finals_raw = Some((cur.ident_list()?, at)),
                _ => stack_decl = Some(cur.ident_list()?),
            }
            continue;
        }
        if head == "test" {
            let q = cur.ident()?;
            cur.expect_punct(':')?;
            let toks = cur.take_until_semicolon()?;
            tests_raw.push((q, toks, at));
            continue;
        }
        // transition: q -a [push X | pop X]-> q'
        cur.expect_punct('-')?;
        let sym = cur.ident()?;
        let rule = if cur.eat_keyword("push") {
            let x = cur.ident()?;
            cur.expect_arrow()?;
            let to = cur.ident()?;
            R::Call(head, sym, x, to)
        } else if cur.eat_keyword("pop") {
            let x = cur.ident()?;
            cur.expect_arrow()?;
            let to = cur.ident()?;
            R::Ret(head, sym, x, to)
        } else {
            cur.expect_arrow()?;
            let to = cur.ident()?;
            R::Loc(head, sym, to)
        };
        cur.expect_punct(';')?;
        rules.push((rule, at));
    }

    let err = |at: (usize, usize), msg: String| Error::Syntax { line: at.0, col: at.1, msg };
    let states = states.ok_or_else(|| Error::input("system lacks a `states:` line"))?;
    if states.is_empty() {
        return Err(Error::input("system has no states"));
    }
    let mut sidx = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if sidx.insert(s.clone(), i).is_some() {
            return Err(Error::input(format!("state `{s}` declared twice")));
        }
    }
    let state = |name: &str, at: (usize, usize)| -> Result<usize> {
        sidx.get(name).copied().ok_or_else(|| err(at, format!("unknown state `{name}`")))
    };
    let (iname, iat) = initial.ok_or_else(|| Error::input("system lacks an `initial:` line"))?;
    let initial = state(&iname, iat)?;

    let mut stack_symbols: Vec<String> = stack_decl.unwrap_or_default();
    if stack_symbols.iter().any(|g| g == "bot") {
        return Err(Error::input("`bot` is the bottom marker and cannot be declared"));
    }
    let gamma = |g: &str, stack_symbols: &mut Vec<String>| -> StackSym {
        match stack_symbols.iter().position(|x| x == g) {
            Some(i) => i as StackSym,
            None => {
                stack_symbols.push(g.to_string());
                (stack_symbols.len() - 1) as StackSym
            }
        }
    };
    let symbol = |name: &str, kind: Kind, at: (usize, usize)| -> Result<Symbol> {
        let s = alpha.get(name).ok_or_else(|| err(at, format!("unknown symbol `{name}`")))?;
        if alpha.kind(s) != kind {
            let k = match alpha.kind(s) {
                Kind::Call => "a call",
                Kind::Return => "a return",
                Kind::Local => "a local",
            };
            let want = match kind {
                Kind::Call => "push",
                Kind::Return => "pop",
                Kind::Local => "plain",
            };
            return Err(err(at, format!("symbol `{name}` is {k} and cannot label a {want} transition")));
        }
        Ok(s)
    };
    let mut vps = Vps { states: states.clone(), stack_symbols: Vec::new(), calls: vec![], returns: vec![], locals: vec![], initial };
    for (r, at) in rules {
        match r {
            R::Call(f, a, x, t) => {
                if x == "bot" {
                    return Err(err(at, "the bottom marker cannot be pushed".into()));
                }
                let push = gamma(&x, &mut stack_symbols);
                vps.calls.push(CallRule { from: state(&f, at)?, sym: symbol(&a, Kind::Call, at)?, to: state(&t, at)?, push });
            }
            R::Ret(f, a, x, t) => {
                let pop = if x == "bot" { None } else { Some(gamma(&x, &mut stack_symbols)) };
                vps.returns.push(ReturnRule { from: state(&f, at)?, sym: symbol(&a, Kind::Return, at)?, pop, to: state(&t, at)? });
            }
            R::Loc(f, a, t) => {
                vps.locals.push(LocalRule { from: state(&f, at)?, sym: symbol(&a, Kind::Local, at)?, to: state(&t, at)? });
            }
        }
    }
    vps.stack_symbols = stack_symbols;
    let finals = match finals_raw {
        Some((names, at)) => Some(names.iter().map(|n| state(n, at)).collect::<Result<BTreeSet<_>>>()?),
        None => None,
    };
    let mut tests = Vec::new();
    let mut seen = HashSet::new();
    for (q, toks, at) in tests_raw {
        let qi = state(&q, at)?;
        if !seen.insert(qi) {
            return Err(err(at, format!("state `{q}` has two tests")));
        }
        tests.push((qi, toks));
    }
    Ok(RawSystem { vps, finals, tests })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crl() -> PushdownAlphabet {
        PushdownAlphabet::crl()
    }

    fn lib() -> TvpaLibrary {
        TvpaLibrary::new(crl())
    }

    fn vps(text: &str) -> Vps {
        match parse_system(text, &crl(), &lib()).unwrap() {
            System::Vps(v) => v,
            System::Tvpa(_) => panic!("expected a plain system"),
        }
    }

    #[test]
    fn successor_rules() {
        let a = crl();
        let s = vps("states: q p; initial: q; q -c push A-> p; q -r pop bot-> p; p -l-> p;");
        let (c, r, l) = (a.lookup("c").unwrap(), a.lookup("r").unwrap(), a.lookup("l").unwrap());
        let q0 = s.initial_configuration();
        assert_eq!(s.successors(&a, &q0, c), vec![Configuration { state: 1, stack: vec![0] }]);
        assert_eq!(s.successors(&a, &q0, r), vec![Configuration { state: 1, stack: vec![] }]);
        let pa = Configuration { state: 0, stack: vec![0] };
        assert!(s.successors(&a, &pa, r).is_empty());
        let p = Configuration { state: 1, stack: vec![0] };
        assert_eq!(s.successors(&a, &p, l), vec![p.clone()]);
    }

    #[test]
    fn runs() {
        let a = crl();
        let text = "states: q0 q1 q2 q3; initial: q0; final: q3; q0 -c push A-> q1; q1 -l-> q2; q2 -r pop A-> q3;";
        let t = match parse_system(text, &a, &lib()).unwrap() {
            System::Tvpa(t) => t,
            _ => panic!(),
        };
        assert_eq!(t.run_relation(&a, &[], 0, 100).unwrap(), vec![(0, vec![0])]);
        let w = a.word("c l r").unwrap().0;
        assert_eq!(t.run_relation(&a, &w, 0, 100).unwrap(), vec![(3, vec![0, 1, 2, 3])]);
        let text = "states: q0 q1; initial: q0; final: q1; q0 -r pop bot-> q1;";
        let t = match parse_system(text, &a, &lib()).unwrap() {
            System::Tvpa(t) => t,
            _ => panic!(),
        };
        assert_eq!(t.run_relation(&a, &a.word("r").unwrap().0, 0, 100).unwrap(), vec![(1, vec![0, 1])]);
    }

    #[test]
    fn parse_errors() {
        let a = crl();
        let l = lib();
        assert!(parse_system("states: q; initial: q; q -l-> q;", &a, &l).is_ok());
        assert!(parse_system("states: q; initial: q; q -c push bot-> q;", &a, &l).is_err());
        assert!(parse_system("states: q; initial: q; q -r push A-> q;", &a, &l).is_err());
        assert!(parse_system("states: q; initial: p;", &a, &l).is_err());
        assert!(parse_system("states: q; initial: q; q -x-> q;", &a, &l).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let a = crl();
        let text = "states: a b c; initial: a; a -c push X-> b; b -l-> c; c -r pop X-> a; a -r pop bot-> a; b -c push Y-> b; b -r pop Y-> c;";
        let s = vps(text);
        let printed = s.to_text(&a);
        assert_eq!(vps(&printed), s);
        assert_eq!(vps(&printed).to_text(&a), printed);
    }

    #[test]
    fn traces() {
        let a = crl();
        let s = vps("states: q p; initial: q; q -c push A-> p; p -r pop A-> q;");
        let cr = a.word("c r").unwrap().0;
        assert!(s.accepts_trace(&a, &[], &cr, 8));
        assert!(!s.accepts_trace(&a, &[], &a.word("l").unwrap().0, 8));
    }
}
