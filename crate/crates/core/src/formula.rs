//! Formula syntax, parsing, negation normal form, closure and size.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::alphabet::PushdownAlphabet;
use crate::error::{Error, Result};
use crate::syntax::{Cursor, Tok, Token};
use crate::vps::{finish_system, parse_raw_system, RawSystem, System, Tvpa};

/// Proposition reserved for the `true`/`false` shorthands; no symbol carries it.
pub const RESERVED_PROP: &str = "$tt";

/// Shared handle to a named automaton inside a formula.
#[derive(Debug, Clone)]
pub struct TvpaRef(pub Arc<Tvpa>);

impl PartialEq for TvpaRef {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for TvpaRef {}

impl Hash for TvpaRef {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.hash(h)
    }
}

impl std::ops::Deref for TvpaRef {
    type Target = Tvpa;
    fn deref(&self) -> &Tvpa {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    NegAtom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Diamond(TvpaRef, Arc<Formula>),
    Box(TvpaRef, Arc<Formula>),
}

impl Formula {
    pub fn atom(p: &str) -> Self {
        Formula::Atom(p.into())
    }

    pub fn neg_atom(p: &str) -> Self {
        Formula::NegAtom(p.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn diamond(a: &Arc<Tvpa>, f: Formula) -> Self {
        Formula::Diamond(TvpaRef(a.clone()), Arc::new(f))
    }

    pub fn boxed(a: &Arc<Tvpa>, f: Formula) -> Self {
        Formula::Box(TvpaRef(a.clone()), Arc::new(f))
    }

    pub fn tt() -> Self {
        Formula::or(Formula::atom(RESERVED_PROP), Formula::neg_atom(RESERVED_PROP))
    }

    pub fn ff() -> Self {
        Formula::and(Formula::atom(RESERVED_PROP), Formula::neg_atom(RESERVED_PROP))
    }

    pub fn is_tt(&self) -> bool {
        *self == Formula::tt()
    }

    pub fn is_ff(&self) -> bool {
        *self == Formula::ff()
    }

    /// Direct subformulas, not counting tests inside automata.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::Not(f) | Formula::Diamond(_, f) | Formula::Box(_, f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
        }
    }

    /// Direct subformulas including the tests of a modality's automaton.
    pub fn dependencies(&self) -> Vec<&Formula> {
        let mut out = self.children();
        if let Formula::Diamond(a, _) | Formula::Box(a, _) = self {
            out.extend(a.tests.values());
        }
        out
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(_) => false,
            _ => self.children().into_iter().all(Formula::is_nnf),
        }
    }

    /// Largest number of nested test levels.
    pub fn test_depth(&self) -> usize {
        let own = match self {
            Formula::Diamond(a, _) | Formula::Box(a, _) => {
                a.tests.values().map(|t| 1 + t.test_depth()).max().unwrap_or(0)
            }
            _ => 0,
        };
        self.children().into_iter().map(Formula::test_depth).max().unwrap_or(0).max(own)
    }
}

/// Pushes negations down to atoms; modalities flip by duality.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match (f, neg) {
        (Formula::Atom(p), false) | (Formula::NegAtom(p), true) => Formula::Atom(p.clone()),
        (Formula::Atom(p), true) | (Formula::NegAtom(p), false) => Formula::NegAtom(p.clone()),
        (Formula::Not(g), _) => nnf(g, !neg),
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => Formula::and(nnf(a, neg), nnf(b, neg)),
        (Formula::Or(a, b), false) | (Formula::And(a, b), true) => Formula::or(nnf(a, neg), nnf(b, neg)),
        (Formula::Diamond(a, g), false) | (Formula::Box(a, g), true) => Formula::Diamond(a.clone(), Arc::new(nnf(g, neg))),
        (Formula::Box(a, g), false) | (Formula::Diamond(a, g), true) => Formula::Box(a.clone(), Arc::new(nnf(g, neg))),
    }
}

/// All subformulas, tests included, each listed once after everything it
/// depends on.
pub fn closure(f: &Formula) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    fn go(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        if seen.contains(f) {
            return;
        }
        for d in f.dependencies() {
            go(d, seen, out);
        }
        seen.insert(f.clone());
        out.push(f.clone());
    }
    go(f, &mut seen, &mut out);
    out
}

/// `|cl(φ)|` plus the state counts of the automata, once per occurrence.
pub fn formula_size(f: &Formula) -> usize {
    fn states(f: &Formula) -> usize {
        let own = match f {
            Formula::Diamond(a, _) | Formula::Box(a, _) => a.state_count() + a.tests.values().map(states).sum::<usize>(),
            _ => 0,
        };
        own + f.children().into_iter().map(states).sum::<usize>()
    }
    closure(f).len() + states(f)
}

/// Stable identifier of a subformula within one closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(pub u32);

/// Hash-consed closure: identical subformulas share an id and ids are
/// ordered so that dependencies come first.
#[derive(Debug, Clone)]
pub struct FormulaTable {
    list: Vec<Formula>,
    ids: HashMap<Formula, FormulaId>,
}

impl FormulaTable {
    pub fn new(root: &Formula) -> Self {
        let list = closure(root);
        let ids = list.iter().enumerate().map(|(i, f)| (f.clone(), FormulaId(i as u32))).collect();
        FormulaTable { list, ids }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn id(&self, f: &Formula) -> Option<FormulaId> {
        self.ids.get(f).copied()
    }

    pub fn get(&self, id: FormulaId) -> &Formula {
        &self.list[id.0 as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (FormulaId, &Formula)> {
        self.list.iter().enumerate().map(|(i, f)| (FormulaId(i as u32), f))
    }
}

fn needs_parens(f: &Formula) -> bool {
    matches!(f, Formula::And(..) | Formula::Or(..)) && !f.is_tt() && !f.is_ff()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tt() {
            return write!(f, "true");
        }
        if self.is_ff() {
            return write!(f, "false");
        }
        let wrap = |g: &Formula| if needs_parens(g) { format!("({g})") } else { g.to_string() };
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "!{p}"),
            Formula::Not(g) => write!(f, "!{}", wrap(g)),
            Formula::And(a, b) => {
                let side = |g: &Formula| if matches!(g, Formula::Or(..)) && !g.is_tt() { format!("({g})") } else { g.to_string() };
                write!(f, "{} & {}", side(a), side(b))
            }
            Formula::Or(a, b) => write!(f, "{} | {}", a, b),
            Formula::Diamond(a, g) => write!(f, "<{}> {}", a.name, wrap(g)),
            Formula::Box(a, g) => write!(f, "[{}] {}", a.name, wrap(g)),
        }
    }
}

/// Named automata available to formulas, over one fixed alphabet.
#[derive(Debug, Clone)]
pub struct TvpaLibrary {
    pub alphabet: PushdownAlphabet,
    automata: BTreeMap<String, Arc<Tvpa>>,
}

impl TvpaLibrary {
    pub fn new(alphabet: PushdownAlphabet) -> Self {
        TvpaLibrary { alphabet, automata: BTreeMap::new() }
    }

    pub fn insert(&mut self, a: Tvpa) -> Arc<Tvpa> {
        let a = Arc::new(a);
        self.automata.insert(a.name.clone(), a.clone());
        a
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Tvpa>> {
        self.automata.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.automata.keys()
    }

    /// Parses an automaton in the system text format and adds it under `name`.
    pub fn define(&mut self, name: &str, text: &str) -> Result<Arc<Tvpa>> {
        let mut cur = Cursor::new(text)?;
        let raw = parse_raw_system(&mut cur, &self.alphabet)?;
        let t = tvpa_from_raw(raw, name, &self.alphabet, self)?;
        Ok(self.insert(t))
    }

    pub fn parse(&self, text: &str) -> Result<Formula> {
        parse_formula(text, self)
    }
}

fn tvpa_from_raw(raw: RawSystem, name: &str, alpha: &PushdownAlphabet, lib: &TvpaLibrary) -> Result<Tvpa> {
    let mut raw = raw;
    if raw.finals.is_none() {
        raw.finals = Some(Default::default());
    }
    match finish_system(raw, name, alpha, lib)? {
        System::Tvpa(t) => Ok(t),
        System::Vps(_) => unreachable!("finals are always present here"),
    }
}

/// Parses formula text against a library of named automata.
pub fn parse_formula(text: &str, library: &TvpaLibrary) -> Result<Formula> {
    let cur = Cursor::new(text)?;
    parse_formula_cursor(cur, &library.alphabet, library)
}

pub(crate) fn parse_formula_tokens(toks: Vec<Token>, alpha: &PushdownAlphabet, library: &TvpaLibrary) -> Result<Formula> {
    parse_formula_cursor(Cursor::from_tokens(toks), alpha, library)
}

fn parse_formula_cursor(mut cur: Cursor, alpha: &PushdownAlphabet, library: &TvpaLibrary) -> Result<Formula> {
    let props = alpha.propositions();
    let mut p = FormulaParser { cur: &mut cur, library, props: &props };
    let f = p.or()?;
    p.cur.eat_punct(';');
    if !p.cur.at_eof() {
        return p.cur.error(format!("unexpected {}", crate::syntax::describe(p.cur.peek())));
    }
    Ok(f)
}

struct FormulaParser<'a> {
    cur: &'a mut Cursor,
    library: &'a TvpaLibrary,
    props: &'a std::collections::BTreeSet<String>,
}

impl FormulaParser<'_> {
    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.cur.eat_punct('|') {
            let g = self.and()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.cur.eat_punct('&') {
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn automaton(&mut self, close: char) -> Result<TvpaRef> {
        let (line, col) = self.cur.here();
        let name = self.cur.ident()?;
        self.cur.expect_punct(close)?;
        match self.library.get(&name) {
            Some(a) => Ok(TvpaRef(a.clone())),
            None => Err(Error::Syntax { line, col, msg: format!("unknown automaton `{name}`") }),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.cur.eat_punct('!') {
            return Ok(Formula::not(self.unary()?));
        }
        if self.cur.eat_punct('<') {
            let a = self.automaton('>')?;
            return Ok(Formula::Diamond(a, Arc::new(self.unary()?)));
        }
        if self.cur.eat_punct('[') {
            let a = self.automaton(']')?;
            return Ok(Formula::Box(a, Arc::new(self.unary()?)));
        }
        if self.cur.eat_punct('(') {
            let f = self.or()?;
            self.cur.expect_punct(')')?;
            return Ok(f);
        }
        let (line, col) = self.cur.here();
        match self.cur.peek().clone() {
            Tok::Ident(s) => {
                self.cur.next();
                match s.as_str() {
                    "true" => Ok(Formula::tt()),
                    "false" => Ok(Formula::ff()),
                    _ if self.props.contains(&s) => Ok(Formula::atom(&s)),
                    _ => Err(Error::Syntax { line, col, msg: format!("proposition `{s}` is not carried by any symbol of the alphabet") }),
                }
            }
            other => self.cur.error(format!("expected a formula, found {}", crate::syntax::describe(&other))),
        }
    }
}

/// Contents of a formula file: an optional inline alphabet, named automata,
/// and the formula itself.
#[derive(Debug, Clone)]
pub struct FormulaFile {
    pub library: TvpaLibrary,
    pub formula: Formula,
    pub declared_alphabet: bool,
}

/// Reads `alphabet { ... }` and `automaton Name { ... }` blocks followed by
/// the formula text. `alphabet` supplies the alphabet when the file has none.
pub fn parse_formula_file(text: &str, alphabet: Option<&PushdownAlphabet>) -> Result<FormulaFile> {
    let mut cur = Cursor::new(text)?;
    let mut inline: Option<PushdownAlphabet> = None;
    let mut blocks: Vec<(String, Vec<Token>, (usize, usize))> = Vec::new();
    loop {
        if matches!(cur.peek(), Tok::Ident(s) if s == "alphabet") && cur.peek_at(1) == &Tok::Punct('{') {
            cur.next();
            let toks = cur.take_block()?;
            let mut sub = Cursor::from_tokens(toks);
            inline = Some(PushdownAlphabet::parse_items(&mut sub)?);
            continue;
        }
        if matches!(cur.peek(), Tok::Ident(s) if s == "automaton") && matches!(cur.peek_at(1), Tok::Ident(_)) {
            let at = cur.here();
            cur.next();
            let name = cur.ident()?;
            let toks = cur.take_block()?;
            if blocks.iter().any(|(n, _, _)| *n == name) {
                return Err(Error::Syntax { line: at.0, col: at.1, msg: format!("automaton `{name}` defined twice") });
            }
            blocks.push((name, toks, at));
            continue;
        }
        break;
    }
    let rest = cur.rest();
    let declared_alphabet = inline.is_some();
    let alpha = match (inline, alphabet) {
        (Some(a), Some(b)) if a != *b => return Err(Error::input("the file's alphabet differs from the given alphabet")),
        (Some(a), _) => a,
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(Error::input("no alphabet given (use an `alphabet { ... }` block or -a)")),
    };
    let mut library = TvpaLibrary::new(alpha.clone());
    let mut raws: BTreeMap<String, RawSystem> = BTreeMap::new();
    for (name, toks, _) in &blocks {
        let mut sub = Cursor::from_tokens(toks.clone());
        raws.insert(name.clone(), parse_raw_system(&mut sub, &alpha)?);
    }
    // Automata are added once everything their tests mention is defined.
    let mut state: BTreeMap<String, u8> = BTreeMap::new();
    fn visit(
        name: &str,
        raws: &BTreeMap<String, RawSystem>,
        state: &mut BTreeMap<String, u8>,
        lib: &mut TvpaLibrary,
        alpha: &PushdownAlphabet,
    ) -> Result<()> {
        match state.get(name) {
            Some(2) => return Ok(()),
            Some(1) => return Err(Error::input(format!("automaton `{name}` depends on itself through its tests"))),
            _ => {}
        }
        state.insert(name.to_string(), 1);
        let raw = &raws[name];
        for toks in raw.test_tokens() {
            let mut prev_angle = false;
            for t in toks {
                if let Tok::Ident(s) = &t.tok {
                    if prev_angle && raws.contains_key(s) {
                        visit(s, raws, state, lib, alpha)?;
                    }
                }
                prev_angle = matches!(t.tok, Tok::Punct('<') | Tok::Punct('['));
            }
        }
        let t = tvpa_from_raw(raw.clone(), name, alpha, lib)?;
        lib.insert(t);
        state.insert(name.to_string(), 2);
        Ok(())
    }
    for (name, _, _) in &blocks {
        visit(name, &raws, &mut state, &mut library, &alpha)?;
    }
    let formula = parse_formula_tokens(rest, &alpha, &library)?;
    Ok(FormulaFile { library, formula, declared_alphabet })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> PushdownAlphabet {
        PushdownAlphabet::new(&["c"], &["r"], &["l", "m"]).unwrap().with_props("m", &["p", "q"]).unwrap()
    }

    fn lib() -> TvpaLibrary {
        let mut lib = TvpaLibrary::new(alpha());
        lib.define("A", "states: a b; initial: a; final: b; a -l-> b;").unwrap();
        lib.define("B", "states: x; initial: x; final: x; test x: q;").unwrap();
        lib.define("Asum", "states: s; initial: s; final: s; s -l-> s;").unwrap();
        lib
    }

    #[test]
    fn parse_examples() {
        let lib = lib();
        let f = lib.parse("p & !q").unwrap();
        assert_eq!(f, Formula::and(Formula::atom("p"), Formula::not(Formula::atom("q"))));
        let f = lib.parse("<Asum> p").unwrap();
        assert_eq!(f, Formula::diamond(lib.get("Asum").unwrap(), Formula::atom("p")));
        let f = lib.parse("[A](<B> p | q)").unwrap();
        let want = Formula::boxed(
            lib.get("A").unwrap(),
            Formula::or(Formula::diamond(lib.get("B").unwrap(), Formula::atom("p")), Formula::atom("q")),
        );
        assert_eq!(f, want);
        assert!(lib.parse("p | q & p").unwrap() == Formula::or(Formula::atom("p"), Formula::and(Formula::atom("q"), Formula::atom("p"))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let lib = lib();
        match lib.parse("p &\n  <Nope> q") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(lib.parse("p & & q"), Err(Error::Syntax { .. })));
        assert!(lib.parse("zz").is_err());
    }

    #[test]
    fn nnf_examples() {
        let lib = lib();
        let a = lib.get("A").unwrap();
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        assert_eq!(to_nnf(&Formula::not(Formula::and(p.clone(), q.clone()))), Formula::or(Formula::neg_atom("p"), Formula::neg_atom("q")));
        assert_eq!(to_nnf(&Formula::not(Formula::diamond(a, p.clone()))), Formula::boxed(a, Formula::neg_atom("p")));
        assert_eq!(to_nnf(&Formula::not(Formula::not(p.clone()))), p);
        let f = lib.parse("!([A](<B> p | !q) & !true)").unwrap();
        let n = to_nnf(&f);
        assert!(n.is_nnf());
        assert_eq!(to_nnf(&n), n);
    }

    #[test]
    fn closure_and_size() {
        let lib = lib();
        let p = Formula::atom("p");
        assert_eq!(closure(&p), vec![p.clone()]);
        let pq = Formula::and(p.clone(), Formula::atom("q"));
        assert_eq!(closure(&pq).len(), 3);
        let bx = Formula::boxed(lib.get("B").unwrap(), p.clone());
        let cl = closure(&bx);
        assert_eq!(cl.len(), 3);
        assert!(cl.contains(&Formula::atom("q")));
        assert_eq!(formula_size(&p), 1);
        assert_eq!(formula_size(&Formula::boxed(lib.get("A").unwrap(), p.clone())), 4);
        assert_eq!(formula_size(&Formula::and(p.clone(), p.clone())), 2);
        let t = FormulaTable::new(&bx);
        assert_eq!(t.get(t.id(&bx).unwrap()), &bx);
        assert!(t.id(&p).unwrap() < t.id(&bx).unwrap());
    }

    #[test]
    fn display_round_trip() {
        let lib = lib();
        for s in ["p & !q", "<Asum> p", "[A] (<B> p | q)", "!(p | q) & true", "false | [A] !p"] {
            let f = lib.parse(s).unwrap();
            assert_eq!(lib.parse(&f.to_string()).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn formula_files() {
        let text = "
            alphabet { calls: c; returns: r; locals: l m; props m = {p}; }
            automaton T { states: t; initial: t; final: t; test t: <U> p; }
            automaton U { states: u; initial: u; final: u; u -l-> u; }
            [T] p
        ";
        let ff = parse_formula_file(text, None).unwrap();
        assert!(ff.declared_alphabet);
        assert_eq!(ff.formula.test_depth(), 1);
        let cyclic = "
            alphabet { calls: c; returns: r; locals: m; props m = {p}; }
            automaton T { states: t; initial: t; final: t; test t: <T> p; }
            p
        ";
        assert!(parse_formula_file(cyclic, None).is_err());
        assert!(parse_formula_file("p", None).is_err());
    }
}
