//! Pushdown alphabets, finite and lasso words, stack heights and matching.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::Cursor;

/// Interned alphabet symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Call,
    Return,
    Local,
}

/// A finite alphabet partitioned into calls, returns and locals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushdownAlphabet {
    names: Vec<String>,
    kinds: Vec<Kind>,
    props: Vec<BTreeSet<String>>,
    index: BTreeMap<String, Symbol>,
}

impl PushdownAlphabet {
    pub fn new(calls: &[&str], returns: &[&str], locals: &[&str]) -> Result<Self> {
        let mut b = AlphabetBuilder::default();
        for c in calls {
            b.add(c, Kind::Call)?;
        }
        for r in returns {
            b.add(r, Kind::Return)?;
        }
        for l in locals {
            b.add(l, Kind::Local)?;
        }
        b.finish()
    }

    /// Alphabet with one call `c`, one return `r` and one local `l`.
    pub fn crl() -> Self {
        Self::new(&["c"], &["r"], &["l"]).expect("static alphabet")
    }

    pub fn with_props(mut self, sym: &str, props: &[&str]) -> Result<Self> {
        let s = self.lookup(sym)?;
        self.props[s.index()] = props.iter().map(|p| p.to_string()).collect();
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(|i| Symbol(i as u16))
    }

    pub fn symbols_of(&self, kind: Kind) -> Vec<Symbol> {
        self.symbols().filter(|s| self.kind(*s) == kind).collect()
    }

    pub fn kind(&self, s: Symbol) -> Kind {
        self.kinds[s.index()]
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn props(&self, s: Symbol) -> &BTreeSet<String> {
        &self.props[s.index()]
    }

    pub fn has_prop(&self, s: Symbol, p: &str) -> bool {
        self.props[s.index()].contains(p)
    }

    /// Every proposition carried by some symbol.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.props.iter().flatten().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<Symbol> {
        self.get(name).ok_or_else(|| Error::input(format!("symbol `{name}` is not in the alphabet")))
    }

    pub fn word(&self, text: &str) -> Result<FiniteWord> {
        text.split_whitespace().map(|n| self.lookup(n)).collect::<Result<Vec<_>>>().map(FiniteWord)
    }

    pub fn lasso(&self, prefix: &str, period: &str) -> Result<LassoWord> {
        LassoWord::new(self.word(prefix)?.0, self.word(period)?.0)
    }

    /// Reads `calls: c1 c2; returns: r1; locals: l1 l2;` plus optional
    /// `props c1 = {p, q};` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text)?;
        let a = Self::parse_items(&mut cur)?;
        if !cur.at_eof() {
            return cur.error("unexpected trailing input in alphabet");
        }
        Ok(a)
    }

    pub(crate) fn parse_items(cur: &mut Cursor) -> Result<Self> {
        let mut b = AlphabetBuilder::default();
        let mut props: Vec<(String, Vec<String>, (usize, usize))> = Vec::new();
        while !cur.at_eof() {
            let at = cur.here();
            let key = cur.ident()?;
            match key.as_str() {
                "calls" | "returns" | "locals" => {
                    cur.expect_punct(':')?;
                    let kind = match key.as_str() {
                        "calls" => Kind::Call,
                        "returns" => Kind::Return,
                        _ => Kind::Local,
                    };
                    for n in cur.ident_list()? {
                        b.add(&n, kind).map_err(|e| syntax_at(at, e))?;
                    }
                }
                "props" => {
                    let sym = cur.ident()?;
                    cur.expect_punct('=')?;
                    cur.expect_punct('{')?;
                    let mut ps = Vec::new();
                    while !cur.eat_punct('}') {
                        cur.eat_punct(',');
                        if cur.eat_punct('}') {
                            break;
                        }
                        ps.push(cur.ident()?);
                    }
                    cur.expect_punct(';')?;
                    props.push((sym, ps, at));
                }
                other => {
                    return Err(Error::Syntax {
                        line: at.0,
                        col: at.1,
                        msg: format!("unknown alphabet item `{other}`"),
                    })
                }
            }
        }
        let mut a = b.finish()?;
        for (sym, ps, at) in props {
            let s = a.lookup(&sym).map_err(|e| syntax_at(at, e))?;
            a.props[s.index()] = ps.into_iter().collect();
        }
        Ok(a)
    }

    /// Parses `u (v)^w` (also accepting `^ω`) or a plain finite word.
    pub fn parse_word_spec(&self, text: &str) -> Result<WordSpec> {
        let text = text.replace('ω', "w");
        let mut cur = Cursor::new(&text)?;
        let mut prefix = Vec::new();
        let mut period = None;
        while !cur.at_eof() {
            if cur.eat_punct('(') {
                let mut v = Vec::new();
                while !cur.eat_punct(')') {
                    let n = cur.ident()?;
                    v.push(self.lookup(&n)?);
                }
                cur.expect_punct('^')?;
                let w = cur.ident()?;
                if w != "w" {
                    return cur.error("expected `w` after `^`");
                }
                if !cur.at_eof() {
                    return cur.error("the periodic part must end the word");
                }
                period = Some(v);
                break;
            }
            let n = cur.ident()?;
            prefix.push(self.lookup(&n)?);
        }
        Ok(match period {
            Some(v) => WordSpec::Lasso(LassoWord::new(prefix, v)?),
            None => WordSpec::Finite(FiniteWord(prefix)),
        })
    }

    pub fn fmt_word(&self, w: &[Symbol]) -> String {
        w.iter().map(|s| self.name(*s)).collect::<Vec<_>>().join(" ")
    }

    pub fn fmt_lasso(&self, l: &LassoWord) -> String {
        let v = self.fmt_word(&l.period);
        if l.prefix.is_empty() {
            format!("({v})^w")
        } else {
            format!("{} ({v})^w", self.fmt_word(&l.prefix))
        }
    }

    pub fn check_word(&self, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|s| s.index() >= self.len()) {
            Some(s) => Err(Error::input(format!("symbol #{} is not in the alphabet", s.0))),
            None => Ok(()),
        }
    }
}

fn syntax_at(at: (usize, usize), e: Error) -> Error {
    Error::Syntax { line: at.0, col: at.1, msg: e.to_string() }
}

impl fmt::Display for PushdownAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, kind) in [("calls", Kind::Call), ("returns", Kind::Return), ("locals", Kind::Local)] {
            let names: Vec<&str> = self.symbols_of(kind).into_iter().map(|s| self.name(s)).collect();
            writeln!(f, "{key}: {};", names.join(" "))?;
        }
        for s in self.symbols() {
            if !self.props(s).is_empty() {
                let ps: Vec<&str> = self.props(s).iter().map(String::as_str).collect();
                writeln!(f, "props {} = {{{}}};", self.name(s), ps.join(", "))?;
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct AlphabetBuilder {
    names: Vec<String>,
    kinds: Vec<Kind>,
    index: HashMap<String, usize>,
}

impl AlphabetBuilder {
    fn add(&mut self, name: &str, kind: Kind) -> Result<()> {
        if name == "bot" {
            return Err(Error::input("`bot` is reserved and cannot name a symbol"));
        }
        if self.index.contains_key(name) {
            return Err(Error::input(format!("symbol `{name}` declared twice")));
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        self.kinds.push(kind);
        Ok(())
    }

    fn finish(self) -> Result<PushdownAlphabet> {
        if self.names.is_empty() {
            return Err(Error::input("alphabet has no symbols"));
        }
        if self.names.len() > u16::MAX as usize {
            return Err(Error::input("alphabet too large"));
        }
        let n = self.names.len();
        let index = self.index.into_iter().map(|(k, v)| (k, Symbol(v as u16))).collect();
        Ok(PushdownAlphabet { names: self.names, kinds: self.kinds, props: vec![BTreeSet::new(); n], index })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteWord(pub Vec<Symbol>);

impl FiniteWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordSpec {
    Finite(FiniteWord),
    Lasso(LassoWord),
}

/// Ultimately periodic word `prefix · period^ω`, kept canonical: the
/// period is primitive and the prefix is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl LassoWord {
    pub fn new(mut prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::input("the period of a lasso word must be nonempty"));
        }
        let mut period = primitive_root(&period).to_vec();
        while let (Some(a), Some(b)) = (prefix.last(), period.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(LassoWord { prefix, period })
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn take(&self, n: usize) -> Vec<Symbol> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    /// Number of position classes: one per prefix index and one per period index.
    pub fn class_count(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Positions with equal class carry equal suffixes.
    pub fn class(&self, i: usize) -> usize {
        let u = self.prefix.len();
        if i < u {
            i
        } else {
            u + (i - u) % self.period.len()
        }
    }

    /// Change of the call/return balance over one period.
    pub fn period_drift(&self, alpha: &PushdownAlphabet) -> i64 {
        self.period.iter().map(|s| delta(alpha, *s)).sum()
    }

    /// First position `p >= start` such that the call/return balance of
    /// `α_start ⋯ α_p` equals `-depth`. Exact: once aligned with the period,
    /// the per-period drift and minimum decide the answer arithmetically.
    pub(crate) fn first_drop(&self, alpha: &PushdownAlphabet, start: usize, depth: i64) -> Option<usize> {
        let (u, v) = (self.prefix.len(), self.period.len());
        let mut sum = 0i64;
        let mut p = start;
        while p < u || (p - u) % v != 0 {
            sum += delta(alpha, self.letter(p));
            if sum == -depth {
                return Some(p);
            }
            p += 1;
        }
        let mut need = depth + sum;
        let mut low = 0i64;
        let mut acc = 0i64;
        for s in &self.period {
            acc += delta(alpha, *s);
            low = low.min(acc);
        }
        let drift = acc;
        if need + low > 0 {
            if drift >= 0 {
                return None;
            }
            let k = (need + low + (-drift) - 1) / (-drift);
            p += k as usize * v;
            need += k * drift;
        }
        let mut acc = 0i64;
        loop {
            acc += delta(alpha, self.letter(p));
            if acc == -need {
                return Some(p);
            }
            p += 1;
        }
    }

    /// Splits the word as `u' · v'^ω` with a well-matched `v'`, if possible.
    pub fn well_matched_split(&self, alpha: &PushdownAlphabet) -> Option<(Vec<Symbol>, Vec<Symbol>)> {
        let v = &self.period;
        for s in 0..v.len() {
            let mut rot = v[s..].to_vec();
            rot.extend_from_slice(&v[..s]);
            if is_well_matched(alpha, &rot) {
                let mut u = self.prefix.clone();
                u.extend_from_slice(&v[..s]);
                return Some((u, rot));
            }
        }
        None
    }
}

fn primitive_root(v: &[Symbol]) -> &[Symbol] {
    let n = v.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| v[i] == v[i - d]) {
            return &v[..d];
        }
    }
    v
}

fn delta(alpha: &PushdownAlphabet, s: Symbol) -> i64 {
    match alpha.kind(s) {
        Kind::Call => 1,
        Kind::Return => -1,
        Kind::Local => 0,
    }
}

/// `sh(w)`: calls push, returns pop (never below zero), locals do nothing.
pub fn stack_height(alpha: &PushdownAlphabet, w: &[Symbol]) -> Result<usize> {
    alpha.check_word(w)?;
    Ok(w.iter().fold(0usize, |h, s| step_height(alpha, h, *s)))
}

pub fn step_height(alpha: &PushdownAlphabet, h: usize, s: Symbol) -> usize {
    match alpha.kind(s) {
        Kind::Call => h + 1,
        Kind::Return => h.saturating_sub(1),
        Kind::Local => h,
    }
}

/// No unmatched calls and no unmatched returns.
pub fn is_well_matched(alpha: &PushdownAlphabet, w: &[Symbol]) -> bool {
    let mut open = 0usize;
    for s in w {
        match alpha.kind(*s) {
            Kind::Call => open += 1,
            Kind::Return => {
                if open == 0 {
                    return false;
                }
                open -= 1;
            }
            Kind::Local => {}
        }
    }
    open == 0
}

/// Matching return of the call at position `k` within the finite word `w`.
pub fn matching_return_finite(alpha: &PushdownAlphabet, w: &[Symbol], k: usize) -> Option<usize> {
    let mut bal = 0i64;
    for (p, s) in w.iter().enumerate().skip(k + 1) {
        bal += delta(alpha, *s);
        if bal == -1 {
            return Some(p);
        }
    }
    None
}

/// Matching return of the call at `k`, or `None` if the call is unmatched.
pub fn matching_return(alpha: &PushdownAlphabet, w: &LassoWord, k: usize) -> Result<Option<usize>> {
    if alpha.kind(w.letter(k)) != Kind::Call {
        return Err(Error::input(format!("position {k} does not carry a call")));
    }
    Ok(w.first_drop(alpha, k + 1, 1))
}

/// Length of the window after position `i` within which a matching return
/// must occur if it exists at all: `|u| + (N+2)·|v|·(|v|+1)` where `N` is the
/// maximal nesting depth reached inside `u·v·v`.
pub fn matching_horizon(alpha: &PushdownAlphabet, w: &LassoWord) -> usize {
    let mut uvv = w.prefix.clone();
    uvv.extend_from_slice(&w.period);
    uvv.extend_from_slice(&w.period);
    let mut h = 0usize;
    let mut n = 0usize;
    for s in &uvv {
        h = step_height(alpha, h, *s);
        n = n.max(h);
    }
    let v = w.period.len();
    w.prefix.len() + (n + 2) * v * (v + 1)
}

/// Whether position `k` is a step: the stack height before `α_k` is a lower
/// bound for the heights of all prefixes that include `α_k`.
pub fn is_step(alpha: &PushdownAlphabet, w: &LassoWord, k: usize) -> bool {
    let h = stack_height(alpha, &w.take(k)).unwrap_or(0);
    h == 0 || w.first_drop(alpha, k, 1).is_none()
}

/// Cardinal positions below `horizon`: the steps together with the matching
/// returns of calls at steps.
pub fn cardinal_positions(alpha: &PushdownAlphabet, w: &LassoWord, horizon: usize) -> Result<BTreeSet<usize>> {
    if horizon < w.prefix.len() + w.period.len() {
        return Err(Error::input("horizon must cover the prefix and one period"));
    }
    let mut out = BTreeSet::new();
    let mut h = 0usize;
    for k in 0..horizon {
        let s = w.letter(k);
        let step = h == 0 || w.first_drop(alpha, k, 1).is_none();
        h = step_height(alpha, h, s);
        if step {
            out.insert(k);
            if alpha.kind(s) == Kind::Call {
                if let Some(j) = w.first_drop(alpha, k + 1, 1) {
                    if j < horizon {
                        out.insert(j);
                    }
                }
            }
        }
    }
    Ok(out)
}
