//! One-way alternating jump automata with Büchi acceptance.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write};
use std::sync::Arc;

use crate::alphabet::{Kind, LassoWord, PushdownAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::treeauto::{solve_buchi_game, BuchiGame, Player};

pub type State = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Move to the next position.
    Direct,
    /// At a matched call, move to its matching return; otherwise like `Direct`.
    Jump,
}

/// A triple `(dir, q_direct, q_jump)`: with `Direct` the copy continues in
/// `q_direct` at the next position; with `Jump` it continues in `q_jump` at
/// the matching return when there is one, and in `q_direct` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Command {
    pub dir: Direction,
    pub direct: State,
    pub jump: State,
}

impl Command {
    /// `(→, q, q)`.
    pub fn next(q: State) -> Self {
        Command { dir: Direction::Direct, direct: q, jump: q }
    }

    /// `(↷, q_direct, q_jump)`.
    pub fn jump(direct: State, jump: State) -> Self {
        Command { dir: Direction::Jump, direct, jump }
    }

    fn shift(self, by: usize) -> Self {
        Command { dir: self.dir, direct: self.direct + by, jump: self.jump + by }
    }
}

/// Positive Boolean formula over commands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PosBool {
    Leaf(Command),
    And(Vec<PosBool>),
    Or(Vec<PosBool>),
}

impl PosBool {
    pub fn leaf(c: Command) -> Self {
        PosBool::Leaf(c)
    }

    /// Conjunction; flattens nested conjunctions. Panics on an empty list
    /// because the formulas have no constants.
    pub fn and(parts: Vec<PosBool>) -> Self {
        Self::nary(parts, true)
    }

    pub fn or(parts: Vec<PosBool>) -> Self {
        Self::nary(parts, false)
    }

    fn nary(parts: Vec<PosBool>, conj: bool) -> Self {
        assert!(!parts.is_empty(), "empty Boolean combination");
        let mut flat = Vec::new();
        for p in parts {
            match (p, conj) {
                (PosBool::And(xs), true) | (PosBool::Or(xs), false) => flat.extend(xs),
                (p, _) => {
                    if !flat.contains(&p) {
                        flat.push(p)
                    }
                }
            }
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        if conj {
            PosBool::And(flat)
        } else {
            PosBool::Or(flat)
        }
    }

    pub fn commands(&self) -> BTreeSet<Command> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<Command>) {
        match self {
            PosBool::Leaf(c) => {
                out.insert(*c);
            }
            PosBool::And(xs) | PosBool::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
        }
    }

    pub fn satisfied_by(&self, set: &BTreeSet<Command>) -> bool {
        match self {
            PosBool::Leaf(c) => set.contains(c),
            PosBool::And(xs) => xs.iter().all(|x| x.satisfied_by(set)),
            PosBool::Or(xs) => xs.iter().any(|x| x.satisfied_by(set)),
        }
    }

    pub fn map_states(&self, f: &impl Fn(State) -> State) -> PosBool {
        match self {
            PosBool::Leaf(c) => PosBool::Leaf(Command { dir: c.dir, direct: f(c.direct), jump: f(c.jump) }),
            PosBool::And(xs) => PosBool::And(xs.iter().map(|x| x.map_states(f)).collect()),
            PosBool::Or(xs) => PosBool::Or(xs.iter().map(|x| x.map_states(f)).collect()),
        }
    }

    fn shift(&self, by: usize) -> PosBool {
        match self {
            PosBool::Leaf(c) => PosBool::Leaf(c.shift(by)),
            PosBool::And(xs) => PosBool::And(xs.iter().map(|x| x.shift(by)).collect()),
            PosBool::Or(xs) => PosBool::Or(xs.iter().map(|x| x.shift(by)).collect()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PosBool::Leaf(_) => 1,
            PosBool::And(xs) | PosBool::Or(xs) => 1 + xs.iter().map(PosBool::size).sum::<usize>(),
        }
    }
}

/// All ⊆-minimal sets of commands satisfying `f`, each sorted.
pub fn minimal_models(f: &PosBool) -> Vec<Vec<Command>> {
    fn go(f: &PosBool) -> Vec<BTreeSet<Command>> {
        match f {
            PosBool::Leaf(c) => vec![BTreeSet::from([*c])],
            PosBool::Or(xs) => minimize(xs.iter().flat_map(go).collect()),
            PosBool::And(xs) => {
                let mut acc: Vec<BTreeSet<Command>> = vec![BTreeSet::new()];
                for x in xs {
                    let part = go(x);
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for b in &part {
                            next.push(a.union(b).copied().collect());
                        }
                    }
                    acc = minimize(next);
                }
                acc
            }
        }
    }
    let mut out: Vec<Vec<Command>> = go(f).into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}

fn minimize(mut sets: Vec<BTreeSet<Command>>) -> Vec<BTreeSet<Command>> {
    sets.sort_by_key(|s| s.len());
    sets.dedup();
    let mut out: Vec<BTreeSet<Command>> = Vec::new();
    for s in sets {
        if !out.iter().any(|o| o.is_subset(&s)) {
            out.push(s);
        }
    }
    out
}

/// `app(i, cmd)`: the position and state a command leads to.
pub fn apply_command(alpha: &PushdownAlphabet, w: &LassoWord, i: usize, cmd: Command) -> (usize, State) {
    if cmd.dir == Direction::Jump && alpha.kind(w.letter(i)) == Kind::Call {
        if let Some(j) = w.first_drop(alpha, i + 1, 1) {
            return (j, cmd.jump);
        }
    }
    (i + 1, cmd.direct)
}

/// A 1-AJA. The transition function is total: every state has a formula
/// for every symbol.
#[derive(Debug, Clone)]
pub struct OneAja {
    alphabet: Arc<PushdownAlphabet>,
    names: Vec<String>,
    accepting: Vec<bool>,
    delta: Vec<Vec<Option<PosBool>>>,
    initial: State,
}

impl OneAja {
    pub fn new(alphabet: Arc<PushdownAlphabet>) -> Self {
        OneAja { alphabet, names: Vec::new(), accepting: Vec::new(), delta: Vec::new(), initial: 0 }
    }

    pub fn alphabet(&self) -> &Arc<PushdownAlphabet> {
        &self.alphabet
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> State {
        self.names.push(name.into());
        self.accepting.push(accepting);
        self.delta.push(vec![None; self.alphabet.len()]);
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, q: State) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: State, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn set_name(&mut self, q: State, name: impl Into<String>) {
        self.names[q] = name.into();
    }

    pub fn set(&mut self, q: State, a: Symbol, f: PosBool) {
        self.delta[q][a.index()] = Some(f);
    }

    /// Same formula for every symbol.
    pub fn set_all(&mut self, q: State, f: PosBool) {
        for a in 0..self.alphabet.len() {
            self.delta[q][a] = Some(f.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting[q]
    }

    pub fn name(&self, q: State) -> &str {
        &self.names[q]
    }

    pub fn delta(&self, q: State, a: Symbol) -> &PosBool {
        self.delta[q][a.index()].as_ref().expect("transition function is total")
    }

    /// Checks totality and that commands stay inside the state set.
    pub fn validate(&self) -> Result<()> {
        for q in 0..self.len() {
            for a in self.alphabet.symbols() {
                let Some(f) = &self.delta[q][a.index()] else {
                    return Err(Error::input(format!(
                        "no transition for state `{}` on `{}`",
                        self.names[q],
                        self.alphabet.name(a)
                    )));
                };
                if f.commands().iter().any(|c| c.direct >= self.len() || c.jump >= self.len()) {
                    return Err(Error::input(format!("command out of range in state `{}`", self.names[q])));
                }
            }
        }
        if self.initial >= self.len() {
            return Err(Error::input("initial state out of range"));
        }
        Ok(())
    }

    /// Appends the states of `other`, returning the offset of its state 0.
    fn absorb(&mut self, other: &OneAja, prefix: &str) -> usize {
        let off = self.len();
        for q in 0..other.len() {
            self.names.push(format!("{prefix}{}", other.names[q]));
            self.accepting.push(other.accepting[q]);
            self.delta.push(other.delta[q].iter().map(|f| f.as_ref().map(|f| f.shift(off))).collect());
        }
        off
    }

    fn combine(a1: &OneAja, a2: &OneAja, conj: bool) -> OneAja {
        let mut out = OneAja::new(a1.alphabet.clone());
        let init = out.add_state(if conj { "and" } else { "or" }, false);
        let o1 = out.absorb(a1, "1.");
        let o2 = out.absorb(a2, "2.");
        for a in a1.alphabet.symbols() {
            let f1 = a1.delta(a1.initial, a).shift(o1);
            let f2 = a2.delta(a2.initial, a).shift(o2);
            out.set(init, a, PosBool::nary(vec![f1, f2], conj));
        }
        out.initial = init;
        out
    }

    /// Automaton for the intersection of the languages.
    pub fn conjoin(a1: &OneAja, a2: &OneAja) -> OneAja {
        Self::combine(a1, a2, true)
    }

    /// Automaton for the union of the languages.
    pub fn disjoin(a1: &OneAja, a2: &OneAja) -> OneAja {
        Self::combine(a1, a2, false)
    }

    /// Minimal models of every transition formula, indexed `[state][symbol]`.
    pub fn model_table(&self) -> ModelTable {
        ModelTable {
            models: (0..self.len())
                .map(|q| self.alphabet.symbols().map(|a| minimal_models(self.delta(q, a))).collect())
                .collect(),
        }
    }

    pub fn fmt_formula(&self, f: &PosBool) -> String {
        let mut s = String::new();
        self.write_formula(f, &mut s, false);
        s
    }

    fn write_formula(&self, f: &PosBool, s: &mut String, nested: bool) {
        match f {
            PosBool::Leaf(c) => {
                let _ = match c.dir {
                    Direction::Direct if c.direct == c.jump => write!(s, "(->, {})", self.names[c.direct]),
                    Direction::Direct => write!(s, "(->, {}, {})", self.names[c.direct], self.names[c.jump]),
                    Direction::Jump => write!(s, "(~>, {}, {})", self.names[c.direct], self.names[c.jump]),
                };
            }
            PosBool::And(xs) | PosBool::Or(xs) => {
                let op = if matches!(f, PosBool::And(_)) { " & " } else { " | " };
                if nested {
                    s.push('(');
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        s.push_str(op);
                    }
                    self.write_formula(x, s, true);
                }
                if nested {
                    s.push(')');
                }
            }
        }
    }

    /// Text dump of the transition function.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "initial: {}", self.names[self.initial]);
        let acc: Vec<&str> = (0..self.len()).filter(|q| self.accepting[*q]).map(|q| self.names[q].as_str()).collect();
        let _ = writeln!(s, "accepting: {}", acc.join(" "));
        for q in 0..self.len() {
            for a in self.alphabet.symbols() {
                let _ = writeln!(s, "{} -{}-> {}", self.names[q], self.alphabet.name(a), self.fmt_formula(self.delta(q, a)));
            }
        }
        s
    }
}

impl fmt::Display for OneAja {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[derive(Debug, Clone)]
pub struct ModelTable {
    models: Vec<Vec<Vec<Vec<Command>>>>,
}

impl ModelTable {
    pub fn get(&self, q: State, a: Symbol) -> &[Vec<Command>] {
        &self.models[q][a.index()]
    }
}

/// Word-level acceptance decided by a Büchi game over (position class,
/// state). Positions of the same class carry the same suffix, and both
/// transitions and jump targets depend only on the suffix, so the finite
/// arena is exact.
pub fn lasso_accepts(a: &OneAja, w: &LassoWord) -> Result<bool> {
    lasso_accepts_with(a, &a.model_table(), w, Limits::from_env().max_vertices)
}

pub fn lasso_accepts_with(a: &OneAja, models: &ModelTable, w: &LassoWord, max_vertices: usize) -> Result<bool> {
    let alpha = a.alphabet.as_ref();
    let classes = w.class_count();
    // Successor class for each class and direction (direct, jump).
    let mut next_class = Vec::with_capacity(classes);
    for c in 0..classes {
        let direct = w.class(c + 1);
        let jump = match alpha.kind(w.letter(c)) {
            Kind::Call => w.first_drop(alpha, c + 1, 1).map(|j| w.class(j)),
            _ => None,
        };
        next_class.push((direct, jump));
    }
    let mut index: HashMap<(usize, State), usize> = HashMap::new();
    let mut todo: Vec<(usize, State, usize)> = Vec::new();
    let mut owner = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut accepting = Vec::new();
    let mut choice_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let vertex = |key: (usize, State), index: &mut HashMap<(usize, State), usize>, todo: &mut Vec<(usize, State, usize)>, owner: &mut Vec<Player>, succ: &mut Vec<Vec<usize>>, accepting: &mut Vec<bool>| -> Result<usize> {
        if let Some(&v) = index.get(&key) {
            return Ok(v);
        }
        if owner.len() >= max_vertices {
            return Err(Error::resource("acceptance game", max_vertices));
        }
        owner.push(Player::Automaton);
        succ.push(Vec::new());
        accepting.push(a.is_accepting(key.1));
        index.insert(key, owner.len() - 1);
        todo.push((key.0, key.1, owner.len() - 1));
        Ok(owner.len() - 1)
    };
    vertex((0, a.initial()), &mut index, &mut todo, &mut owner, &mut succ, &mut accepting)?;
    let mut next = 0;
    while next < todo.len() {
        let (c, q, v) = todo[next];
        for model in models.get(q, w.letter(c)) {
            let mut targets = Vec::with_capacity(model.len());
            for cmd in model {
                let (nc, nq) = match (cmd.dir, next_class[c].1) {
                    (Direction::Jump, Some(j)) => (j, cmd.jump),
                    _ => (next_class[c].0, cmd.direct),
                };
                targets.push(vertex((nc, nq), &mut index, &mut todo, &mut owner, &mut succ, &mut accepting)?);
            }
            targets.sort_unstable();
            targets.dedup();
            let pv = match choice_index.get(&targets) {
                Some(&pv) => pv,
                None => {
                    owner.push(Player::Pathfinder);
                    succ.push(targets.clone());
                    accepting.push(false);
                    choice_index.insert(targets, owner.len() - 1);
                    owner.len() - 1
                }
            };
            if !succ[v].contains(&pv) {
                succ[v].push(pv);
            }
        }
        next += 1;
    }
    let game = BuchiGame::new(owner, succ, accepting, 0);
    Ok(solve_buchi_game(&game).wins(0))
}

/// Finite truncation of a run DAG: vertices `(position, state)` by level.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunDag {
    pub vertices: BTreeSet<(usize, State)>,
    pub edges: BTreeSet<((usize, State), (usize, State))>,
}

impl RunDag {
    /// Unfolds the run that always picks the first minimal model, up to
    /// (excluding) position `depth`.
    pub fn first_choice(a: &OneAja, w: &LassoWord, depth: usize) -> RunDag {
        let alpha = a.alphabet.as_ref();
        let models = a.model_table();
        let mut dag = RunDag::default();
        let mut todo = vec![(0usize, a.initial())];
        dag.vertices.insert((0, a.initial()));
        while let Some((i, q)) = todo.pop() {
            if i >= depth {
                continue;
            }
            let Some(model) = models.get(q, w.letter(i)).first() else { continue };
            for cmd in model {
                let t = apply_command(alpha, w, i, *cmd);
                dag.edges.insert(((i, q), t));
                if dag.vertices.insert(t) {
                    todo.push(t);
                }
            }
        }
        dag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crl() -> Arc<PushdownAlphabet> {
        Arc::new(PushdownAlphabet::crl())
    }

    fn cmd(i: usize) -> Command {
        Command::next(i)
    }

    #[test]
    fn minimal_model_examples() {
        let (a, b, c) = (PosBool::leaf(cmd(0)), PosBool::leaf(cmd(1)), PosBool::leaf(cmd(2)));
        assert_eq!(minimal_models(&PosBool::or(vec![a.clone(), b.clone()])), vec![vec![cmd(0)], vec![cmd(1)]]);
        assert_eq!(
            minimal_models(&PosBool::and(vec![a.clone(), PosBool::or(vec![b.clone(), c.clone()])])),
            vec![vec![cmd(0), cmd(1)], vec![cmd(0), cmd(2)]]
        );
        let f = PosBool::and(vec![PosBool::or(vec![a.clone(), b.clone()]), PosBool::or(vec![a, c])]);
        assert_eq!(minimal_models(&f), vec![vec![cmd(0)], vec![cmd(1), cmd(2)]]);
    }

    #[test]
    fn command_application() {
        let al = crl();
        let j = Command::jump(1, 2);
        let w = al.lasso("c r", "l").unwrap();
        assert_eq!(apply_command(&al, &w, 0, j), (1, 2));
        let w = al.lasso("", "l").unwrap();
        assert_eq!(apply_command(&al, &w, 0, j), (1, 1));
        let w = al.lasso("c l r", "l").unwrap();
        assert_eq!(apply_command(&al, &w, 0, j), (2, 2));
        let w = al.lasso("", "c").unwrap();
        assert_eq!(apply_command(&al, &w, 0, j), (1, 1));
    }

    fn universal(al: &Arc<PushdownAlphabet>, acc: bool) -> OneAja {
        let mut a = OneAja::new(al.clone());
        let q = a.add_state("q", acc);
        a.set_all(q, PosBool::leaf(Command::next(q)));
        a
    }

    /// Accepts exactly the words starting with a call.
    fn starts_with_call(al: &Arc<PushdownAlphabet>) -> OneAja {
        let mut a = OneAja::new(al.clone());
        let q0 = a.add_state("q0", false);
        let top = a.add_state("top", true);
        let rej = a.add_state("rej", false);
        for s in al.symbols() {
            let t = if al.kind(s) == Kind::Call { top } else { rej };
            a.set(q0, s, PosBool::leaf(Command::next(t)));
        }
        a.set_all(top, PosBool::leaf(Command::next(top)));
        a.set_all(rej, PosBool::leaf(Command::next(rej)));
        a
    }

    #[test]
    fn acceptance_examples() {
        let al = crl();
        let ws = [al.lasso("c r", "l").unwrap(), al.lasso("", "l").unwrap(), al.lasso("", "c").unwrap(), al.lasso("r", "c r").unwrap()];
        for w in &ws {
            assert!(lasso_accepts(&universal(&al, true), w).unwrap());
            assert!(!lasso_accepts(&universal(&al, false), w).unwrap());
        }
        let a = starts_with_call(&al);
        a.validate().unwrap();
        assert!(lasso_accepts(&a, &ws[0]).unwrap());
        assert!(!lasso_accepts(&a, &ws[1]).unwrap());
        assert!(lasso_accepts(&a, &ws[2]).unwrap());
    }

    #[test]
    fn jumps_skip_nested_infixes() {
        // Accept iff the position after the first matched call's infix is a
        // return: jumping from a call at 0 lands on its matching return.
        let al = crl();
        let mut a = OneAja::new(al.clone());
        let q0 = a.add_state("q0", false);
        let chk = a.add_state("chk", false);
        let top = a.add_state("top", true);
        let rej = a.add_state("rej", false);
        for s in al.symbols() {
            a.set(q0, s, PosBool::leaf(Command::jump(rej, chk)));
            let t = if al.kind(s) == Kind::Return { top } else { rej };
            a.set(chk, s, PosBool::leaf(Command::next(t)));
        }
        a.set_all(top, PosBool::leaf(Command::next(top)));
        a.set_all(rej, PosBool::leaf(Command::next(rej)));
        assert!(lasso_accepts(&a, &al.lasso("c l l c r r", "l").unwrap()).unwrap());
        assert!(lasso_accepts(&a, &al.lasso("c c r l", "r").unwrap()).unwrap());
        assert!(!lasso_accepts(&a, &al.lasso("c", "l").unwrap()).unwrap());
    }

    #[test]
    fn boolean_closure() {
        let al = crl();
        let a = starts_with_call(&al);
        let t = universal(&al, true);
        let f = universal(&al, false);
        let c = OneAja::conjoin(&a, &t);
        let d = OneAja::disjoin(&f, &a);
        assert_eq!(c.len(), a.len() + t.len() + 1);
        c.validate().unwrap();
        for w in [al.lasso("c r", "l").unwrap(), al.lasso("", "l").unwrap(), al.lasso("l", "c").unwrap()] {
            let base = lasso_accepts(&a, &w).unwrap();
            assert_eq!(lasso_accepts(&c, &w).unwrap(), base);
            assert_eq!(lasso_accepts(&d, &w).unwrap(), base);
            assert!(!lasso_accepts(&OneAja::conjoin(&a, &f), &w).unwrap());
        }
    }

    #[test]
    fn run_dag_follows_commands() {
        let al = crl();
        let a = starts_with_call(&al);
        let dag = RunDag::first_choice(&a, &al.lasso("", "c r").unwrap(), 3);
        assert!(dag.vertices.contains(&(0, 0)));
        assert!(dag.vertices.contains(&(1, 1)));
        assert!(dag.edges.iter().all(|(x, y)| y.0 > x.0));
    }
}
