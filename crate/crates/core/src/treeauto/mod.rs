//! Büchi automata on infinite binary trees: explicit and lazily explored
//! automata, intersection, emptiness with witnesses, and membership of
//! regular trees.

pub mod game;

use std::collections::HashMap;
use std::fmt::{Debug, Write};
use std::hash::Hash;

use crate::alphabet::PushdownAlphabet;
use crate::error::{Error, Result};
use crate::stacktree::{RegularTree, TreeLabel};

pub use game::{solve_buchi_game, BuchiGame, Player, Solution};

/// A nondeterministic Büchi tree automaton whose states may be produced on
/// demand. A run accepts iff every branch visits accepting states
/// infinitely often.
pub trait TreeAutomaton {
    type State: Clone + Eq + Hash + Debug;

    fn initial(&self) -> Self::State;

    fn is_accepting(&self, q: &Self::State) -> bool;

    /// Children pairs `(left, right)` of transitions from `q` reading `label`.
    fn successors(&self, q: &Self::State, label: TreeLabel) -> Vec<(Self::State, Self::State)>;

    /// The label alphabet `Σ ∪ {⊥}`.
    fn labels(&self) -> &[TreeLabel];

    fn describe(&self, q: &Self::State) -> String {
        format!("{q:?}")
    }
}

impl<T: TreeAutomaton + ?Sized> TreeAutomaton for &T {
    type State = T::State;

    fn initial(&self) -> Self::State {
        (**self).initial()
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        (**self).is_accepting(q)
    }

    fn successors(&self, q: &Self::State, label: TreeLabel) -> Vec<(Self::State, Self::State)> {
        (**self).successors(q, label)
    }

    fn labels(&self) -> &[TreeLabel] {
        (**self).labels()
    }

    fn describe(&self, q: &Self::State) -> String {
        (**self).describe(q)
    }
}

/// Explicit automaton with states `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiTreeAutomaton {
    labels: Vec<TreeLabel>,
    names: Vec<String>,
    accepting: Vec<bool>,
    trans: Vec<Vec<(TreeLabel, usize, usize)>>,
    initial: usize,
}

impl BuchiTreeAutomaton {
    pub fn new(labels: Vec<TreeLabel>, initial: usize) -> Self {
        BuchiTreeAutomaton { labels, names: Vec::new(), accepting: Vec::new(), trans: Vec::new(), initial }
    }

    /// Label alphabet of trees over `alpha`.
    pub fn labels_of(alpha: &PushdownAlphabet) -> Vec<TreeLabel> {
        let mut out: Vec<TreeLabel> = alpha.symbols().map(TreeLabel::Sym).collect();
        out.push(TreeLabel::Bot);
        out
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> usize {
        self.names.push(name.into());
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.names.len() - 1
    }

    pub fn add_transition(&mut self, q: usize, label: TreeLabel, left: usize, right: usize) {
        let t = (label, left, right);
        if !self.trans[q].contains(&t) {
            self.trans[q].push(t);
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn transitions(&self, q: usize) -> &[(TreeLabel, usize, usize)] {
        &self.trans[q]
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// Automaton accepting every tree.
    pub fn universal(labels: Vec<TreeLabel>) -> Self {
        let mut t = BuchiTreeAutomaton::new(labels.clone(), 0);
        let q = t.add_state("all", true);
        for l in labels {
            t.add_transition(q, l, q, q);
        }
        t
    }

    /// Automaton accepting no tree.
    pub fn empty(labels: Vec<TreeLabel>) -> Self {
        let mut t = BuchiTreeAutomaton::new(labels, 0);
        t.add_state("none", false);
        t
    }

    pub fn to_dot(&self, alpha: &PushdownAlphabet) -> String {
        let mut s = String::from("digraph automaton {\n  init [shape=point];\n");
        for q in 0..self.len() {
            let periph = if self.accepting[q] { 2 } else { 1 };
            let _ = writeln!(s, "  q{q} [shape=circle, peripheries={periph}, label=\"{}\"];", escape(&self.names[q]));
        }
        let _ = writeln!(s, "  init -> q{};", self.initial);
        for q in 0..self.len() {
            for (i, (l, a, b)) in self.trans[q].iter().enumerate() {
                let _ = writeln!(s, "  t{q}_{i} [shape=point];");
                let _ = writeln!(s, "  q{q} -> t{q}_{i} [label=\"{}\"];", escape(&l.display(alpha)));
                let _ = writeln!(s, "  t{q}_{i} -> q{a} [label=\"0\"];");
                let _ = writeln!(s, "  t{q}_{i} -> q{b} [label=\"1\"];");
            }
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl TreeAutomaton for BuchiTreeAutomaton {
    type State = usize;

    fn initial(&self) -> usize {
        self.initial
    }

    fn is_accepting(&self, q: &usize) -> bool {
        self.accepting[*q]
    }

    fn successors(&self, q: &usize, label: TreeLabel) -> Vec<(usize, usize)> {
        self.trans[*q].iter().filter(|t| t.0 == label).map(|t| (t.1, t.2)).collect()
    }

    fn labels(&self) -> &[TreeLabel] {
        &self.labels
    }

    fn describe(&self, q: &usize) -> String {
        self.names[*q].clone()
    }
}

/// Explores the reachable part of `a` into an explicit automaton.
pub fn materialize<A: TreeAutomaton>(a: &A, max_states: usize) -> Result<BuchiTreeAutomaton> {
    let mut index: HashMap<A::State, usize> = HashMap::new();
    let mut states: Vec<A::State> = Vec::new();
    let mut out = BuchiTreeAutomaton::new(a.labels().to_vec(), 0);
    let intern = |q: A::State, index: &mut HashMap<A::State, usize>, states: &mut Vec<A::State>, out: &mut BuchiTreeAutomaton| -> Result<usize> {
        if let Some(&i) = index.get(&q) {
            return Ok(i);
        }
        if states.len() >= max_states {
            return Err(Error::resource("materialize", max_states));
        }
        let i = out.add_state(a.describe(&q), a.is_accepting(&q));
        index.insert(q.clone(), i);
        states.push(q);
        Ok(i)
    };
    intern(a.initial(), &mut index, &mut states, &mut out)?;
    let mut next = 0;
    while next < states.len() {
        let q = states[next].clone();
        for &l in a.labels() {
            for (x, y) in a.successors(&q, l) {
                let xi = intern(x, &mut index, &mut states, &mut out)?;
                let yi = intern(y, &mut index, &mut states, &mut out)?;
                out.add_transition(next, l, xi, yi);
            }
        }
        next += 1;
    }
    Ok(out)
}

/// Lazy intersection with the two-phase Büchi flag: phase 0 waits for an
/// accepting state of the first automaton, phase 1 for one of the second.
#[derive(Debug, Clone)]
pub struct Product<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: TreeAutomaton, B: TreeAutomaton> Product<A, B> {
    pub fn new(first: A, second: B) -> Result<Self> {
        if first.labels() != second.labels() {
            return Err(Error::input("tree automata over different label alphabets"));
        }
        Ok(Product { first, second })
    }

    fn next_phase(&self, q: &(A::State, B::State, bool)) -> bool {
        let (a, b, phase) = q;
        match phase {
            false => self.first.is_accepting(a),
            true => !self.second.is_accepting(b),
        }
    }
}

impl<A: TreeAutomaton, B: TreeAutomaton> TreeAutomaton for Product<A, B> {
    type State = (A::State, B::State, bool);

    fn initial(&self) -> Self::State {
        (self.first.initial(), self.second.initial(), false)
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        !q.2 && self.first.is_accepting(&q.0)
    }

    fn successors(&self, q: &Self::State, label: TreeLabel) -> Vec<(Self::State, Self::State)> {
        let s1 = self.first.successors(&q.0, label);
        if s1.is_empty() {
            return Vec::new();
        }
        let s2 = self.second.successors(&q.1, label);
        let phase = self.next_phase(q);
        let mut out = Vec::with_capacity(s1.len() * s2.len());
        for (a0, a1) in &s1 {
            for (b0, b1) in &s2 {
                out.push(((a0.clone(), b0.clone(), phase), (a1.clone(), b1.clone(), phase)));
            }
        }
        out
    }

    fn labels(&self) -> &[TreeLabel] {
        self.first.labels()
    }

    fn describe(&self, q: &Self::State) -> String {
        format!("({}, {}, {})", self.first.describe(&q.0), self.second.describe(&q.1), q.2 as u8)
    }
}

/// Explicit intersection of two explicit automata.
pub fn intersect(t1: &BuchiTreeAutomaton, t2: &BuchiTreeAutomaton) -> Result<BuchiTreeAutomaton> {
    materialize(&Product::new(t1, t2)?, usize::MAX)
}

/// Outcome of the emptiness game together with its size.
#[derive(Debug, Clone)]
pub struct Emptiness {
    pub witness: Option<RegularTree>,
    /// Automaton states explored while building the game.
    pub states: usize,
    pub vertices: usize,
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        self.witness.is_none()
    }
}

/// Decides emptiness through the game in which the Automaton player picks a
/// transition and the Pathfinder a direction. A memoryless winning strategy
/// is read back as a regular witness tree.
pub fn emptiness<A: TreeAutomaton>(a: &A, max_vertices: usize) -> Result<Emptiness> {
    let mut states: Vec<A::State> = Vec::new();
    let mut index: HashMap<A::State, usize> = HashMap::new();
    let mut state_vertex: Vec<usize> = Vec::new();
    let mut owner = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut accepting = Vec::new();
    let mut pair_vertex: HashMap<(usize, usize), usize> = HashMap::new();
    // For each (state vertex, choice vertex) edge, the label it came from.
    let mut edge_label: HashMap<(usize, usize), TreeLabel> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    fn new_vertex(owner: &mut Vec<Player>, succ: &mut Vec<Vec<usize>>, accepting: &mut Vec<bool>, p: Player, acc: bool, cap: usize) -> Result<usize> {
        if owner.len() >= cap {
            return Err(Error::resource("emptiness game", cap));
        }
        owner.push(p);
        succ.push(Vec::new());
        accepting.push(acc);
        Ok(owner.len() - 1)
    }

    let q0 = a.initial();
    let v0 = new_vertex(&mut owner, &mut succ, &mut accepting, Player::Automaton, a.is_accepting(&q0), max_vertices)?;
    index.insert(q0.clone(), 0);
    states.push(q0);
    state_vertex.push(v0);
    let mut next = 0;
    while next < states.len() {
        let q = states[next].clone();
        let qv = state_vertex[next];
        for &l in a.labels() {
            for (x, y) in a.successors(&q, l) {
                let mut ids = [0usize; 2];
                for (slot, child) in ids.iter_mut().zip([x, y]) {
                    *slot = match index.get(&child) {
                        Some(&i) => i,
                        None => {
                            let acc = a.is_accepting(&child);
                            let v = new_vertex(&mut owner, &mut succ, &mut accepting, Player::Automaton, acc, max_vertices)?;
                            index.insert(child.clone(), states.len());
                            states.push(child);
                            state_vertex.push(v);
                            states.len() - 1
                        }
                    };
                }
                let key = (ids[0], ids[1]);
                let pv = match pair_vertex.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = new_vertex(&mut owner, &mut succ, &mut accepting, Player::Pathfinder, false, max_vertices)?;
                        pair_vertex.insert(key, v);
                        pairs.push(key);
                        v
                    }
                };
                if !succ[qv].contains(&pv) {
                    succ[qv].push(pv);
                    edge_label.insert((qv, pv), l);
                }
            }
        }
        next += 1;
    }
    let mut pair_of = HashMap::new();
    for (&(l, r), &v) in &pair_vertex {
        succ[v] = vec![state_vertex[l], state_vertex[r]];
        pair_of.insert(v, (l, r));
    }
    let vertices = owner.len();
    let game = BuchiGame::new(owner, succ, accepting, v0);
    let sol = solve_buchi_game(&game);
    if !sol.wins(v0) {
        return Ok(Emptiness { witness: None, states: states.len(), vertices });
    }
    // Generator states are the winning automaton states reachable under the strategy.
    let mut gen_index: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![0usize];
    gen_index.insert(0, 0);
    let mut labels = Vec::new();
    let mut children = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        let qv = state_vertex[s];
        let pv = sol.strategy[qv].expect("winning vertex has a strategy");
        let (l, r) = pair_of[&pv];
        labels.push(edge_label[&(qv, pv)]);
        let mut kids = [0usize; 2];
        for (slot, c) in kids.iter_mut().zip([l, r]) {
            *slot = *gen_index.entry(c).or_insert_with(|| {
                order.push(c);
                order.len() - 1
            });
        }
        children.push((kids[0], kids[1]));
        i += 1;
    }
    let witness = RegularTree::new(labels, children, 0)?;
    Ok(Emptiness { witness: Some(witness), states: states.len(), vertices })
}

pub fn is_empty<A: TreeAutomaton>(a: &A) -> Result<bool> {
    Ok(emptiness(a, crate::limits::Limits::from_env().max_vertices)?.is_empty())
}

pub fn witness<A: TreeAutomaton>(a: &A) -> Result<Option<RegularTree>> {
    Ok(emptiness(a, crate::limits::Limits::from_env().max_vertices)?.witness)
}

/// Whether the unfolding of `t` is accepted, decided on the product of the
/// automaton with the generator of `t`.
pub fn contains<A: TreeAutomaton>(a: &A, t: &RegularTree) -> Result<bool> {
    contains_bounded(a, t, crate::limits::Limits::from_env().max_vertices)
}

pub fn contains_bounded<A: TreeAutomaton>(a: &A, t: &RegularTree, max_vertices: usize) -> Result<bool> {
    for g in 0..t.len() {
        if !a.labels().contains(&t.label(g)) {
            return Err(Error::input("tree label outside the automaton's label alphabet"));
        }
    }
    let mut m = Membership { a, t, shape: shape(t), bot: HashMap::new(), finite: HashMap::new(), max_vertices };
    m.accepts(a.initial(), t.root())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Shape {
    /// Every node below is labeled ⊥.
    Bottom,
    /// Every branch reaches a `Bottom` node.
    Finite,
    Infinite,
}

fn shape(t: &RegularTree) -> Vec<Shape> {
    let n = t.len();
    // Bottom: greatest set of ⊥-labeled nodes closed under children.
    let mut bottom: Vec<bool> = (0..n).map(|g| t.label(g).is_bot()).collect();
    loop {
        let mut changed = false;
        for g in 0..n {
            let (l, r) = t.children(g);
            if bottom[g] && !(bottom[l] && bottom[r]) {
                bottom[g] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Finite: least set containing Bottom and closed under "both children in it".
    let mut finite = bottom.clone();
    loop {
        let mut changed = false;
        for g in 0..n {
            let (l, r) = t.children(g);
            if !finite[g] && finite[l] && finite[r] {
                finite[g] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n)
        .map(|g| if bottom[g] { Shape::Bottom } else if finite[g] { Shape::Finite } else { Shape::Infinite })
        .collect()
}

/// Membership with finite subtrees decided by direct recursion, so the game
/// only contains vertices on the infinite part of the generator.
struct Membership<'a, A: TreeAutomaton> {
    a: &'a A,
    t: &'a RegularTree,
    shape: Vec<Shape>,
    bot: HashMap<A::State, bool>,
    finite: HashMap<(A::State, usize), bool>,
    max_vertices: usize,
}

impl<A: TreeAutomaton> Membership<'_, A> {
    fn accepts(&mut self, q: A::State, g: usize) -> Result<bool> {
        match self.shape[g] {
            Shape::Bottom => self.accepts_bottom(q),
            Shape::Finite => self.accepts_finite(q, g),
            Shape::Infinite => self.game(q, g, self.t, false),
        }
    }

    fn accepts_bottom(&mut self, q: A::State) -> Result<bool> {
        if let Some(&b) = self.bot.get(&q) {
            return Ok(b);
        }
        let b = self.game(q.clone(), 0, &RegularTree::bot(), true)?;
        self.bot.insert(q, b);
        Ok(b)
    }

    fn accepts_finite(&mut self, q: A::State, g: usize) -> Result<bool> {
        if let Some(&b) = self.finite.get(&(q.clone(), g)) {
            return Ok(b);
        }
        let (gl, gr) = self.t.children(g);
        let mut b = false;
        for (x, y) in self.a.successors(&q, self.t.label(g)) {
            if self.accepts(x, gl)? && self.accepts(y, gr)? {
                b = true;
                break;
            }
        }
        self.finite.insert((q, g), b);
        Ok(b)
    }

    /// The product game from `(q, g)`. Outside `plain` mode, children on
    /// finite subtrees are resolved eagerly: accepted ones lead to a
    /// winning sink and rejected ones drop the transition.
    fn game(&mut self, q: A::State, g: usize, t: &RegularTree, plain: bool) -> Result<bool> {
        let mut index: HashMap<(A::State, usize), usize> = HashMap::new();
        let mut todo: Vec<(A::State, usize)> = Vec::new();
        let mut owner = vec![Player::Automaton, Player::Automaton];
        let mut succ: Vec<Vec<usize>> = vec![vec![0], Vec::new()];
        let mut accepting = vec![true, self.a.is_accepting(&q)];
        const WIN: usize = 0;
        index.insert((q.clone(), g), 1);
        todo.push((q, g));
        let mut pair_vertex: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = 0;
        while next < todo.len() {
            let (q, g) = todo[next].clone();
            let v = index[&(q.clone(), g)];
            let (gl, gr) = t.children(g);
            'moves: for (x, y) in self.a.successors(&q, t.label(g)) {
                let mut ids = [0usize; 2];
                for (slot, key) in ids.iter_mut().zip([(x, gl), (y, gr)]) {
                    if !plain && self.shape[key.1] != Shape::Infinite {
                        if !self.accepts(key.0.clone(), key.1)? {
                            continue 'moves;
                        }
                        *slot = WIN;
                        continue;
                    }
                    *slot = match index.get(&key) {
                        Some(&i) => i,
                        None => {
                            if owner.len() >= self.max_vertices {
                                return Err(Error::resource("membership game", self.max_vertices));
                            }
                            owner.push(Player::Automaton);
                            succ.push(Vec::new());
                            accepting.push(self.a.is_accepting(&key.0));
                            index.insert(key.clone(), owner.len() - 1);
                            todo.push(key);
                            owner.len() - 1
                        }
                    };
                }
                let pv = *pair_vertex.entry((ids[0], ids[1])).or_insert_with(|| {
                    owner.push(Player::Pathfinder);
                    succ.push(vec![ids[0], ids[1]]);
                    accepting.push(false);
                    owner.len() - 1
                });
                if !succ[v].contains(&pv) {
                    succ[v].push(pv);
                }
            }
            next += 1;
        }
        let game = BuchiGame::new(owner, succ, accepting, 1);
        Ok(solve_buchi_game(&game).wins(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Symbol;

    fn labels() -> Vec<TreeLabel> {
        vec![TreeLabel::Sym(Symbol(0)), TreeLabel::Sym(Symbol(1)), TreeLabel::Bot]
    }

    /// Accepts trees whose every branch sees label 0 infinitely often.
    fn inf_zero() -> BuchiTreeAutomaton {
        let mut t = BuchiTreeAutomaton::new(labels(), 0);
        let seen = t.add_state("seen", true);
        let wait = t.add_state("wait", false);
        for q in [seen, wait] {
            t.add_transition(q, TreeLabel::Sym(Symbol(0)), seen, seen);
            t.add_transition(q, TreeLabel::Sym(Symbol(1)), wait, wait);
            t.add_transition(q, TreeLabel::Bot, wait, wait);
        }
        t
    }

    fn constant(l: TreeLabel) -> RegularTree {
        RegularTree::new(vec![l], vec![(0, 0)], 0).unwrap()
    }

    #[test]
    fn empty_without_accepting_states() {
        let t = BuchiTreeAutomaton::empty(labels());
        assert!(is_empty(&t).unwrap());
        assert!(witness(&t).unwrap().is_none());
    }

    #[test]
    fn self_loop_gives_constant_witness() {
        let mut t = BuchiTreeAutomaton::new(labels(), 0);
        let q = t.add_state("q", true);
        t.add_transition(q, TreeLabel::Sym(Symbol(1)), q, q);
        let w = witness(&t).unwrap().unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.label(0), TreeLabel::Sym(Symbol(1)));
        assert!(contains(&t, &w).unwrap());
    }

    #[test]
    fn membership_and_products() {
        let t = inf_zero();
        let all = BuchiTreeAutomaton::universal(labels());
        let zero = constant(TreeLabel::Sym(Symbol(0)));
        let one = constant(TreeLabel::Sym(Symbol(1)));
        let mixed = RegularTree::new(
            vec![TreeLabel::Sym(Symbol(0)), TreeLabel::Sym(Symbol(1))],
            vec![(1, 1), (0, 1)],
            0,
        )
        .unwrap();
        assert!(contains(&t, &zero).unwrap());
        assert!(!contains(&t, &one).unwrap());
        // The right branch from state 1 stays in 1 forever.
        assert!(!contains(&t, &mixed).unwrap());
        assert!(contains(&all, &one).unwrap());
        let p = intersect(&t, &all).unwrap();
        assert!(p.len() <= 2 * t.len() * all.len());
        for tree in [&zero, &one, &mixed] {
            assert_eq!(contains(&p, tree).unwrap(), contains(&t, tree).unwrap());
        }
        let e = intersect(&t, &BuchiTreeAutomaton::empty(labels())).unwrap();
        assert!(is_empty(&e).unwrap());
    }

    #[test]
    fn witness_is_member() {
        let t = inf_zero();
        let w = witness(&t).unwrap().unwrap();
        assert!(contains(&t, &w).unwrap());
    }
}
