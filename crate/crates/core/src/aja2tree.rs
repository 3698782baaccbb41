//! Breakpoint translation of a 1-AJA into a nondeterministic Büchi tree
//! automaton over stack trees.
//!
//! Along the cardinal branch the automaton tracks the states of the
//! simulated run as a pair `(A, N)`: `N` holds the states that still owe a
//! visit to an accepting state since the last breakpoint. At a matched call
//! it guesses the pair with which the copies sent into the nested infix
//! arrive at the matching return, and a verifier state checks the guess on
//! the right subtree.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::aja::{Direction, ModelTable, OneAja};
use crate::alphabet::{Kind, PushdownAlphabet, Symbol};
use crate::error::Result;
use crate::stacktree::{stack_tree_recognizer, TreeLabel};
use crate::treeauto::{BuchiTreeAutomaton, Product, TreeAutomaton};

/// Disjoint sets of 1-AJA states: `a` has visited an accepting state since
/// the last breakpoint, `n` has not.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub a: FixedBitSet,
    pub n: FixedBitSet,
}

impl Pair {
    pub fn empty(len: usize) -> Self {
        Pair { a: FixedBitSet::with_capacity(len), n: FixedBitSet::with_capacity(len) }
    }

    pub fn from_lists(len: usize, a: &[usize], n: &[usize]) -> Self {
        let mut p = Pair::empty(len);
        a.iter().for_each(|q| p.a.insert(*q));
        n.iter().for_each(|q| p.n.insert(*q));
        p
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_clear() && self.n.is_clear()
    }

    /// Union in which `N` membership wins.
    pub fn merge(&self, other: &Pair) -> Pair {
        let mut n = self.n.clone();
        n.union_with(&other.n);
        let mut a = self.a.clone();
        a.union_with(&other.a);
        a.difference_with(&n);
        Pair { a, n }
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<usize> = self.a.ones().collect();
        let n: Vec<usize> = self.n.ones().collect();
        write!(f, "({a:?},{n:?})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BreakpointState {
    Spine(Pair),
    /// Current pair and the guessed outcome it must reach at the end of the
    /// infix.
    Verifier(Pair, Pair),
    /// Node of a fixed infix tree standing in for a verifier; see
    /// `AjaTree::with_canonical_infixes`.
    Infix(usize),
    Sink,
}

/// Index of an interned pair.
type Id = u32;

/// `(jump pair, direct pair)` per choice at a matched call.
type Splits = Arc<[(Id, Id)]>;

/// How a pair was first reached inside a summary entry.
#[derive(Clone, Copy, Debug)]
enum Edge {
    Start,
    Local { prev: Id, x: Symbol },
    Nested { prev: Id, call: Symbol, inner: (Id, Id), ret: Symbol },
}

/// A matched call inside entry `entry` at pair `prev` whose copies entered
/// the nested infix; it continues with every summary of that infix.
#[derive(Clone, Copy, Debug)]
struct Site {
    entry: Id,
    prev: Id,
    call: Symbol,
    jump: Id,
}

#[derive(Default)]
struct Reach {
    order: Vec<Id>,
    set: HashSet<Id>,
}

/// Interned pairs, memoized transitions and the summary table.
#[derive(Default)]
struct Table {
    pairs: Vec<Pair>,
    ids: HashMap<Pair, Id>,
    steps: HashMap<(Id, Symbol), Arc<[Id]>>,
    splits: HashMap<(Id, Symbol), Splits>,
    merges: HashMap<(Id, Id), Id>,
    reach: HashMap<Id, Reach>,
    sites: HashMap<Id, Vec<Site>>,
    derivations: HashMap<(Id, Id), Edge>,
    work: VecDeque<(Id, Id)>,
    total: usize,
    /// Cap on recorded summaries; interned pairs may use four times as much.
    limit: usize,
    overflow: bool,
}

impl Table {
    fn intern(&mut self, p: Pair) -> Id {
        if let Some(&i) = self.ids.get(&p) {
            return i;
        }
        let i = self.pairs.len() as Id;
        if self.pairs.len() > 4 * self.limit {
            self.overflow = true;
        }
        self.pairs.push(p.clone());
        self.ids.insert(p, i);
        i
    }

    fn open(&mut self, d: Id) {
        if let std::collections::hash_map::Entry::Vacant(e) = self.reach.entry(d) {
            e.insert(Reach::default());
            self.add(d, d, Edge::Start);
        }
    }

    fn add(&mut self, e: Id, p: Id, edge: Edge) {
        let r = self.reach.get_mut(&e).expect("entry is open");
        if r.set.insert(p) {
            r.order.push(p);
            // The first derivation is kept, so derivations only refer to
            // pairs recorded before them.
            self.derivations.entry((e, p)).or_insert(edge);
            self.work.push_back((e, p));
            self.total += 1;
            if self.total > self.limit {
                self.overflow = true;
            }
        }
    }
}

/// Shared generator of canonical infix trees; node 0 is the ⊥ node.
struct Forest {
    labels: Vec<TreeLabel>,
    children: Vec<(usize, usize)>,
    index: HashMap<(Id, Id), usize>,
    nodes: HashMap<(TreeLabel, usize, usize), usize>,
}

impl Default for Forest {
    fn default() -> Self {
        Forest { labels: vec![TreeLabel::Bot], children: vec![(0, 0)], index: HashMap::new(), nodes: HashMap::new() }
    }
}

impl Forest {
    fn add(&mut self, label: TreeLabel, left: usize, right: usize) -> usize {
        if let Some(&n) = self.nodes.get(&(label, left, right)) {
            return n;
        }
        self.labels.push(label);
        self.children.push((left, right));
        let n = self.labels.len() - 1;
        self.nodes.insert((label, left, right), n);
        n
    }
}

/// Raw targets of one combined choice of minimal models, indexed by
/// `[A direct, N direct, A jump, N jump]`.
type Targets = [FixedBitSet; 4];

/// Lazy breakpoint automaton. Guesses at matched calls range over the pairs
/// some well-matched infix can actually produce, computed on demand.
pub struct AjaTree {
    aja: OneAja,
    models: ModelTable,
    labels: Vec<TreeLabel>,
    accepting: FixedBitSet,
    returns: Vec<Symbol>,
    table: RefCell<Table>,
    max_summaries: usize,
    canonical: bool,
    forest: RefCell<Forest>,
}

impl AjaTree {
    pub fn new(aja: OneAja) -> Self {
        let models = aja.model_table();
        let labels = BuchiTreeAutomaton::labels_of(aja.alphabet());
        let returns = aja.alphabet().symbols_of(Kind::Return);
        let max_summaries = crate::limits::Limits::from_env().max_states;
        let mut accepting = FixedBitSet::with_capacity(aja.len());
        for q in 0..aja.len() {
            accepting.set(q, aja.is_accepting(q));
        }
        AjaTree {
            aja,
            models,
            labels,
            accepting,
            returns,
            table: RefCell::new(Table { limit: max_summaries, ..Table::default() }),
            max_summaries,
            canonical: false,
            forest: RefCell::new(Forest::default()),
        }
    }

    pub fn with_summary_cap(mut self, cap: usize) -> Self {
        self.max_summaries = cap;
        self.table.get_mut().limit = cap;
        self
    }

    /// Replaces each verifier by one fixed infix realizing the guessed
    /// summary. The language shrinks but stays nonempty exactly when the
    /// original is, since the spine only depends on the guess. Only valid
    /// when nothing else constrains the infix, as in satisfiability.
    pub fn with_canonical_infixes(mut self) -> Self {
        self.canonical = true;
        self
    }

    pub fn aja(&self) -> &OneAja {
        &self.aja
    }

    fn alpha(&self) -> &PushdownAlphabet {
        self.aja.alphabet()
    }

    /// Set when the summary table hit its cap; results are then incomplete.
    pub fn overflowed(&self) -> bool {
        self.table.borrow().overflow
    }

    /// The largest number of states the construction may produce.
    pub fn state_bound(&self) -> f64 {
        let q = self.aja.len() as f64;
        4f64.powf(q) + 16f64.powf(q) + 1.0
    }

    /// `N' = T_N ∖ F`, `A' = (T_N ∩ F) ∪ (T_A ∖ N')`.
    pub fn update(&self, ta: &FixedBitSet, tn: &FixedBitSet) -> Pair {
        let mut n = tn.clone();
        n.difference_with(&self.accepting);
        let mut a = tn.clone();
        a.intersect_with(&self.accepting);
        let mut rest = ta.clone();
        rest.difference_with(&n);
        a.union_with(&rest);
        Pair { a, n }
    }

    /// The breakpoint re-partition `(S ∩ F, S ∖ F)` of a pair with empty `N`.
    fn reset(&self, p: &Pair) -> Pair {
        if !p.n.is_clear() {
            return p.clone();
        }
        let mut a = p.a.clone();
        a.intersect_with(&self.accepting);
        let mut n = p.a.clone();
        n.difference_with(&self.accepting);
        Pair { a, n }
    }

    /// All target combinations of one minimal model per state. With
    /// `split`, jump commands are routed to the jump slots.
    fn choices(&self, p: &Pair, x: Symbol, split: bool) -> BTreeSet<Targets> {
        let len = self.aja.len();
        let empty = FixedBitSet::with_capacity(len);
        let mut acc: BTreeSet<Targets> = BTreeSet::new();
        // Past the cap every result is discarded anyway.
        if self.table.borrow().overflow {
            return acc;
        }
        acc.insert([empty.clone(), empty.clone(), empty.clone(), empty]);
        for (tag, set) in [(0, &p.a), (1, &p.n)] {
            for q in set.ones() {
                let models = self.models.get(q, x);
                let mut next = BTreeSet::new();
                for partial in &acc {
                    for model in models {
                        let mut t = partial.clone();
                        for cmd in model {
                            if split && cmd.dir == Direction::Jump {
                                t[2 + tag].insert(cmd.jump);
                            } else {
                                t[tag].insert(cmd.direct);
                            }
                        }
                        next.insert(t);
                    }
                }
                acc = next;
                if acc.len() > self.max_summaries {
                    self.table.borrow_mut().overflow = true;
                    return acc;
                }
            }
        }
        acc
    }

    fn intern(&self, p: &Pair) -> Id {
        if let Some(&i) = self.table.borrow().ids.get(p) {
            return i;
        }
        self.table.borrow_mut().intern(p.clone())
    }

    fn pair(&self, i: Id) -> Pair {
        self.table.borrow().pairs[i as usize].clone()
    }

    fn step(&self, p: Id, x: Symbol) -> Arc<[Id]> {
        if let Some(s) = self.table.borrow().steps.get(&(p, x)) {
            return s.clone();
        }
        let pair = self.pair(p);
        let set: BTreeSet<Pair> = self.choices(&pair, x, false).iter().map(|t| self.update(&t[0], &t[1])).collect();
        let mut table = self.table.borrow_mut();
        let s: Arc<[Id]> = set.into_iter().map(|q| table.intern(q)).collect();
        table.steps.insert((p, x), s.clone());
        s
    }

    fn split(&self, p: Id, x: Symbol) -> Splits {
        if let Some(s) = self.table.borrow().splits.get(&(p, x)) {
            return s.clone();
        }
        let pair = self.pair(p);
        let set: BTreeSet<(Pair, Pair)> =
            self.choices(&pair, x, true).iter().map(|t| (self.update(&t[2], &t[3]), self.update(&t[0], &t[1]))).collect();
        let mut table = self.table.borrow_mut();
        let s: Splits = set.into_iter().map(|(j, d)| (table.intern(j), table.intern(d))).collect();
        table.splits.insert((p, x), s.clone());
        s
    }

    fn merge(&self, j: Id, g: Id) -> Id {
        let mut table = self.table.borrow_mut();
        if let Some(&m) = table.merges.get(&(j, g)) {
            return m;
        }
        let m = table.pairs[j as usize].merge(&table.pairs[g as usize]);
        let m = table.intern(m);
        table.merges.insert((j, g), m);
        m
    }

    /// Pairs with which copies entering a well-matched infix as `d` can
    /// arrive at its end.
    pub fn summaries(&self, d: &Pair) -> BTreeSet<Pair> {
        let d = self.intern(d);
        let ids = self.summary_ids(d);
        let table = self.table.borrow();
        ids.iter().map(|&g| table.pairs[g as usize].clone()).collect()
    }

    /// Summaries by tabulation over all entries: each (entry, pair) is
    /// expanded once, and a new summary of an entry is pushed to every call
    /// site waiting on it. The table is a fixpoint whenever this returns
    /// without overflow.
    fn summary_ids(&self, d: Id) -> Vec<Id> {
        if let Some(r) = self.table.borrow().reach.get(&d) {
            return r.order.clone();
        }
        self.table.borrow_mut().open(d);
        let alpha = self.alpha();
        loop {
            let (e, p) = {
                let mut table = self.table.borrow_mut();
                if table.overflow {
                    table.work.clear();
                    break;
                }
                match table.work.pop_front() {
                    Some(item) => item,
                    None => break,
                }
            };
            let sites = self.table.borrow().sites.get(&e).map_or(0, Vec::len);
            for i in 0..sites {
                let site = self.table.borrow().sites[&e][i];
                self.close(site, (e, p));
            }
            for x in alpha.symbols() {
                match alpha.kind(x) {
                    Kind::Local => {
                        for &p2 in self.step(p, x).iter() {
                            self.table.borrow_mut().add(e, p2, Edge::Local { prev: p, x });
                        }
                    }
                    Kind::Call => {
                        for &(jump, inner) in self.split(p, x).iter() {
                            let site = Site { entry: e, prev: p, call: x, jump };
                            let known = {
                                let mut table = self.table.borrow_mut();
                                table.open(inner);
                                table.sites.entry(inner).or_default().push(site);
                                table.reach[&inner].order.len()
                            };
                            for k in 0..known {
                                let g = self.table.borrow().reach[&inner].order[k];
                                self.close(site, (inner, g));
                            }
                        }
                    }
                    Kind::Return => {}
                }
            }
        }
        self.table.borrow().reach[&d].order.clone()
    }

    /// Continues `site` after its nested infix reached summary `inner.1`.
    fn close(&self, site: Site, inner: (Id, Id)) {
        if self.table.borrow().overflow {
            return;
        }
        let m = self.merge(site.jump, inner.1);
        for &ret in &self.returns {
            for &p2 in self.step(m, ret).iter() {
                let edge = Edge::Nested { prev: site.prev, call: site.call, inner, ret };
                self.table.borrow_mut().add(site.entry, p2, edge);
            }
        }
    }

    /// Root of the canonical infix tree leading from `d` to `g`, built from
    /// the recorded derivations. `g` must be a summary of `d`.
    fn infix(&self, d: Id, g: Id) -> usize {
        if let Some(&n) = self.forest.borrow().index.get(&(d, g)) {
            return n;
        }
        let mut items = Vec::new();
        let mut cur = g;
        loop {
            let edge = self.table.borrow().derivations[&(d, cur)];
            match edge {
                Edge::Start => break,
                Edge::Local { prev, .. } | Edge::Nested { prev, .. } => {
                    items.push(edge);
                    cur = prev;
                }
            }
        }
        // `items` runs from the end of the infix back to its start.
        let mut node = 0;
        for item in items {
            node = match item {
                Edge::Local { x, .. } => self.forest.borrow_mut().add(TreeLabel::Sym(x), node, 0),
                Edge::Nested { call, inner, ret, .. } => {
                    let nested = self.infix(inner.0, inner.1);
                    let mut f = self.forest.borrow_mut();
                    let r = f.add(TreeLabel::Sym(ret), node, 0);
                    f.add(TreeLabel::Sym(call), r, nested)
                }
                Edge::Start => unreachable!(),
            };
        }
        self.forest.borrow_mut().index.insert((d, g), node);
        node
    }

    /// Flags overflow once `n` successors exceed the cap.
    fn over(&self, n: usize) -> bool {
        let mut table = self.table.borrow_mut();
        if n > self.max_summaries {
            table.overflow = true;
        }
        table.overflow
    }

    fn guess(&self, d: Id, g: Id) -> BreakpointState {
        if self.canonical {
            BreakpointState::Infix(self.infix(d, g))
        } else {
            BreakpointState::Verifier(self.pair(d), self.pair(g))
        }
    }

    fn fmt_set(&self, s: &FixedBitSet) -> String {
        let names: Vec<&str> = s.ones().map(|q| self.aja.name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn fmt_pair(&self, p: &Pair) -> String {
        format!("({}, {})", self.fmt_set(&p.a), self.fmt_set(&p.n))
    }
}

impl TreeAutomaton for AjaTree {
    type State = BreakpointState;

    fn initial(&self) -> BreakpointState {
        let q = self.aja.initial();
        let len = self.aja.len();
        BreakpointState::Spine(if self.accepting.contains(q) { Pair::from_lists(len, &[q], &[]) } else { Pair::from_lists(len, &[], &[q]) })
    }

    fn is_accepting(&self, q: &BreakpointState) -> bool {
        match q {
            BreakpointState::Spine(p) => p.n.is_clear(),
            _ => true,
        }
    }

    fn successors(&self, q: &BreakpointState, label: TreeLabel) -> Vec<(BreakpointState, BreakpointState)> {
        use BreakpointState::*;
        let x = match label {
            TreeLabel::Bot => {
                return match q {
                    Sink => vec![(Sink, Sink)],
                    Verifier(p, g) if p == g => vec![(Sink, Sink)],
                    Infix(0) => vec![(Infix(0), Infix(0))],
                    _ => Vec::new(),
                };
            }
            TreeLabel::Sym(x) => x,
        };
        let kind = self.alpha().kind(x);
        let mut out = Vec::new();
        match q {
            Sink => {}
            Infix(n) => {
                let f = self.forest.borrow();
                if f.labels[*n] == label {
                    let (l, r) = f.children[*n];
                    out.push((Infix(l), Infix(r)));
                }
            }
            Spine(p) => {
                let p = self.intern(&self.reset(p));
                match kind {
                    Kind::Local | Kind::Return => out.extend(self.step(p, x).iter().map(|&p2| (Spine(self.pair(p2)), Sink))),
                    Kind::Call => {
                        out.extend(self.step(p, x).iter().map(|&p2| (Sink, Spine(self.pair(p2)))));
                        for &(j, d) in self.split(p, x).iter() {
                            for g in self.summary_ids(d) {
                                out.push((Spine(self.pair(self.merge(j, g))), self.guess(d, g)));
                            }
                            if self.over(out.len()) {
                                return Vec::new();
                            }
                        }
                    }
                }
            }
            Verifier(p, goal) => {
                let p = self.intern(p);
                match kind {
                    Kind::Local | Kind::Return => {
                        out.extend(self.step(p, x).iter().map(|&p2| (Verifier(self.pair(p2), goal.clone()), Sink)));
                    }
                    Kind::Call => {
                        for &(j, d) in self.split(p, x).iter() {
                            for g in self.summary_ids(d) {
                                out.push((Verifier(self.pair(self.merge(j, g)), goal.clone()), Verifier(self.pair(d), self.pair(g))));
                            }
                            if self.over(out.len()) {
                                return Vec::new();
                            }
                        }
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        out.retain(|t| seen.insert(t.clone()));
        out
    }

    fn labels(&self) -> &[TreeLabel] {
        &self.labels
    }

    fn describe(&self, q: &BreakpointState) -> String {
        match q {
            BreakpointState::Spine(p) => self.fmt_pair(p),
            BreakpointState::Verifier(p, g) => format!("{} -> {}", self.fmt_pair(p), self.fmt_pair(g)),
            BreakpointState::Infix(n) => format!("infix {n}"),
            BreakpointState::Sink => "sink".into(),
        }
    }
}

/// The breakpoint automaton without the stack-tree check.
pub fn aja_to_tree(a: &OneAja) -> AjaTree {
    AjaTree::new(a.clone())
}

/// Recognizes exactly the stack trees of the words accepted by `a`.
pub type StackTreeAutomaton = Product<BuchiTreeAutomaton, AjaTree>;

pub fn aja_to_stacktree_automaton(a: &OneAja) -> Result<StackTreeAutomaton> {
    Product::new(stack_tree_recognizer(a.alphabet()), aja_to_tree(a))
}

/// Shared-alphabet convenience for callers holding an `Arc`.
pub fn alphabet_of(t: &StackTreeAutomaton) -> &Arc<PushdownAlphabet> {
    t.second.aja.alphabet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aja::{lasso_accepts, Command, PosBool};
    use crate::stacktree::encode_lasso;
    use crate::treeauto::{contains, emptiness, materialize};

    fn crl() -> Arc<PushdownAlphabet> {
        Arc::new(PushdownAlphabet::crl())
    }

    fn universal(alpha: &Arc<PushdownAlphabet>) -> OneAja {
        let mut a = OneAja::new(alpha.clone());
        let q = a.add_state("q", true);
        a.set_all(q, PosBool::leaf(Command::next(q)));
        a.set_initial(q);
        a
    }

    #[test]
    fn initial_state_of_universal_automaton() {
        let a = universal(&crl());
        let t = aja_to_tree(&a);
        assert_eq!(t.initial(), BreakpointState::Spine(Pair::from_lists(1, &[0], &[])));
    }

    #[test]
    fn universal_accepts_all_stack_trees() {
        let alpha = crl();
        let t = aja_to_stacktree_automaton(&universal(&alpha)).unwrap();
        for (u, v) in [("", "l"), ("c", "r"), ("c l r", "c"), ("r r", "c l r l"), ("c c r", "l")] {
            let w = alpha.lasso(u, v).unwrap();
            assert!(contains(&t, &encode_lasso(&alpha, &w).unwrap()).unwrap(), "{u} ({v})");
        }
    }

    #[test]
    fn no_accepting_states_means_empty() {
        let alpha = crl();
        let mut a = universal(&alpha);
        a.set_accepting(0, false);
        let t = aja_to_stacktree_automaton(&a).unwrap();
        assert!(emptiness(&t, 100_000).unwrap().is_empty());
    }

    /// Every call is eventually followed by a return at the same level:
    /// the jump copy must see a local after the matching return, the direct
    /// copy only walks the infix.
    #[test]
    fn jump_semantics_agree_with_word_acceptance() {
        let alpha = crl();
        let (c, r, l) = (alpha.lookup("c").unwrap(), alpha.lookup("r").unwrap(), alpha.lookup("l").unwrap());
        let mut a = OneAja::new(alpha.clone());
        let s = a.add_state("s", true);
        let after = a.add_state("after", false);
        let walk = a.add_state("walk", true);
        let top = a.add_state("top", true);
        let rej = a.add_state("rej", false);
        a.set(s, l, PosBool::leaf(Command::next(s)));
        a.set(s, r, PosBool::leaf(Command::next(s)));
        a.set(s, c, PosBool::and(vec![PosBool::leaf(Command::jump(s, after)), PosBool::leaf(Command::next(walk))]));
        a.set(after, r, PosBool::leaf(Command::next(s)));
        a.set(after, l, PosBool::leaf(Command::next(rej)));
        a.set(after, c, PosBool::leaf(Command::next(rej)));
        a.set_all(walk, PosBool::leaf(Command::next(walk)));
        a.set_all(top, PosBool::leaf(Command::next(top)));
        a.set_all(rej, PosBool::leaf(Command::next(rej)));
        a.set_initial(s);
        let t = aja_to_stacktree_automaton(&a).unwrap();
        for (u, v) in [("", "c r r"), ("", "c r l"), ("c l r", "r"), ("", "l"), ("c c r r", "r"), ("", "c c r r r l")] {
            let w = alpha.lasso(u, v).unwrap();
            let expect = lasso_accepts(&a, &w).unwrap();
            assert_eq!(contains(&t, &encode_lasso(&alpha, &w).unwrap()).unwrap(), expect, "{u} ({v})");
        }
    }

    /// A run fragment across a matched call: `q0` branches into
    /// `q1` (accepting, jumps over the infix to `q5,q6`) and `q2` (enters the
    /// infix via `q3,q4` and leaves it as `q6,q7`).
    #[test]
    fn run_fragment_labels() {
        let alpha = crl();
        let (c, l) = (alpha.lookup("c").unwrap(), alpha.lookup("l").unwrap());
        let mut a = OneAja::new(alpha.clone());
        let q: Vec<usize> = (0..8).map(|i| a.add_state(format!("q{i}"), i == 1 || i == 7)).collect();
        for s in &q {
            a.set_all(*s, PosBool::leaf(Command::next(*s)));
        }
        let leaf = |c: Command| PosBool::leaf(c);
        a.set(q[0], l, PosBool::and(vec![leaf(Command::next(q[1])), leaf(Command::next(q[2]))]));
        a.set(q[1], c, PosBool::and(vec![leaf(Command::jump(q[1], q[5])), leaf(Command::jump(q[1], q[6]))]));
        a.set(q[2], c, PosBool::and(vec![leaf(Command::next(q[3])), leaf(Command::next(q[4]))]));
        a.set(q[3], l, leaf(Command::next(q[6])));
        a.set(q[4], l, leaf(Command::next(q[7])));
        a.set_initial(q[0]);
        let t = aja_to_tree(&a);
        let n = a.len();
        let root = t.initial();
        assert_eq!(root, BreakpointState::Spine(Pair::from_lists(n, &[], &[q[0]])));
        let succ = t.successors(&root, TreeLabel::Sym(l));
        assert_eq!(succ.len(), 1);
        let at_call = succ[0].0.clone();
        assert_eq!(at_call, BreakpointState::Spine(Pair::from_lists(n, &[q[1]], &[q[2]])));
        let guess = Pair::from_lists(n, &[q[7]], &[q[6]]);
        let start = Pair::from_lists(n, &[], &[q[3], q[4]]);
        let expected = (BreakpointState::Spine(Pair::from_lists(n, &[q[5], q[7]], &[q[6]])), BreakpointState::Verifier(start.clone(), guess.clone()));
        assert!(t.successors(&at_call, TreeLabel::Sym(c)).contains(&expected));
        // The verifier reaches its guess after the infix `l`.
        let v = t.successors(&expected.1, TreeLabel::Sym(l));
        assert_eq!(v, vec![(BreakpointState::Verifier(guess.clone(), guess.clone()), BreakpointState::Sink)]);
        assert_eq!(t.successors(&v[0].0, TreeLabel::Bot).len(), 1);
    }

    #[test]
    fn reachable_part_respects_state_bound() {
        let alpha = crl();
        let a = universal(&alpha);
        let t = aja_to_tree(&a);
        let m = materialize(&t, 10_000).unwrap();
        assert!((m.len() as f64) < t.state_bound());
    }
}
