//! Stack trees: the binary-tree encoding of words in which every matched
//! call carries its nested infix in the right subtree, the automaton that
//! recognizes exactly the encodings of infinite words, and decoding.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::alphabet::{FiniteWord, Kind, LassoWord, PushdownAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::treeauto::BuchiTreeAutomaton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeLabel {
    Sym(Symbol),
    /// Padding label of nodes that encode nothing.
    Bot,
}

impl TreeLabel {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            TreeLabel::Sym(s) => Some(s),
            TreeLabel::Bot => None,
        }
    }

    pub fn is_bot(self) -> bool {
        self == TreeLabel::Bot
    }

    pub fn display(self, alpha: &PushdownAlphabet) -> String {
        match self {
            TreeLabel::Sym(s) => alpha.name(s).to_string(),
            TreeLabel::Bot => "bot".to_string(),
        }
    }
}

/// Node address: `false` for the left child, `true` for the right child.
pub type Path = Vec<bool>;

/// Tree with finitely many non-⊥ nodes. Only those are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteTree {
    nodes: BTreeMap<Path, Symbol>,
}

impl FiniteTree {
    pub fn label(&self, path: &[bool]) -> TreeLabel {
        self.nodes.get(path).map_or(TreeLabel::Bot, |s| TreeLabel::Sym(*s))
    }

    /// Number of non-⊥ nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&Path, &Symbol)> {
        self.nodes.iter()
    }

    fn insert(&mut self, path: Path, s: Symbol) {
        self.nodes.insert(path, s);
    }
}

/// Infinite tree given by a finite generator: every generator state has a
/// label and a left and right successor; the tree is the unfolding from the
/// root state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularTree {
    labels: Vec<TreeLabel>,
    children: Vec<(usize, usize)>,
    root: usize,
}

impl RegularTree {
    pub fn new(labels: Vec<TreeLabel>, children: Vec<(usize, usize)>, root: usize) -> Result<Self> {
        let n = labels.len();
        if n == 0 || children.len() != n || root >= n {
            return Err(Error::input("regular tree generator is malformed"));
        }
        if children.iter().any(|(l, r)| *l >= n || *r >= n) {
            return Err(Error::input("regular tree generator has a dangling child"));
        }
        Ok(RegularTree { labels, children, root })
    }

    /// The tree labeled ⊥ everywhere.
    pub fn bot() -> Self {
        RegularTree { labels: vec![TreeLabel::Bot], children: vec![(0, 0)], root: 0 }
    }

    pub fn from_finite(t: &FiniteTree) -> Self {
        let mut index: HashMap<&Path, usize> = HashMap::new();
        for (i, (p, _)) in t.nodes.iter().enumerate() {
            index.insert(p, i);
        }
        let bot = t.nodes.len();
        let mut labels: Vec<TreeLabel> = t.nodes.values().map(|s| TreeLabel::Sym(*s)).collect();
        labels.push(TreeLabel::Bot);
        let mut children = Vec::with_capacity(bot + 1);
        for p in t.nodes.keys() {
            let mut l = p.clone();
            l.push(false);
            let mut r = p.clone();
            r.push(true);
            children.push((index.get(&l).copied().unwrap_or(bot), index.get(&r).copied().unwrap_or(bot)));
        }
        children.push((bot, bot));
        let root = index.get(&Vec::new()).copied().unwrap_or(bot);
        RegularTree { labels, children, root }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn label(&self, g: usize) -> TreeLabel {
        self.labels[g]
    }

    pub fn children(&self, g: usize) -> (usize, usize) {
        self.children[g]
    }

    pub fn child(&self, g: usize, right: bool) -> usize {
        if right {
            self.children[g].1
        } else {
            self.children[g].0
        }
    }

    /// Generator state reached by following `path` from the root.
    pub fn state_at(&self, path: &[bool]) -> usize {
        path.iter().fold(self.root, |g, d| self.child(g, *d))
    }

    pub fn label_at(&self, path: &[bool]) -> TreeLabel {
        self.labels[self.state_at(path)]
    }

    /// Copy with one generator state relabeled.
    pub fn relabel(&self, g: usize, label: TreeLabel) -> Self {
        let mut t = self.clone();
        t.labels[g] = label;
        t
    }

    /// Copy with one child pointer redirected.
    pub fn redirect(&self, g: usize, right: bool, target: usize) -> Self {
        let mut t = self.clone();
        if right {
            t.children[g].1 = target;
        } else {
            t.children[g].0 = target;
        }
        t
    }

    /// Copy with an extra generator state; returns the copy and the new index.
    pub fn with_state(&self, label: TreeLabel, children: (usize, usize)) -> (Self, usize) {
        let mut t = self.clone();
        t.labels.push(label);
        t.children.push(children);
        let g = t.labels.len() - 1;
        (t, g)
    }

    /// Non-⊥ nodes of the unfolding up to the given depth.
    pub fn unfold(&self, depth: usize) -> FiniteTree {
        let mut out = FiniteTree::default();
        let mut stack = vec![(Vec::new(), self.root)];
        while let Some((path, g)) = stack.pop() {
            if let TreeLabel::Sym(s) = self.labels[g] {
                if path.len() < depth {
                    for d in [false, true] {
                        let mut p = path.clone();
                        p.push(d);
                        stack.push((p, self.child(g, d)));
                    }
                }
                out.insert(path, s);
            }
        }
        out
    }
}

/// `st(w)` of a finite word.
pub fn encode(alpha: &PushdownAlphabet, w: &FiniteWord) -> FiniteTree {
    let mut out = FiniteTree::default();
    // Work items: (path, start, end) meaning st(w[start..end]) at `path`.
    let mut stack = vec![(Vec::new(), 0usize, w.len())];
    while let Some((path, i, j)) = stack.pop() {
        if i >= j {
            continue;
        }
        let a = w.0[i];
        out.insert(path.clone(), a);
        let mut left = path.clone();
        left.push(false);
        let mut right = path;
        right.push(true);
        if alpha.kind(a) == Kind::Call {
            match crate::alphabet::matching_return_finite(alpha, &w.0[..j], i) {
                Some(m) => {
                    stack.push((left, m, j));
                    stack.push((right, i + 1, m));
                }
                None => stack.push((right, i + 1, j)),
            }
        } else {
            stack.push((left, i + 1, j));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Gen {
    /// The suffix starting at a position of the given class.
    Suffix(usize),
    /// The finite infix of the given length starting at a position of the class.
    Infix(usize, usize),
    Bot,
}

/// Regular generator of `st(α)`. Subtrees depend only on the encoded suffix
/// or infix, so position classes of the lasso serve as generator states.
pub fn encode_lasso(alpha: &PushdownAlphabet, w: &LassoWord) -> Result<RegularTree> {
    encode_lasso_bounded(alpha, w, Limits::from_env().max_states)
}

pub fn encode_lasso_bounded(alpha: &PushdownAlphabet, w: &LassoWord, max_states: usize) -> Result<RegularTree> {
    let mut index: HashMap<Gen, usize> = HashMap::new();
    let mut order: Vec<Gen> = Vec::new();
    let mut labels = Vec::new();
    let mut children = Vec::new();
    let mut intern = |g: Gen, order: &mut Vec<Gen>| -> Result<usize> {
        if let Some(&i) = index.get(&g) {
            return Ok(i);
        }
        if order.len() >= max_states {
            return Err(Error::resource("encode", max_states));
        }
        index.insert(g, order.len());
        order.push(g);
        Ok(order.len() - 1)
    };
    intern(Gen::Suffix(0), &mut order)?;
    let mut next = 0;
    while next < order.len() {
        let (label, l, r) = match order[next] {
            Gen::Bot => (TreeLabel::Bot, Gen::Bot, Gen::Bot),
            Gen::Suffix(p) => {
                let a = w.letter(p);
                let (l, r) = if alpha.kind(a) == Kind::Call {
                    match w.first_drop(alpha, p + 1, 1) {
                        Some(m) => (Gen::Suffix(w.class(m)), infix(w, p + 1, m - p - 1)),
                        None => (Gen::Bot, Gen::Suffix(w.class(p + 1))),
                    }
                } else {
                    (Gen::Suffix(w.class(p + 1)), Gen::Bot)
                };
                (TreeLabel::Sym(a), l, r)
            }
            Gen::Infix(p, n) => {
                let a = w.letter(p);
                let (l, r) = if alpha.kind(a) == Kind::Call {
                    match w.first_drop(alpha, p + 1, 1).filter(|m| *m < p + n) {
                        Some(m) => (infix(w, m, p + n - m), infix(w, p + 1, m - p - 1)),
                        None => (Gen::Bot, infix(w, p + 1, n - 1)),
                    }
                } else {
                    (infix(w, p + 1, n - 1), Gen::Bot)
                };
                (TreeLabel::Sym(a), l, r)
            }
        };
        let li = intern(l, &mut order)?;
        let ri = intern(r, &mut order)?;
        labels.push(label);
        children.push((li, ri));
        next += 1;
    }
    RegularTree::new(labels, children, 0)
}

fn infix(w: &LassoWord, p: usize, n: usize) -> Gen {
    if n == 0 {
        Gen::Bot
    } else {
        Gen::Infix(w.class(p), n)
    }
}

/// Finite words encoded by the subtrees at generator states (computed on
/// demand, right subtree first as in the encoding).
struct FiniteWords<'a> {
    alpha: &'a PushdownAlphabet,
    t: &'a RegularTree,
    memo: HashMap<usize, Vec<Symbol>>,
    budget: usize,
}

impl<'a> FiniteWords<'a> {
    fn new(alpha: &'a PushdownAlphabet, t: &'a RegularTree, budget: usize) -> Self {
        FiniteWords { alpha, t, memo: HashMap::new(), budget }
    }

    fn word(&mut self, start: usize) -> Result<&[Symbol]> {
        // Iterative post-order with an explicit "in progress" marker to
        // detect cycles, which would make the subtree infinite.
        let mut in_progress: HashMap<usize, ()> = HashMap::new();
        let mut stack = vec![(start, false)];
        while let Some((g, expanded)) = stack.pop() {
            if self.memo.contains_key(&g) {
                continue;
            }
            let label = self.t.label(g);
            let Some(a) = label.symbol() else {
                self.memo.insert(g, Vec::new());
                continue;
            };
            let (l, r) = self.t.children(g);
            if !expanded {
                if in_progress.insert(g, ()).is_some() {
                    return Err(Error::MalformedWitness(
                        "a subtree that must be finite contains a cycle of non-⊥ nodes".into(),
                    ));
                }
                stack.push((g, true));
                for c in [l, r] {
                    if !self.memo.contains_key(&c) {
                        stack.push((c, false));
                    }
                }
                continue;
            }
            in_progress.remove(&g);
            let mut w = vec![a];
            if self.alpha.kind(a) == Kind::Call {
                w.extend_from_slice(&self.memo[&r]);
            }
            w.extend_from_slice(&self.memo[&l]);
            if w.len() > self.budget {
                return Err(Error::resource("decode", self.budget));
            }
            self.memo.insert(g, w);
        }
        Ok(&self.memo[&start])
    }
}

/// The word `α` with `st(α)` equal to the unfolding of `t`, read along the
/// cardinal branch with each matched call's right subtree spliced in.
pub fn decode(alpha: &PushdownAlphabet, t: &RegularTree) -> Result<LassoWord> {
    let mut fw = FiniteWords::new(alpha, t, Limits::from_env().max_states);
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut chunks: Vec<Vec<Symbol>> = Vec::new();
    let mut g = t.root();
    loop {
        if let Some(&j) = seen.get(&g) {
            let prefix: Vec<Symbol> = chunks[..j].concat();
            let period: Vec<Symbol> = chunks[j..].concat();
            return LassoWord::new(prefix, period);
        }
        seen.insert(g, chunks.len());
        let Some(a) = t.label(g).symbol() else {
            return Err(Error::MalformedWitness("the cardinal branch reaches a ⊥ node".into()));
        };
        let (l, r) = t.children(g);
        let mut chunk = vec![a];
        g = match alpha.kind(a) {
            Kind::Call if !t.label(l).is_bot() => {
                chunk.extend_from_slice(fw.word(r)?);
                l
            }
            Kind::Call => r,
            _ => l,
        };
        chunks.push(chunk);
    }
}

/// Nodes of the cardinal branch down to `depth`, each with the word
/// position it encodes. Stops early at a ⊥ node.
pub fn cardinal_branch(alpha: &PushdownAlphabet, t: &RegularTree, depth: usize) -> Result<Vec<(Path, usize)>> {
    let mut fw = FiniteWords::new(alpha, t, Limits::from_env().max_states);
    let mut out = Vec::new();
    let (mut g, mut path, mut pos) = (t.root(), Vec::new(), 0usize);
    while path.len() <= depth {
        let Some(a) = t.label(g).symbol() else { break };
        out.push((path.clone(), pos));
        let (l, r) = t.children(g);
        pos += 1;
        let right = match alpha.kind(a) {
            Kind::Call if !t.label(l).is_bot() => {
                pos += fw.word(r)?.len();
                false
            }
            Kind::Call => true,
            _ => false,
        };
        path.push(right);
        g = if right { r } else { l };
    }
    Ok(out)
}

/// Indented rendering down to `depth`; cardinal nodes carry their word
/// position in brackets and ⊥ nodes print as `bot`.
pub fn render_text(alpha: &PushdownAlphabet, t: &RegularTree, depth: usize) -> Result<String> {
    let marks: HashMap<Path, usize> = cardinal_branch(alpha, t, depth)?.into_iter().collect();
    let mut s = String::new();
    let mut stack = vec![(Vec::new(), t.root())];
    while let Some((path, g)) = stack.pop() {
        let indent = "  ".repeat(path.len());
        let side = match path.last() {
            None => "",
            Some(false) => "L: ",
            Some(true) => "R: ",
        };
        let label = t.label(g);
        let mark = marks.get(&path).map(|k| format!(" [{k}]")).unwrap_or_default();
        let _ = writeln!(s, "{indent}{side}{}{mark}", label.display(alpha));
        if !label.is_bot() && path.len() < depth {
            let (l, r) = t.children(g);
            let mut pr = path.clone();
            pr.push(true);
            let mut pl = path;
            pl.push(false);
            stack.push((pr, r));
            stack.push((pl, l));
        }
    }
    Ok(s)
}

/// DOT rendering of the unfolding down to `depth`; cardinal nodes are drawn
/// with a double border.
pub fn render_dot(alpha: &PushdownAlphabet, t: &RegularTree, depth: usize) -> Result<String> {
    let marks: HashMap<Path, usize> = cardinal_branch(alpha, t, depth)?.into_iter().collect();
    let mut s = String::from("digraph stacktree {\n  node [shape=circle];\n");
    let mut queue = std::collections::VecDeque::from([(Vec::<bool>::new(), t.root(), 0usize)]);
    let mut next_id = 1usize;
    while let Some((path, g, id)) = queue.pop_front() {
        let label = t.label(g);
        let extra = match marks.get(&path) {
            Some(k) => format!(", peripheries=2, xlabel=\"{k}\""),
            None => String::new(),
        };
        let _ = writeln!(s, "  n{id} [label=\"{}\"{extra}];", label.display(alpha));
        if !label.is_bot() && path.len() < depth {
            let (l, r) = t.children(g);
            for (d, c) in [(false, l), (true, r)] {
                let cid = next_id;
                next_id += 1;
                let _ = writeln!(s, "  n{id} -> n{cid} [label=\"{}\"];", d as u8);
                let mut p = path.clone();
                p.push(d);
                queue.push_back((p, c, cid));
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}

/// States of the recognizer of stack trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Rec {
    /// On the infinite branch; `after_unmatched` forbids unmatched returns,
    /// `expect_return` marks the left child of a matched call.
    Spine { after_unmatched: bool, expect_return: bool },
    /// Inside a finite, well-matched right subtree.
    Fin { expect_return: bool },
    Bot,
}

/// The automaton accepting exactly the stack trees of infinite words: a
/// non-⊥ root, one infinite branch, ⊥ below ⊥, finite well-matched right
/// subtrees at matched calls, no unmatched returns after an unmatched call,
/// and ⊥ right children at locals and returns.
pub fn stack_tree_recognizer(alpha: &PushdownAlphabet) -> BuchiTreeAutomaton {
    let states = [
        Rec::Spine { after_unmatched: false, expect_return: false },
        Rec::Spine { after_unmatched: false, expect_return: true },
        Rec::Spine { after_unmatched: true, expect_return: false },
        Rec::Spine { after_unmatched: true, expect_return: true },
        Rec::Fin { expect_return: false },
        Rec::Fin { expect_return: true },
        Rec::Bot,
    ];
    let idx = |r: Rec| states.iter().position(|s| *s == r).unwrap();
    let mut t = BuchiTreeAutomaton::new(BuchiTreeAutomaton::labels_of(alpha), 0);
    for s in &states {
        let (name, acc) = match s {
            Rec::Spine { after_unmatched, expect_return } => {
                (format!("spine{}{}", if *after_unmatched { "+u" } else { "" }, if *expect_return { "+r" } else { "" }), true)
            }
            Rec::Fin { expect_return } => (format!("fin{}", if *expect_return { "+r" } else { "" }), false),
            Rec::Bot => ("bot".to_string(), true),
        };
        t.add_state(name, acc);
    }
    let bot = idx(Rec::Bot);
    t.add_transition(bot, TreeLabel::Bot, bot, bot);
    for s in &states {
        let q = idx(*s);
        for a in alpha.symbols() {
            let l = TreeLabel::Sym(a);
            match (*s, alpha.kind(a)) {
                (Rec::Spine { after_unmatched: m, expect_return: er }, kind) => {
                    let next = idx(Rec::Spine { after_unmatched: m, expect_return: false });
                    match kind {
                        Kind::Local if !er => t.add_transition(q, l, next, bot),
                        Kind::Return if er || !m => t.add_transition(q, l, next, bot),
                        Kind::Call if !er => {
                            let ret = idx(Rec::Spine { after_unmatched: m, expect_return: true });
                            t.add_transition(q, l, ret, idx(Rec::Fin { expect_return: false }));
                            let cont = idx(Rec::Spine { after_unmatched: true, expect_return: false });
                            t.add_transition(q, l, bot, cont);
                        }
                        _ => {}
                    }
                }
                (Rec::Fin { expect_return: er }, kind) => {
                    let plain = idx(Rec::Fin { expect_return: false });
                    match kind {
                        Kind::Local if !er => t.add_transition(q, l, plain, bot),
                        Kind::Return if er => t.add_transition(q, l, plain, bot),
                        Kind::Call if !er => t.add_transition(q, l, idx(Rec::Fin { expect_return: true }), plain),
                        _ => {}
                    }
                }
                (Rec::Bot, _) => {}
            }
        }
        if *s == (Rec::Fin { expect_return: false }) {
            t.add_transition(q, TreeLabel::Bot, bot, bot);
        }
    }
    t
}
