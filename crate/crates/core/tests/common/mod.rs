//! Helpers shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use vldl::alphabet::{Kind, LassoWord, PushdownAlphabet};
use vldl::stacktree::{decode, encode_lasso, RegularTree, TreeLabel};
use vldl::treeauto::{BuchiGame, Player};

pub fn crl() -> Arc<PushdownAlphabet> {
    Arc::new(PushdownAlphabet::crl())
}

/// Equality of the infinite trees generated by `a` and `b`.
pub fn same_tree(a: &RegularTree, b: &RegularTree) -> bool {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(a.root(), b.root())]);
    while let Some((x, y)) = queue.pop_front() {
        if !seen.insert((x, y)) {
            continue;
        }
        if a.label(x) != b.label(y) {
            return false;
        }
        let ((xl, xr), (yl, yr)) = (a.children(x), b.children(y));
        queue.push_back((xl, yl));
        queue.push_back((xr, yr));
    }
    true
}

/// A tree is a stack tree iff it is the encoding of its own decoding.
pub fn is_stack_tree(alpha: &PushdownAlphabet, t: &RegularTree) -> bool {
    match decode(alpha, t) {
        Ok(w) => encode_lasso(alpha, &w).map(|e| same_tree(&e, t)).unwrap_or(false),
        Err(_) => false,
    }
}

fn reachable(t: &RegularTree) -> Vec<usize> {
    let mut seen = vec![false; t.len()];
    let mut out = Vec::new();
    let mut stack = vec![t.root()];
    while let Some(g) = stack.pop() {
        if std::mem::replace(&mut seen[g], true) {
            continue;
        }
        out.push(g);
        let (l, r) = t.children(g);
        stack.extend([l, r]);
    }
    out.sort_unstable();
    out
}

fn pick<T: Copy>(items: &[T], rng: &mut impl Rng) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.gen_range(0..items.len())])
    }
}

fn kind_of(alpha: &PushdownAlphabet, l: TreeLabel) -> Option<Kind> {
    l.symbol().map(|s| alpha.kind(s))
}

/// One generator-node mutation of `t` breaking the given structural
/// condition (1 to 4), or `None` when `t` has no suitable node:
/// 1. a ⊥ node gets a non-⊥ child;
/// 2. the nested infix of a matched call becomes a lone return;
/// 3. the continuation of an unmatched call starts with a return;
/// 4. a local or return node gets a non-⊥ right child.
pub fn mutate(alpha: &PushdownAlphabet, t: &RegularTree, condition: u8, rng: &mut impl Rng) -> Option<RegularTree> {
    let (r, l) = (alpha.lookup("r").ok()?, alpha.lookup("l").ok()?);
    let nodes = reachable(t);
    let bot = *nodes.iter().find(|&&g| t.label(g).is_bot())?;
    let kind = |g: usize| kind_of(alpha, t.label(g));
    match condition {
        1 => {
            let parents: Vec<(usize, bool)> = nodes
                .iter()
                .filter(|&&g| !t.label(g).is_bot())
                .flat_map(|&g| [(g, false), (g, true)])
                .filter(|&(g, d)| t.label(t.child(g, d)).is_bot())
                .collect();
            let (g, d) = pick(&parents, rng)?;
            let (t2, leaf) = t.with_state(TreeLabel::Sym(l), (bot, bot));
            let (t3, fake) = t2.with_state(TreeLabel::Bot, if rng.gen_bool(0.5) { (leaf, bot) } else { (bot, leaf) });
            Some(t3.redirect(g, d, fake))
        }
        2 => {
            let g = pick(&nodes.iter().copied().filter(|&g| kind(g) == Some(Kind::Call) && kind(t.child(g, false)) == Some(Kind::Return)).collect::<Vec<_>>(), rng)?;
            let (t2, ret) = t.with_state(TreeLabel::Sym(r), (bot, bot));
            Some(t2.redirect(g, true, ret))
        }
        3 => {
            let g = pick(&nodes.iter().copied().filter(|&g| kind(g) == Some(Kind::Call) && t.label(t.child(g, false)).is_bot()).collect::<Vec<_>>(), rng)?;
            let (t2, ret) = t.with_state(TreeLabel::Sym(r), (t.child(g, true), bot));
            Some(t2.redirect(g, true, ret))
        }
        4 => {
            let g = pick(&nodes.iter().copied().filter(|&g| matches!(kind(g), Some(Kind::Local | Kind::Return))).collect::<Vec<_>>(), rng)?;
            let (t2, leaf) = t.with_state(TreeLabel::Sym(l), (bot, bot));
            Some(t2.redirect(g, true, leaf))
        }
        _ => None,
    }
}

/// Lassos over c/r/l with `|u|, |v| ≤ 6` drawn uniformly by length and letter.
pub fn random_crl_lasso(rng: &mut impl Rng, alpha: &PushdownAlphabet) -> LassoWord {
    let syms: Vec<_> = alpha.symbols().collect();
    let u: Vec<_> = (0..rng.gen_range(0..=6)).map(|_| syms[rng.gen_range(0..syms.len())]).collect();
    let v: Vec<_> = (0..rng.gen_range(1..=6)).map(|_| syms[rng.gen_range(0..syms.len())]).collect();
    LassoWord::new(u, v).expect("nonempty period")
}

/// Strongly connected component ids and whether each component has a cycle.
fn components(succ: &[Vec<usize>]) -> (Vec<usize>, Vec<bool>) {
    let n = succ.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0)];
        while let Some((v, i)) = stack.pop() {
            if i < succ[v].len() {
                stack.push((v, i + 1));
                let w = succ[v][i];
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &succ[v] {
            pred[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = count;
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let mut cyclic = vec![false; count];
    for v in 0..n {
        for &w in &succ[v] {
            if comp[v] == comp[w] {
                cyclic[comp[v]] = true;
            }
        }
    }
    (comp, cyclic)
}

/// Vertices with a path into `targets`.
fn can_reach(succ: &[Vec<usize>], targets: &[bool]) -> Vec<bool> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &succ[v] {
            pred[w].push(v);
        }
    }
    let mut out = targets.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&v| targets[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if !out[u] {
                out[u] = true;
                stack.push(u);
            }
        }
    }
    out
}

/// Every memoryless strategy of `p`, as one chosen successor per vertex.
fn strategies(g: &BuchiGame, p: Player) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut all = vec![vec![0; n]];
    for v in 0..n {
        let succ = g.successors(v);
        if g.owner(v) != p {
            continue;
        }
        all = all.into_iter().flat_map(|s| succ.iter().map(move |&w| {
            let mut s = s.clone();
            s[v] = w;
            s
        })).collect();
    }
    all
}

fn restrict(g: &BuchiGame, p: Player, choice: &[usize]) -> Vec<Vec<usize>> {
    (0..g.len()).map(|v| if g.owner(v) == p { vec![choice[v]] } else { g.successors(v).to_vec() }).collect()
}

/// Winning regions of both players by exhaustive enumeration of memoryless
/// strategies. With the Automaton's strategy fixed, it wins from `v` iff no
/// path from `v` reaches a cycle of rejecting vertices. With the
/// Pathfinder's fixed, it wins from `v` iff no path from `v` reaches a cycle
/// through an accepting vertex.
pub fn brute_force_regions(g: &BuchiGame) -> (Vec<bool>, Vec<bool>) {
    let n = g.len();
    let mut automaton = vec![false; n];
    for s in strategies(g, Player::Automaton) {
        let succ = restrict(g, Player::Automaton, &s);
        let rejecting: Vec<Vec<usize>> = (0..n).map(|v| if g.is_accepting(v) { Vec::new() } else { succ[v].iter().copied().filter(|&w| !g.is_accepting(w)).collect() }).collect();
        let (comp, cyclic) = components(&rejecting);
        let traps: Vec<bool> = (0..n).map(|v| !g.is_accepting(v) && cyclic[comp[v]]).collect();
        let bad = can_reach(&succ, &traps);
        for v in 0..n {
            automaton[v] |= !bad[v];
        }
    }
    let mut pathfinder = vec![false; n];
    for s in strategies(g, Player::Pathfinder) {
        let succ = restrict(g, Player::Pathfinder, &s);
        let (comp, cyclic) = components(&succ);
        let hot: Vec<bool> = (0..n).map(|v| g.is_accepting(v) && cyclic[comp[v]]).collect();
        let bad = can_reach(&succ, &hot);
        for v in 0..n {
            pathfinder[v] |= !bad[v];
        }
    }
    (automaton, pathfinder)
}

/// Whether the Automaton wins from every vertex of `from` by playing `choice`.
pub fn strategy_wins(g: &BuchiGame, choice: &[Option<usize>], from: &[bool]) -> bool {
    let n = g.len();
    let fixed: Vec<usize> = (0..n).map(|v| choice[v].unwrap_or(g.successors(v)[0])).collect();
    let succ = restrict(g, Player::Automaton, &fixed);
    let rejecting: Vec<Vec<usize>> = (0..n).map(|v| if g.is_accepting(v) { Vec::new() } else { succ[v].iter().copied().filter(|&w| !g.is_accepting(w)).collect() }).collect();
    let (comp, cyclic) = components(&rejecting);
    let traps: Vec<bool> = (0..n).map(|v| !g.is_accepting(v) && cyclic[comp[v]]).collect();
    let bad = can_reach(&succ, &traps);
    (0..n).all(|v| !from[v] || !bad[v])
}
