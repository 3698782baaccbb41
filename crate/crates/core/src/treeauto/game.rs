//! Two-player Büchi games solved by the classical attractor iteration.

use std::collections::VecDeque;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// Wants to visit accepting vertices infinitely often.
    Automaton,
    Pathfinder,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Automaton => Player::Pathfinder,
            Player::Pathfinder => Player::Automaton,
        }
    }
}

/// A game arena in which every vertex has at least one successor. Dead ends
/// passed to [`BuchiGame::new`] are redirected to a sink that makes their
/// owner lose.
#[derive(Debug, Clone)]
pub struct BuchiGame {
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    initial: usize,
    user_vertices: usize,
}

impl BuchiGame {
    pub fn new(mut owner: Vec<Player>, mut succ: Vec<Vec<usize>>, mut accepting: Vec<bool>, initial: usize) -> Self {
        assert_eq!(owner.len(), succ.len());
        assert_eq!(owner.len(), accepting.len());
        let n = owner.len();
        // A stuck player loses: route the play into a sink won by the opponent.
        let (win_sink, lose_sink) = (n, n + 1);
        let mut used = false;
        for v in 0..n {
            if succ[v].is_empty() {
                used = true;
                succ[v].push(match owner[v] {
                    Player::Automaton => lose_sink,
                    Player::Pathfinder => win_sink,
                });
            }
        }
        if used {
            owner.extend([Player::Automaton, Player::Automaton]);
            succ.extend([vec![win_sink], vec![lose_sink]]);
            accepting.extend([true, false]);
        }
        BuchiGame { owner, succ, accepting, initial, user_vertices: n }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Vertices supplied by the caller (sinks added for dead ends excluded).
    pub fn user_vertices(&self) -> usize {
        self.user_vertices
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn is_accepting(&self, v: usize) -> bool {
        self.accepting[v]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, s) in self.succ.iter().enumerate() {
            for &t in s {
                pred[t].push(v);
            }
        }
        pred
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph game {\n");
        for v in 0..self.len() {
            let shape = match self.owner[v] {
                Player::Automaton => "circle",
                Player::Pathfinder => "box",
            };
            let periph = if self.accepting[v] { 2 } else { 1 };
            let _ = writeln!(s, "  v{v} [shape={shape}, peripheries={periph}, label=\"{v}\"];");
        }
        for (v, succ) in self.succ.iter().enumerate() {
            for t in succ {
                let _ = writeln!(s, "  v{v} -> v{t};");
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Vertices from which the Automaton player wins.
    pub winning: Vec<bool>,
    /// A memoryless winning strategy on the Automaton's winning vertices.
    pub strategy: Vec<Option<usize>>,
}

impl Solution {
    pub fn wins(&self, v: usize) -> bool {
        self.winning[v]
    }
}

/// Attractor of `target` for `player` inside the subarena `alive`. Returns the
/// attractor and, for vertices of `player`, the successor that attracted them.
fn attractor(
    g: &BuchiGame,
    pred: &[Vec<usize>],
    alive: &[bool],
    target: &[bool],
    player: Player,
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = g.len();
    let mut inside = vec![false; n];
    let mut choice = vec![None; n];
    let mut count: Vec<usize> =
        (0..n).map(|v| g.succ[v].iter().filter(|t| alive[**t]).count()).collect();
    let mut queue = VecDeque::new();
    for v in 0..n {
        if alive[v] && target[v] {
            inside[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(t) = queue.pop_front() {
        for &v in &pred[t] {
            if !alive[v] || inside[v] {
                continue;
            }
            if g.owner[v] == player {
                inside[v] = true;
                choice[v] = Some(t);
                queue.push_back(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    inside[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    (inside, choice)
}

pub fn solve_buchi_game(g: &BuchiGame) -> Solution {
    let n = g.len();
    let pred = g.predecessors();
    let mut alive = vec![true; n];
    loop {
        let target: Vec<bool> = (0..n).map(|v| alive[v] && g.accepting[v]).collect();
        let (reach, _) = attractor(g, &pred, &alive, &target, Player::Automaton);
        let trap: Vec<bool> = (0..n).map(|v| alive[v] && !reach[v]).collect();
        if !trap.iter().any(|b| *b) {
            break;
        }
        let (lost, _) = attractor(g, &pred, &alive, &trap, Player::Pathfinder);
        for v in 0..n {
            if lost[v] {
                alive[v] = false;
            }
        }
    }
    let target: Vec<bool> = (0..n).map(|v| alive[v] && g.accepting[v]).collect();
    let (_, mut strategy) = attractor(g, &pred, &alive, &target, Player::Automaton);
    for v in 0..n {
        if alive[v] && g.owner[v] == Player::Automaton && strategy[v].is_none() {
            strategy[v] = g.succ[v].iter().copied().find(|t| alive[*t]);
        }
        if !alive[v] {
            strategy[v] = None;
        }
    }
    Solution { winning: alive, strategy }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::*;

    #[test]
    fn accepting_self_loop_wins() {
        let g = BuchiGame::new(vec![Automaton], vec![vec![0]], vec![true], 0);
        let s = solve_buchi_game(&g);
        assert!(s.wins(0));
        assert_eq!(s.strategy[0], Some(0));
    }

    #[test]
    fn chain_into_rejecting_sink_loses() {
        let g = BuchiGame::new(
            vec![Automaton, Automaton, Automaton],
            vec![vec![1], vec![2], vec![2]],
            vec![true, true, false],
            0,
        );
        let s = solve_buchi_game(&g);
        assert!(!s.wins(0) && !s.wins(1) && !s.wins(2));
    }

    #[test]
    fn dead_ends_lose_for_their_owner() {
        let g = BuchiGame::new(
            vec![Pathfinder, Automaton, Pathfinder],
            vec![vec![1, 2], vec![], vec![]],
            vec![false, true, false],
            0,
        );
        let s = solve_buchi_game(&g);
        assert!(!s.wins(1));
        assert!(s.wins(2));
        assert!(!s.wins(0));
    }

    #[test]
    fn pathfinder_can_escape_acceptance() {
        // 0 (pathfinder) chooses between accepting loop 1 and a plain loop 2.
        let g = BuchiGame::new(
            vec![Pathfinder, Automaton, Automaton],
            vec![vec![1, 2], vec![0], vec![2]],
            vec![false, true, false],
            0,
        );
        assert!(!solve_buchi_game(&g).wins(0));
        let g = BuchiGame::new(
            vec![Automaton, Automaton, Automaton],
            vec![vec![1, 2], vec![0], vec![2]],
            vec![false, true, false],
            0,
        );
        let s = solve_buchi_game(&g);
        assert!(s.wins(0));
        assert_eq!(s.strategy[0], Some(1));
    }
}
