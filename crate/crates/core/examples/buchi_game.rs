//! Solving a Büchi game: attractor-based fixpoint with memoryless
//! strategies, on a hand-written arena and on random ones.
//!
//! cargo run --example buchi_game -- [seed]

use vldl::corpus::{random_game, rng};
use vldl::treeauto::{solve_buchi_game, BuchiGame, Player};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);

    // 0 -> {1, 2}; 1 is accepting and loops back to 0; 2 is a trap the
    // Pathfinder would like to reach.
    let owner = vec![Player::Automaton, Player::Pathfinder, Player::Automaton];
    let succ = vec![vec![1, 2], vec![0], vec![2]];
    let accepting = vec![false, true, false];
    let g = BuchiGame::new(owner, succ, accepting, 0);
    let sol = solve_buchi_game(&g);
    println!("winning: {:?}", (0..g.user_vertices()).map(|v| sol.wins(v)).collect::<Vec<_>>());
    println!("strategy at 0: {:?}", sol.strategy[0]);
    print!("{}", g.to_dot());

    let mut r = rng(seed);
    for i in 0..5 {
        let g = random_game(&mut r, 12, 10_000);
        let sol = solve_buchi_game(&g);
        let won = (0..g.user_vertices()).filter(|&v| sol.wins(v)).count();
        println!("random game {i}: {} vertices, automaton wins {won}", g.user_vertices());
    }
}
