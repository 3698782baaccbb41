//! Resource caps for the constructions. Defaults can be overridden with
//! `VLDL_MAX_STATES`, `VLDL_MAX_VERTICES` and `VLDL_MAX_CONFIGS`.

use std::env;

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of states materialized for a single automaton.
    pub max_states: usize,
    /// Largest number of vertices of a single game.
    pub max_vertices: usize,
    /// Largest number of configurations explored by simulation.
    pub max_configs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: DEFAULT_CAP, max_vertices: DEFAULT_CAP, max_configs: DEFAULT_CAP }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        let read = |key: &str| env::var(key).ok().and_then(|v| v.trim().parse::<usize>().ok());
        let d = Limits::default();
        Limits {
            max_states: read("VLDL_MAX_STATES").unwrap_or(d.max_states),
            max_vertices: read("VLDL_MAX_VERTICES").unwrap_or(d.max_vertices),
            max_configs: read("VLDL_MAX_CONFIGS").unwrap_or(d.max_configs),
        }
    }

    pub fn uniform(cap: usize) -> Self {
        Limits { max_states: cap, max_vertices: cap, max_configs: cap }
    }
}
