#![allow(dead_code)]

use std::sync::Arc;

use nodeblock::{Cell, Digraph, GameState, Player};
use rand::seq::SliceRandom;
use rand::Rng;

const POOL: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

/// Random graph on up to `max_vertices` vertices. When `acyclic`, arcs
/// follow a hidden random order that differs from the name order.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, acyclic: bool) -> Digraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut names: Vec<&str> = POOL[..n].to_vec();
    names.shuffle(rng);
    let density: f64 = rng.gen_range(0.1..0.6);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || (acyclic && i > j) {
                continue;
            }
            if rng.gen_bool(density) {
                arcs.push((names[i], names[j]));
            }
        }
    }
    Digraph::build(&names, &arcs, false).unwrap()
}

pub fn random_state<R: Rng>(rng: &mut R, max_vertices: usize, max_tokens: usize) -> GameState {
    let g = Arc::new(random_graph(rng, max_vertices, true));
    let n = g.vertex_count();
    let tokens = rng.gen_range(0..=max_tokens.min(n));
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    let mut cells = vec![Cell::Empty; n];
    for &v in &slots[..tokens] {
        cells[v] = if rng.gen_bool(0.5) {
            Cell::White
        } else {
            Cell::Black
        };
    }
    let p = if rng.gen_bool(0.5) {
        Player::White
    } else {
        Player::Black
    };
    GameState::new(g, cells, p).unwrap()
}

/// Plain recursive minimax over the public game API, without any table.
pub fn brute_force_wins(s: &GameState) -> bool {
    s.legal_moves()
        .iter()
        .any(|m| !brute_force_wins(&s.apply_move(m).unwrap()))
}
