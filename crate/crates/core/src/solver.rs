//! Exact win/loss solver for node blocking on acyclic graphs.
//!
//! Positions are packed into a pair of vertex bitmasks plus the side to move.
//! The search is an iterative depth-first negamax over those masks, with an
//! optional transposition table private to each call. Children are scanned
//! in lexicographic move order and the scan stops at the first child that is
//! lost for the opponent, so the move recorded for a won position is always
//! the smallest winning one.

use std::hash::Hash;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::digraph::GraphError;
use crate::game::{Cell, GameState, Move, Player};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    WinForCurrent,
    LossForCurrent,
}

impl Outcome {
    pub fn is_win(self) -> bool {
        self == Outcome::WinForCurrent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Cap on expanded positions; `None` is unlimited.
    pub max_states: Option<u64>,
    pub memoize: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_states: None,
            memoize: true,
        }
    }
}

impl SolveLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_max_states(max_states: u64) -> Self {
        SolveLimits {
            max_states: Some(max_states.max(1)),
            memoize: true,
        }
    }

    pub fn without_memo(self) -> Self {
        SolveLimits {
            memoize: false,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub best: Option<Move>,
    pub states_visited: u64,
    pub memo_entries: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("graph is not acyclic: {0}")]
    NotADag(#[from] GraphError),
    #[error("state limit exceeded after {states_visited} states")]
    ResourceExhausted { states_visited: u64 },
}

/// Canonical key of a position: occupied-vertex bitsets over the graph's
/// fixed vertex order, plus the side to move.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKey {
    pub white: Vec<u64>,
    pub black: Vec<u64>,
    pub to_move: Player,
}

pub fn encode_key(s: &GameState) -> StateKey {
    let words = s.cells().len().div_ceil(64);
    let mut white = vec![0u64; words];
    let mut black = vec![0u64; words];
    for (i, cell) in s.cells().iter().enumerate() {
        match cell {
            Cell::White => white[i / 64] |= 1 << (i % 64),
            Cell::Black => black[i / 64] |= 1 << (i % 64),
            Cell::Empty => {}
        }
    }
    StateKey {
        white,
        black,
        to_move: s.to_move(),
    }
}

pub fn solve(s: &GameState, limits: SolveLimits) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let mut solver = Solver::new(s, limits)?;
    let root = solver.solve_root(s)?;
    Ok(SolveReport {
        outcome: root.outcome,
        best: root.best.map(|(u, v)| s.index_move(u, v)),
        states_visited: solver.visited(),
        memo_entries: solver.memo_entries(),
        elapsed: start.elapsed(),
    })
}

pub fn best_move(s: &GameState, limits: SolveLimits) -> Result<Option<Move>, SolveError> {
    Ok(solve(s, limits)?.best)
}

/// Best-move line from `s` until the side to move is stuck. One
/// transposition table is shared across the whole line and `max_states`
/// bounds the total.
pub fn principal_variation(s: &GameState, limits: SolveLimits) -> Result<Vec<Move>, SolveError> {
    let mut solver = Solver::new(s, limits)?;
    let mut state = s.clone();
    let mut line = Vec::new();
    while let Some((u, v)) = solver.solve_root(&state)?.best {
        line.push(state.index_move(u, v));
        state = state.apply_indices(u, v);
    }
    Ok(line)
}

struct RootResult {
    outcome: Outcome,
    best: Option<(usize, usize)>,
}

/// Reusable solver over one graph; the table persists across `solve_root`
/// calls on the same instance.
pub(crate) struct Solver {
    inner: Inner,
}

enum Inner {
    W1(Search<[u64; 1]>),
    W2(Search<[u64; 2]>),
    W4(Search<[u64; 4]>),
    W8(Search<[u64; 8]>),
    Wide(Search<Vec<u64>>),
}

macro_rules! dispatch {
    ($inner:expr, $s:ident => $body:expr) => {
        match $inner {
            Inner::W1($s) => $body,
            Inner::W2($s) => $body,
            Inner::W4($s) => $body,
            Inner::W8($s) => $body,
            Inner::Wide($s) => $body,
        }
    };
}

impl Solver {
    pub(crate) fn new(s: &GameState, limits: SolveLimits) -> Result<Solver, SolveError> {
        s.graph().topological_indices()?;
        let n = s.graph().vertex_count();
        let inner = match n.div_ceil(64) {
            0 | 1 => Inner::W1(Search::new(s, limits)),
            2 => Inner::W2(Search::new(s, limits)),
            3 | 4 => Inner::W4(Search::new(s, limits)),
            5..=8 => Inner::W8(Search::new(s, limits)),
            _ => Inner::Wide(Search::new(s, limits)),
        };
        Ok(Solver { inner })
    }

    fn solve_root(&mut self, s: &GameState) -> Result<RootResult, SolveError> {
        dispatch!(&mut self.inner, search => search.solve_root(s))
    }

    fn visited(&self) -> u64 {
        dispatch!(&self.inner, search => search.visited)
    }

    fn memo_entries(&self) -> u64 {
        dispatch!(&self.inner, search => search.memo.len() as u64)
    }
}

/// Fixed-width vertex bitset.
trait Mask: Clone + Eq + Hash {
    fn zero(bits: usize) -> Self;
    fn set(&mut self, i: usize);
    fn clear(&mut self, i: usize);
    /// Bits of `self` that are not in `a` or `b`.
    fn minus_both(&self, a: &Self, b: &Self) -> Self;
    /// Calls `f` for each set bit in ascending order.
    fn for_each_bit(&self, f: impl FnMut(usize));
}

impl<const N: usize> Mask for [u64; N] {
    fn zero(bits: usize) -> Self {
        debug_assert!(bits <= 64 * N);
        [0; N]
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    fn minus_both(&self, a: &Self, b: &Self) -> Self {
        std::array::from_fn(|w| self[w] & !(a[w] | b[w]))
    }

    #[inline]
    fn for_each_bit(&self, mut f: impl FnMut(usize)) {
        for (w, &word) in self.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                f(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
    }
}

impl Mask for Vec<u64> {
    fn zero(bits: usize) -> Self {
        vec![0; bits.div_ceil(64)]
    }

    fn set(&mut self, i: usize) {
        self[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self[i / 64] &= !(1 << (i % 64));
    }

    fn minus_both(&self, a: &Self, b: &Self) -> Self {
        self.iter()
            .zip(a.iter().zip(b))
            .map(|(&x, (&p, &q))| x & !(p | q))
            .collect()
    }

    fn for_each_bit(&self, mut f: impl FnMut(usize)) {
        for (w, &word) in self.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                f(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Position<M> {
    white: M,
    black: M,
    white_to_move: bool,
}

impl<M: Mask> Position<M> {
    fn from_state(s: &GameState) -> Self {
        let n = s.cells().len();
        let mut white = M::zero(n);
        let mut black = M::zero(n);
        for (i, c) in s.cells().iter().enumerate() {
            match c {
                Cell::White => white.set(i),
                Cell::Black => black.set(i),
                Cell::Empty => {}
            }
        }
        Position {
            white,
            black,
            white_to_move: s.to_move() == Player::White,
        }
    }

    fn play(&self, from: usize, to: usize) -> Self {
        let mut next = self.clone();
        let own = if self.white_to_move {
            &mut next.white
        } else {
            &mut next.black
        };
        own.clear(from);
        own.set(to);
        next.white_to_move = !self.white_to_move;
        next
    }
}

struct Frame<M> {
    pos: Position<M>,
    /// Range of this frame's moves in the shared move buffer.
    start: usize,
    end: usize,
    next: usize,
}

struct Search<M> {
    out: Vec<M>,
    limits: SolveLimits,
    memo: FxHashMap<Position<M>, bool>,
    visited: u64,
}

impl<M: Mask> Search<M> {
    fn new(s: &GameState, limits: SolveLimits) -> Self {
        let g = s.graph();
        let n = g.vertex_count();
        let out = (0..n)
            .map(|v| {
                let mut m = M::zero(n);
                for &u in g.out_indices(v) {
                    m.set(u);
                }
                m
            })
            .collect();
        Search {
            out,
            limits,
            memo: FxHashMap::default(),
            visited: 0,
        }
    }

    fn gen_moves(&self, pos: &Position<M>, buf: &mut Vec<(u32, u32)>) {
        let own = if pos.white_to_move {
            &pos.white
        } else {
            &pos.black
        };
        own.for_each_bit(|from| {
            let targets = self.out[from].minus_both(&pos.white, &pos.black);
            targets.for_each_bit(|to| buf.push((from as u32, to as u32)));
        });
    }

    fn expand(
        &mut self,
        pos: Position<M>,
        buf: &mut Vec<(u32, u32)>,
        stack: &mut Vec<Frame<M>>,
    ) -> Result<(), SolveError> {
        self.visited += 1;
        if let Some(max) = self.limits.max_states {
            if self.visited > max {
                return Err(SolveError::ResourceExhausted {
                    states_visited: self.visited - 1,
                });
            }
        }
        let start = buf.len();
        self.gen_moves(&pos, buf);
        stack.push(Frame {
            pos,
            start,
            end: buf.len(),
            next: start,
        });
        Ok(())
    }

    fn solve_root(&mut self, s: &GameState) -> Result<RootResult, SolveError> {
        let root = Position::<M>::from_state(s);
        let mut buf: Vec<(u32, u32)> = Vec::new();
        let mut stack: Vec<Frame<M>> = Vec::new();
        self.expand(root, &mut buf, &mut stack)?;
        let first_move = buf.first().map(|&(u, v)| (u as usize, v as usize));

        // `child_result` carries the value of the frame just popped, from
        // the point of view of the side to move in that frame.
        let mut child_result: Option<bool> = None;
        loop {
            let top = stack
                .last_mut()
                .expect("stack holds the root until it resolves");
            let mut resolved = None;
            match child_result.take() {
                Some(false) => resolved = Some(true),
                Some(true) | None => {
                    if top.next == top.end {
                        resolved = Some(false);
                    }
                }
            }

            if let Some(win) = resolved {
                let frame = stack.pop().expect("non-empty");
                let winning_move = win.then(|| buf[frame.next - 1]);
                buf.truncate(frame.start);
                if self.limits.memoize {
                    self.memo.insert(frame.pos, win);
                }
                if stack.is_empty() {
                    let best = match winning_move {
                        Some((u, v)) => Some((u as usize, v as usize)),
                        None => first_move,
                    };
                    let outcome = if win {
                        Outcome::WinForCurrent
                    } else {
                        Outcome::LossForCurrent
                    };
                    return Ok(RootResult { outcome, best });
                }
                child_result = Some(win);
                continue;
            }

            let (u, v) = buf[top.next];
            top.next += 1;
            let child = top.pos.play(u as usize, v as usize);
            if self.limits.memoize {
                if let Some(&win) = self.memo.get(&child) {
                    child_result = Some(win);
                    continue;
                }
            }
            self.expand(child, &mut buf, &mut stack)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::digraph::Digraph;
    use crate::reduction::{build_component, Parity};

    const NO_TOKENS: &[&str] = &[];

    fn state(
        vertices: &[&str],
        arcs: &[(&str, &str)],
        white: &[&str],
        black: &[&str],
        p: Player,
    ) -> GameState {
        let g = Arc::new(Digraph::build(vertices, arcs, false).unwrap());
        GameState::from_tokens(g, white, black, p).unwrap()
    }

    fn toy() -> GameState {
        state(&["u", "v"], &[("u", "v")], &["u"], NO_TOKENS, Player::White)
    }

    #[test]
    fn forced_win() {
        let r = solve(&toy(), SolveLimits::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::WinForCurrent);
        assert_eq!(r.best, Some(Move::new("u", "v", Player::White)));
        assert_eq!(
            principal_variation(&toy(), SolveLimits::unlimited()).unwrap(),
            vec![Move::new("u", "v", Player::White)]
        );
    }

    #[test]
    fn terminal_state() {
        let s = state(&["u", "v"], &[("u", "v")], NO_TOKENS, &["u"], Player::White);
        let r = solve(&s, SolveLimits::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::LossForCurrent);
        assert_eq!(r.best, None);
        assert_eq!(r.states_visited, 1);
        assert!(principal_variation(&s, SolveLimits::unlimited())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn smallest_winning_move() {
        let s = state(
            &["a", "x", "y"],
            &[("a", "x"), ("a", "y")],
            &["a"],
            NO_TOKENS,
            Player::White,
        );
        assert_eq!(
            best_move(&s, SolveLimits::unlimited()).unwrap(),
            Some(Move::new("a", "x", Player::White))
        );
    }

    #[test]
    fn losing_side_plays_smallest_move() {
        // White must move a->b, after which Black answers c->d and White is stuck.
        let s = state(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("c", "d")],
            &["a"],
            &["c"],
            Player::White,
        );
        let r = solve(&s, SolveLimits::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::LossForCurrent);
        assert_eq!(r.best, Some(Move::new("a", "b", Player::White)));
    }

    #[test]
    fn component_arrivals_are_won_by_owner() {
        for (i, parity) in [(1, Parity::White), (2, Parity::Black)] {
            let s = build_component(i, parity).unwrap().standalone_state(true);
            assert_eq!(s.to_move(), parity.player());
            for memoize in [true, false] {
                let limits = SolveLimits {
                    max_states: None,
                    memoize,
                };
                assert_eq!(solve(&s, limits).unwrap().outcome, Outcome::WinForCurrent);
            }
        }
    }

    #[test]
    fn white_arrival_line() {
        let s = build_component(1, Parity::White)
            .unwrap()
            .standalone_state(true);
        assert_eq!(
            best_move(&s, SolveLimits::unlimited()).unwrap(),
            Some(Move::new("G1.v4", "G1.t", Player::White))
        );
        let pv = principal_variation(&s, SolveLimits::unlimited()).unwrap();
        let shown: Vec<String> = pv.iter().map(|m| format!("{}{}", m.player, m)).collect();
        assert_eq!(
            shown,
            [
                "WG1.v4->G1.t",
                "BG1.v2->G1.v3",
                "WG1.x->G1.v4",
                "BG1.v1->G1.v2",
                "WG1.s->G1.v1"
            ]
        );
    }

    #[test]
    fn cyclic_graph_rejected() {
        let s = state(
            &["a", "b"],
            &[("a", "b"), ("b", "a")],
            &["a"],
            NO_TOKENS,
            Player::White,
        );
        assert!(matches!(
            solve(&s, SolveLimits::unlimited()),
            Err(SolveError::NotADag(_))
        ));
    }

    #[test]
    fn state_limit_is_an_error_not_an_answer() {
        let s = build_component(2, Parity::Black)
            .unwrap()
            .standalone_state(true);
        let err = solve(&s, SolveLimits::with_max_states(3)).unwrap_err();
        assert_eq!(err, SolveError::ResourceExhausted { states_visited: 3 });
        assert!(solve(&s, SolveLimits::with_max_states(3).without_memo()).is_err());
    }

    #[test]
    fn key_tracks_mover_and_tokens() {
        let s = build_component(1, Parity::White)
            .unwrap()
            .standalone_state(true);
        assert_eq!(encode_key(&s), encode_key(&s.clone()));
        assert_ne!(encode_key(&s), encode_key(&s.with_to_move(Player::Black)));
        let moved = s
            .apply_move(&Move::new("G1.v4", "G1.t", Player::White))
            .unwrap()
            .with_to_move(Player::White);
        assert_ne!(encode_key(&s), encode_key(&moved));
    }

    #[test]
    fn keys_ignore_move_order() {
        let s = state(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("c", "d")],
            &["a", "c"],
            NO_TOKENS,
            Player::White,
        );
        let via_a = s
            .apply_move(&Move::new("a", "b", Player::White))
            .unwrap()
            .with_to_move(Player::White)
            .apply_move(&Move::new("c", "d", Player::White))
            .unwrap();
        let via_c = s
            .apply_move(&Move::new("c", "d", Player::White))
            .unwrap()
            .with_to_move(Player::White)
            .apply_move(&Move::new("a", "b", Player::White))
            .unwrap();
        assert_eq!(encode_key(&via_a), encode_key(&via_c));
        let moved_once = s.apply_move(&Move::new("a", "b", Player::White)).unwrap();
        assert_ne!(
            encode_key(&moved_once),
            encode_key(&s.with_to_move(Player::Black))
        );
    }
}
