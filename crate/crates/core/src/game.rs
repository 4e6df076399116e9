//! Node-blocking rules.
//!
//! Every vertex holds at most one token. The player to move slides one of
//! their own tokens along an arc onto an empty vertex; a player with no such
//! move loses.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::digraph::{Digraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    White,
    Black,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::White => Player::Black,
            Player::Black => Player::White,
        }
    }

    pub fn token(self) -> Cell {
        match self {
            Player::White => Cell::White,
            Player::Black => Cell::Black,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Player::White => 'W',
            Player::Black => 'B',
        }
    }

    pub fn from_letter(c: &str) -> Option<Player> {
        match c {
            "W" | "w" => Some(Player::White),
            "B" | "b" => Some(Player::Black),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Contents of a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Cell {
    #[default]
    Empty,
    White,
    Black,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: VertexId,
    pub to: VertexId,
    pub player: Player,
}

impl Move {
    /// Convenience constructor for scripted lines; panics on invalid names.
    pub fn new(from: &str, to: &str, player: Player) -> Move {
        Move {
            from: VertexId::new(from).expect("valid vertex name"),
            to: VertexId::new(to).expect("valid vertex name"),
            player,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IllegalReason {
    WrongPlayer,
    UnknownVertex,
    NotOwner,
    TargetOccupied,
    MissingArc,
}

impl fmt::Display for IllegalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IllegalReason::WrongPlayer => "wrong player to move",
            IllegalReason::UnknownVertex => "unknown vertex",
            IllegalReason::NotOwner => "source does not hold the mover's token",
            IllegalReason::TargetOccupied => "target occupied",
            IllegalReason::MissingArc => "no such arc",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: Move, reason: IllegalReason },
    #[error("move {index} ({mv}) is illegal: {reason}")]
    IllegalAt {
        index: usize,
        mv: Move,
        reason: IllegalReason,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("vertex {0} already holds a token")]
    DuplicateToken(String),
    #[error("occupancy has {got} cells, graph has {expected} vertices")]
    OccupancySize { expected: usize, got: usize },
}

/// A position: shared graph, one cell per vertex, and the player to move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    graph: Arc<Digraph>,
    cells: Vec<Cell>,
    to_move: Player,
}

impl GameState {
    pub fn new(graph: Arc<Digraph>, cells: Vec<Cell>, to_move: Player) -> Result<Self, GameError> {
        if cells.len() != graph.vertex_count() {
            return Err(GameError::OccupancySize {
                expected: graph.vertex_count(),
                got: cells.len(),
            });
        }
        Ok(GameState {
            graph,
            cells,
            to_move,
        })
    }

    /// Places tokens by vertex name. All other vertices start empty.
    pub fn from_tokens<W, B>(
        graph: Arc<Digraph>,
        white: &[W],
        black: &[B],
        to_move: Player,
    ) -> Result<Self, GameError>
    where
        W: AsRef<str>,
        B: AsRef<str>,
    {
        let mut cells = vec![Cell::Empty; graph.vertex_count()];
        let names = white
            .iter()
            .map(|v| (v.as_ref(), Cell::White))
            .chain(black.iter().map(|v| (v.as_ref(), Cell::Black)));
        for (name, cell) in names {
            let idx = graph
                .index_of(name)
                .ok_or_else(|| GameError::UnknownVertex(name.to_string()))?;
            if cells[idx] != Cell::Empty {
                return Err(GameError::DuplicateToken(name.to_string()));
            }
            cells[idx] = cell;
        }
        Ok(GameState {
            graph,
            cells,
            to_move,
        })
    }

    pub fn graph(&self) -> &Arc<Digraph> {
        &self.graph
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn with_to_move(&self, player: Player) -> GameState {
        GameState {
            to_move: player,
            ..self.clone()
        }
    }

    pub fn cell(&self, name: &str) -> Option<Cell> {
        self.graph.index_of(name).map(|i| self.cells[i])
    }

    fn vertices_with(&self, cell: Cell) -> Vec<&VertexId> {
        self.cells
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == cell)
            .map(|(i, _)| self.graph.name(i))
            .collect()
    }

    pub fn white_vertices(&self) -> Vec<&VertexId> {
        self.vertices_with(Cell::White)
    }

    pub fn black_vertices(&self) -> Vec<&VertexId> {
        self.vertices_with(Cell::Black)
    }

    pub fn empty_vertices(&self) -> Vec<&VertexId> {
        self.vertices_with(Cell::Empty)
    }

    pub fn token_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != Cell::Empty).count()
    }

    /// Legal moves as `(from, to)` vertex indices, in lexicographic order.
    pub fn legal_move_indices(&self) -> Vec<(usize, usize)> {
        let own = self.to_move.token();
        let mut moves = Vec::new();
        for (from, _) in self.cells.iter().enumerate().filter(|&(_, &c)| c == own) {
            for &to in self.graph.out_indices(from) {
                if self.cells[to] == Cell::Empty {
                    moves.push((from, to));
                }
            }
        }
        moves
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        self.legal_move_indices()
            .into_iter()
            .map(|(u, v)| self.index_move(u, v))
            .collect()
    }

    pub(crate) fn index_move(&self, from: usize, to: usize) -> Move {
        Move {
            from: self.graph.name(from).clone(),
            to: self.graph.name(to).clone(),
            player: self.to_move,
        }
    }

    pub fn current_player_loses(&self) -> bool {
        let own = self.to_move.token();
        !self.cells.iter().enumerate().any(|(from, &c)| {
            c == own
                && self
                    .graph
                    .out_indices(from)
                    .iter()
                    .any(|&to| self.cells[to] == Cell::Empty)
        })
    }

    /// Checks `m` against this position, returning its vertex indices.
    pub fn check_move(&self, m: &Move) -> Result<(usize, usize), IllegalReason> {
        if m.player != self.to_move {
            return Err(IllegalReason::WrongPlayer);
        }
        let from = self
            .graph
            .index_of(m.from.as_str())
            .ok_or(IllegalReason::UnknownVertex)?;
        let to = self
            .graph
            .index_of(m.to.as_str())
            .ok_or(IllegalReason::UnknownVertex)?;
        if self.cells[from] != m.player.token() {
            return Err(IllegalReason::NotOwner);
        }
        if self.cells[to] != Cell::Empty {
            return Err(IllegalReason::TargetOccupied);
        }
        if self.graph.out_indices(from).binary_search(&to).is_err() {
            return Err(IllegalReason::MissingArc);
        }
        Ok((from, to))
    }

    pub fn apply_move(&self, m: &Move) -> Result<GameState, GameError> {
        let (from, to) = self
            .check_move(m)
            .map_err(|reason| GameError::IllegalMove {
                mv: m.clone(),
                reason,
            })?;
        Ok(self.apply_indices(from, to))
    }

    /// Applies a move known to be legal.
    pub(crate) fn apply_indices(&self, from: usize, to: usize) -> GameState {
        let mut cells = self.cells.clone();
        cells[to] = cells[from];
        cells[from] = Cell::Empty;
        GameState {
            graph: Arc::clone(&self.graph),
            cells,
            to_move: self.to_move.opponent(),
        }
    }

    pub fn replay(&self, moves: &[Move]) -> Result<Trace, GameError> {
        let mut state = self.clone();
        for (index, m) in moves.iter().enumerate() {
            state = state.apply_move(m).map_err(|e| match e {
                GameError::IllegalMove { mv, reason } => GameError::IllegalAt { index, mv, reason },
                other => other,
            })?;
        }
        Ok(Trace {
            initial: self.clone(),
            moves: moves.to_vec(),
            final_state: state,
        })
    }
}

/// A validated sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: GameState,
    pub moves: Vec<Move>,
    pub final_state: GameState,
}
