//! Line-based text format for game positions.
//!
//! ```text
//! # comment
//! nbg 1
//! v <name>
//! a <from> <to>
//! w <name>
//! b <name>
//! turn W|B
//! ```
//!
//! Serialization sorts vertices, arcs and tokens by name.

use std::sync::Arc;

use thiserror::Error;

use crate::digraph::{Digraph, GraphError};
use crate::game::{Cell, GameState, Player};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NbgError {
    #[error("missing or unsupported version line (expected `nbg {FORMAT_VERSION}`)")]
    BadVersion,
    #[error("line {line}: unknown vertex {name}")]
    UnknownVertex { line: usize, name: String },
    #[error("line {line}: vertex {name} already holds a token")]
    DuplicateToken { line: usize, name: String },
    #[error("no `turn` line")]
    MissingTurn,
    #[error("line {line}: duplicate `turn` line")]
    DuplicateTurn { line: usize },
    #[error("line {line}: malformed line {text:?}")]
    Malformed { line: usize, text: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn serialize_instance(s: &GameState) -> String {
    let g = s.graph();
    let mut out = format!("nbg {FORMAT_VERSION}\n");
    for v in g.vertices() {
        out.push_str(&format!("v {v}\n"));
    }
    for (u, v) in g.arcs() {
        out.push_str(&format!("a {u} {v}\n"));
    }
    for v in s.white_vertices() {
        out.push_str(&format!("w {v}\n"));
    }
    for v in s.black_vertices() {
        out.push_str(&format!("b {v}\n"));
    }
    out.push_str(&format!("turn {}\n", s.to_move()));
    out
}

pub fn parse_instance(text: &str) -> Result<GameState, NbgError> {
    let mut seen_version = false;
    let mut vertices: Vec<&str> = Vec::new();
    let mut arcs: Vec<(&str, &str)> = Vec::new();
    let mut tokens: Vec<(usize, &str, Cell)> = Vec::new();
    let mut turn: Option<Player> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if !seen_version {
            match fields.as_slice() {
                ["nbg", v] if v.parse() == Ok(FORMAT_VERSION) => {
                    seen_version = true;
                    continue;
                }
                _ => return Err(NbgError::BadVersion),
            }
        }
        let malformed = || NbgError::Malformed {
            line,
            text: trimmed.to_string(),
        };
        match fields.as_slice() {
            ["v", name] => vertices.push(name),
            ["a", from, to] => arcs.push((from, to)),
            ["w", name] => tokens.push((line, name, Cell::White)),
            ["b", name] => tokens.push((line, name, Cell::Black)),
            ["turn", p] => {
                let player = Player::from_letter(p).ok_or_else(malformed)?;
                if turn.replace(player).is_some() {
                    return Err(NbgError::DuplicateTurn { line });
                }
            }
            _ => return Err(malformed()),
        }
    }
    if !seen_version {
        return Err(NbgError::BadVersion);
    }
    let to_move = turn.ok_or(NbgError::MissingTurn)?;
    let graph = Arc::new(Digraph::build(&vertices, &arcs, false)?);

    let mut cells = vec![Cell::Empty; graph.vertex_count()];
    for (line, name, cell) in tokens {
        let idx = graph
            .index_of(name)
            .ok_or_else(|| NbgError::UnknownVertex {
                line,
                name: name.to_string(),
            })?;
        if cells[idx] != Cell::Empty {
            return Err(NbgError::DuplicateToken {
                line,
                name: name.to_string(),
            });
        }
        cells[idx] = cell;
    }
    Ok(GameState::new(graph, cells, to_move).expect("cells sized from the graph"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{build_component, Parity};

    #[test]
    fn round_trip_component() {
        let s = build_component(1, Parity::White)
            .unwrap()
            .standalone_state(true);
        let text = serialize_instance(&s);
        assert!(text.starts_with("nbg 1\nv G1.s\n"));
        assert!(text.ends_with("turn W\n"));
        assert_eq!(parse_instance(&text).unwrap(), s);
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_instance("# two vertices\n\nnbg 1\nv u\nv v\na u v\n# token\nw u\nturn W\n")
            .unwrap();
        assert_eq!(s.legal_moves().len(), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_instance("nbg 1\nv u\nw u\nb u\nturn W\n").unwrap_err(),
            NbgError::DuplicateToken {
                line: 4,
                name: "u".into()
            }
        );
        assert_eq!(
            parse_instance("nbg 1\nv u\nw u\n").unwrap_err(),
            NbgError::MissingTurn
        );
        assert_eq!(
            parse_instance("nbg 2\nv u\nturn W\n").unwrap_err(),
            NbgError::BadVersion
        );
        assert_eq!(
            parse_instance("v u\nturn W\n").unwrap_err(),
            NbgError::BadVersion
        );
        assert_eq!(parse_instance("").unwrap_err(), NbgError::BadVersion);
        assert!(matches!(
            parse_instance("nbg 1\nv u\nw z\nturn B\n"),
            Err(NbgError::UnknownVertex { .. })
        ));
        assert!(matches!(
            parse_instance("nbg 1\nv u\na u z\nturn B\n"),
            Err(NbgError::Graph(GraphError::UnknownEndpoint { .. }))
        ));
        assert!(matches!(
            parse_instance("nbg 1\nv u\nturn X\n"),
            Err(NbgError::Malformed { line: 3, .. })
        ));
        assert!(matches!(
            parse_instance("nbg 1\nv u\nturn W\nturn B\n"),
            Err(NbgError::DuplicateTurn { line: 4 })
        ));
    }
}
