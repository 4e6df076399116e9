//! Compiles a restricted QBF into a node-blocking instance.
//!
//! Each variable x_i gets a component G_i: a white gadget for odd i, a black
//! one for even i. Components are chained by sharing s(G_i) with t(G_{i+1}).
//! A white vertex `w` feeds s(G_n), each clause F_j gets a black vertex with
//! an arc into `w`, and x(G_i) / y(G_i) point at the clauses containing x_i
//! and its negation respectively. White moves first.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::digraph::{Digraph, GraphError, VertexId};
use crate::game::{Cell, GameState, Player, Trace};
use crate::qbf::{Literal, QbfError, QbfFormula, RestrictedQbf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("component {index} must be {expected:?}")]
    ParityMismatch { index: u32, expected: Parity },
    #[error("invalid input: {0}")]
    InvalidInput(#[from] QbfError),
    #[error("components disagree on the token at junction {0}")]
    JunctionConflict(VertexId),
    #[error("graph construction failed: {0}")]
    Graph(#[from] GraphError),
    #[error("trace sets x{0} both true and false")]
    ContradictoryTrace(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    White,
    Black,
}

impl Parity {
    pub fn of_index(i: u32) -> Parity {
        if i % 2 == 1 {
            Parity::White
        } else {
            Parity::Black
        }
    }

    pub fn player(self) -> Player {
        match self {
            Parity::White => Player::White,
            Parity::Black => Player::Black,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    S,
    T,
    X,
    Y,
    /// `v1` to `v8`.
    V(u8),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::S => f.write_str("s"),
            Role::T => f.write_str("t"),
            Role::X => f.write_str("x"),
            Role::Y => f.write_str("y"),
            Role::V(k) => write!(f, "v{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleLabel {
    Component { index: u32, role: Role },
    Clause(u32),
    W,
}

impl RoleLabel {
    pub fn comp(index: u32, role: Role) -> RoleLabel {
        RoleLabel::Component { index, role }
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleLabel::Component { index, role } => write!(f, "{role}(G{index})"),
            RoleLabel::Clause(j) => write!(f, "v(F{j})"),
            RoleLabel::W => f.write_str("w"),
        }
    }
}

/// Vertex name of `role` in component `index` before junctions are merged.
pub fn component_vertex_name(index: u32, role: Role) -> String {
    format!("G{index}.{role}")
}

const WHITE_ARCS: [(Role, Role); 8] = [
    (Role::S, Role::V(1)),
    (Role::V(1), Role::V(2)),
    (Role::V(2), Role::V(3)),
    (Role::V(3), Role::T),
    (Role::V(4), Role::T),
    (Role::V(4), Role::V(2)),
    (Role::X, Role::V(4)),
    (Role::Y, Role::V(4)),
];

const BLACK_ARCS: [(Role, Role); 12] = [
    (Role::S, Role::V(1)),
    (Role::V(1), Role::V(2)),
    (Role::V(2), Role::V(3)),
    (Role::V(3), Role::T),
    (Role::V(4), Role::T),
    (Role::V(4), Role::V(2)),
    (Role::V(5), Role::V(4)),
    (Role::V(6), Role::V(4)),
    (Role::V(7), Role::V(5)),
    (Role::V(8), Role::V(6)),
    (Role::X, Role::V(7)),
    (Role::Y, Role::V(8)),
];

/// One variable gadget in its initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub index: u32,
    pub parity: Parity,
    /// `(role, initial contents)` for every vertex of the gadget.
    pub cells: Vec<(Role, Cell)>,
    pub arcs: Vec<(Role, Role)>,
}

pub fn build_component(index: u32, parity: Parity) -> Result<Component, ReductionError> {
    let expected = Parity::of_index(index);
    if index == 0 || parity != expected {
        return Err(ReductionError::ParityMismatch { index, expected });
    }
    use Cell::{Black as B, Empty as E, White as W};
    type Layout = (Vec<(Role, Cell)>, Vec<(Role, Role)>);
    let (cells, arcs): Layout = match parity {
        Parity::White => (
            vec![
                (Role::S, W),
                (Role::T, B),
                (Role::X, W),
                (Role::Y, W),
                (Role::V(1), B),
                (Role::V(2), B),
                (Role::V(3), E),
                (Role::V(4), W),
            ],
            WHITE_ARCS.to_vec(),
        ),
        Parity::Black => (
            vec![
                (Role::S, B),
                (Role::T, W),
                (Role::X, W),
                (Role::Y, W),
                (Role::V(1), W),
                (Role::V(2), W),
                (Role::V(3), E),
                (Role::V(4), B),
                (Role::V(5), B),
                (Role::V(6), B),
                (Role::V(7), B),
                (Role::V(8), B),
            ],
            BLACK_ARCS.to_vec(),
        ),
    };
    Ok(Component {
        index,
        parity,
        cells,
        arcs,
    })
}

impl Component {
    pub fn vertex_name(&self, role: Role) -> String {
        component_vertex_name(self.index, role)
    }

    pub fn graph(&self) -> Digraph {
        let names: Vec<String> = self
            .cells
            .iter()
            .map(|&(r, _)| self.vertex_name(r))
            .collect();
        let arcs: Vec<(String, String)> = self
            .arcs
            .iter()
            .map(|&(u, v)| (self.vertex_name(u), self.vertex_name(v)))
            .collect();
        Digraph::build(&names, &arcs, true).expect("gadget graph is well formed")
    }

    /// The gadget on its own, in its initial state. With `arrival` the token
    /// on t is gone and the gadget's owner is to move; otherwise the
    /// opponent is to move.
    pub fn standalone_state(&self, arrival: bool) -> GameState {
        let graph = Arc::new(self.graph());
        let mut cells = vec![Cell::Empty; graph.vertex_count()];
        for &(role, cell) in &self.cells {
            let idx = graph.index_of(&self.vertex_name(role)).expect("own vertex");
            cells[idx] = cell;
        }
        let owner = self.parity.player();
        let to_move = if arrival {
            let t = graph
                .index_of(&self.vertex_name(Role::T))
                .expect("own vertex");
            cells[t] = Cell::Empty;
            owner
        } else {
            owner.opponent()
        };
        GameState::new(graph, cells, to_move).expect("cells cover the graph")
    }
}

/// Bidirectional map between construction roles and vertex names.
///
/// Each junction vertex carries two labels: s(G_i) as its primary label and
/// t(G_{i+1}) as an alias.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    by_label: BTreeMap<RoleLabel, VertexId>,
    primary: BTreeMap<VertexId, RoleLabel>,
    aliases: BTreeMap<VertexId, Vec<RoleLabel>>,
}

impl LabelMap {
    fn insert(&mut self, label: RoleLabel, vertex: VertexId) {
        self.by_label.insert(label, vertex.clone());
        match self.primary.entry(vertex) {
            Entry::Occupied(e) => self.aliases.entry(e.key().clone()).or_default().push(label),
            Entry::Vacant(e) => {
                e.insert(label);
            }
        }
    }

    pub fn vertex(&self, label: RoleLabel) -> Option<&VertexId> {
        self.by_label.get(&label)
    }

    pub fn label(&self, vertex: &str) -> Option<RoleLabel> {
        self.primary.get(vertex).copied()
    }

    pub fn aliases(&self, vertex: &str) -> &[RoleLabel] {
        self.aliases.get(vertex).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.primary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty()
    }

    /// One `<vertex> <label>` line per vertex in name order, each followed
    /// by its `<vertex> <label> alias` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (vertex, label) in &self.primary {
            out.push_str(&format!("{vertex} {label}\n"));
            for alias in self.aliases(vertex.as_str()) {
                out.push_str(&format!("{vertex} {alias} alias\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub state: GameState,
    pub labels: LabelMap,
    pub n: u32,
    pub m: usize,
}

impl ReductionArtifact {
    pub fn vertex(&self, label: RoleLabel) -> &VertexId {
        self.labels
            .vertex(label)
            .unwrap_or_else(|| panic!("no vertex labelled {label}"))
    }
}

/// Checks the shape of `q` and compiles it.
pub fn build_game_checked(q: &QbfFormula) -> Result<ReductionArtifact, ReductionError> {
    build_game(&RestrictedQbf::new(q.clone())?)
}

pub fn build_game(q: &RestrictedQbf) -> Result<ReductionArtifact, ReductionError> {
    let n = q.num_vars();
    let mut labels = LabelMap::default();
    let mut names: Vec<String> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();
    let mut tokens: BTreeMap<String, Cell> = BTreeMap::new();

    let canonical = |index: u32, role: Role| -> String {
        match role {
            Role::T if index > 1 => component_vertex_name(index - 1, Role::S),
            _ => component_vertex_name(index, role),
        }
    };

    for i in 1..=n {
        let comp = build_component(i, Parity::of_index(i))?;
        for &(role, cell) in &comp.cells {
            let name = canonical(i, role);
            let id = VertexId::new(name.clone())?;
            match tokens.get(&name) {
                Some(&prev) if prev != cell => return Err(ReductionError::JunctionConflict(id)),
                Some(_) => {}
                None => {
                    names.push(name.clone());
                    tokens.insert(name, cell);
                }
            }
            labels.insert(RoleLabel::comp(i, role), id);
        }
        arcs.extend(
            comp.arcs
                .iter()
                .map(|&(u, v)| (canonical(i, u), canonical(i, v))),
        );
    }
    tokens.insert(canonical(1, Role::T), Cell::Empty);

    let w = "w".to_string();
    names.push(w.clone());
    tokens.insert(w.clone(), Cell::White);
    labels.insert(RoleLabel::W, VertexId::new(w.clone())?);
    arcs.push((w.clone(), canonical(n, Role::S)));

    for (j, clause) in q.clauses().iter().enumerate() {
        let j = j as u32 + 1;
        let f = format!("F{j}");
        names.push(f.clone());
        tokens.insert(f.clone(), Cell::Black);
        labels.insert(RoleLabel::Clause(j), VertexId::new(f.clone())?);
        arcs.push((f.clone(), w.clone()));
        for &Literal { var, negated } in clause.literals() {
            let role = if negated { Role::Y } else { Role::X };
            arcs.push((canonical(var, role), f.clone()));
        }
    }

    let graph = Arc::new(Digraph::build(&names, &arcs, false)?);
    let cells = graph
        .vertices()
        .iter()
        .map(|v| tokens[v.as_str()])
        .collect();
    let state = GameState::new(graph, cells, Player::White).expect("one cell per vertex");
    Ok(ReductionArtifact {
        state,
        labels,
        n,
        m: q.num_clauses(),
    })
}

/// Reads the existential choices off a play: x_i is true when White played
/// y(G_i) into v4(G_i), false when White played x(G_i) there, and unset if
/// neither happened. Keys are the odd variable indices.
pub fn extract_existential_assignment(
    trace: &Trace,
    artifact: &ReductionArtifact,
) -> Result<BTreeMap<u32, Option<bool>>, ReductionError> {
    let mut out = BTreeMap::new();
    for i in (1..=artifact.n).step_by(2) {
        let v4 = artifact.vertex(RoleLabel::comp(i, Role::V(4)));
        let x = artifact.vertex(RoleLabel::comp(i, Role::X));
        let y = artifact.vertex(RoleLabel::comp(i, Role::Y));
        let played = |from: &VertexId| {
            trace
                .moves
                .iter()
                .any(|m| m.player == Player::White && &m.from == from && &m.to == v4)
        };
        let value = match (played(y), played(x)) {
            (true, true) => return Err(ReductionError::ContradictoryTrace(i)),
            (true, false) => Some(true),
            (false, true) => Some(false),
            (false, false) => None,
        };
        out.insert(i, value);
    }
    Ok(out)
}
