//! Text REPL for playing a position against the solver.

use std::io::{self, BufRead, Write};

use nodeblock::solver::{best_move, SolveLimits};
use nodeblock::{GameState, Move, Player, VertexId};

const HELP: &str = "commands: move <from> <to> | hint | moves | undo | quit";

fn show(out: &mut impl Write, s: &GameState) -> io::Result<()> {
    let join = |vs: Vec<&VertexId>| vs.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(" ");
    writeln!(out, "white: {}", join(s.white_vertices()))?;
    writeln!(out, "black: {}", join(s.black_vertices()))?;
    writeln!(out, "to move: {}", s.to_move())?;
    show_moves(out, s)
}

fn show_moves(out: &mut impl Write, s: &GameState) -> io::Result<()> {
    let moves: Vec<String> = s.legal_moves().iter().map(ToString::to_string).collect();
    writeln!(out, "moves: {}", moves.join(" "))
}

/// The engine's choice; falls back to the first legal move if the solver
/// gives up.
fn engine_move(s: &GameState, limits: SolveLimits) -> Option<Move> {
    match best_move(s, limits) {
        Ok(m) => m,
        Err(_) => s.legal_moves().into_iter().next(),
    }
}

/// Plays engine moves until it is the human's turn or the game is over.
/// Returns false once the game has ended.
fn advance(
    state: &mut GameState,
    human: Player,
    limits: SolveLimits,
    out: &mut impl Write,
) -> io::Result<bool> {
    loop {
        if state.current_player_loses() {
            writeln!(
                out,
                "game over: {} has no move, {} wins",
                state.to_move(),
                state.to_move().opponent()
            )?;
            return Ok(false);
        }
        if state.to_move() == human {
            show(out, state)?;
            return Ok(true);
        }
        let m = engine_move(state, limits).expect("non-terminal state has a move");
        writeln!(out, "engine: {m}")?;
        *state = state.apply_move(&m).expect("engine plays legal moves");
    }
}

pub fn run(
    start: GameState,
    human: Player,
    limits: SolveLimits,
    input: impl BufRead,
    mut out: impl Write,
) -> io::Result<()> {
    writeln!(out, "{HELP}")?;
    let mut history: Vec<GameState> = Vec::new();
    let mut state = start;
    let mut live = advance(&mut state, human, limits, &mut out)?;

    for line in input.lines() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => continue,
            ["quit"] | ["q"] => break,
            ["moves"] => show_moves(&mut out, &state)?,
            ["hint"] if live => match engine_move(&state, limits) {
                Some(m) => writeln!(out, "hint: {m}")?,
                None => writeln!(out, "hint: no move")?,
            },
            ["undo"] => match history.pop() {
                Some(prev) => {
                    state = prev;
                    live = true;
                    show(&mut out, &state)?;
                }
                None => writeln!(out, "nothing to undo")?,
            },
            ["move", from, to] if live => {
                let m = match (VertexId::new(*from), VertexId::new(*to)) {
                    (Ok(from), Ok(to)) => Move {
                        from,
                        to,
                        player: human,
                    },
                    _ => {
                        writeln!(out, "invalid vertex name")?;
                        continue;
                    }
                };
                match state.apply_move(&m) {
                    Ok(next) => {
                        history.push(state);
                        state = next;
                        live = advance(&mut state, human, limits, &mut out)?;
                    }
                    Err(e) => writeln!(out, "{e}")?,
                }
            }
            ["hint"] | ["move", ..] if !live => writeln!(out, "game is over; undo or quit")?,
            _ => writeln!(out, "{HELP}")?,
        }
    }
    out.flush()
}
