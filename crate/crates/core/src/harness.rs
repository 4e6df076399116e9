//! End-to-end checks: formula truth against the compiled game's outcome,
//! seeded batches of such checks, and scripted gadget lines.

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::game::{Cell, GameError, GameState, Move, Player};
use crate::qbf::{normalize_restricted, random_formula, QbfError, QbfFormula, VariableMap};
use crate::reduction::{build_component, build_game, Component, Parity, ReductionError, Role};
use crate::solver::{solve, Outcome, SolveError, SolveLimits, SolveReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Qbf(#[from] QbfError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    Completed,
    ResourceExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub formula_value: bool,
    /// Outcome for White in the initial position; `None` if the solver gave up.
    pub game_outcome: Option<Outcome>,
    pub agree: Option<bool>,
    pub status: VerifyStatus,
    pub states_visited: u64,
    pub solver_stats: Option<SolveReport>,
    pub vertices: usize,
    pub normalization: VariableMap,
}

/// Normalizes `q`, evaluates it by brute force, compiles it and solves the
/// game with White to move.
pub fn verify_instance(q: &QbfFormula, limits: SolveLimits) -> Result<VerifyReport, HarnessError> {
    let (restricted, normalization) = normalize_restricted(q)?;
    let formula_value = restricted.evaluate();
    let artifact = build_game(&restricted)?;
    let vertices = artifact.state.graph().vertex_count();
    let report = match solve(&artifact.state, limits) {
        Ok(stats) => VerifyReport {
            formula_value,
            game_outcome: Some(stats.outcome),
            agree: Some(formula_value == stats.outcome.is_win()),
            status: VerifyStatus::Completed,
            states_visited: stats.states_visited,
            solver_stats: Some(stats),
            vertices,
            normalization,
        },
        Err(SolveError::ResourceExhausted { states_visited }) => VerifyReport {
            formula_value,
            game_outcome: None,
            agree: None,
            status: VerifyStatus::ResourceExhausted,
            states_visited,
            solver_stats: None,
            vertices,
            normalization,
        },
        Err(e) => return Err(e.into()),
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchConfig {
    pub n: u32,
    pub m: usize,
    pub instances: usize,
    pub seed: u64,
    pub limits: SolveLimits,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchEntry {
    pub index: usize,
    pub seed: u64,
    pub formula: QbfFormula,
    pub report: VerifyReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchReport {
    pub config: BatchConfig,
    pub entries: Vec<BatchEntry>,
    pub agree: usize,
    pub disagree: usize,
    pub exhausted: usize,
}

/// Per-instance seeds: the first `count` outputs of a generator seeded with
/// `seed`.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

pub fn verify_batch(cfg: &BatchConfig) -> Result<BatchReport, HarnessError> {
    if cfg.n < 2 || !cfg.n.is_multiple_of(2) {
        return Err(HarnessError::InvalidParameters(format!(
            "n must be even and at least 2, got {}",
            cfg.n
        )));
    }
    let seeds = instance_seeds(cfg.seed, cfg.instances);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| HarnessError::InvalidParameters(e.to_string()))?;
    let entries: Vec<BatchEntry> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(k, &seed)| {
                let formula = random_formula(cfg.n, cfg.m, seed)?.into_formula();
                let report = verify_instance(&formula, cfg.limits)?;
                Ok(BatchEntry {
                    index: k + 1,
                    seed,
                    formula,
                    report,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;

    let count = |agree: Option<bool>| entries.iter().filter(|e| e.report.agree == agree).count();
    Ok(BatchReport {
        config: cfg.clone(),
        agree: count(Some(true)),
        disagree: count(Some(false)),
        exhausted: count(None),
        entries,
    })
}

impl BatchReport {
    /// Text report. Timing is left out so reruns compare byte for byte.
    pub fn render(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let max = c
            .limits
            .max_states
            .map_or("unlimited".to_string(), |m| m.to_string());
        let _ = writeln!(
            out,
            "batch n={} m={} count={} seed={} max-states={} memo={}",
            c.n,
            c.m,
            c.instances,
            c.seed,
            max,
            if c.limits.memoize { "on" } else { "off" }
        );
        for e in &self.entries {
            let _ = writeln!(out, "{}", render_entry(e));
        }
        let _ = writeln!(
            out,
            "summary agree={} disagree={} exhausted={}",
            self.agree, self.disagree, self.exhausted
        );
        out
    }
}

fn render_entry(e: &BatchEntry) -> String {
    let r = &e.report;
    let game = match r.game_outcome {
        Some(Outcome::WinForCurrent) => "WIN",
        Some(Outcome::LossForCurrent) => "LOSS",
        None => "?",
    };
    let agree = match r.agree {
        Some(true) => "yes",
        Some(false) => "NO",
        None => "exhausted",
    };
    format!(
        "instance {} seed={} formula={} game={} agree={} states={} | {}",
        e.index, e.seed, r.formula_value, game, agree, r.states_visited, e.formula
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every scripted gadget scenario.
pub fn gadget_suite() -> Vec<ScenarioResult> {
    type Scenario = (&'static str, fn() -> Result<String, String>);
    let scenarios: [Scenario; 8] = [
        ("white-choice-x", || white_line(Role::X)),
        ("white-choice-y", || white_line(Role::Y)),
        ("black-choice-v7", black_v7_line),
        ("black-choice-s", black_s_line),
        ("white-arrival-solved", || arrival_solved(1, Parity::White)),
        ("black-arrival-solved", || arrival_solved(2, Parity::Black)),
        ("wrong-move-recovery", wrong_move_line),
        ("early-v4-blocks-black", early_v4_line),
    ];
    scenarios
        .into_iter()
        .map(|(name, run)| match run() {
            Ok(detail) => ScenarioResult {
                name,
                passed: true,
                detail,
            },
            Err(detail) => ScenarioResult {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}

struct Script<'a> {
    comp: &'a Component,
}

impl Script<'_> {
    fn mv(&self, from: Role, to: Role, player: Player) -> Move {
        Move::new(
            &self.comp.vertex_name(from),
            &self.comp.vertex_name(to),
            player,
        )
    }

    fn replay(
        &self,
        start: &GameState,
        moves: &[(Role, Role, Player)],
    ) -> Result<GameState, String> {
        let moves: Vec<Move> = moves.iter().map(|&(u, v, p)| self.mv(u, v, p)).collect();
        start
            .replay(&moves)
            .map(|t| t.final_state)
            .map_err(|e: GameError| e.to_string())
    }

    /// Compares the whole occupancy against the listed roles.
    fn expect(
        &self,
        s: &GameState,
        white: &[Role],
        black: &[Role],
        empty: &[Role],
    ) -> Result<String, String> {
        let mut want: Vec<(String, Cell)> = Vec::new();
        for (roles, cell) in [
            (white, Cell::White),
            (black, Cell::Black),
            (empty, Cell::Empty),
        ] {
            want.extend(roles.iter().map(|&r| (self.comp.vertex_name(r), cell)));
        }
        want.sort_by(|a, b| a.0.cmp(&b.0));
        let got: Vec<(String, Cell)> = s
            .graph()
            .vertices()
            .iter()
            .zip(s.cells())
            .map(|(v, &c)| (v.to_string(), c))
            .collect();
        if want == got {
            Ok(describe(s))
        } else {
            Err(format!("unexpected final occupancy: {}", describe(s)))
        }
    }

    /// The token on t leaves and `mover` is to play.
    fn arrive(&self, s: &GameState, mover: Player) -> GameState {
        let t = s
            .graph()
            .index_of(&self.comp.vertex_name(Role::T))
            .expect("component has t");
        let mut cells = s.cells().to_vec();
        cells[t] = Cell::Empty;
        GameState::new(s.graph().clone(), cells, mover).expect("same graph")
    }
}

fn describe(s: &GameState) -> String {
    let join = |vs: Vec<&crate::digraph::VertexId>| {
        vs.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",")
    };
    format!(
        "W{{{}}} B{{{}}} empty{{{}}}",
        join(s.white_vertices()),
        join(s.black_vertices()),
        join(s.empty_vertices())
    )
}

use Player::{Black as PB, White as PW};
use Role::{S, T, V, X, Y};

fn white_line(choice: Role) -> Result<String, String> {
    let comp = build_component(1, Parity::White).map_err(|e| e.to_string())?;
    let sc = Script { comp: &comp };
    let start = comp.standalone_state(true);
    let end = sc.replay(
        &start,
        &[
            (V(4), T, PW),
            (V(2), V(3), PB),
            (choice, V(4), PW),
            (V(1), V(2), PB),
            (S, V(1), PW),
        ],
    )?;
    let kept = if choice == X { Y } else { X };
    sc.expect(&end, &[T, V(4), V(1), kept], &[V(3), V(2)], &[S, choice])
}

fn black_v7_line() -> Result<String, String> {
    let comp = build_component(2, Parity::Black).map_err(|e| e.to_string())?;
    let sc = Script { comp: &comp };
    let end = sc.replay(
        &comp.standalone_state(true),
        &[
            (V(4), T, PB),
            (V(2), V(3), PW),
            (V(5), V(4), PB),
            (V(1), V(2), PW),
            (V(7), V(5), PB),
            (X, V(7), PW),
            (S, V(1), PB),
        ],
    )?;
    sc.expect(
        &end,
        &[V(3), V(2), V(7), Y],
        &[T, V(4), V(5), V(6), V(8), V(1)],
        &[S, X],
    )
}

fn black_s_line() -> Result<String, String> {
    let comp = build_component(2, Parity::Black).map_err(|e| e.to_string())?;
    let sc = Script { comp: &comp };
    let end = sc.replay(
        &comp.standalone_state(true),
        &[
            (V(4), T, PB),
            (V(2), V(3), PW),
            (V(5), V(4), PB),
            (V(1), V(2), PW),
            (S, V(1), PB),
        ],
    )?;
    sc.expect(
        &end,
        &[V(3), V(2), X, Y],
        &[T, V(4), V(6), V(7), V(8), V(1)],
        &[S, V(5)],
    )
}

fn arrival_solved(index: u32, parity: Parity) -> Result<String, String> {
    let comp = build_component(index, parity).map_err(|e| e.to_string())?;
    let start = comp.standalone_state(true);
    let report = solve(&start, SolveLimits::with_max_states(100_000)).map_err(|e| e.to_string())?;
    if report.outcome == Outcome::WinForCurrent && start.to_move() == parity.player() {
        Ok(format!(
            "{} wins, {} states",
            start.to_move(),
            report.states_visited
        ))
    } else {
        Err(format!("{:?} for {}", report.outcome, start.to_move()))
    }
}

/// Black slid v2 to v3 before the game reached this white component and
/// White answered v4 to v2. White still leaves the component with exactly
/// one of x, y empty.
fn wrong_move_line() -> Result<String, String> {
    let comp = build_component(1, Parity::White).map_err(|e| e.to_string())?;
    let sc = Script { comp: &comp };
    let before = sc.replay(
        &comp.standalone_state(false),
        &[(V(2), V(3), PB), (V(4), V(2), PW)],
    )?;
    let arrived = sc.arrive(&before, PW);
    sc.expect(&arrived, &[S, V(2), X, Y], &[V(1), V(3)], &[T, V(4)])?;
    let end = sc.replay(
        &arrived,
        &[
            (X, V(4), PW),
            (V(3), T, PB),
            (V(2), V(3), PW),
            (V(1), V(2), PB),
            (S, V(1), PW),
        ],
    )?;
    sc.expect(&end, &[V(4), Y, V(3), V(1)], &[T, V(2)], &[S, X])
}

/// White already holds v4 when the game arrives; v4 to t leaves Black
/// without a move.
fn early_v4_line() -> Result<String, String> {
    let comp = build_component(1, Parity::White).map_err(|e| e.to_string())?;
    let sc = Script { comp: &comp };
    let names = |roles: &[Role]| {
        roles
            .iter()
            .map(|&r| comp.vertex_name(r))
            .collect::<Vec<_>>()
    };
    let start = GameState::from_tokens(
        std::sync::Arc::new(comp.graph()),
        &names(&[S, V(2), V(4), Y]),
        &names(&[V(1), V(3)]),
        PW,
    )
    .map_err(|e| e.to_string())?;
    let end = sc.replay(&start, &[(V(4), T, PW)])?;
    match end.legal_moves().len() {
        0 => Ok(format!("Black has no move: {}", describe(&end))),
        k => Err(format!("Black still has {k} moves")),
    }
}
