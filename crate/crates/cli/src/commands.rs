use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use nodeblock::harness::{self, BatchConfig, VerifyStatus};
use nodeblock::nbg::{parse_instance, serialize_instance};
use nodeblock::qbf::{normalize_restricted, parse_qdimacs, random_formula, QbfFormula};
use nodeblock::reduction::build_game;
use nodeblock::solver::{self, Outcome, SolveError, SolveLimits};
use nodeblock::{GameState, Player};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FORMAT: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;
pub const EXIT_DISAGREE: u8 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Format(String),
    Limit(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Format(_) => EXIT_FORMAT,
            Failure::Limit(_) => EXIT_LIMIT,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Format(m) | Failure::Limit(m) => f.write_str(m),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::ResourceExhausted { .. } => Failure::Limit(e.to_string()),
            SolveError::NotADag(_) => Failure::Format(e.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<GameState, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<QbfFormula, Failure> {
    parse_qdimacs(&read(path)?).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn limits(max_states: Option<u64>, no_memo: bool) -> Result<SolveLimits, Failure> {
    if max_states == Some(0) {
        return Err(Failure::Usage("--max-states must be at least 1".into()));
    }
    Ok(SolveLimits {
        max_states,
        memoize: !no_memo,
    })
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::WinForCurrent => "WIN",
        Outcome::LossForCurrent => "LOSS",
    }
}

pub fn solve(path: &Path, pv: bool, no_memo: bool, max_states: Option<u64>) -> CmdResult {
    let state = load_state(path)?;
    let limits = limits(max_states, no_memo)?;
    let report = solver::solve(&state, limits)?;
    println!(
        "outcome: {} for {}",
        outcome_word(report.outcome),
        state.to_move()
    );
    if pv {
        let line = solver::principal_variation(&state, limits)?;
        let moves: Vec<String> = line.iter().map(ToString::to_string).collect();
        println!("pv: {}", moves.join(" "));
    }
    println!("states: {}", report.states_visited);
    Ok(EXIT_OK)
}

pub fn reduce(path: &Path, output: &Path, labels: Option<&Path>) -> CmdResult {
    let q = load_formula(path)?;
    let (restricted, map) = normalize_restricted(&q).map_err(|e| Failure::Format(e.to_string()))?;
    let artifact = build_game(&restricted).map_err(|e| Failure::Format(e.to_string()))?;
    write(output, &serialize_instance(&artifact.state))?;
    if let Some(labels) = labels {
        write(labels, &artifact.labels.to_text())?;
    }
    let s = &artifact.state;
    if !map.dummies.is_empty() || !map.renamed.is_empty() {
        let dummies: Vec<String> = map.dummies.iter().map(|d| format!("x{d}")).collect();
        let renamed: Vec<String> = map
            .renamed
            .iter()
            .map(|(a, b)| format!("x{a}->x{b}"))
            .collect();
        println!(
            "normalized: dummies [{}] renamed [{}]",
            dummies.join(" "),
            renamed.join(" ")
        );
    }
    println!("n: {}", artifact.n);
    println!("m: {}", artifact.m);
    println!("vertices: {}", s.graph().vertex_count());
    println!("arcs: {}", s.graph().arc_count());
    println!("white: {}", s.white_vertices().len());
    println!("black: {}", s.black_vertices().len());
    println!("empty: {}", s.empty_vertices().len());
    Ok(EXIT_OK)
}

pub fn eval(path: &Path) -> CmdResult {
    let q = load_formula(path)?;
    println!("value: {}", q.evaluate());
    Ok(EXIT_OK)
}

pub fn verify_file(path: &Path, max_states: Option<u64>, no_memo: bool) -> CmdResult {
    let q = load_formula(path)?;
    let r = harness::verify_instance(&q, limits(max_states, no_memo)?)
        .map_err(|e| Failure::Format(e.to_string()))?;
    println!("formula: {}", r.formula_value);
    println!("vertices: {}", r.vertices);
    match r.status {
        VerifyStatus::Completed => {
            let outcome = r.game_outcome.expect("completed solve has an outcome");
            println!("game: {} for W", outcome_word(outcome));
            println!("states: {}", r.states_visited);
            if r.agree == Some(true) {
                println!("agree: yes");
                Ok(EXIT_OK)
            } else {
                println!("agree: NO");
                Ok(EXIT_DISAGREE)
            }
        }
        VerifyStatus::ResourceExhausted => {
            println!("game: resource-exhausted");
            println!("states: {}", r.states_visited);
            Ok(EXIT_LIMIT)
        }
    }
}

pub fn verify_batch(
    n: u32,
    m: usize,
    count: usize,
    seed: u64,
    max_states: Option<u64>,
    no_memo: bool,
    threads: usize,
) -> CmdResult {
    let cfg = BatchConfig {
        n,
        m,
        instances: count,
        seed,
        limits: limits(max_states, no_memo)?,
        threads,
    };
    let report = harness::verify_batch(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    print!("{}", report.render());
    Ok(if report.disagree > 0 {
        EXIT_DISAGREE
    } else if report.exhausted > 0 {
        EXIT_LIMIT
    } else {
        EXIT_OK
    })
}

pub fn gen(n: u32, m: usize, seed: u64, output: Option<&Path>) -> CmdResult {
    let q = random_formula(n, m, seed).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = q.to_qdimacs();
    match output {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

pub fn play(path: &Path, human: &str) -> CmdResult {
    let human = Player::from_letter(human)
        .ok_or_else(|| Failure::Usage(format!("--human must be W or B, got {human}")))?;
    let state = load_state(path)?;
    if let Err(e) = state.graph().validate_dag() {
        return Err(Failure::Format(e.to_string()));
    }
    let stdin = io::stdin();
    let stdout = io::stdout();
    crate::play::run(
        state,
        human,
        SolveLimits::unlimited(),
        stdin.lock(),
        stdout.lock(),
    )
    .map_err(|e| Failure::Usage(format!("i/o error: {e}")))?;
    Ok(EXIT_OK)
}

pub fn gadgets() -> CmdResult {
    let results = harness::gadget_suite();
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed);
        println!("{tag} {}: {}", r.name, r.detail);
    }
    println!("{} passed, {} failed", results.len() - failed, failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_DISAGREE })
}
