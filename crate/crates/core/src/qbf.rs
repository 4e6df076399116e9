//! Prenex quantified Boolean formulas in CNF.
//!
//! Covers QDIMACS input and output, a brute-force truth evaluator, repair
//! into the alternating ∃∀…∀ 3CNF shape consumed by the reduction, and a
//! seeded generator for test instances.

use std::fmt::{self, Write as _};
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QbfError {
    #[error("line {line}: malformed problem line {text:?}")]
    MalformedProblemLine { line: usize, text: String },
    #[error("missing `p cnf` problem line")]
    MissingProblemLine,
    #[error("line {line}: clause not terminated by 0")]
    ClauseNotTerminated { line: usize },
    #[error("line {line}: malformed line {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: variable {var} out of range 1..={n}")]
    VariableOutOfRange { line: usize, var: u32, n: u32 },
    #[error("problem line declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("variable {0} quantified more than once")]
    DuplicateQuantifier(u32),
    #[error("line {line}: quantifier block after the first clause")]
    MisplacedQuantifier { line: usize },
    #[error("clause {index} has {width} literals, at most 3 are supported")]
    ClauseTooWide { index: usize, width: usize },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("invalid formula: {0}")]
    Invalid(String),
    #[error("formula is not in restricted form: {0}")]
    NotRestricted(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    ForAll,
}

impl Quantifier {
    pub fn flip(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::ForAll,
            Quantifier::ForAll => Quantifier::Exists,
        }
    }

    fn letter(self) -> char {
        match self {
            Quantifier::Exists => 'e',
            Quantifier::ForAll => 'a',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Literal {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: u32) -> Literal {
        Literal { var, negated: true }
    }

    /// From the signed DIMACS form; `0` is not a literal.
    pub fn from_dimacs(x: i64) -> Option<Literal> {
        match x {
            0 => None,
            _ => Some(Literal {
                var: u32::try_from(x.unsigned_abs()).ok()?,
                negated: x < 0,
            }),
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -i64::from(self.var)
        } else {
            i64::from(self.var)
        }
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var as usize] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(pub Vec<Literal>);

impl Clause {
    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.0.contains(&lit)
    }

    /// `assignment` is indexed by variable; slot 0 is unused.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QbfFormula {
    num_vars: u32,
    prefix: Vec<(Quantifier, u32)>,
    clauses: Vec<Clause>,
}

impl QbfFormula {
    /// Checks that the prefix quantifies each of `1..=num_vars` exactly once
    /// and that all literals are in range.
    pub fn new(
        num_vars: u32,
        prefix: Vec<(Quantifier, u32)>,
        clauses: Vec<Clause>,
    ) -> Result<Self, QbfError> {
        let mut seen = vec![false; num_vars as usize + 1];
        for &(_, v) in &prefix {
            if v == 0 || v > num_vars {
                return Err(QbfError::Invalid(format!(
                    "prefix variable {v} out of range 1..={num_vars}"
                )));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(QbfError::DuplicateQuantifier(v));
            }
        }
        if let Some(v) = (1..=num_vars).find(|&v| !seen[v as usize]) {
            return Err(QbfError::Invalid(format!("variable {v} is not quantified")));
        }
        for (j, c) in clauses.iter().enumerate() {
            if let Some(l) = c.0.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(QbfError::Invalid(format!(
                    "clause {} uses variable {} out of range",
                    j + 1,
                    l.var
                )));
            }
        }
        Ok(QbfFormula {
            num_vars,
            prefix,
            clauses,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn prefix(&self) -> &[(Quantifier, u32)] {
        &self.prefix
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn matrix_holds(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// Truth value by exhaustive expansion of the prefix.
    pub fn evaluate(&self) -> bool {
        let mut assignment = vec![false; self.num_vars as usize + 1];
        self.eval_from(0, &mut assignment)
    }

    fn eval_from(&self, depth: usize, assignment: &mut [bool]) -> bool {
        let Some(&(q, var)) = self.prefix.get(depth) else {
            return self.matrix_holds(assignment);
        };
        let branch = |value: bool, assignment: &mut [bool]| {
            assignment[var as usize] = value;
            self.eval_from(depth + 1, assignment)
        };
        match q {
            Quantifier::Exists => branch(true, assignment) || branch(false, assignment),
            Quantifier::ForAll => branch(true, assignment) && branch(false, assignment),
        }
    }

    pub fn to_qdimacs(&self) -> String {
        let mut out = String::new();
        out.push_str("c nodeblock qdimacs\n");
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        let mut blocks: Vec<(Quantifier, Vec<u32>)> = Vec::new();
        for &(q, v) in &self.prefix {
            match blocks.last_mut() {
                Some((last, vars)) if *last == q => vars.push(v),
                _ => blocks.push((q, vec![v])),
            }
        }
        for (q, vars) in blocks {
            out.push(q.letter());
            for v in vars {
                let _ = write!(out, " {v}");
            }
            out.push_str(" 0\n");
        }
        for c in &self.clauses {
            for l in &c.0 {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for QbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(q, v) in &self.prefix {
            let sym = match q {
                Quantifier::Exists => "E",
                Quantifier::ForAll => "A",
            };
            write!(f, "{sym}x{v} ")?;
        }
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> =
                    c.0.iter()
                        .map(|l| format!("{}x{}", if l.negated { "~" } else { "" }, l.var))
                        .collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        write!(f, "{}", clauses.join(" & "))
    }
}

pub fn parse_qdimacs(text: &str) -> Result<QbfFormula, QbfError> {
    let mut header: Option<(u32, usize)> = None;
    let mut prefix: Vec<(Quantifier, u32)> = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let head = tokens.next().expect("non-empty line");

        let Some((n, _)) = header else {
            if head != "p" {
                return Err(QbfError::MissingProblemLine);
            }
            header = Some(parse_problem_line(trimmed, line)?);
            continue;
        };

        let malformed = || QbfError::MalformedLine {
            line,
            text: trimmed.to_string(),
        };
        let numbers = |tokens: &mut dyn Iterator<Item = &str>| -> Result<Vec<i64>, QbfError> {
            tokens
                .map(|t| t.parse::<i64>().map_err(|_| malformed()))
                .collect()
        };

        match head {
            "p" => return Err(malformed()),
            "e" | "a" => {
                if !clauses.is_empty() {
                    return Err(QbfError::MisplacedQuantifier { line });
                }
                let q = if head == "e" {
                    Quantifier::Exists
                } else {
                    Quantifier::ForAll
                };
                let nums = numbers(&mut tokens)?;
                let body = terminated(&nums).ok_or_else(malformed)?;
                for &x in body {
                    let var = checked_var(x, n, line)?;
                    prefix.push((q, var));
                }
            }
            _ => {
                let nums = numbers(&mut std::iter::once(head).chain(tokens))?;
                let body = terminated(&nums).ok_or(QbfError::ClauseNotTerminated { line })?;
                let mut lits = Vec::with_capacity(body.len());
                for &x in body {
                    let var = checked_var(x, n, line)?;
                    lits.push(Literal {
                        var,
                        negated: x < 0,
                    });
                }
                clauses.push(Clause(lits));
            }
        }
    }

    let (n, declared) = header.ok_or(QbfError::MissingProblemLine)?;
    if declared != clauses.len() {
        return Err(QbfError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }

    // Variables without a quantifier are existential at the outermost level.
    let mut quantified = vec![false; n as usize + 1];
    for &(_, v) in &prefix {
        if std::mem::replace(&mut quantified[v as usize], true) {
            return Err(QbfError::DuplicateQuantifier(v));
        }
    }
    let mut full: Vec<(Quantifier, u32)> = (1..=n)
        .filter(|&v| !quantified[v as usize])
        .map(|v| (Quantifier::Exists, v))
        .collect();
    full.extend(prefix);
    QbfFormula::new(n, full, clauses)
}

fn parse_problem_line(text: &str, line: usize) -> Result<(u32, usize), QbfError> {
    let err = || QbfError::MalformedProblemLine {
        line,
        text: text.to_string(),
    };
    let fields: Vec<&str> = text.split_whitespace().collect();
    match fields.as_slice() {
        ["p", "cnf", n, m] => Ok((n.parse().map_err(|_| err())?, m.parse().map_err(|_| err())?)),
        _ => Err(err()),
    }
}

/// Body of a `... 0` line: exactly one zero, in last position.
fn terminated(nums: &[i64]) -> Option<&[i64]> {
    match nums.split_last() {
        Some((0, body)) if !body.contains(&0) => Some(body),
        _ => None,
    }
}

fn checked_var(x: i64, n: u32, line: usize) -> Result<u32, QbfError> {
    let var = x.unsigned_abs();
    if var == 0 || var > u64::from(n) {
        return Err(QbfError::VariableOutOfRange {
            line,
            var: u32::try_from(var).unwrap_or(u32::MAX),
            n,
        });
    }
    Ok(var as u32)
}

/// A formula of the shape ∃x1 ∀x2 … ∀xn F with n even and positive, the
/// i-th quantifier binding variable i, and every clause exactly 3 literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RestrictedQbf(QbfFormula);

impl RestrictedQbf {
    pub fn new(q: QbfFormula) -> Result<Self, QbfError> {
        let n = q.num_vars as usize;
        if n == 0 || !n.is_multiple_of(2) {
            return Err(QbfError::NotRestricted(format!(
                "variable count {n} is not even and positive"
            )));
        }
        for (i, &(quant, var)) in q.prefix.iter().enumerate() {
            let expected = if i % 2 == 0 {
                Quantifier::Exists
            } else {
                Quantifier::ForAll
            };
            if quant != expected || var as usize != i + 1 {
                return Err(QbfError::NotRestricted(format!(
                    "prefix position {} must be {:?} x{}",
                    i + 1,
                    expected,
                    i + 1
                )));
            }
        }
        if let Some(j) = q.clauses.iter().position(|c| c.0.len() != 3) {
            return Err(QbfError::NotRestricted(format!(
                "clause {} is not 3 literals wide",
                j + 1
            )));
        }
        Ok(RestrictedQbf(q))
    }

    pub fn formula(&self) -> &QbfFormula {
        &self.0
    }

    pub fn into_formula(self) -> QbfFormula {
        self.0
    }
}

impl Deref for RestrictedQbf {
    type Target = QbfFormula;

    fn deref(&self) -> &QbfFormula {
        &self.0
    }
}

/// How [`normalize_restricted`] moved variables around.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableMap {
    /// `(original, new)` for every variable whose index changed.
    pub renamed: Vec<(u32, u32)>,
    /// New variables that occur only in the prefix.
    pub dummies: Vec<u32>,
}

impl VariableMap {
    pub fn is_identity(&self) -> bool {
        self.renamed.is_empty() && self.dummies.is_empty()
    }
}

/// Repairs a formula into restricted shape without changing its value.
///
/// Short clauses repeat their last literal. Fresh variables that never occur
/// in the matrix are inserted wherever the prefix fails to alternate from ∃,
/// and one more is appended if the length ends up odd. Variables are then
/// renumbered by prefix position.
pub fn normalize_restricted(q: &QbfFormula) -> Result<(RestrictedQbf, VariableMap), QbfError> {
    for (index, c) in q.clauses.iter().enumerate() {
        match c.0.len() {
            0 => return Err(QbfError::EmptyClause { index: index + 1 }),
            1..=3 => {}
            width => {
                return Err(QbfError::ClauseTooWide {
                    index: index + 1,
                    width,
                })
            }
        }
    }

    // Slots hold the original variable, or None for a dummy.
    let mut slots: Vec<Option<u32>> = Vec::with_capacity(q.prefix.len() + 2);
    let expected = |len: usize| {
        if len.is_multiple_of(2) {
            Quantifier::Exists
        } else {
            Quantifier::ForAll
        }
    };
    for &(quant, var) in &q.prefix {
        if quant != expected(slots.len()) {
            slots.push(None);
        }
        slots.push(Some(var));
    }
    while slots.is_empty() || !slots.len().is_multiple_of(2) {
        slots.push(None);
    }

    let mut new_index = vec![0u32; q.num_vars as usize + 1];
    let mut map = VariableMap::default();
    let mut prefix = Vec::with_capacity(slots.len());
    for (pos, slot) in slots.iter().enumerate() {
        let idx = pos as u32 + 1;
        prefix.push((expected(pos), idx));
        match *slot {
            Some(orig) => {
                new_index[orig as usize] = idx;
                if orig != idx {
                    map.renamed.push((orig, idx));
                }
            }
            None => map.dummies.push(idx),
        }
    }
    map.renamed.sort_unstable();

    let clauses = q
        .clauses
        .iter()
        .map(|c| {
            let mut lits: Vec<Literal> =
                c.0.iter()
                    .map(|l| Literal {
                        var: new_index[l.var as usize],
                        negated: l.negated,
                    })
                    .collect();
            let last = *lits.last().expect("non-empty clause");
            lits.resize(3, last);
            Clause(lits)
        })
        .collect();

    let formula = QbfFormula::new(slots.len() as u32, prefix, clauses)?;
    Ok((RestrictedQbf::new(formula)?, map))
}

/// Uniform random restricted formula; identical arguments give identical
/// formulas.
pub fn random_formula(n_vars: u32, m_clauses: usize, seed: u64) -> Result<RestrictedQbf, QbfError> {
    if n_vars < 2 || !n_vars.is_multiple_of(2) {
        return Err(QbfError::InvalidParameters(format!(
            "variable count must be even and at least 2, got {n_vars}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prefix = (1..=n_vars)
        .map(|v| {
            let q = if v % 2 == 1 {
                Quantifier::Exists
            } else {
                Quantifier::ForAll
            };
            (q, v)
        })
        .collect();
    let clauses = (0..m_clauses)
        .map(|_| {
            Clause(
                (0..3)
                    .map(|_| Literal {
                        var: rng.gen_range(1..=n_vars),
                        negated: rng.gen_bool(0.5),
                    })
                    .collect(),
            )
        })
        .collect();
    RestrictedQbf::new(QbfFormula::new(n_vars, prefix, clauses)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str =
        "c example\np cnf 4 3\ne 1 0\na 2 0\ne 3 0\na 4 0\n2 -3 4 0\n1 2 -4 0\n-1 -2 4 0\n";

    fn single(q: Quantifier) -> QbfFormula {
        QbfFormula::new(1, vec![(q, 1)], vec![Clause(vec![Literal::pos(1); 3])]).unwrap()
    }

    #[test]
    fn minimal_file() {
        let q = parse_qdimacs("p cnf 1 1\ne 1 0\n1 1 1 0\n").unwrap();
        assert_eq!(q.num_vars(), 1);
        assert_eq!(q.num_clauses(), 1);
        assert_eq!(q.prefix(), &[(Quantifier::Exists, 1)]);
        assert_eq!(q.clauses()[0].literals(), &[Literal::pos(1); 3]);
    }

    #[test]
    fn example_parses_alternating() {
        let q = parse_qdimacs(EXAMPLE).unwrap();
        assert_eq!((q.num_vars(), q.num_clauses()), (4, 3));
        use Quantifier::*;
        assert_eq!(
            q.prefix(),
            &[(Exists, 1), (ForAll, 2), (Exists, 3), (ForAll, 4)]
        );
        assert_eq!(
            q.clauses()[0].literals(),
            &[Literal::pos(2), Literal::neg(3), Literal::pos(4)]
        );
        assert!(RestrictedQbf::new(q).is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_qdimacs("p cnf 1 1\ne 1 0\n1 1 1\n"),
            Err(QbfError::ClauseNotTerminated { line: 3 })
        ));
        assert!(matches!(
            parse_qdimacs("p dnf 1 1\n1 0\n"),
            Err(QbfError::MalformedProblemLine { .. })
        ));
        assert!(matches!(
            parse_qdimacs("p cnf 1 1\n2 0\n"),
            Err(QbfError::VariableOutOfRange { var: 2, .. })
        ));
        assert!(matches!(
            parse_qdimacs("p cnf 1 2\n1 0\n"),
            Err(QbfError::ClauseCountMismatch {
                declared: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_qdimacs("p cnf 2 1\ne 1 0\na 1 0\n1 0\n"),
            Err(QbfError::DuplicateQuantifier(1))
        ));
        assert!(matches!(
            parse_qdimacs("p cnf 2 1\n1 0\ne 2 0\n"),
            Err(QbfError::MisplacedQuantifier { line: 3 })
        ));
        assert!(matches!(
            parse_qdimacs("c nothing\n"),
            Err(QbfError::MissingProblemLine)
        ));
        assert!(matches!(
            parse_qdimacs("1 2 0\n"),
            Err(QbfError::MissingProblemLine)
        ));
    }

    #[test]
    fn free_variables_become_outer_existentials() {
        let q = parse_qdimacs("p cnf 3 1\na 2 0\n1 2 3 0\n").unwrap();
        use Quantifier::*;
        assert_eq!(q.prefix(), &[(Exists, 1), (Exists, 3), (ForAll, 2)]);
    }

    #[test]
    fn evaluate_small_cases() {
        assert!(single(Quantifier::Exists).evaluate());
        assert!(!single(Quantifier::ForAll).evaluate());
        assert!(!parse_qdimacs(EXAMPLE).unwrap().evaluate());
    }

    #[test]
    fn normalize_is_identity_on_restricted_input() {
        let q = parse_qdimacs(EXAMPLE).unwrap();
        let (r, map) = normalize_restricted(&q).unwrap();
        assert!(map.is_identity());
        assert_eq!(r.formula(), &q);
    }

    #[test]
    fn normalize_leading_forall() {
        let q = single(Quantifier::ForAll);
        let (r, map) = normalize_restricted(&q).unwrap();
        use Quantifier::*;
        assert_eq!(r.prefix(), &[(Exists, 1), (ForAll, 2)]);
        assert_eq!(map.dummies, vec![1]);
        assert_eq!(map.renamed, vec![(1, 2)]);
        assert_eq!(r.clauses()[0].literals(), &[Literal::pos(2); 3]);
        assert!(!q.evaluate());
        assert!(!r.evaluate());
    }

    #[test]
    fn normalize_odd_count() {
        let q = single(Quantifier::Exists);
        let (r, map) = normalize_restricted(&q).unwrap();
        assert_eq!(r.num_vars(), 2);
        assert_eq!(map.dummies, vec![2]);
        assert!(map.renamed.is_empty());
        assert!(q.evaluate());
        assert!(r.evaluate());
    }

    #[test]
    fn normalize_pads_short_clauses_and_rejects_wide() {
        let q = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 -2 0\n").unwrap();
        let (r, _) = normalize_restricted(&q).unwrap();
        assert_eq!(
            r.clauses()[0].literals(),
            &[Literal::pos(1), Literal::neg(2), Literal::neg(2)]
        );

        let wide = parse_qdimacs("p cnf 4 1\ne 1 2 3 4 0\n1 2 3 4 0\n").unwrap();
        assert!(matches!(
            normalize_restricted(&wide),
            Err(QbfError::ClauseTooWide { width: 4, .. })
        ));
        let empty = parse_qdimacs("p cnf 1 1\ne 1 0\n0\n").unwrap();
        assert!(matches!(
            normalize_restricted(&empty),
            Err(QbfError::EmptyClause { .. })
        ));
    }

    #[test]
    fn random_formula_contract() {
        assert_eq!(
            random_formula(2, 1, 42).unwrap(),
            random_formula(2, 1, 42).unwrap()
        );
        let q = random_formula(2, 3, 7).unwrap();
        assert_eq!(q.num_clauses(), 3);
        for c in q.clauses() {
            assert_eq!(c.literals().len(), 3);
            assert!(c.literals().iter().all(|l| (1..=2).contains(&l.var)));
        }
        assert!(matches!(
            random_formula(3, 1, 1),
            Err(QbfError::InvalidParameters(_))
        ));
        assert!(matches!(
            random_formula(0, 1, 1),
            Err(QbfError::InvalidParameters(_))
        ));
    }

    #[test]
    fn serialize_round_trip() {
        let q = parse_qdimacs(EXAMPLE).unwrap();
        assert_eq!(parse_qdimacs(&q.to_qdimacs()).unwrap(), q);
    }
}
