use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const CHAIN: &str = "nbg 1\nv a\nv b\nv c\nv d\na a b\na b c\na c d\nw a\nb c\nturn W\n";

fn nbg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbg"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let p = std::env::temp_dir().join(format!("nbg-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        TempDir(p)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_string()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn solve_prints_outcome_pv_and_states() {
    let d = TempDir::new("solve");
    let f = d.file("chain.nbg", CHAIN);
    // White: a->b, Black: c->d, White: b->c, Black stuck.
    let o = nbg(&["solve", &f, "--pv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "outcome: WIN for W\npv: a->b c->d b->c\nstates: 4\n"
    );

    let plain = nbg(&["solve", &f, "--no-memo"]);
    assert!(stdout(&plain).starts_with("outcome: WIN for W\n"));
}

#[test]
fn exit_codes() {
    let d = TempDir::new("codes");
    let chain = d.file("chain.nbg", CHAIN);
    let bad = d.file("bad.nbg", "nbg 1\nv a\nw z\nturn W\n");
    let cyc = d.file("cyc.nbg", "nbg 1\nv a\nv b\na a b\na b a\nturn W\n");
    let wide = d.file("wide.qdimacs", "p cnf 4 1\ne 1 2 3 4 0\n1 2 3 4 0\n");

    assert_eq!(nbg(&[]).status.code(), Some(1));
    assert_eq!(nbg(&["solve"]).status.code(), Some(1));
    assert_eq!(
        nbg(&["solve", &d.path("missing.nbg")]).status.code(),
        Some(1)
    );
    assert_eq!(nbg(&["verify", "--n", "2"]).status.code(), Some(1));
    assert_eq!(
        nbg(&["play", &chain, "--human", "X"]).status.code(),
        Some(1)
    );
    assert_eq!(nbg(&["solve", &bad]).status.code(), Some(2));
    assert_eq!(nbg(&["solve", &cyc]).status.code(), Some(2));
    assert_eq!(
        nbg(&["reduce", &wide, "-o", &d.path("w.nbg")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nbg(&["solve", &chain, "--max-states", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(
        nbg(&[
            "verify",
            "--n",
            "2",
            "--m",
            "2",
            "--count",
            "2",
            "--seed",
            "1",
            "--max-states",
            "2"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(nbg(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_eval_reduce_round_trip() {
    let d = TempDir::new("reduce");
    let q = d.path("f.qdimacs");
    assert!(
        nbg(&["gen", "--n", "4", "--m", "3", "--seed", "5", "-o", &q])
            .status
            .success()
    );
    let text = std::fs::read_to_string(&q).unwrap();
    assert_eq!(
        stdout(&nbg(&["gen", "--n", "4", "--m", "3", "--seed", "5"])),
        text
    );

    let value = stdout(&nbg(&["eval", &q]));
    assert!(value == "value: true\n" || value == "value: false\n");

    let g = d.path("f.nbg");
    let map = d.path("f.map");
    let o = nbg(&["reduce", &q, "-o", &g, "--labels", &map]);
    // 10n gadget arcs, w->s, one arc per clause into w, one per literal.
    assert_eq!(
        stdout(&o),
        "n: 4\nm: 3\nvertices: 41\narcs: 53\nwhite: 17\nblack: 19\nempty: 5\n"
    );
    let labels = std::fs::read_to_string(&map).unwrap();
    assert!(labels.lines().any(|l| l == "G3.s t(G4) alias"));
    assert!(labels.lines().any(|l| l == "w w"));

    // Solving the compiled instance agrees with the formula.
    let solved = stdout(&nbg(&["solve", &g]));
    let white_wins = solved.starts_with("outcome: WIN for W");
    assert_eq!(white_wins, value == "value: true\n");
}

#[test]
fn reduce_normalizes_unrestricted_input() {
    let d = TempDir::new("norm");
    let q = d.file("u.qdimacs", "p cnf 1 1\na 1 0\n1 -1 0\n");
    let o = nbg(&["reduce", &q, "-o", &d.path("u.nbg")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("normalized: dummies [x1]"), "{out}");
    assert!(out.contains("vertices: 21\n"));
}

#[test]
fn verify_single_file() {
    let d = TempDir::new("verify");
    let q = d.file(
        "e.qdimacs",
        "p cnf 4 3\ne 1 0\na 2 0\ne 3 0\na 4 0\n2 -3 4 0\n1 2 -4 0\n-1 -2 4 0\n",
    );
    let o = nbg(&["verify", "--qdimacs", &q]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.starts_with("formula: false\nvertices: 41\ngame: LOSS for W\n"),
        "{out}"
    );
    assert!(out.ends_with("agree: yes\n"));

    let o = nbg(&["verify", "--qdimacs", &q, "--max-states", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("game: resource-exhausted\n"));
}

#[test]
fn gadgets_all_pass() {
    let o = nbg(&["gadgets"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("8 passed, 0 failed\n"));
}

#[test]
fn play_over_stdin() {
    let d = TempDir::new("play");
    let f = d.file("chain.nbg", CHAIN);
    let mut child = Command::new(env!("CARGO_BIN_EXE_nbg"))
        .args(["play", &f, "--human", "W"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"hint\nmove a c\nmove a b\nmove b c\nquit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("hint: a->b"));
    assert!(out.contains("illegal move a->c"), "{out}");
    assert!(out.contains("engine: c->d"));
    assert!(out.contains("game over: B has no move, W wins"));
}
