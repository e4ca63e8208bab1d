use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shiftlab"));
    c.env_remove("SHIFTLAB_MAX_STATES");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn shiftlab")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// Non-metadata lines split into fields.
fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn meta(o: &Output, key: &str) -> Option<String> {
    let prefix = format!("# {key}\t");
    stdout(o).lines().find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

#[test]
fn golden_count_from_file() {
    let def = data("golden.json");
    let o = ok(&["sft", "count", "--def", &def, "--n", "4"]);
    let r = rows(&o);
    assert_eq!(r[0][..3], ["n", "m", "count"]);
    assert_eq!(r[1][..3], ["4", "1", "8"]);
    assert_eq!(r[1][3], "3/4");
    assert_eq!(meta(&o, "def").as_deref(), Some(def.as_str()));
    assert_eq!(meta(&o, "def_sha256").map(|h| h.len()), Some(64));
}

#[test]
fn mseq_level_one() {
    let o = ok(&["geom", "mseq", "--N", "1"]);
    let r = rows(&o);
    assert_eq!(r.len(), 3);
    assert_eq!((r[1][1].as_str(), r[1][3].as_str()), ("6", "0"));
    assert_eq!((r[2][1].as_str(), r[2][3].as_str()), ("31", "1"));
}

#[test]
fn missing_file_exits_one() {
    let o = run(&["sft", "count", "--def", "missing.json", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["sft", "count", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["nope"]).status.code(), Some(1));
    assert_eq!(run(&["sft", "count", "--def", "builtin:golden", "--n", "x"]).status.code(), Some(1));
}

#[test]
fn malformed_definition_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"alphabet": ["0"], "dimension": 1}"#).unwrap();
    let o = run(&["sft", "count", "--def", p.to_str().unwrap(), "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_succeeds_and_names_the_budget_variable() {
    let o = ok(&["--help"]);
    assert!(stdout(&o).contains("SHIFTLAB_MAX_STATES"));
}

#[test]
fn budget_exhaustion_exits_two() {
    let o = run(&["sft", "count", "--def", "builtin:hard-squares", "--n", "6", "--m", "6", "--max-states", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("SHIFTLAB_MAX_STATES", "1")
        .args(["sft", "count", "--def", "builtin:hard-squares", "--n", "4", "--m", "4"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn partial_output_is_printed_on_budget_exit() {
    let o = run(&["sft", "entropy-upper", "--def", "builtin:hard-squares", "--n-max", "6", "--max-states", "20"]);
    assert_eq!(o.status.code(), Some(2));
    let r = rows(&o);
    assert_eq!(r[1][..2], ["1", "2"]);
    assert_eq!(r[2][..2], ["2", "7"]);
    assert_eq!(r[3][..2], ["3", "63"]);
    assert_eq!(meta(&o, "best_n").as_deref(), Some("3"));

    let o = run(&["sft", "entropy-irreducible", "--def", "builtin:hard-squares", "--precision", "20", "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(meta(&o, "reached").as_deref(), Some("false"));
    assert!(meta(&o, "lower").is_some());
}

#[test]
fn output_is_byte_deterministic() {
    let cases: &[&[&str]] = &[
        &["sft", "count", "--def", "builtin:hard-squares", "--n", "4", "--m", "4"],
        &["sft", "entropy-irreducible", "--def", "builtin:golden", "--precision", "4"],
        &["subst", "expand", "--seed", "•", "--n", "3"],
        &["geom", "board", "--n", "1", "--format", "tsv"],
        &["prune", "run", "--levels", "1011", "--r", "const:2/3", "--max-N", "6"],
        &["realize", "--target", "const:1/2", "--h", "1/2", "--L", "4", "--N", "8", "--n", "4,8"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn sft_subcommands() {
    let o = ok(&["sft", "entropy-1d", "--def", "builtin:golden"]);
    let r = rows(&o);
    assert!(r[1][1].starts_with("0.694241913"), "{:?}", r[1]);

    let o = ok(&["sft", "entropy-irreducible", "--def", "builtin:golden", "--precision", "4"]);
    assert_eq!(meta(&o, "reached").as_deref(), Some("true"));

    let o = ok(&["sft", "sofic-count", "--def", "builtin:full:3", "--map", "0=a,1=b,2=b", "--n", "4"]);
    assert_eq!(rows(&o)[1][2], "16");

    let o = ok(&["sft", "product", "--def", "builtin:golden", "--with", "builtin:golden"]);
    assert!(stdout(&o).trim_start().starts_with('{'));

    let o = ok(&["sft", "lift", "--def", "builtin:golden"]);
    assert!(stdout(&o).contains("\"dimension\": 2"));

    ok(&["sft", "recode", "--def", "builtin:golden"]);
    let o = ok(&["sft", "recode", "--def", "builtin:golden", "--blocks"]);
    assert_eq!(rows(&o)[0], ["symbol", "cells"]);
}

#[test]
fn subst_subcommands() {
    let rule = data("two_net.json");
    let o = ok(&["subst", "expand", "--rule", &rule, "--seed", "•", "--n", "1"]);
    assert!(stdout(&o).ends_with("∘ •\n• ∘\n"));

    let o = ok(&["subst", "check-derivation"]);
    assert_eq!(rows(&o)[1][0], "unique");

    let o = ok(&["subst", "zero-bound", "--n", "1024", "--m", "3"]);
    assert_eq!(rows(&o)[1][2], "12161/262144");
}

#[test]
fn geom_subcommands() {
    let o = ok(&["geom", "iset", "--n", "1"]);
    let xs: Vec<String> = rows(&o)[1..].iter().map(|r| r[1].clone()).collect();
    assert_eq!(xs, ["1", "2", "4", "5"]);

    let o = ok(&["geom", "board", "--n", "1"]);
    assert_eq!(meta(&o, "cells").as_deref(), Some("24"));
    let o = ok(&["geom", "board", "--n", "1", "--format", "tsv"]);
    assert_eq!(rows(&o).len(), 25);

    let o = ok(&["geom", "density", "--n", "2"]);
    assert_eq!(rows(&o)[1][2], "544/625");
}

#[test]
fn base_subcommands() {
    let o = ok(&["base", "build", "--levels", "101", "--n", "4", "--format", "tsv"]);
    assert_eq!(rows(&o).len(), 17);
    ok(&["base", "build", "--levels", "101", "--n", "4", "--format", "unicode"]);

    let o = ok(&["base", "delta", "--levels", "101"]);
    assert_eq!(rows(&o)[1][1], "5/8");

    let o = ok(&["base", "freq", "--levels", "101", "--n", "4,8"]);
    let r = rows(&o);
    assert_eq!(r[1][2], "3/4");
    assert_eq!(r[2][2], "5/8");
}

#[test]
fn tm_subcommands() {
    let m = data("bouncer.json");
    let o = ok(&["tm", "run", "--machine", &m, "--steps", "3"]);
    assert_eq!(rows(&o).len(), 5);
    assert_eq!(meta(&o, "outcome").as_deref(), Some("running"));

    let o = ok(&["tm", "run", "--machine", "builtin:halt-now"]);
    assert_eq!(meta(&o, "outcome").as_deref(), Some("halted at 0"));

    let o = ok(&["tm", "board", "--machine", "builtin:walker", "--n", "1", "--input", "0110"]);
    assert_eq!(meta(&o, "feasible").as_deref(), Some("true"));
    assert_eq!(meta(&o, "verified").as_deref(), Some("true"));

    let o = ok(&["tm", "board", "--machine", "builtin:halt-now", "--n", "1", "--input", "0000"]);
    assert_eq!(meta(&o, "feasible").as_deref(), Some("false"));

    let o = run(&["tm", "board", "--machine", "builtin:walker", "--n", "1", "--input", "01"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prune_and_realize() {
    let o = ok(&["prune", "run", "--levels", "11", "--r", "const:1/2", "--max-N", "5"]);
    assert_eq!(meta(&o, "delta_exact").as_deref(), Some("3/4"));
    assert_eq!(meta(&o, "verdict").as_deref(), Some("halted at 3"));

    let t = data("target_list.json");
    let o = ok(&["prune", "run", "--levels", "101", "--r", &t, "--max-N", "6"]);
    assert!(meta(&o, "verdict").unwrap().starts_with("halted"));

    let t = data("target_half.json");
    let o = ok(&["realize", "--target", &t, "--h", "1/2", "--L", "4", "--N", "8", "--n", "4,8,16"]);
    let r = rows(&o);
    assert_eq!(r.len(), 4);
    for row in &r[1..] {
        assert_eq!(row[1], "1/2");
        assert_eq!(row[8], "witness-certified");
    }
}
