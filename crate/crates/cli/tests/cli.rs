use chorreal_core::automata::includes;
use chorreal_core::global::GlobalType;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

#[derive(Deserialize)]
struct Manifest {
    global: Vec<GlobalEntry>,
    subtype: Vec<SubtypeEntry>,
}

#[derive(Deserialize)]
struct GlobalEntry {
    name: String,
    file: String,
    complement: Option<String>,
    synch: Option<String>,
    p2p: Option<String>,
    causal: Option<String>,
    bag: Option<String>,
}

#[derive(Deserialize)]
struct SubtypeEntry {
    lhs: String,
    rhs: String,
    subtype: bool,
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn manifest() -> Manifest {
    toml::from_str(&std::fs::read_to_string(corpus().join("manifest.toml")).unwrap()).unwrap()
}

fn file_of(m: &Manifest, name: &str) -> PathBuf {
    corpus().join(&m.global.iter().find(|g| g.name == name).unwrap().file)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chorreal"))
        .args(args)
        .env_remove("CHORREAL_DEFAULT_BOUND")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn realisability_verdicts_follow_the_manifest() {
    let m = manifest();
    for g in &m.global {
        let Some(method) = &g.complement else { continue };
        let file = corpus().join(&g.file);
        for (model, expected) in [
            ("synch", &g.synch),
            ("p2p", &g.p2p),
            ("causal", &g.causal),
            ("bag", &g.bag),
        ] {
            let Some(expected) = expected else { continue };
            let out = run(&[
                "check",
                "realisable",
                path(&file),
                "--model",
                model,
                "--complement",
                method,
                "--json",
            ]);
            let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            let verdict = &v["verdict"];
            let got = match verdict["realisable"].as_bool().unwrap() {
                true => "realisable".to_string(),
                false => verdict["failed_condition"].as_str().unwrap().to_string(),
            };
            assert_eq!(&got, expected, "{} in {model}", g.name);
            let exit = if got == "realisable" { 0 } else { 1 };
            assert_eq!(out.status.code(), Some(exit), "{} in {model}", g.name);
        }
    }
}

#[test]
fn subtyping_follows_the_manifest() {
    let m = manifest();
    for s in &m.subtype {
        let exit = code(&[
            "check",
            "subtype",
            path(&file_of(&m, &s.lhs)),
            path(&file_of(&m, &s.rhs)),
        ]);
        assert_eq!(exit, if s.subtype { 0 } else { 1 }, "{} <: {}", s.lhs, s.rhs);
    }
}

#[test]
fn complement_written_to_file_verifies() {
    let m = manifest();
    let dir = tempfile::tempdir().unwrap();
    for g in m.global.iter().filter(|g| g.complement.is_some()) {
        let out = dir.path().join(format!("{}.comp.json", g.name));
        let file = corpus().join(&g.file);
        let method = g.complement.as_deref().unwrap();
        assert_eq!(
            code(&["complement", "--method", method, path(&file), "-o", path(&out)]),
            0
        );
        assert_eq!(
            code(&["verify-complement", path(&file), path(&out), "--max-arrows", "3"]),
            0,
            "{}",
            g.name
        );
        let exit = code(&[
            "check",
            "realisable",
            path(&file),
            "--model",
            "synch",
            "--complement",
            path(&out),
        ]);
        assert!(exit <= 1, "{}", g.name);
    }
}

#[test]
fn wrong_complement_is_rejected() {
    let m = manifest();
    let g = file_of(&m, "intro-g1");
    let other = file_of(&m, "intro-g2");
    assert_eq!(code(&["verify-complement", path(&g), path(&g)]), 1);
    assert_eq!(code(&["verify-complement", path(&g), path(&other)]), 1);
}

#[test]
fn json_output_is_deterministic() {
    let m = manifest();
    let sys = corpus().join("cfsm_deadlock.json");
    let g2 = file_of(&m, "intro-g2");
    let commands: Vec<Vec<&str>> = vec![
        vec!["parse", "--json", path(&g2)],
        vec!["project", "--json", path(&g2)],
        vec!["product", "--json", path(&g2)],
        vec!["explore", path(&sys), "--model", "p2p", "--steps", "8", "--json"],
        vec!["check", "realisable", path(&g2), "--model", "p2p", "--json"],
    ];
    for args in commands {
        let first = run(&args).stdout;
        assert!(!first.is_empty(), "{args:?}");
        assert_eq!(first, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn json_export_round_trips() {
    let m = manifest();
    let dir = tempfile::tempdir().unwrap();
    for g in &m.global {
        let file = corpus().join(&g.file);
        let exported = run(&["export", path(&file)]).stdout;
        let copy = dir.path().join(format!("{}.json", g.name));
        std::fs::write(&copy, &exported).unwrap();
        let original = GlobalType::load(&std::fs::read_to_string(&file).unwrap()).unwrap();
        let back = GlobalType::load(&String::from_utf8(exported).unwrap()).unwrap();
        let (a, b) = (original.dfa().to_nfa(), back.dfa().to_nfa());
        assert!(includes(&a, &b).unwrap() && includes(&b, &a).unwrap(), "{}", g.name);
        assert_eq!(
            run(&["parse", "--json", path(&file)]).stdout,
            run(&["parse", "--json", path(&copy)]).stdout
        );
    }
}

#[test]
fn dot_output_describes_the_automaton() {
    let m = manifest();
    let out = run(&["parse", "--dot", path(&file_of(&m, "mqtt"))]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("c1->b:p"));
}

#[test]
fn usage_and_input_errors_have_distinct_codes() {
    let m = manifest();
    let g = file_of(&m, "intro-g1");
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["parse", "--json", "--dot", path(&g)]), 64);
    assert_eq!(code(&["check", "realisable", path(&g), "--model", "lossy"]), 64);
    assert_eq!(code(&["parse", "/no/such/file.gt"]), 65);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gt");
    std::fs::write(&bad, "p->q:a; q->").unwrap();
    assert_eq!(code(&["parse", path(&bad)]), 65);
    let nc = file_of(&m, "non-complementable");
    assert_eq!(code(&["complement", "--method", "dual", path(&nc)]), 64);
}

#[test]
fn default_bound_comes_from_the_environment() {
    let m = manifest();
    let g = file_of(&m, "intro-g1");
    let args = ["check", "realisable", path(&g), "--model", "p2p"];
    let with = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_chorreal"))
            .args(args)
            .env("CHORREAL_DEFAULT_BOUND", v)
            .output()
            .unwrap()
    };
    assert_eq!(with("1").status.code(), Some(0));
    assert_eq!(with("many").status.code(), Some(64));
}
