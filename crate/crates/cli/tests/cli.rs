use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use mshot_cli::{run, run_script, CliConfig, CliError, Mode, Runner};
use mshot_core::SolveStatus;

fn programs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn toh() -> Vec<PathBuf> {
    vec![programs().join("toh_instance.lp"), programs().join("toh_encoding.lp")]
}

fn write_file(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run_config(config: &CliConfig) -> (Result<u8, CliError>, String) {
    let mut out = Vec::new();
    let r = run(config, &mut out, Arc::new(AtomicBool::new(false)));
    (r, String::from_utf8(out).unwrap())
}

fn script(files: Vec<PathBuf>, text: &str) -> (Result<u8, CliError>, String) {
    let config = CliConfig { files, ..Default::default() };
    let mut out = Vec::new();
    let mut runner = Runner::new(&config, &mut out, Arc::new(AtomicBool::new(false))).unwrap();
    let r = run_script(&config, text, &mut runner);
    drop(runner);
    (r, String::from_utf8(out).unwrap())
}

#[test]
fn default_mode_acid_file() {
    let config = CliConfig { files: vec![programs().join("acid.lp")], ..Default::default() };
    let (r, out) = run_config(&config);
    assert_eq!(r.unwrap(), 10);
    assert_eq!(out, "Answer: 1\na(1) a(2)\nSATISFIABLE\n");
}

#[test]
fn unsat_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "u.lp", ":- not x.");
    let (r, out) = run_config(&CliConfig { files: vec![f], ..Default::default() });
    assert_eq!(r.unwrap(), 20);
    assert_eq!(out, "UNSATISFIABLE\n");
}

#[test]
fn dump_ground_precedes_models() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "a.lp", "a(1). #external e.");
    let config = CliConfig { files: vec![f], dump_ground: true, ..Default::default() };
    let (_, out) = run_config(&config);
    assert_eq!(out, "% inc 0\na(1).\n#external e.\nAnswer: 1\na(1)\nSATISFIABLE\n");
}

#[test]
fn script_acid() {
    let (r, out) = script(vec![programs().join("acid.lp")], "ground acid(42)\nsolve\n");
    assert_eq!(r.unwrap(), 10);
    assert_eq!(out, "Answer: 1\nb(42)\nSATISFIABLE\n");
}

#[test]
fn script_assign_external() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "e.lp", "#external e. a :- e. #show a/0. #show e/0.");
    let (r, out) = script(vec![f], "ground base\nassign e true\nsolve\n");
    assert_eq!(r.unwrap(), 10);
    assert_eq!(out, "Answer: 1\na e\nSATISFIABLE\n");
}

#[test]
fn script_release_then_assign_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "q.lp", "#external q(1).");
    let (r, _) = script(vec![f], "ground base\nsolve\nrelease q(1)\nassign q(1) true\n");
    match r {
        Err(CliError::Script(e)) => {
            assert_eq!(e.line, 4);
            assert!(e.message.contains("released"), "{}", e.message);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn script_add_conf_stats() {
    let text =
        "add hyp <<END\n#external h.\n:- not h.\nEND\nground hyp\nsolve\nassign h true\nconf models=0\nsolve\nstats\n";
    let (r, out) = script(vec![], text);
    assert_eq!(r.unwrap(), 10);
    assert!(out.starts_with("UNSATISFIABLE\nAnswer: 1\nh\nSATISFIABLE\nModels       : 1\nCalls        : 2\n"), "{out}");
}

#[test]
fn script_enumeration_modes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "even.lp", "a :- not b. b :- not a. #show a/0. #show b/0.");
    let text = "ground base\nsolve enum=cautious\nsolve enum=brave\nsolve models=0\n";
    let (_, out) = script(vec![f], text);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(&lines[..6], ["Answer: 1", "", "SATISFIABLE", "Answer: 1", "a b", "SATISFIABLE"]);
    assert_eq!(lines.iter().filter(|l| l.starts_with("Answer:")).count(), 4);
}

#[test]
fn optimization_output() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "o.lp", "1 { x; y } 1. #minimize{ 2@1,x : x; 1@1,y : y }. #show x/0. #show y/0.");
    let (r, out) = run_config(&CliConfig { files: vec![f], ..Default::default() });
    assert_eq!(r.unwrap(), 10);
    assert!(out.ends_with("y\nOptimization: 1\nOPTIMUM FOUND\n"), "{out}");
}

#[test]
fn inc_mode_toh_stops_at_seven() {
    let config = CliConfig { files: toh(), mode: Mode::Inc, ..Default::default() };
    let (r, out) = run_config(&config);
    assert_eq!(r.unwrap(), 10);
    let steps: Vec<&str> = out.lines().filter(|l| l.starts_with("Step:")).collect();
    assert_eq!(steps.len(), 7);
    assert_eq!(out.matches("UNSATISFIABLE").count(), 6);
    assert!(out.contains("Step: 7\nAnswer: 1\n"));
}

#[test]
fn inc_mode_imax_and_istop() {
    let config = CliConfig { files: toh(), mode: Mode::Inc, imax: Some(3), ..Default::default() };
    let (r, out) = run_config(&config);
    assert_eq!(r.unwrap(), 20);
    assert!(out.ends_with("Step: 3\nUNSATISFIABLE\n"), "{out}");

    let config = CliConfig { files: toh(), mode: Mode::Inc, istop: SolveStatus::Unsat, ..Default::default() };
    let (r, out) = run_config(&config);
    assert_eq!(r.unwrap(), 20);
    assert_eq!(out, "Step: 1\nUNSATISFIABLE\n");

    let dir = tempfile::tempdir().unwrap();
    let f = write_file(
        &dir,
        "q.lp",
        "#program cumulative(t). #external query(t). ok(t) :- query(t), t >= 3. :- query(t), not ok(t).",
    );
    let config = CliConfig { files: vec![f], mode: Mode::Inc, iinit: 4, ..Default::default() };
    let (r, out) = run_config(&config);
    assert_eq!(r.unwrap(), 10);
    assert_eq!(out, "Step: 4\nAnswer: 1\nok(4) query(4)\nSATISFIABLE\n");
}

#[test]
fn inc_mode_requires_cumulative() {
    let config = CliConfig { files: vec![programs().join("acid.lp")], mode: Mode::Inc, ..Default::default() };
    assert!(matches!(run_config(&config).0, Err(CliError::MissingSubprogram(_))));
}

#[test]
fn inc_equals_explicit_script() {
    let (_, inc) = run_config(&CliConfig { files: toh(), mode: Mode::Inc, ..Default::default() });
    let mut text = String::from("ground base\n");
    for t in 1..=7 {
        text += &format!("ground cumulative({t})\nassign query({t}) true\nsolve\n");
        if t < 7 {
            text += &format!("release query({t})\n");
        }
    }
    let (_, scripted) = script(toh(), &text);
    let inc_no_steps: String = inc.lines().filter(|l| !l.starts_with("Step:")).map(|l| format!("{l}\n")).collect();
    assert_eq!(inc_no_steps, scripted);
}

#[test]
fn const_override_wins() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "c.lp", "#const n = 1. p(n).");
    let config =
        CliConfig { files: vec![f], consts: vec![("n".into(), mshot_core::Term::Integer(5))], ..Default::default() };
    assert_eq!(run_config(&config).1, "Answer: 1\np(5)\nSATISFIABLE\n");
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_mshot")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn binary_exit_codes_and_determinism() {
    let acid = programs().join("acid.lp");
    let (code, out, _) = binary(&[acid.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (10, "Answer: 1\na(1) a(2)\nSATISFIABLE\n"));

    let files: Vec<String> = toh().iter().map(|p| p.display().to_string()).collect();
    let args = [files[0].as_str(), files[1].as_str(), "--mode=inc", "--seed=3"];
    let first = binary(&args);
    assert_eq!(first.0, 10);
    assert_eq!(first, binary(&args));

    let (code, _, err) = binary(&["/nonexistent/file.lp"]);
    assert_eq!(code, 65);
    assert!(err.starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(&dir, "bad.lp", "a :- b(.");
    assert_eq!(binary(&[bad.to_str().unwrap()]).0, 65);
    let s = write_file(&dir, "s.txt", "ground nosuch\n");
    assert_eq!(binary(&[acid.to_str().unwrap(), "--script", s.to_str().unwrap()]).0, 65);
    assert_eq!(binary(&[acid.to_str().unwrap(), "--enum=bogus"]).0, 65);
}
