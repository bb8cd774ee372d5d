use std::path::PathBuf;

use mshot_core::syntax::pretty_print;
use mshot_core::{parse_program, Engine, GroundAtom, SolveOptions, SolveStatus, Term};

fn programs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn read(name: &str) -> String {
    std::fs::read_to_string(programs_dir().join(name)).unwrap()
}

#[test]
fn corpus_round_trips() {
    let mut seen = 0;
    for entry in std::fs::read_dir(programs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "lp") {
            let text = std::fs::read_to_string(&path).unwrap();
            let defs = parse_program(&text).unwrap();
            let printed = pretty_print(&defs);
            assert_eq!(parse_program(&printed).unwrap(), defs, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn toh_horizon_grows_until_seven() {
    let mut e = Engine::new();
    e.load(&read("toh_instance.lp")).unwrap();
    e.load(&read("toh_encoding.lp")).unwrap();
    e.ground("base", vec![]).unwrap();
    let mut step = 1;
    loop {
        e.ground("cumulative", vec![Term::Integer(step)]).unwrap();
        let query = GroundAtom::new("query", vec![Term::Integer(step)]);
        e.assign_external(&query, true).unwrap();
        let mut plan = Vec::new();
        let r = e.solve(SolveOptions::default(), |m| {
            plan = m.shown_strings();
            false
        });
        if r.unwrap().status == SolveStatus::Sat {
            assert_eq!(plan.len(), 7, "{plan:?}");
            break;
        }
        e.release_external(&query).unwrap();
        step += 1;
        assert!(step <= 7, "no plan within 7 steps");
    }
    assert_eq!(step, 7);
}
