//! Grounding checked against naive instantiation over the whole universe.

use std::collections::{BTreeMap, BTreeSet};

use mshot_core::grounder::{GroundHead, GroundRule};
use mshot_core::solver::brute_force_models;
use mshot_core::{AtomId, Engine, SolveOptions, SolverProgram};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSTS: [i64; 3] = [1, 2, 3];
const UNARY: [&str; 3] = ["p", "q", "r"];

#[derive(Clone, Debug)]
enum Arg {
    Var(&'static str),
    Const(i64),
}

#[derive(Clone, Debug)]
struct Lit {
    pred: &'static str,
    args: Vec<Arg>,
}

#[derive(Clone, Debug)]
enum Head {
    None,
    Atom(Lit),
    Choice(Lit),
}

#[derive(Clone, Debug)]
struct Rule {
    head: Head,
    pos: Vec<Lit>,
    neg: Vec<Lit>,
    /// `X < Y` or `X != Y`
    cmp: Option<(&'static str, &'static str, &'static str)>,
}

fn arg_text(a: &Arg) -> String {
    match a {
        Arg::Var(v) => v.to_string(),
        Arg::Const(c) => c.to_string(),
    }
}

fn lit_text(l: &Lit) -> String {
    if l.args.is_empty() {
        l.pred.to_string()
    } else {
        let a: Vec<String> = l.args.iter().map(arg_text).collect();
        format!("{}({})", l.pred, a.join(","))
    }
}

fn rule_text(r: &Rule) -> String {
    let head = match &r.head {
        Head::None => String::new(),
        Head::Atom(l) => lit_text(l),
        Head::Choice(l) => format!("{{ {} }}", lit_text(l)),
    };
    let mut body: Vec<String> = r.pos.iter().map(lit_text).collect();
    body.extend(r.neg.iter().map(|l| format!("not {}", lit_text(l))));
    if let Some((x, op, y)) = r.cmp {
        body.push(format!("{x} {op} {y}"));
    }
    if body.is_empty() {
        format!("{head}.")
    } else {
        format!("{head} :- {}.", body.join(", "))
    }
}

fn random_lit(rng: &mut ChaCha8Rng, vars: &[&'static str]) -> Lit {
    if rng.gen_bool(0.15) {
        return Lit { pred: "a", args: vec![] };
    }
    let pred = *UNARY.choose(rng).unwrap();
    let arg = if !vars.is_empty() && rng.gen_bool(0.7) {
        Arg::Var(vars.choose(rng).unwrap())
    } else {
        Arg::Const(*CONSTS.choose(rng).unwrap())
    };
    Lit { pred, args: vec![arg] }
}

fn random_program(rng: &mut ChaCha8Rng) -> Vec<Rule> {
    let mut rules = Vec::new();
    for c in CONSTS {
        if rng.gen_bool(0.5) {
            let (x, y) = (c, *CONSTS.choose(rng).unwrap());
            rules.push(Rule {
                head: Head::Atom(Lit { pred: "e", args: vec![Arg::Const(x), Arg::Const(y)] }),
                pos: vec![],
                neg: vec![],
                cmp: None,
            });
        }
    }
    for _ in 0..rng.gen_range(1..=7) {
        let mut pos = Vec::new();
        let mut vars: Vec<&'static str> = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            if rng.gen_bool(0.3) {
                pos.push(Lit { pred: "e", args: vec![Arg::Var("X"), Arg::Var("Y")] });
                vars.extend(["X", "Y"]);
            } else {
                let l = random_lit(rng, &["X", "Y"]);
                if let Some(Arg::Var(v)) = l.args.first() {
                    vars.push(v);
                }
                pos.push(l);
            }
        }
        vars.sort();
        vars.dedup();
        let neg = (0..rng.gen_range(0..=1)).map(|_| random_lit(rng, &vars)).collect();
        let cmp = (vars.len() == 2 && rng.gen_bool(0.3)).then(|| ("X", *["<", "!="].choose(rng).unwrap(), "Y"));
        let head = match rng.gen_range(0..10) {
            0..=1 if !pos.is_empty() => Head::None,
            2..=3 => Head::Choice(random_lit(rng, &vars)),
            _ => Head::Atom(random_lit(rng, &vars)),
        };
        rules.push(Rule { head, pos, neg, cmp });
    }
    rules
}

/// A ground rule over atom texts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Naive {
    head: Option<(String, bool)>,
    pos: Vec<String>,
    neg: Vec<String>,
}

fn ground_lit(l: &Lit, env: &BTreeMap<&str, i64>) -> String {
    let inst = Lit {
        pred: l.pred,
        args: l
            .args
            .iter()
            .map(|a| match a {
                Arg::Var(v) => Arg::Const(env[v]),
                c => c.clone(),
            })
            .collect(),
    };
    lit_text(&inst)
}

fn naive_ground(rules: &[Rule]) -> Vec<Naive> {
    let mut out = Vec::new();
    for r in rules {
        for x in CONSTS {
            for y in CONSTS {
                let env: BTreeMap<&str, i64> = [("X", x), ("Y", y)].into_iter().collect();
                if let Some((_, op, _)) = r.cmp {
                    let holds = if op == "<" { x < y } else { x != y };
                    if !holds {
                        continue;
                    }
                }
                let head = match &r.head {
                    Head::None => None,
                    Head::Atom(l) => Some((ground_lit(l, &env), false)),
                    Head::Choice(l) => Some((ground_lit(l, &env), true)),
                };
                out.push(Naive {
                    head,
                    pos: r.pos.iter().map(|l| ground_lit(l, &env)).collect(),
                    neg: r.neg.iter().map(|l| ground_lit(l, &env)).collect(),
                });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Keeps only rules whose positive body is derivable, ignoring negation.
fn reachable(rules: Vec<Naive>) -> (Vec<Naive>, BTreeSet<String>) {
    let mut possible = BTreeSet::new();
    loop {
        let before = possible.len();
        for r in &rules {
            if let Some((h, _)) = &r.head {
                if r.pos.iter().all(|a| possible.contains(a)) {
                    possible.insert(h.clone());
                }
            }
        }
        if possible.len() == before {
            break;
        }
    }
    let kept = rules.into_iter().filter(|r| r.pos.iter().all(|a| possible.contains(a))).collect();
    (kept, possible)
}

fn stable_models(rules: &[Naive]) -> BTreeSet<BTreeSet<String>> {
    let mut names: Vec<String> = Vec::new();
    let id = |s: &String, names: &mut Vec<String>| -> AtomId {
        match names.iter().position(|n| n == s) {
            Some(i) => AtomId::new(i as u32 + 1),
            None => {
                names.push(s.clone());
                AtomId::new(names.len() as u32)
            }
        }
    };
    let mut ground = Vec::new();
    for r in rules {
        let head = match &r.head {
            None => GroundHead::None,
            Some((h, false)) => GroundHead::Atom(id(h, &mut names)),
            Some((h, true)) => GroundHead::Choice { atoms: vec![id(h, &mut names)], lower: None, upper: None },
        };
        let pos = r.pos.iter().map(|a| id(a, &mut names)).collect();
        let neg = r.neg.iter().map(|a| id(a, &mut names)).collect();
        if let Some(g) = GroundRule::normalized(head, pos, neg) {
            ground.push(g);
        }
    }
    let p = SolverProgram { num_atoms: names.len(), rules: ground, ..Default::default() };
    brute_force_models(&p)
        .unwrap()
        .into_iter()
        .map(|m| m.into_iter().map(|a| names[a.index() - 1].clone()).collect())
        .collect()
}

fn engine_models(text: &str) -> (BTreeSet<BTreeSet<String>>, BTreeSet<String>) {
    let mut e = Engine::new();
    e.load(text).unwrap();
    e.ground("base", vec![]).unwrap();
    let mut models = BTreeSet::new();
    e.solve(SolveOptions { models: Some(0), ..Default::default() }, |m| {
        models.insert(m.atoms.iter().map(|a| a.to_string()).collect());
        true
    })
    .unwrap();
    let atoms = e.store().atoms();
    let heads = e.store().increments()[0]
        .unit
        .rules
        .iter()
        .flat_map(|r| r.head_atoms().to_vec())
        .map(|a| atoms.get(a).to_string())
        .collect();
    (models, heads)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn grounding_agrees_with_naive_instantiation(seed in any::<u64>()) {
        let rules = random_program(&mut ChaCha8Rng::seed_from_u64(seed));
        let text: String = rules.iter().map(|r| rule_text(r) + "\n").collect();
        let (kept, possible) = reachable(naive_ground(&rules));
        let expected = stable_models(&kept);
        let (models, heads) = engine_models(&text);
        prop_assert_eq!(&models, &expected, "program:\n{}", text);
        prop_assert!(heads.is_subset(&possible), "program:\n{}", text);
        let defined: BTreeSet<String> = models.iter().flatten().cloned().collect();
        prop_assert!(defined.is_subset(&heads));
    }

    #[test]
    fn grounding_is_deterministic(seed in any::<u64>()) {
        let rules = random_program(&mut ChaCha8Rng::seed_from_u64(seed));
        let text: String = rules.iter().map(|r| rule_text(r) + "\n").collect();
        let dump = |t: &str| {
            let mut e = Engine::new();
            e.load(t).unwrap();
            e.ground("base", vec![]).unwrap();
            e.flush().unwrap();
            e.dump_ground()
        };
        prop_assert_eq!(dump(&text), dump(&text));
    }
}
