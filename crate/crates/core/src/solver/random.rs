//! Random ground programs for differential testing and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::SolverProgram;
use crate::grounder::{GroundHead, GroundLiteral, GroundRule};
use crate::store::{AtomId, ObjectiveTerm};
use crate::syntax::Term;

#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub choices: bool,
    /// Objective terms use at most this many priority levels (0 disables).
    pub objective_levels: usize,
    pub max_weight: i64,
    /// Probability that an atom is a free external with a random assumption.
    pub external_ratio: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_atoms: 10,
            max_rules: 15,
            choices: true,
            objective_levels: 0,
            max_weight: 5,
            external_ratio: 0.0,
        }
    }
}

fn pick_atoms<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<AtomId> {
    let mut all: Vec<u32> = (1..=n as u32).collect();
    all.shuffle(rng);
    let mut v: Vec<AtomId> = all.into_iter().take(k.min(n)).map(AtomId::new).collect();
    v.sort_unstable();
    v
}

pub fn random_program<R: Rng>(rng: &mut R, spec: &RandomSpec) -> SolverProgram {
    let n = rng.gen_range(1..=spec.max_atoms);
    let nrules = rng.gen_range(0..=spec.max_rules);
    let mut rules = Vec::with_capacity(nrules);
    for _ in 0..nrules {
        let body = {
            let k = rng.gen_range(0..=3);
            pick_atoms(rng, n, k)
        };
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for a in body {
            if rng.gen_bool(0.6) {
                pos.push(a);
            } else {
                neg.push(a);
            }
        }
        let kind = rng.gen_range(0..10);
        let head = if kind < 2 {
            GroundHead::None
        } else if spec.choices && kind >= 7 {
            let atoms = {
                let k = rng.gen_range(1..=3);
                pick_atoms(rng, n, k)
            };
            let m = atoms.len() as i64;
            let lower = rng.gen_bool(0.4).then(|| rng.gen_range(0..=m));
            let upper = rng.gen_bool(0.4).then(|| rng.gen_range(0..=m));
            GroundHead::Choice { atoms, lower, upper }
        } else {
            GroundHead::Atom(AtomId::new(rng.gen_range(1..=n as u32)))
        };
        rules.push(GroundRule { head, pos, neg });
    }
    let mut externals = Vec::new();
    let mut assumptions = Vec::new();
    if spec.external_ratio > 0.0 {
        for a in 1..=n as u32 {
            let id = AtomId::new(a);
            let defined = rules.iter().any(|r| r.head_atoms().contains(&id));
            if !defined && rng.gen_bool(spec.external_ratio) {
                externals.push(id);
                if rng.gen_bool(0.5) {
                    assumptions.push(GroundLiteral { atom: id, positive: rng.gen_bool(0.5) });
                }
            }
        }
    }
    let mut objective = Vec::new();
    if spec.objective_levels > 0 {
        for i in 0..rng.gen_range(1..=4) {
            let priority = rng.gen_range(0..spec.objective_levels as i64);
            let weight = rng.gen_range(-spec.max_weight..=spec.max_weight);
            let conditions = (0..rng.gen_range(1..=2))
                .map(|_| {
                    {
                        let k = rng.gen_range(1..=2);
                        pick_atoms(rng, n, k)
                    }
                    .into_iter()
                    .map(|a| GroundLiteral { atom: a, positive: rng.gen_bool(0.7) })
                    .collect()
                })
                .collect();
            objective.push(ObjectiveTerm {
                weight,
                priority,
                tuple: vec![Term::Integer(weight), Term::Integer(priority), Term::Integer(i)],
                conditions,
            });
        }
    }
    SolverProgram { num_atoms: n, rules, externals, assumptions, objective, shown: None }
}
