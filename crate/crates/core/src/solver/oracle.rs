//! Reference semantics: the reduct-based stability test and a brute-force
//! enumerator built on it. Used as a test oracle and for debug assertions.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::{CostVector, SolverProgram};
use crate::grounder::GroundHead;
use crate::store::AtomId;

pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("brute force enumeration supports at most {BRUTE_FORCE_LIMIT} atoms, program has {0}")]
pub struct TooLarge(pub usize);

/// True iff `candidate` is a stable model of `p` that respects its
/// assumptions.
pub fn check_stable(p: &SolverProgram, candidate: &BTreeSet<AtomId>) -> bool {
    let x: HashSet<AtomId> = candidate.iter().copied().collect();
    if candidate.iter().any(|a| a.index() == 0 || a.index() > p.num_atoms) {
        return false;
    }
    if p.assumptions.iter().any(|l| x.contains(&l.atom) != l.positive) {
        return false;
    }
    let holds =
        |pos: &[AtomId], neg: &[AtomId]| pos.iter().all(|a| x.contains(a)) && !neg.iter().any(|a| x.contains(a));
    // reduct as definite rules (head, positive body)
    let mut definite: Vec<(AtomId, &[AtomId])> = Vec::new();
    for r in &p.rules {
        let body = holds(&r.pos, &r.neg);
        match &r.head {
            GroundHead::None => {
                if body {
                    return false;
                }
            }
            GroundHead::Atom(h) => {
                if !r.neg.iter().any(|a| x.contains(a)) {
                    definite.push((*h, &r.pos));
                }
            }
            GroundHead::Choice { atoms, lower, upper } => {
                if body {
                    let n = atoms.iter().filter(|a| x.contains(a)).count() as i64;
                    if lower.is_some_and(|l| n < l) || upper.is_some_and(|u| n > u) {
                        return false;
                    }
                }
                if !r.neg.iter().any(|a| x.contains(a)) {
                    for a in atoms.iter().filter(|a| x.contains(a)) {
                        definite.push((*a, &r.pos));
                    }
                }
            }
        }
    }
    let mut least: HashSet<AtomId> = p.externals.iter().filter(|a| x.contains(a)).copied().collect();
    loop {
        let mut changed = false;
        for (h, pos) in &definite {
            if !least.contains(h) && pos.iter().all(|a| least.contains(a)) {
                least.insert(*h);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    least == x
}

/// All stable models of `p`, by testing every subset of its atoms.
pub fn brute_force_models(p: &SolverProgram) -> Result<BTreeSet<BTreeSet<AtomId>>, TooLarge> {
    if p.num_atoms > BRUTE_FORCE_LIMIT {
        return Err(TooLarge(p.num_atoms));
    }
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << p.num_atoms) {
        let cand: BTreeSet<AtomId> =
            (0..p.num_atoms).filter(|i| mask & (1 << i) != 0).map(|i| AtomId::new(i as u32 + 1)).collect();
        if check_stable(p, &cand) {
            out.insert(cand);
        }
    }
    Ok(out)
}

/// Cost of a model under the objective of `p`: each term counts once if any
/// of its conditions holds.
pub fn model_cost(p: &SolverProgram, model: &BTreeSet<AtomId>) -> CostVector {
    let mut cost = CostVector::new();
    for t in &p.objective {
        let active = t.conditions.iter().any(|c| c.iter().all(|l| model.contains(&l.atom) == l.positive));
        cost.add(t.priority, if active { t.weight } else { 0 });
    }
    cost
}
