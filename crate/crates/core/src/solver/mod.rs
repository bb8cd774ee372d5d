//! Stable model search over a ground program snapshot.

mod cdcl;
mod cost;
pub mod oracle;
pub mod random;
mod translate;

use std::collections::BTreeSet;
use std::sync::atomic::AtomicBool;

pub use cdcl::SearchStats;
pub use cost::{compare_costs, CostVector};
pub use oracle::{brute_force_models, check_stable, model_cost, TooLarge};

use crate::grounder::{GroundLiteral, GroundRule};
use crate::store::{AtomId, ObjectiveTerm};
use cdcl::{Lit, SearchResult};

/// A self-contained ground program handed to the solver.
#[derive(Debug, Clone, Default)]
pub struct SolverProgram {
    /// Atoms are `1..=num_atoms`.
    pub num_atoms: usize,
    pub rules: Vec<GroundRule>,
    /// Free input atoms: unconstrained unless assumed.
    pub externals: Vec<AtomId>,
    pub assumptions: Vec<GroundLiteral>,
    pub objective: Vec<ObjectiveTerm>,
    /// Atoms visible in models; `None` shows every atom.
    pub shown: Option<BTreeSet<AtomId>>,
}

impl SolverProgram {
    pub fn is_shown(&self, a: AtomId) -> bool {
        self.shown.as_ref().is_none_or(|s| s.contains(&a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumMode {
    #[default]
    First,
    All,
    Intersection,
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    /// All true atoms, ascending.
    pub atoms: Vec<AtomId>,
    /// True atoms that are shown, ascending.
    pub shown: Vec<AtomId>,
    pub cost: CostVector,
    /// 1-based ordinal of discovery.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub models: usize,
    /// Proven optimum, when the objective is nonempty and search completed.
    pub optimum: Option<CostVector>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub seed: u64,
    pub restarts: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { seed: 0, restarts: true }
    }
}

/// Searches for stable models of `p`.
///
/// `First` stops after one model, `All` enumerates up to `limit` models
/// (`None` for no limit), and `Intersection`/`Union` enumerate the same way
/// and then deliver a single model holding the combined shown atoms. With a
/// nonempty objective the search is branch-and-bound instead: every
/// improving model is delivered and the last one is optimal. `on_model`
/// returning `false` stops the search.
pub fn solve(
    p: &SolverProgram,
    mode: EnumMode,
    limit: Option<usize>,
    config: &SolverConfig,
    cancel: &AtomicBool,
    on_model: &mut dyn FnMut(&Model) -> bool,
) -> SolveResult {
    let mut tr = translate::translate(p, config.seed, config.restarts);
    let optimize = !p.objective.is_empty();
    let shown_vars: Vec<u32> = (1..=p.num_atoms as u32).filter(|a| p.is_shown(AtomId::new(*a))).collect();
    let mut count = 0;
    let mut status = SolveStatus::Unsat;
    let mut optimum = None;
    let mut combined: Option<BTreeSet<AtomId>> = None;
    let mut last_cost = None;
    loop {
        match tr.solver.search(cancel) {
            SearchResult::Interrupted => {
                status = SolveStatus::Interrupted;
                break;
            }
            SearchResult::Unsat => {
                if count > 0 {
                    status = SolveStatus::Sat;
                    if optimize {
                        optimum = last_cost.take();
                    }
                }
                break;
            }
            SearchResult::Model => {
                count += 1;
                status = SolveStatus::Sat;
                let atoms: Vec<AtomId> =
                    (1..=p.num_atoms as u32).filter(|a| tr.solver.is_true(*a)).map(AtomId::new).collect();
                let shown: Vec<AtomId> = atoms.iter().copied().filter(|a| p.is_shown(*a)).collect();
                let mut cost = CostVector::new();
                for (i, prio) in tr.priorities.iter().enumerate() {
                    cost.add(*prio, tr.solver.cost_sums()[i] + tr.offsets[i]);
                }
                #[cfg(debug_assertions)]
                {
                    let set: BTreeSet<AtomId> = atoms.iter().copied().collect();
                    debug_assert!(check_stable(p, &set), "solver produced an unstable model");
                    debug_assert_eq!(compare_costs(&model_cost(p, &set), &cost), std::cmp::Ordering::Equal);
                }
                let model = Model { atoms, shown, cost, index: count };
                if optimize {
                    if !on_model(&model) {
                        break;
                    }
                    let bound = tr.solver.cost_sums().to_vec();
                    last_cost = Some(model.cost);
                    tr.solver.reset();
                    tr.solver.set_bound(bound);
                    continue;
                }
                let more = match mode {
                    EnumMode::First => {
                        on_model(&model);
                        false
                    }
                    EnumMode::All => on_model(&model) && limit.is_none_or(|l| count < l),
                    EnumMode::Intersection | EnumMode::Union => {
                        let s: BTreeSet<AtomId> = model.shown.iter().copied().collect();
                        combined = Some(match combined.take() {
                            None => s,
                            Some(c) if mode == EnumMode::Intersection => c.intersection(&s).copied().collect(),
                            Some(c) => c.union(&s).copied().collect(),
                        });
                        limit.is_none_or(|l| count < l)
                    }
                };
                if !more {
                    break;
                }
                let block: Vec<Lit> = shown_vars.iter().map(|v| Lit::new(*v, !tr.solver.is_true(*v))).collect();
                if !tr.solver.add_clause_at_root(block) {
                    break;
                }
            }
        }
    }
    if matches!(mode, EnumMode::Intersection | EnumMode::Union) && !optimize && status == SolveStatus::Sat {
        let shown: Vec<AtomId> = combined.unwrap_or_default().into_iter().collect();
        on_model(&Model { atoms: shown.clone(), shown, cost: CostVector::new(), index: 1 });
    }
    SolveResult { status, models: count, optimum, stats: tr.solver.stats }
}
