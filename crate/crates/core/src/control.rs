//! The engine object a control loop drives: subprogram registry, grounding
//! queue, external management and solving.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Instant;

use indexmap::IndexMap;
use thiserror::Error;

use crate::grounder::{self, GroundAtom, GroundContext, GroundError, GroundLiteral};
use crate::solver::{self, CostVector, EnumMode, SolveResult, SolveStatus, SolverConfig};
use crate::store::{AtomTable, Store, StoreError};
use crate::syntax::{self, Directive, ParseError, Statement, SubprogramDef, Term};
use crate::Warning;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown subprogram `{name}/{arity}`")]
    UnknownSubprogram { name: String, arity: usize },
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("a background solve is still running")]
    SolveAlreadyRunning,
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("invalid value `{value}` for option `{key}`")]
    InvalidOption { key: String, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Number of models to compute; `Some(0)` means all, `None` lets the
    /// enumeration mode decide (one for `First`, all otherwise).
    pub models: Option<usize>,
    pub enum_mode: EnumMode,
    pub seed: u64,
    pub restarts: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { models: None, enum_mode: EnumMode::First, seed: 0, restarts: true }
    }
}

impl Config {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let invalid = || Error::InvalidOption { key: key.to_string(), value: value.to_string() };
        match key {
            "models" | "n" => {
                let n: usize = value.parse().map_err(|_| invalid())?;
                self.models = Some(n);
                if n != 1 && self.enum_mode == EnumMode::First {
                    self.enum_mode = EnumMode::All;
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| invalid())?,
            "restarts" => {
                self.restarts = match value {
                    "yes" | "true" | "1" | "luby" => true,
                    "no" | "false" | "0" => false,
                    _ => return Err(invalid()),
                }
            }
            "enum-mode" | "enum" => self.enum_mode = parse_enum_mode(value).ok_or_else(invalid)?,
            other => return Err(Error::UnknownOption(other.to_string())),
        }
        Ok(())
    }

    fn limit(&self, mode: EnumMode) -> Option<usize> {
        match self.models {
            Some(0) => None,
            Some(n) => Some(n),
            None if mode == EnumMode::First => Some(1),
            None => None,
        }
    }
}

pub fn parse_enum_mode(s: &str) -> Option<EnumMode> {
    Some(match s {
        "first" => EnumMode::First,
        "all" => EnumMode::All,
        "intersection" | "cautious" => EnumMode::Intersection,
        "union" | "brave" => EnumMode::Union,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Statistics {
    pub choices: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub models_found: u64,
    pub rules_ground: u64,
    pub atoms: u64,
    pub solve_calls: u64,
    /// Wall-clock seconds of the last solve call.
    pub last_solve_time: f64,
}

/// A stable model as seen by callbacks.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub number: usize,
    /// Shown atoms, sorted by their textual form.
    pub shown: Vec<GroundAtom>,
    /// All true atoms.
    pub atoms: Vec<GroundAtom>,
    pub cost: CostVector,
}

impl Model {
    fn from_solver(m: &solver::Model, table: &AtomTable) -> Self {
        let mut shown: Vec<GroundAtom> = m.shown.iter().map(|a| table.get(*a).clone()).collect();
        shown.sort_by_cached_key(|a| a.to_string());
        Model {
            number: m.index,
            shown,
            atoms: m.atoms.iter().map(|a| table.get(*a).clone()).collect(),
            cost: m.cost.clone(),
        }
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    /// Convenience for tests and printing: `contains` by text.
    pub fn contains_str(&self, atom: &str) -> bool {
        GroundAtom::parse(atom).is_ok_and(|a| self.contains(&a))
    }

    pub fn shown_strings(&self) -> Vec<String> {
        self.shown.iter().map(|a| a.to_string()).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Per-call assumptions; each atom must be a free external.
    pub assumptions: Vec<(GroundAtom, bool)>,
    /// Overrides the configured enumeration mode.
    pub mode: Option<EnumMode>,
    /// Overrides the configured number of models (0 = all); like the `models`
    /// option, a value other than 1 turns `First` into `All`.
    pub models: Option<usize>,
    /// Cancellation token; a fresh one is used when absent.
    pub cancel: Option<Arc<AtomicBool>>,
}

enum PendingOp {
    Assign(GroundAtom, bool),
    Release(GroundAtom),
}

pub struct Engine {
    programs: IndexMap<(String, usize), SubprogramDef>,
    consts: Vec<(String, Term)>,
    overrides: Vec<(String, Term)>,
    pending: Vec<(String, Vec<Term>)>,
    pending_ops: Vec<PendingOp>,
    store: Store,
    config: Config,
    stats: Arc<Mutex<Statistics>>,
    running: Arc<AtomicBool>,
    warnings: Vec<Warning>,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        let mut programs = IndexMap::new();
        programs.insert(("base".to_string(), 0), SubprogramDef::new("base", vec![]));
        Engine {
            programs,
            consts: Vec::new(),
            overrides: Vec::new(),
            pending: Vec::new(),
            pending_ops: Vec::new(),
            store: Store::new(),
            config: Config::default(),
            stats: Arc::default(),
            running: Arc::default(),
            warnings: Vec::new(),
        }
    }

    fn idle(&self) -> Result<(), Error> {
        if self.running.load(Ordering::SeqCst) {
            Err(Error::SolveAlreadyRunning)
        } else {
            Ok(())
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn subprograms(&self) -> impl Iterator<Item = &SubprogramDef> {
        self.programs.values()
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<Warning> {
        std::mem::take(&mut self.warnings)
    }

    /// Parses program text (which may contain `#program` parts) and adds
    /// its subprograms.
    pub fn load(&mut self, text: &str) -> Result<(), Error> {
        self.idle()?;
        let defs = syntax::parse_program(text)?;
        for def in defs {
            self.merge(def);
        }
        Ok(())
    }

    /// Appends statements to subprogram `name(params)`, creating it if needed.
    /// On a parse error nothing changes.
    pub fn add(&mut self, name: &str, params: &[&str], text: &str) -> Result<(), Error> {
        self.idle()?;
        let statements = syntax::parse_statements(text)?;
        let mut def = SubprogramDef::new(name, params.iter().map(|p| p.to_string()).collect());
        def.statements = statements;
        self.merge(def);
        Ok(())
    }

    fn merge(&mut self, mut def: SubprogramDef) {
        for s in &def.statements {
            if let Statement::Directive(Directive::Const { name, value }) = s {
                if !self.consts.iter().any(|(n, _)| n == name) {
                    self.consts.push((name.clone(), value.clone()));
                }
            }
        }
        match self.programs.get_mut(&def.key()) {
            Some(existing) => {
                if existing.params != def.params {
                    let from = def.params.clone();
                    let to = existing.params.clone();
                    let map = |s: &str| from.iter().position(|p| p == s).map(|i| Term::Symbol(to[i].clone()));
                    def.statements = def.statements.iter().map(|s| s.map_terms(&map)).collect();
                }
                existing.statements.extend(def.statements);
            }
            None => {
                self.programs.insert(def.key(), def);
            }
        }
    }

    /// Overrides a `#const` definition.
    pub fn set_const(&mut self, name: &str, value: Term) {
        self.overrides.retain(|(n, _)| n != name);
        self.overrides.push((name.to_string(), value));
    }

    fn effective_consts(&self) -> Vec<(String, Term)> {
        let mut out = self.overrides.clone();
        for (n, v) in &self.consts {
            if !out.iter().any(|(m, _)| m == n) {
                out.push((n.clone(), v.clone()));
            }
        }
        out
    }

    /// Queues `name(args)` for grounding at the next flush or solve.
    pub fn ground(&mut self, name: &str, args: Vec<Term>) -> Result<(), Error> {
        self.idle()?;
        if !self.programs.contains_key(&(name.to_string(), args.len())) {
            return Err(Error::UnknownSubprogram { name: name.to_string(), arity: args.len() });
        }
        self.pending.push((name.to_string(), args));
        Ok(())
    }

    /// Grounds all queued requests jointly and joins them in queue order,
    /// one increment each. On error the queue is cleared and increments
    /// joined before the failure are kept.
    pub fn flush(&mut self) -> Result<(), Error> {
        self.idle()?;
        let pending = std::mem::take(&mut self.pending);
        let ops = std::mem::take(&mut self.pending_ops);
        if !pending.is_empty() {
            let consts = self.effective_consts();
            let requests: Vec<(&SubprogramDef, Vec<Term>)> =
                pending.iter().map(|(n, args)| (&self.programs[&(n.clone(), args.len())], args.clone())).collect();
            let next_tag = self.store.next_tag();
            let (atoms, domain) = self.store.grounding_view();
            let mut ctx = GroundContext::new(atoms, domain);
            ctx.consts = &consts;
            ctx.next_tag = next_tag;
            let result = grounder::instantiate_all(&requests, &mut ctx);
            self.warnings.append(&mut ctx.warnings);
            for (unit, (name, args)) in result?.into_iter().zip(&pending) {
                let label = if args.is_empty() {
                    name.clone()
                } else {
                    let a: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                    format!("{name}({})", a.join(","))
                };
                let mut w = self.store.join_module(unit, label)?;
                self.warnings.append(&mut w);
            }
        }
        for op in ops {
            match op {
                PendingOp::Assign(a, v) => self.apply_assign(&a, v)?,
                PendingOp::Release(a) => self.apply_release(&a)?,
            }
        }
        Ok(())
    }

    fn lookup_external(&self, atom: &GroundAtom) -> Result<crate::store::AtomId, Error> {
        self.store.atoms().lookup(atom).ok_or_else(|| Error::Store(StoreError::NotExternal(atom.to_string())))
    }

    fn apply_assign(&mut self, atom: &GroundAtom, value: bool) -> Result<(), Error> {
        let id = self.lookup_external(atom)?;
        Ok(self.store.assign_external(id, value)?)
    }

    fn apply_release(&mut self, atom: &GroundAtom) -> Result<(), Error> {
        let id = self.lookup_external(atom)?;
        Ok(self.store.release_external(id)?)
    }

    /// Sets the truth value of a free external atom. While grounding
    /// requests are queued, the assignment is applied after they are
    /// flushed.
    pub fn assign_external(&mut self, atom: &GroundAtom, value: bool) -> Result<(), Error> {
        self.idle()?;
        if self.pending.is_empty() {
            self.apply_assign(atom, value)
        } else {
            self.pending_ops.push(PendingOp::Assign(atom.clone(), value));
            Ok(())
        }
    }

    /// Makes an external atom permanently false.
    pub fn release_external(&mut self, atom: &GroundAtom) -> Result<(), Error> {
        self.idle()?;
        if self.pending.is_empty() {
            self.apply_release(atom)
        } else {
            self.pending_ops.push(PendingOp::Release(atom.clone()));
            Ok(())
        }
    }

    /// Updates (or with `replace`, resets and then sets) options given as
    /// `key=value` pairs separated by whitespace.
    pub fn set_conf(&mut self, options: &str, replace: bool) -> Result<(), Error> {
        self.idle()?;
        let mut config = if replace { Config::default() } else { self.config };
        for opt in options.split_whitespace() {
            let opt = opt.trim_start_matches("--");
            let (key, value) = opt.split_once('=').ok_or_else(|| Error::UnknownOption(opt.to_string()))?;
            config.apply(key, value)?;
        }
        self.config = config;
        Ok(())
    }

    pub fn get_stats(&self) -> Statistics {
        *self.stats.lock().expect("stats lock")
    }

    /// The accumulated ground program in input syntax.
    pub fn dump_ground(&self) -> String {
        grounder::dump_ground(self.store.increments().iter().map(|i| &i.unit), self.store.atoms())
    }

    fn prepare(&mut self, opts: &SolveOptions) -> Result<(solver::SolverProgram, EnumMode, Option<usize>), Error> {
        self.flush()?;
        let mut extra = Vec::new();
        for (atom, value) in &opts.assumptions {
            let id = self.lookup_external(atom)?;
            self.store.check_assumable(id)?;
            extra.push(GroundLiteral { atom: id, positive: *value });
        }
        let mode = match (opts.mode, opts.models) {
            (Some(m), _) => m,
            (None, Some(n)) if n != 1 && self.config.enum_mode == EnumMode::First => EnumMode::All,
            (None, _) => self.config.enum_mode,
        };
        let limit = match opts.models {
            Some(0) => None,
            Some(n) => Some(n),
            None => self.config.limit(mode),
        };
        Ok((self.store.snapshot(&extra), mode, limit))
    }

    fn update_stats(stats: &Mutex<Statistics>, r: &SolveResult, rules: usize, atoms: usize, secs: f64) {
        let mut s = stats.lock().expect("stats lock");
        s.choices += r.stats.choices;
        s.conflicts += r.stats.conflicts;
        s.restarts += r.stats.restarts;
        s.models_found += r.models as u64;
        s.rules_ground = rules as u64;
        s.atoms = atoms as u64;
        s.solve_calls += 1;
        s.last_solve_time = secs;
    }

    /// Flushes pending grounding, then searches for models. `on_model`
    /// returning `false` stops enumeration.
    pub fn solve(
        &mut self,
        opts: SolveOptions,
        mut on_model: impl FnMut(&Model) -> bool,
    ) -> Result<SolveResult, Error> {
        let (program, mode, limit) = self.prepare(&opts)?;
        let cancel = opts.cancel.clone().unwrap_or_default();
        let config = SolverConfig { seed: self.config.seed, restarts: self.config.restarts };
        let start = Instant::now();
        let table = self.store.atoms();
        let result =
            solver::solve(&program, mode, limit, &config, &cancel, &mut |m| on_model(&Model::from_solver(m, table)));
        Self::update_stats(&self.stats, &result, program.rules.len(), program.num_atoms, start.elapsed().as_secs_f64());
        Ok(result)
    }

    /// Like [`Engine::solve`], but the search runs on a background thread.
    /// Grounding happens before this returns.
    pub fn asolve(
        &mut self,
        opts: SolveOptions,
        mut on_model: impl FnMut(&Model) -> bool + Send + 'static,
    ) -> Result<SolveHandle, Error> {
        self.idle()?;
        let (program, mode, limit) = self.prepare(&opts)?;
        let cancel = opts.cancel.clone().unwrap_or_default();
        let config = SolverConfig { seed: self.config.seed, restarts: self.config.restarts };
        let table = self.store.atoms().clone();
        let stats = Arc::clone(&self.stats);
        let running = Arc::clone(&self.running);
        let token = Arc::clone(&cancel);
        running.store(true, Ordering::SeqCst);
        let thread = std::thread::spawn(move || {
            let start = Instant::now();
            let result = solver::solve(&program, mode, limit, &config, &token, &mut |m| {
                on_model(&Model::from_solver(m, &table))
            });
            Self::update_stats(&stats, &result, program.rules.len(), program.num_atoms, start.elapsed().as_secs_f64());
            running.store(false, Ordering::SeqCst);
            result
        });
        Ok(SolveHandle { cancel, thread: Some(thread), result: None })
    }
}

/// A background solve started by [`Engine::asolve`].
pub struct SolveHandle {
    cancel: Arc<AtomicBool>,
    thread: Option<JoinHandle<SolveResult>>,
    result: Option<SolveResult>,
}

impl SolveHandle {
    /// Requests interruption; the search stops at its next check.
    pub fn cancel(&self) {
        self.cancel.store(true, Ordering::SeqCst);
    }

    pub fn is_finished(&self) -> bool {
        self.thread.as_ref().is_none_or(|t| t.is_finished())
    }

    /// Blocks until the search ends.
    pub fn wait(&mut self) -> SolveResult {
        if let Some(t) = self.thread.take() {
            let r = t.join().unwrap_or_else(|e| std::panic::resume_unwind(e));
            self.result = Some(r);
        }
        self.result.clone().expect("joined solve has a result")
    }

    /// The result if the search has ended, without blocking.
    pub fn result(&mut self) -> Option<SolveResult> {
        if self.is_finished() {
            Some(self.wait())
        } else {
            None
        }
    }
}

/// `Interrupted` and unknown outcomes map to no verdict.
pub fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Sat => "SATISFIABLE",
        SolveStatus::Unsat => "UNSATISFIABLE",
        SolveStatus::Interrupted => "UNKNOWN",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn atom(s: &str) -> GroundAtom {
        GroundAtom::parse(s).unwrap()
    }

    fn models(e: &mut Engine, opts: SolveOptions) -> (SolveResult, Vec<Vec<String>>) {
        let mut out = Vec::new();
        let r = e
            .solve(opts, |m| {
                out.push(m.shown_strings());
                true
            })
            .unwrap();
        out.sort();
        (r, out)
    }

    fn all() -> SolveOptions {
        SolveOptions { models: Some(0), ..Default::default() }
    }

    #[test]
    fn default_behavior_and_acid() {
        let src = "a(1). #program acid(k). b(k). #program base. a(2).";
        let mut e = Engine::new();
        e.load(src).unwrap();
        e.ground("base", vec![]).unwrap();
        assert_eq!(models(&mut e, all()).1, [["a(1)", "a(2)"]]);

        let mut e = Engine::new();
        e.load(src).unwrap();
        e.ground("acid", vec![Term::Integer(42)]).unwrap();
        assert_eq!(models(&mut e, all()).1, [["b(42)"]]);
    }

    #[test]
    fn ground_without_solve_does_nothing() {
        let mut e = Engine::new();
        e.load("#program acid(k). b(k).").unwrap();
        e.ground("acid", vec![Term::Integer(42)]).unwrap();
        assert!(e.store().increments().is_empty());
        assert_eq!(e.get_stats(), Statistics::default());
    }

    #[test]
    fn unknown_subprogram() {
        let mut e = Engine::new();
        assert!(matches!(e.ground("nosuch", vec![]), Err(Error::UnknownSubprogram { .. })));
        assert!(matches!(e.ground("base", vec![Term::Integer(1)]), Err(Error::UnknownSubprogram { arity: 1, .. })));
    }

    #[test]
    fn flush_makes_one_increment_per_request() {
        let mut e = Engine::new();
        e.load("#program acid(k). b(k).").unwrap();
        e.ground("acid", vec![Term::Integer(42)]).unwrap();
        e.ground("acid", vec![Term::Integer(7)]).unwrap();
        e.flush().unwrap();
        let labels: Vec<&str> = e.store().increments().iter().map(|i| i.label.as_str()).collect();
        assert_eq!(labels, ["acid(42)", "acid(7)"]);
        assert_eq!(models(&mut e, all()).1, [["b(42)", "b(7)"]]);
        e.flush().unwrap();
        assert_eq!(e.store().increments().len(), 2);
    }

    #[test]
    fn empty_engine_has_empty_model() {
        let mut e = Engine::new();
        let (r, ms) = models(&mut e, all());
        assert_eq!(r.status, SolveStatus::Sat);
        assert_eq!(ms, vec![Vec::<String>::new()]);
    }

    #[test]
    fn assumptions_must_be_externals() {
        let mut e = Engine::new();
        e.load("a. #external e.").unwrap();
        e.ground("base", vec![]).unwrap();
        e.flush().unwrap();
        let opts = SolveOptions { assumptions: vec![(atom("zz"), true)], ..Default::default() };
        assert!(matches!(e.solve(opts, |_| true), Err(Error::Store(StoreError::NotExternal(_)))));
        let opts = SolveOptions { assumptions: vec![(atom("a"), true)], ..Default::default() };
        assert!(matches!(e.solve(opts, |_| true), Err(Error::Store(StoreError::AlreadyDefined(_)))));
        let opts = SolveOptions { assumptions: vec![(atom("e"), true)], ..all() };
        assert_eq!(models(&mut e, opts).1, [["a", "e"]]);
        assert_eq!(models(&mut e, all()).1, [["a"]]);
    }

    #[test]
    fn add_hypothesis() {
        let mut e = Engine::new();
        e.add("hyp", &[], "#external h. :- not h.").unwrap();
        e.ground("hyp", vec![]).unwrap();
        assert_eq!(models(&mut e, all()).0.status, SolveStatus::Unsat);
        e.assign_external(&atom("h"), true).unwrap();
        assert_eq!(models(&mut e, all()).0.status, SolveStatus::Sat);
    }

    #[test]
    fn add_extends_and_parameterizes() {
        let mut e = Engine::new();
        e.add("p", &["k"], "q(k).").unwrap();
        e.add("p", &["j"], "r(j).").unwrap();
        e.ground("p", vec![Term::Integer(1)]).unwrap();
        assert_eq!(models(&mut e, all()).1, [["q(1)", "r(1)"]]);
    }

    #[test]
    fn add_parse_error_leaves_engine_unchanged() {
        let mut e = Engine::new();
        e.add("p", &[], "a.").unwrap();
        let before: Vec<SubprogramDef> = e.subprograms().cloned().collect();
        assert!(matches!(e.add("p", &[], "c. d("), Err(Error::Parse(_))));
        let after: Vec<SubprogramDef> = e.subprograms().cloned().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn set_conf_options() {
        let mut e = Engine::new();
        e.set_conf("models=0", false).unwrap();
        assert_eq!(e.config().models, Some(0));
        assert_eq!(e.config().enum_mode, EnumMode::All);
        assert!(matches!(e.set_conf("bogus=1", false), Err(Error::UnknownOption(_))));
        assert!(matches!(e.set_conf("models=x", false), Err(Error::InvalidOption { .. })));
        e.set_conf("seed=7", true).unwrap();
        assert_eq!(*e.config(), Config { seed: 7, ..Config::default() });
        e.set_conf("--enum-mode=cautious --models=0", false).unwrap();
        assert_eq!(e.config().enum_mode, EnumMode::Intersection);
    }

    #[test]
    fn configured_enumeration() {
        let mut e = Engine::new();
        e.load("a :- not b. b :- not a.").unwrap();
        e.ground("base", vec![]).unwrap();
        assert_eq!(models(&mut e, SolveOptions::default()).1.len(), 1);
        e.set_conf("models=0", false).unwrap();
        assert_eq!(models(&mut e, SolveOptions::default()).1.len(), 2);
    }

    #[test]
    fn statistics() {
        let mut e = Engine::new();
        assert_eq!(e.get_stats(), Statistics::default());
        e.load("a.").unwrap();
        e.ground("base", vec![]).unwrap();
        models(&mut e, SolveOptions::default());
        let s1 = e.get_stats();
        assert_eq!((s1.models_found, s1.solve_calls), (1, 1));
        models(&mut e, SolveOptions::default());
        let s2 = e.get_stats();
        assert!(s2.models_found >= s1.models_found && s2.solve_calls == 2 && s2.choices >= s1.choices);
    }

    #[test]
    fn deferred_assignment_applies_after_flush() {
        let mut e = Engine::new();
        e.load("#program step(t). #external q(t). p(t) :- q(t).").unwrap();
        e.ground("step", vec![Term::Integer(1)]).unwrap();
        e.assign_external(&atom("q(1)"), true).unwrap();
        assert_eq!(models(&mut e, all()).1, [["p(1)", "q(1)"]]);
    }

    #[test]
    fn external_defined_by_a_later_request_in_the_same_flush() {
        let mut e = Engine::new();
        e.add("inc0", &[], "#external e. a :- e.").unwrap();
        e.add("inc1", &[], "b. e :- b.").unwrap();
        e.ground("inc0", vec![]).unwrap();
        e.ground("inc1", vec![]).unwrap();
        e.flush().unwrap();
        let id = e.store().atoms().lookup(&atom("e")).unwrap();
        assert_eq!(e.store().external_state(id), Some(crate::ExternalState::Defined));
        assert!(matches!(e.take_warnings().as_slice(), [Warning::ExternalDefined { .. }]));
        assert_eq!(models(&mut e, all()).1, [["a", "b", "e"]]);
    }

    fn pigeonhole(n: usize) -> String {
        format!("p(1..{}). h(1..{}). 1 {{ at(P,H) : h(H) }} 1 :- p(P). :- at(P,H), at(Q,H), P < Q.", n + 1, n)
    }

    #[test]
    fn asolve_wait_matches_solve() {
        let src = "d(1..4). 1 { c(X) : d(X) } 2.";
        let mut e1 = Engine::new();
        e1.load(src).unwrap();
        e1.ground("base", vec![]).unwrap();
        let (r1, m1) = models(&mut e1, all());

        let mut e2 = Engine::new();
        e2.load(src).unwrap();
        e2.ground("base", vec![]).unwrap();
        let seen = Arc::new(Mutex::new(Vec::new()));
        let sink = Arc::clone(&seen);
        let mut h = e2
            .asolve(all(), move |m| {
                sink.lock().unwrap().push(m.shown_strings());
                true
            })
            .unwrap();
        let r2 = h.wait();
        let mut m2 = seen.lock().unwrap().clone();
        m2.sort();
        assert_eq!((r1.status, r1.models), (r2.status, r2.models));
        assert_eq!(m1, m2);
    }

    #[test]
    fn asolve_cancel_and_exclusivity() {
        let mut e = Engine::new();
        e.load(&pigeonhole(9)).unwrap();
        e.ground("base", vec![]).unwrap();
        let mut h = e.asolve(SolveOptions::default(), |_| true).unwrap();
        assert!(matches!(e.asolve(SolveOptions::default(), |_| true), Err(Error::SolveAlreadyRunning)));
        assert!(matches!(e.ground("base", vec![]), Err(Error::SolveAlreadyRunning)));
        assert!(matches!(e.add("base", &[], "x."), Err(Error::SolveAlreadyRunning)));
        std::thread::sleep(Duration::from_millis(10));
        h.cancel();
        assert_eq!(h.wait().status, SolveStatus::Interrupted);
        e.add("extra", &[], "z.").unwrap();
        e.ground("extra", vec![]).unwrap();
        let cancel = Arc::new(AtomicBool::new(true));
        let r = e.solve(SolveOptions { cancel: Some(cancel), ..Default::default() }, |_| true).unwrap();
        assert_eq!(r.status, SolveStatus::Interrupted);
    }
}
