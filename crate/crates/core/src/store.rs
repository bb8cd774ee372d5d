//! The accumulated ground program: atom table, external states, increments
//! and the objective.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::grounder::{Domain, GroundAtom, GroundHead, GroundLiteral, GroundRule, GroundUnit};
use crate::solver::SolverProgram;
use crate::syntax::{Signature, Term};
use crate::Warning;

/// Dense identifier of an interned ground atom. Id 0 is reserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(u32);

impl AtomId {
    pub fn new(raw: u32) -> Self {
        AtomId(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Interning table. Ids are handed out in increasing order and never reused.
#[derive(Debug, Clone)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl Default for AtomTable {
    fn default() -> Self {
        AtomTable { atoms: vec![GroundAtom::new("", vec![])], index: HashMap::new() }
    }
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(id) = self.index.get(&atom) {
            return *id;
        }
        let id = AtomId(u32::try_from(self.atoms.len()).expect("atom table overflow"));
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }

    pub fn lookup(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn get(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    /// Number of interned atoms (the reserved id 0 is not counted).
    pub fn len(&self) -> usize {
        self.atoms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &GroundAtom)> {
        self.atoms.iter().enumerate().skip(1).map(|(i, a)| (AtomId(i as u32), a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExternalState {
    /// An input atom with its current truth value.
    Free(bool),
    /// Once an input, now defined by rules of a later increment.
    Defined,
    /// Permanently false.
    Released,
}

#[derive(Debug, Clone)]
pub struct IncrementRecord {
    pub label: String,
    pub unit: GroundUnit,
}

/// One distinct objective tuple; it contributes its weight once if any of
/// its alternative conditions holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveTerm {
    pub weight: i64,
    pub priority: i64,
    pub tuple: Vec<Term>,
    pub conditions: Vec<Vec<GroundLiteral>>,
}

#[derive(Debug, Clone, Default)]
pub struct Objective {
    terms: IndexMap<(i64, Vec<Term>), ObjectiveTerm>,
}

impl Objective {
    pub fn terms(&self) -> impl Iterator<Item = &ObjectiveTerm> {
        self.terms.values()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, weight: i64, priority: i64, tuple: Vec<Term>, condition: Vec<GroundLiteral>) {
        let term = self.terms.entry((priority, tuple.clone())).or_insert_with(|| ObjectiveTerm {
            weight,
            priority,
            tuple,
            conditions: Vec::new(),
        });
        if !term.conditions.contains(&condition) {
            term.conditions.push(condition);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("atom `{atom}` is already defined in increment {increment}")]
    Redefinition { atom: String, increment: u32 },
    #[error("positive cycle across increments through {}", .atoms.join(", "))]
    CrossIncrementPositiveCycle { atoms: Vec<String> },
    #[error("atom `{0}` has been released")]
    AlreadyReleased(String),
    #[error("atom `{0}` is not an external atom")]
    NotExternal(String),
    #[error("atom `{0}` is defined by rules and no longer external")]
    AlreadyDefined(String),
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    atoms: AtomTable,
    domain: Domain,
    externals: IndexMap<AtomId, ExternalState>,
    increments: Vec<IncrementRecord>,
    objective: Objective,
    shown: BTreeSet<Signature>,
    /// Increment that first defined each atom.
    defined_in: HashMap<AtomId, u32>,
    /// Positive dependencies `head -> body atom` of all joined rules.
    deps: HashMap<AtomId, Vec<AtomId>>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Split borrow for grounding: the table grows, the domain is read.
    pub fn grounding_view(&mut self) -> (&mut AtomTable, &Domain) {
        (&mut self.atoms, &self.domain)
    }

    pub fn increments(&self) -> &[IncrementRecord] {
        &self.increments
    }

    pub fn next_tag(&self) -> u32 {
        self.increments.len() as u32
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn shown(&self) -> &BTreeSet<Signature> {
        &self.shown
    }

    pub fn external_state(&self, atom: AtomId) -> Option<ExternalState> {
        self.externals.get(&atom).copied()
    }

    pub fn externals(&self) -> impl Iterator<Item = (AtomId, ExternalState)> + '_ {
        self.externals.iter().map(|(a, s)| (*a, *s))
    }

    fn name(&self, atom: AtomId) -> String {
        self.atoms.get(atom).to_string()
    }

    /// Adds a ground unit as a new increment. Either the whole unit is
    /// accepted or the store is left unchanged.
    pub fn join_module(&mut self, unit: GroundUnit, label: impl Into<String>) -> Result<Vec<Warning>, StoreError> {
        let tag = self.next_tag();
        let mut warnings = Vec::new();
        let mut new_heads: HashSet<AtomId> = HashSet::new();
        for r in &unit.rules {
            for h in r.head_atoms() {
                if let Some(inc) = self.defined_in.get(h) {
                    return Err(StoreError::Redefinition { atom: self.name(*h), increment: *inc });
                }
                match self.externals.get(h) {
                    Some(ExternalState::Released) => return Err(StoreError::AlreadyReleased(self.name(*h))),
                    Some(ExternalState::Free(_)) if new_heads.insert(*h) => {
                        warnings.push(Warning::ExternalDefined { atom: self.name(*h) })
                    }
                    _ => {
                        new_heads.insert(*h);
                    }
                }
            }
        }
        if let Some(cycle) = self.cross_cycle(&unit, tag) {
            return Err(StoreError::CrossIncrementPositiveCycle { atoms: cycle });
        }

        for r in &unit.rules {
            for h in r.head_atoms() {
                self.defined_in.entry(*h).or_insert(tag);
                self.domain.add_possible(*h, &self.atoms);
                self.domain.add_defined(*h);
                if let Some(s) = self.externals.get_mut(h) {
                    *s = ExternalState::Defined;
                }
                self.deps.entry(*h).or_default().extend(&r.pos);
            }
        }
        for f in &unit.facts {
            self.domain.add_fact(*f);
        }
        for e in &unit.external_decls {
            if self.defined_in.contains_key(e) || self.externals.contains_key(e) {
                continue;
            }
            self.externals.insert(*e, ExternalState::Free(false));
            self.domain.add_possible(*e, &self.atoms);
        }
        for m in &unit.minimize_entries {
            self.objective.add(m.weight, m.priority, m.tuple.clone(), m.condition.clone());
        }
        self.shown.extend(unit.shown.iter().cloned());
        self.increments.push(IncrementRecord { label: label.into(), unit });
        Ok(warnings)
    }

    /// Looks for a positive cycle that would connect atoms defined in
    /// different increments once `unit` is added. Returns the atoms of the
    /// offending component, sorted by name.
    fn cross_cycle(&self, unit: &GroundUnit, tag: u32) -> Option<Vec<String>> {
        let mut nodes: IndexMap<AtomId, ()> = IndexMap::new();
        let mut edges: Vec<(AtomId, AtomId)> = Vec::new();
        for (h, bs) in &self.deps {
            for b in bs {
                edges.push((*h, *b));
            }
        }
        for r in &unit.rules {
            for h in r.head_atoms() {
                for b in &r.pos {
                    edges.push((*h, *b));
                }
            }
        }
        for (h, b) in &edges {
            nodes.insert(*h, ());
            nodes.insert(*b, ());
        }
        let mut succ = vec![Vec::new(); nodes.len()];
        for (h, b) in &edges {
            succ[nodes.get_index_of(h).unwrap()].push(nodes.get_index_of(b).unwrap());
        }
        let origin = |a: AtomId| -> Option<u32> {
            self.defined_in
                .get(&a)
                .copied()
                .or_else(|| unit.rules.iter().any(|r| r.head_atoms().contains(&a)).then_some(tag))
        };
        for comp in crate::graph::strongly_connected(nodes.len(), &succ) {
            if comp.len() < 2 {
                continue;
            }
            let atoms: Vec<AtomId> = comp.iter().map(|i| *nodes.get_index(*i).unwrap().0).collect();
            let incs: HashSet<Option<u32>> = atoms.iter().map(|a| origin(*a)).collect();
            if incs.len() > 1 {
                let mut names: Vec<String> = atoms.iter().map(|a| self.name(*a)).collect();
                names.sort();
                return Some(names);
            }
        }
        None
    }

    fn check_external(&self, atom: AtomId) -> Result<(), StoreError> {
        match self.externals.get(&atom) {
            None if self.domain.is_defined(atom) => Err(StoreError::AlreadyDefined(self.name(atom))),
            None => Err(StoreError::NotExternal(self.name(atom))),
            Some(ExternalState::Defined) => Err(StoreError::AlreadyDefined(self.name(atom))),
            Some(ExternalState::Released) => Err(StoreError::AlreadyReleased(self.name(atom))),
            Some(ExternalState::Free(_)) => Ok(()),
        }
    }

    pub fn assign_external(&mut self, atom: AtomId, value: bool) -> Result<(), StoreError> {
        self.check_external(atom)?;
        self.externals.insert(atom, ExternalState::Free(value));
        Ok(())
    }

    pub fn release_external(&mut self, atom: AtomId) -> Result<(), StoreError> {
        self.check_external(atom)?;
        self.externals.insert(atom, ExternalState::Released);
        self.domain.remove_possible(atom);
        Ok(())
    }

    /// Checks that `atom` may be used as an assumption.
    pub fn check_assumable(&self, atom: AtomId) -> Result<(), StoreError> {
        self.check_external(atom)
    }

    /// The current program: all rules, free externals as assumptions (with
    /// `extra` taking precedence) and released externals as constraints.
    pub fn snapshot(&self, extra: &[GroundLiteral]) -> SolverProgram {
        let mut rules: Vec<GroundRule> = self.increments.iter().flat_map(|i| i.unit.rules.iter().cloned()).collect();
        let mut externals = Vec::new();
        let mut assumptions = Vec::new();
        for (a, s) in &self.externals {
            match s {
                ExternalState::Free(v) => {
                    externals.push(*a);
                    if !extra.iter().any(|l| l.atom == *a) {
                        assumptions.push(GroundLiteral { atom: *a, positive: *v });
                    }
                }
                ExternalState::Released => {
                    rules.push(GroundRule { head: GroundHead::None, pos: vec![*a], neg: vec![] });
                }
                ExternalState::Defined => {}
            }
        }
        assumptions.extend_from_slice(extra);
        let shown = (!self.shown.is_empty()).then(|| {
            self.atoms.iter().filter(|(_, a)| self.shown.contains(&a.signature())).map(|(id, _)| id).collect()
        });
        SolverProgram {
            num_atoms: self.atoms.len(),
            rules,
            externals,
            assumptions,
            objective: self.objective.terms().cloned().collect(),
            shown,
        }
    }
}
