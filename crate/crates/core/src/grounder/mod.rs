//! Instantiation of subprograms into ground units.
//!
//! A subprogram is first specialised to its arguments
//! ([`substitute_params`]), then grounded bottom-up against the set of atoms
//! that are possibly true so far. `#external` directives take part in the
//! fixpoint like rules, but only their head atoms survive, as input
//! declarations.

mod dump;
mod eval;
mod instantiate;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::store::{AtomId, AtomTable};
use crate::syntax::{Signature, SubprogramDef, Term, UnsafeVariable};
use crate::Warning;

pub use dump::dump_ground;
pub use instantiate::{instantiate, instantiate_all};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("subprogram `{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("argument `{0}` is not ground")]
    NonGroundArgument(String),
    #[error("#minimize weight and priority must be integers, got `{0}`")]
    NonIntegerWeight(String),
    #[error("choice bound must be an integer, got `{0}`")]
    NonIntegerBound(String),
    #[error(transparent)]
    Unsafe(#[from] UnsafeVariable),
}

/// A ground atom: predicate name plus fully evaluated arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub name: String,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        GroundAtom { name: name.into(), args }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.name.clone(), self.args.len())
    }

    /// Parses text such as `query(3)`.
    pub fn parse(text: &str) -> Result<Self, crate::syntax::ParseError> {
        let a = crate::syntax::parse_atom(text)?;
        Ok(GroundAtom { name: a.name, args: a.args })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub atom: AtomId,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn pos(atom: AtomId) -> Self {
        GroundLiteral { atom, positive: true }
    }

    pub fn neg(atom: AtomId) -> Self {
        GroundLiteral { atom, positive: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundHead {
    None,
    Atom(AtomId),
    Choice { atoms: Vec<AtomId>, lower: Option<i64>, upper: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

impl GroundRule {
    /// Sorts and deduplicates the body; `None` when the body is contradictory.
    pub fn normalized(head: GroundHead, mut pos: Vec<AtomId>, mut neg: Vec<AtomId>) -> Option<Self> {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        if pos.iter().any(|p| neg.binary_search(p).is_ok()) {
            return None;
        }
        let head = match head {
            GroundHead::Choice { mut atoms, lower, upper } => {
                let mut seen = HashSet::new();
                atoms.retain(|a| seen.insert(*a));
                GroundHead::Choice { atoms, lower, upper }
            }
            h => h,
        };
        Some(GroundRule { head, pos, neg })
    }

    pub fn fact(atom: AtomId) -> Self {
        GroundRule { head: GroundHead::Atom(atom), pos: vec![], neg: vec![] }
    }

    pub fn head_atoms(&self) -> &[AtomId] {
        match &self.head {
            GroundHead::None => &[],
            GroundHead::Atom(a) => std::slice::from_ref(a),
            GroundHead::Choice { atoms, .. } => atoms,
        }
    }
}

/// One ground `#minimize` element instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinimizeEntry {
    pub weight: i64,
    pub priority: i64,
    /// `[weight, priority, terms...]`; together with the priority this is the
    /// deduplication key of the entry.
    pub tuple: Vec<Term>,
    pub condition: Vec<GroundLiteral>,
}

/// Result of instantiating one subprogram request.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundUnit {
    pub rules: Vec<GroundRule>,
    pub external_decls: Vec<AtomId>,
    pub minimize_entries: Vec<MinimizeEntry>,
    pub shown: BTreeSet<Signature>,
    pub increment_tag: u32,
    /// Atoms derived as facts by this unit.
    pub facts: Vec<AtomId>,
}

/// The atoms visible to grounding: possibly-true atoms indexed by predicate,
/// the subset known to be facts, and the atoms defined by rules.
#[derive(Debug, Clone, Default)]
pub struct Domain {
    by_pred: HashMap<Signature, Vec<AtomId>>,
    possible: HashSet<AtomId>,
    facts: HashSet<AtomId>,
    defined: HashSet<AtomId>,
}

impl Domain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_possible(&mut self, id: AtomId, table: &AtomTable) {
        if self.possible.insert(id) {
            self.by_pred.entry(table.get(id).signature()).or_default().push(id);
        }
    }

    pub fn remove_possible(&mut self, id: AtomId) {
        self.possible.remove(&id);
    }

    pub fn add_fact(&mut self, id: AtomId) {
        self.facts.insert(id);
    }

    pub fn add_defined(&mut self, id: AtomId) {
        self.defined.insert(id);
    }

    pub fn is_possible(&self, id: AtomId) -> bool {
        self.possible.contains(&id)
    }

    pub fn is_fact(&self, id: AtomId) -> bool {
        self.facts.contains(&id)
    }

    pub fn is_defined(&self, id: AtomId) -> bool {
        self.defined.contains(&id)
    }

    pub(crate) fn candidates(&self, sig: &Signature) -> impl Iterator<Item = AtomId> + '_ {
        self.by_pred.get(sig).into_iter().flatten().copied().filter(|id| self.possible.contains(id))
    }
}

/// Everything instantiation reads or extends: the atom table (extended by
/// interning), the current domain (read-only), global constants, and the
/// tag the next unit will get.
pub struct GroundContext<'a> {
    pub atoms: &'a mut AtomTable,
    pub domain: &'a Domain,
    pub consts: &'a [(String, Term)],
    pub next_tag: u32,
    pub warnings: Vec<Warning>,
}

impl<'a> GroundContext<'a> {
    pub fn new(atoms: &'a mut AtomTable, domain: &'a Domain) -> Self {
        GroundContext { atoms, domain, consts: &[], next_tag: 0, warnings: Vec::new() }
    }
}

/// Replaces each parameter, where it occurs as a constant symbol, with the
/// corresponding argument. The result has no parameters.
pub fn substitute_params(def: &SubprogramDef, args: &[Term]) -> Result<SubprogramDef, GroundError> {
    if def.params.len() != args.len() {
        return Err(GroundError::ArityMismatch { name: def.name.clone(), expected: def.params.len(), got: args.len() });
    }
    if let Some(t) = args.iter().find(|t| !t.is_ground()) {
        return Err(GroundError::NonGroundArgument(t.to_string()));
    }
    if def.params.is_empty() {
        return Ok(def.clone());
    }
    let map = |s: &str| def.params.iter().position(|p| p == s).map(|i| args[i].clone());
    Ok(SubprogramDef {
        name: def.name.clone(),
        params: Vec::new(),
        statements: def.statements.iter().map(|s| s.map_terms(&map)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn substitute_acid() {
        let defs = parse_program("#program acid(k). b(k).").unwrap();
        let acid = defs.iter().find(|d| d.name == "acid").unwrap();
        let s = substitute_params(acid, &[Term::Integer(42)]).unwrap();
        assert!(s.params.is_empty());
        assert_eq!(s.statements[0].to_string(), "b(42).");
    }

    #[test]
    fn substitute_identity_without_params() {
        let defs = parse_program("a(1). p(X) :- q(X).").unwrap();
        assert_eq!(substitute_params(&defs[0], &[]).unwrap(), defs[0]);
    }

    #[test]
    fn substitute_cumulative() {
        let defs = parse_program("#program cumulative(t). on(D,P,t) :- move(D,P,t).").unwrap();
        let s = substitute_params(&defs[1], &[Term::Integer(3)]).unwrap();
        assert_eq!(s.statements[0].to_string(), "on(D,P,3) :- move(D,P,3).");
    }

    #[test]
    fn substitute_arity_mismatch() {
        let defs = parse_program("#program acid(k). b(k).").unwrap();
        assert!(matches!(
            substitute_params(&defs[1], &[]),
            Err(GroundError::ArityMismatch { expected: 1, got: 0, .. })
        ));
    }

    #[test]
    fn contradictory_body_dropped() {
        let a = AtomId::new(1);
        assert!(GroundRule::normalized(GroundHead::None, vec![a], vec![a]).is_none());
        let r = GroundRule::normalized(GroundHead::None, vec![a, a], vec![]).unwrap();
        assert_eq!(r.pos, vec![a]);
    }
}
