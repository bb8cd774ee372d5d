use std::collections::{BTreeSet, HashMap, HashSet};

use indexmap::{IndexMap, IndexSet};

use super::eval::{compile, unify, Binding, Pat, Slots};
use super::*;
use crate::syntax::{check_statement_safety, plan_body, Atom, Directive, Head, Literal, PlanStep, RelOp, Statement};

/// Instantiates one subprogram for `args`.
pub fn instantiate(def: &SubprogramDef, args: &[Term], ctx: &mut GroundContext<'_>) -> Result<GroundUnit, GroundError> {
    let mut units = instantiate_all(&[(def, args.to_vec())], ctx)?;
    Ok(units.pop().expect("one unit per request"))
}

/// Instantiates several requests jointly: each sees the head atoms of all the
/// others as possible. Returns one unit per request, tagged consecutively
/// from `ctx.next_tag`.
pub fn instantiate_all(
    requests: &[(&SubprogramDef, Vec<Term>)],
    ctx: &mut GroundContext<'_>,
) -> Result<Vec<GroundUnit>, GroundError> {
    let mut jobs = Vec::new();
    let mut groups = Vec::new();
    let mut shown = vec![BTreeSet::new(); requests.len()];
    for (origin, (def, args)) in requests.iter().enumerate() {
        let def = substitute_params(def, args)?;
        let consts = ctx.consts;
        for (name, _) in consts {
            if requests[origin].0.params.contains(name) {
                ctx.warnings.push(Warning::ConstShadowed { name: name.clone(), subprogram: def.name.clone() });
            }
        }
        let const_map = |s: &str| consts.iter().find(|(n, _)| n == s).map(|(_, t)| t.clone());
        for stmt in &def.statements {
            let stmt = if consts.is_empty() { stmt.clone() } else { stmt.map_terms(&const_map) };
            check_statement_safety(&stmt)?;
            compile_statement(&stmt, origin, &mut jobs, &mut groups, &mut shown[origin]);
        }
    }
    let mut g = Grounding::new(ctx, &jobs, &groups);
    g.fixpoint()?;
    g.finish(requests.len(), shown)
}

#[derive(Debug, Clone)]
struct AtomPat {
    name: String,
    args: Vec<Pat>,
}

impl AtomPat {
    fn compile(a: &Atom, slots: &mut Slots) -> Self {
        AtomPat { name: a.name.clone(), args: a.args.iter().map(|t| compile(t, slots)).collect() }
    }

    fn signature(&self) -> Signature {
        Signature::new(self.name.clone(), self.args.len())
    }

    fn eval(&self, b: &Binding) -> Result<Vec<GroundAtom>, GroundError> {
        let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
        for a in &self.args {
            let vals = a.eval(b)?;
            let mut next = Vec::with_capacity(acc.len() * vals.len());
            for prefix in &acc {
                for v in &vals {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        Ok(acc.into_iter().map(|args| GroundAtom::new(self.name.clone(), args)).collect())
    }
}

#[derive(Debug, Clone)]
enum Step {
    Match { atom: AtomPat, sig: Signature, ordinal: usize, slots: Vec<usize>, cond: bool },
    Test { left: Pat, op: RelOp, right: Pat },
    Assign { slot: usize, value: Pat },
    Negative { atom: AtomPat, cond: bool },
}

#[derive(Debug, Clone)]
enum JobKind {
    Rule { head: Option<AtomPat> },
    ChoiceBody { group: usize },
    ChoiceElement { group: usize, atom: AtomPat },
    External { atom: AtomPat },
    Minimize { weight: Pat, priority: Pat, terms: Vec<Pat> },
}

#[derive(Debug, Clone)]
struct Job {
    origin: usize,
    steps: Vec<Step>,
    matches: usize,
    nslots: usize,
    kind: JobKind,
}

#[derive(Debug, Clone)]
struct ChoiceGroup {
    origin: usize,
    lower: Option<Pat>,
    upper: Option<Pat>,
    /// Slots of the variables bound by the rule body; their values identify
    /// one body instance.
    key_slots: Vec<usize>,
}

fn compile_steps(
    lits: &[Literal],
    bound: &BTreeSet<String>,
    cond: bool,
    slots: &mut Slots,
    steps: &mut Vec<Step>,
    matches: &mut usize,
) -> BTreeSet<String> {
    let plan = plan_body(lits, bound);
    debug_assert!(plan.leftover.is_empty(), "safety is checked before compilation");
    for step in &plan.steps {
        match step {
            PlanStep::Match(i) => {
                let Literal::Atom { atom, .. } = &lits[*i] else { unreachable!() };
                let atom = AtomPat::compile(atom, slots);
                let mut s = Vec::new();
                atom.args.iter().for_each(|p| p.slots(&mut s));
                s.sort_unstable();
                s.dedup();
                steps.push(Step::Match { sig: atom.signature(), atom, ordinal: *matches, slots: s, cond });
                *matches += 1;
            }
            PlanStep::Test(i) => {
                let Literal::Comparison { left, op, right } = &lits[*i] else { unreachable!() };
                steps.push(Step::Test { left: compile(left, slots), op: *op, right: compile(right, slots) });
            }
            PlanStep::Assign { literal, var } => {
                let Literal::Comparison { left, right, .. } = &lits[*literal] else { unreachable!() };
                let value = match left {
                    Term::Variable(v) if v == var => right,
                    _ => left,
                };
                let value = compile(value, slots);
                steps.push(Step::Assign { slot: slots.slot(var), value });
            }
            PlanStep::Negative(i) => {
                let Literal::Atom { atom, .. } = &lits[*i] else { unreachable!() };
                steps.push(Step::Negative { atom: AtomPat::compile(atom, slots), cond });
            }
        }
    }
    plan.bound
}

fn compile_statement(
    stmt: &Statement,
    origin: usize,
    jobs: &mut Vec<Job>,
    groups: &mut Vec<ChoiceGroup>,
    shown: &mut BTreeSet<Signature>,
) {
    let empty = BTreeSet::new();
    let mut simple = |lits: &[Literal], make: &dyn Fn(&mut Slots) -> JobKind| {
        let mut slots = Slots::default();
        let mut steps = Vec::new();
        let mut matches = 0;
        compile_steps(lits, &empty, false, &mut slots, &mut steps, &mut matches);
        let kind = make(&mut slots);
        jobs.push(Job { origin, steps, matches, nslots: slots.len(), kind });
    };
    match stmt {
        Statement::Rule(rule) => match &rule.head {
            Head::None => simple(&rule.body, &|_| JobKind::Rule { head: None }),
            Head::Atom(a) => simple(&rule.body, &|s| JobKind::Rule { head: Some(AtomPat::compile(a, s)) }),
            Head::Choice { elements, lower, upper } => {
                let group = groups.len();
                let mut slots = Slots::default();
                let mut steps = Vec::new();
                let mut matches = 0;
                let bound = compile_steps(&rule.body, &empty, false, &mut slots, &mut steps, &mut matches);
                let key_slots: Vec<usize> = bound.iter().filter_map(|v| slots.get(v)).collect();
                let lower = lower.as_ref().map(|t| compile(t, &mut slots));
                let upper = upper.as_ref().map(|t| compile(t, &mut slots));
                groups.push(ChoiceGroup { origin, lower, upper, key_slots });
                jobs.push(Job {
                    origin,
                    steps: steps.clone(),
                    matches,
                    nslots: slots.len(),
                    kind: JobKind::ChoiceBody { group },
                });
                for e in elements {
                    let mut eslots = Slots::default();
                    let mut esteps = Vec::new();
                    let mut ematches = 0;
                    let bound = compile_steps(&rule.body, &empty, false, &mut eslots, &mut esteps, &mut ematches);
                    // body slots come first, in the same order as for the group
                    compile_steps(&e.condition, &bound, true, &mut eslots, &mut esteps, &mut ematches);
                    let atom = AtomPat::compile(&e.atom, &mut eslots);
                    jobs.push(Job {
                        origin,
                        steps: esteps,
                        matches: ematches,
                        nslots: eslots.len(),
                        kind: JobKind::ChoiceElement { group, atom },
                    });
                }
            }
        },
        Statement::Directive(Directive::External { atom, condition }) => {
            simple(condition, &|s| JobKind::External { atom: AtomPat::compile(atom, s) })
        }
        Statement::Directive(Directive::Minimize { elements }) => {
            for e in elements {
                simple(&e.condition, &|s| JobKind::Minimize {
                    weight: compile(&e.weight, s),
                    priority: compile(&e.priority, s),
                    terms: e.terms.iter().map(|t| compile(t, s)).collect(),
                })
            }
        }
        Statement::Directive(Directive::Show(sig)) => {
            shown.insert(sig.clone());
        }
        Statement::Directive(Directive::Const { .. } | Directive::Script { .. }) => {}
    }
}

/// Ground literals collected along one body instance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
struct Collected {
    pos: Vec<AtomId>,
    neg: Vec<GroundAtom>,
    cond_pos: Vec<AtomId>,
    cond_neg: Vec<GroundAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Emitted {
    Rule { origin: usize, head: Option<AtomId>, body: Collected },
    ChoiceBody { group: usize, key: Vec<Term>, body: Collected, lower: Option<i64>, upper: Option<i64> },
    ChoiceElement { group: usize, key: Vec<Term>, atom: AtomId, body: Collected },
    External { origin: usize, atom: AtomId, body: Collected },
    Minimize { origin: usize, weight: i64, priority: i64, tuple: Vec<Term>, body: Collected },
}

struct Grounding<'c, 'a> {
    ctx: &'c mut GroundContext<'a>,
    jobs: &'c [Job],
    groups: &'c [ChoiceGroup],
    /// Possible atoms per predicate: domain atoms first, then derived ones.
    index: HashMap<Signature, Vec<AtomId>>,
    position: HashMap<AtomId, usize>,
    derived: HashSet<AtomId>,
    emitted: IndexSet<Emitted>,
    /// Per predicate `(old_end, delta_end)` of the current round.
    marks: HashMap<Signature, (usize, usize)>,
    grew: bool,
}

impl<'c, 'a> Grounding<'c, 'a> {
    fn new(ctx: &'c mut GroundContext<'a>, jobs: &'c [Job], groups: &'c [ChoiceGroup]) -> Self {
        let mut g = Grounding {
            ctx,
            jobs,
            groups,
            index: HashMap::new(),
            position: HashMap::new(),
            derived: HashSet::new(),
            emitted: IndexSet::new(),
            marks: HashMap::new(),
            grew: false,
        };
        let sigs: Vec<Signature> = jobs
            .iter()
            .flat_map(|j| j.steps.iter())
            .filter_map(|s| match s {
                Step::Match { sig, .. } => Some(sig.clone()),
                _ => None,
            })
            .collect();
        for sig in sigs {
            g.ensure_pred(&sig);
        }
        g
    }

    fn ensure_pred(&mut self, sig: &Signature) {
        if self.index.contains_key(sig) {
            return;
        }
        let list: Vec<AtomId> = self.ctx.domain.candidates(sig).collect();
        for (i, id) in list.iter().enumerate() {
            self.position.insert(*id, i);
        }
        self.index.insert(sig.clone(), list);
    }

    fn is_possible(&self, id: AtomId) -> bool {
        self.derived.contains(&id) || self.ctx.domain.is_possible(id)
    }

    fn add_possible(&mut self, atom: GroundAtom) -> AtomId {
        let sig = atom.signature();
        let id = self.ctx.atoms.intern(atom);
        if !self.is_possible(id) {
            self.derived.insert(id);
            self.ensure_pred(&sig);
            let list = self.index.get_mut(&sig).expect("predicate indexed");
            self.position.insert(id, list.len());
            list.push(id);
            self.grew = true;
        }
        id
    }

    fn fixpoint(&mut self) -> Result<(), GroundError> {
        let mut first = true;
        loop {
            // new round: what was delta becomes old, everything so far is delta
            for (sig, list) in &self.index {
                let prev = if first { 0 } else { self.marks.get(sig).map_or(0, |m| m.1) };
                self.marks.insert(sig.clone(), (prev, list.len()));
            }
            self.grew = false;
            for job in self.jobs {
                if job.matches == 0 {
                    if first {
                        self.run_job(job, None)?;
                    }
                    continue;
                }
                for d in 0..job.matches {
                    self.run_job(job, Some(d))?;
                }
            }
            first = false;
            if !self.grew {
                return Ok(());
            }
        }
    }

    fn run_job(&mut self, job: &Job, delta: Option<usize>) -> Result<(), GroundError> {
        let mut binding = vec![None; job.nslots];
        let mut acc = Collected::default();
        self.walk(job, delta, 0, &mut binding, &mut acc)
    }

    fn range(&self, sig: &Signature, ordinal: usize, delta: Option<usize>) -> (usize, usize) {
        let (old, cur) = self.marks.get(sig).copied().unwrap_or((0, 0));
        match delta {
            None => (0, cur),
            Some(d) if ordinal < d => (0, old),
            Some(d) if ordinal == d => (old, cur),
            Some(_) => (0, cur),
        }
    }

    fn walk(
        &mut self,
        job: &Job,
        delta: Option<usize>,
        at: usize,
        b: &mut Binding,
        acc: &mut Collected,
    ) -> Result<(), GroundError> {
        let Some(step) = job.steps.get(at) else {
            return self.emit(job, b, acc);
        };
        match step {
            Step::Match { atom, sig, ordinal, slots, cond } => {
                let (lo, hi) = self.range(sig, *ordinal, delta);
                if lo >= hi {
                    return Ok(());
                }
                if slots.iter().all(|s| b[*s].is_some()) {
                    for ga in atom.eval(b)? {
                        let Some(id) = self.ctx.atoms.lookup(&ga) else { continue };
                        if !self.is_possible(id) {
                            continue;
                        }
                        let pos = self.position.get(&id).copied().unwrap_or(usize::MAX);
                        if pos < lo || pos >= hi {
                            continue;
                        }
                        push_pos(acc, id, *cond);
                        self.walk(job, delta, at + 1, b, acc)?;
                        pop_pos(acc, *cond);
                    }
                    return Ok(());
                }
                let candidates: Vec<AtomId> = self.index.get(sig).map(|l| l[lo..hi].to_vec()).unwrap_or_default();
                let mut trail = Vec::new();
                for id in candidates {
                    let args = self.ctx.atoms.get(id).args.clone();
                    let mut ok = true;
                    for (p, v) in atom.args.iter().zip(&args) {
                        if !unify(p, v, b, &mut trail)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        push_pos(acc, id, *cond);
                        self.walk(job, delta, at + 1, b, acc)?;
                        pop_pos(acc, *cond);
                    }
                    for s in trail.drain(..) {
                        b[s] = None;
                    }
                }
                Ok(())
            }
            Step::Test { left, op, right } => {
                let (ls, rs) = (left.eval(b)?, right.eval(b)?);
                if ls.iter().any(|l| rs.iter().any(|r| op.holds(l, r))) {
                    self.walk(job, delta, at + 1, b, acc)?;
                }
                Ok(())
            }
            Step::Assign { slot, value } => {
                for v in value.eval(b)? {
                    b[*slot] = Some(v);
                    self.walk(job, delta, at + 1, b, acc)?;
                }
                b[*slot] = None;
                Ok(())
            }
            Step::Negative { atom, cond } => {
                for ga in atom.eval(b)? {
                    let list = if *cond { &mut acc.cond_neg } else { &mut acc.neg };
                    list.push(ga);
                    self.walk(job, delta, at + 1, b, acc)?;
                    let list = if *cond { &mut acc.cond_neg } else { &mut acc.neg };
                    list.pop();
                }
                Ok(())
            }
        }
    }

    fn emit(&mut self, job: &Job, b: &Binding, acc: &Collected) -> Result<(), GroundError> {
        match &job.kind {
            JobKind::Rule { head: None } => {
                self.emitted.insert(Emitted::Rule { origin: job.origin, head: None, body: acc.clone() });
            }
            JobKind::Rule { head: Some(h) } => {
                for ga in h.eval(b)? {
                    let id = self.add_possible(ga);
                    self.emitted.insert(Emitted::Rule { origin: job.origin, head: Some(id), body: acc.clone() });
                }
            }
            JobKind::ChoiceBody { group } => {
                let g = &self.groups[*group];
                let bound = |p: &Option<Pat>| -> Result<Option<i64>, GroundError> {
                    match p {
                        None => Ok(None),
                        Some(p) => match p.eval_single(b)? {
                            Term::Integer(i) => Ok(Some(i)),
                            other => Err(GroundError::NonIntegerBound(other.to_string())),
                        },
                    }
                };
                let (lower, upper) = (bound(&g.lower)?, bound(&g.upper)?);
                let key = key_of(&g.key_slots, b);
                self.emitted.insert(Emitted::ChoiceBody { group: *group, key, body: acc.clone(), lower, upper });
            }
            JobKind::ChoiceElement { group, atom } => {
                let key = key_of(&self.groups[*group].key_slots, b);
                for ga in atom.eval(b)? {
                    let id = self.add_possible(ga);
                    self.emitted.insert(Emitted::ChoiceElement {
                        group: *group,
                        key: key.clone(),
                        atom: id,
                        body: acc.clone(),
                    });
                }
            }
            JobKind::External { atom } => {
                for ga in atom.eval(b)? {
                    let id = self.add_possible(ga);
                    self.emitted.insert(Emitted::External { origin: job.origin, atom: id, body: acc.clone() });
                }
            }
            JobKind::Minimize { weight, priority, terms } => {
                let int = |p: &Pat| -> Result<i64, GroundError> {
                    match p.eval_single(b)? {
                        Term::Integer(i) => Ok(i),
                        other => Err(GroundError::NonIntegerWeight(other.to_string())),
                    }
                };
                let (w, p) = (int(weight)?, int(priority)?);
                let mut tuple = vec![Term::Integer(w), Term::Integer(p)];
                for t in terms {
                    tuple.push(t.eval_single(b)?);
                }
                self.emitted.insert(Emitted::Minimize {
                    origin: job.origin,
                    weight: w,
                    priority: p,
                    tuple,
                    body: acc.clone(),
                });
            }
        }
        Ok(())
    }

    /// Resolves a default-negated atom: `None` if it can never be true (the
    /// literal is dropped), otherwise its id.
    fn resolve_neg(&self, a: &GroundAtom) -> Option<AtomId> {
        self.ctx.atoms.lookup(a).filter(|id| self.is_possible(*id))
    }

    fn finish(mut self, n: usize, shown: Vec<BTreeSet<Signature>>) -> Result<Vec<GroundUnit>, GroundError> {
        let emitted = std::mem::take(&mut self.emitted);
        let domain = self.ctx.domain;
        let resolve =
            |g: &Self, atoms: &[GroundAtom]| -> Vec<AtomId> { atoms.iter().filter_map(|a| g.resolve_neg(a)).collect() };

        // facts: least fixpoint over definite rules
        let mut facts: HashSet<AtomId> = HashSet::new();
        let definite: Vec<(AtomId, Vec<AtomId>)> = emitted
            .iter()
            .filter_map(|e| match e {
                Emitted::Rule { head: Some(h), body, .. } if resolve(&self, &body.neg).is_empty() => {
                    Some((*h, body.pos.clone()))
                }
                _ => None,
            })
            .collect();
        loop {
            let mut changed = false;
            for (h, pos) in &definite {
                if !facts.contains(h) && pos.iter().all(|p| facts.contains(p) || domain.is_fact(*p)) {
                    facts.insert(*h);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let is_fact = |id: &AtomId| facts.contains(id) || domain.is_fact(*id);

        let mut units: Vec<GroundUnit> =
            (0..n).map(|i| GroundUnit { increment_tag: self.ctx.next_tag + i as u32, ..Default::default() }).collect();
        let mut rule_seen: Vec<HashSet<GroundRule>> = vec![HashSet::new(); n];
        let mut push_rule = |units: &mut Vec<GroundUnit>, origin: usize, r: Option<GroundRule>| {
            if let Some(r) = r {
                if rule_seen[origin].insert(r.clone()) {
                    units[origin].rules.push(r);
                }
            }
        };

        // choice elements by (group, head key)
        type Elements<'e> = IndexMap<(usize, Vec<Term>), Vec<(AtomId, &'e Collected)>>;
        let mut elements: Elements = IndexMap::new();
        for e in &emitted {
            if let Emitted::ChoiceElement { group, key, atom, body } = e {
                elements.entry((*group, key.clone())).or_default().push((*atom, body));
            }
        }

        // earliest request defining each atom
        let mut defined: HashMap<AtomId, usize> = HashMap::new();
        let mut define = |atoms: &[AtomId], origin: usize| {
            for a in atoms {
                let o = defined.entry(*a).or_insert(origin);
                *o = (*o).min(origin);
            }
        };
        let mut warned: HashSet<AtomId> = HashSet::new();
        for e in &emitted {
            match e {
                Emitted::Rule { origin, head, body } => {
                    let neg = resolve(&self, &body.neg);
                    if neg.iter().any(&is_fact) {
                        continue;
                    }
                    let head = head.map_or(GroundHead::None, GroundHead::Atom);
                    let r = GroundRule::normalized(head, body.pos.clone(), neg);
                    if let Some(r) = &r {
                        define(r.head_atoms(), *origin);
                    }
                    push_rule(&mut units, *origin, r);
                }
                Emitted::ChoiceBody { group, key, body, lower, upper } => {
                    let g = &self.groups[*group];
                    let bounded = lower.is_some() || upper.is_some();
                    let neg = resolve(&self, &body.neg);
                    if neg.iter().any(&is_fact) {
                        continue;
                    }
                    let mut atoms = Vec::new();
                    for (atom, ebody) in elements.get(&(*group, key.clone())).into_iter().flatten() {
                        let cond_neg = resolve(&self, &ebody.cond_neg);
                        if cond_neg.iter().any(&is_fact) {
                            continue;
                        }
                        let domain = ebody.cond_pos.iter().all(&is_fact) && cond_neg.is_empty();
                        if domain {
                            atoms.push(*atom);
                        } else if !bounded {
                            let mut pos = body.pos.clone();
                            pos.extend(&ebody.cond_pos);
                            let mut n2 = neg.clone();
                            n2.extend(cond_neg);
                            let head = GroundHead::Choice { atoms: vec![*atom], lower: None, upper: None };
                            let r = GroundRule::normalized(head, pos, n2);
                            if r.is_some() {
                                define(&[*atom], g.origin);
                            }
                            push_rule(&mut units, g.origin, r);
                        } else {
                            if warned.insert(*atom) {
                                self.ctx.warnings.push(Warning::ConditionNotDomain {
                                    atom: self.ctx.atoms.get(*atom).to_string(),
                                    context: "choice element".into(),
                                });
                            }
                            atoms.push(*atom);
                        }
                    }
                    let head = GroundHead::Choice { atoms, lower: *lower, upper: *upper };
                    let r = GroundRule::normalized(head, body.pos.clone(), neg);
                    if let Some(r) = &r {
                        define(r.head_atoms(), g.origin);
                    }
                    push_rule(&mut units, g.origin, r);
                }
                Emitted::ChoiceElement { .. } => {}
                Emitted::External { .. } | Emitted::Minimize { .. } => {}
            }
        }

        let mut ext_seen: HashSet<AtomId> = HashSet::new();
        let mut min_seen: HashSet<MinimizeEntry> = HashSet::new();
        for e in &emitted {
            match e {
                Emitted::External { origin, atom, body } => {
                    let neg = resolve(&self, &body.neg);
                    if neg.iter().any(&is_fact) {
                        continue;
                    }
                    if !(body.pos.iter().all(&is_fact) && neg.is_empty()) && warned.insert(*atom) {
                        self.ctx.warnings.push(Warning::ConditionNotDomain {
                            atom: self.ctx.atoms.get(*atom).to_string(),
                            context: "#external".into(),
                        });
                    }
                    if defined.get(atom).is_some_and(|o| o <= origin) || domain.is_defined(*atom) {
                        continue;
                    }
                    if ext_seen.insert(*atom) {
                        units[*origin].external_decls.push(*atom);
                    }
                }
                Emitted::Minimize { origin, weight, priority, tuple, body } => {
                    let mut condition: Vec<GroundLiteral> = body.pos.iter().map(|a| GroundLiteral::pos(*a)).collect();
                    condition.extend(resolve(&self, &body.neg).into_iter().map(GroundLiteral::neg));
                    condition.sort_unstable();
                    condition.dedup();
                    if condition.iter().any(|l| !l.positive && condition.contains(&GroundLiteral::pos(l.atom))) {
                        continue;
                    }
                    let entry = MinimizeEntry { weight: *weight, priority: *priority, tuple: tuple.clone(), condition };
                    if min_seen.insert(entry.clone()) {
                        units[*origin].minimize_entries.push(entry);
                    }
                }
                _ => {}
            }
        }

        for (unit, shown) in units.iter_mut().zip(shown) {
            unit.shown = shown;
            let mut f: Vec<AtomId> = unit
                .rules
                .iter()
                .filter_map(|r| match r.head {
                    GroundHead::Atom(h) if facts.contains(&h) => Some(h),
                    _ => None,
                })
                .collect();
            f.sort_unstable();
            f.dedup();
            unit.facts = f;
        }
        Ok(units)
    }
}

fn key_of(slots: &[usize], b: &Binding) -> Vec<Term> {
    slots.iter().map(|s| b[*s].clone().expect("body variable bound")).collect()
}

fn push_pos(acc: &mut Collected, id: AtomId, cond: bool) {
    if cond {
        acc.cond_pos.push(id)
    } else {
        acc.pos.push(id)
    }
}

fn pop_pos(acc: &mut Collected, cond: bool) {
    if cond {
        acc.cond_pos.pop();
    } else {
        acc.pos.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn context_with(atoms: &mut AtomTable, facts: &[&str]) -> Domain {
        let mut domain = Domain::new();
        for f in facts {
            let id = atoms.intern(GroundAtom::parse(f).unwrap());
            domain.add_possible(id, atoms);
            domain.add_fact(id);
        }
        domain
    }

    fn ground_text(src: &str, facts: &[&str]) -> (GroundUnit, AtomTable, Vec<Warning>) {
        let defs = parse_program(src).unwrap();
        let mut atoms = AtomTable::new();
        let domain = context_with(&mut atoms, facts);
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        let unit = instantiate(&defs[0], &[], &mut ctx).unwrap();
        let warnings = std::mem::take(&mut ctx.warnings);
        (unit, atoms, warnings)
    }

    fn rules(unit: &GroundUnit, atoms: &AtomTable) -> Vec<String> {
        unit.rules.iter().map(|r| dump::rule_to_string(r, atoms)).collect()
    }

    #[test]
    fn facts_of_base() {
        let (unit, atoms, _) = ground_text("a(1). a(2).", &[]);
        assert_eq!(rules(&unit, &atoms), ["a(1).", "a(2)."]);
        assert_eq!(dump_ground([&unit], &atoms), "% inc 0\na(1).\na(2).\n");
    }

    #[test]
    fn external_with_join_condition() {
        let (unit, atoms, _) = ground_text("#external p(X,Y) : q(X,Z), r(Z,Y).", &["q(1,2)", "r(2,3)"]);
        assert!(unit.rules.is_empty());
        let ext: Vec<String> = unit.external_decls.iter().map(|a| atoms.get(*a).to_string()).collect();
        assert_eq!(ext, ["p(1,3)"]);
        assert_eq!(dump_ground([&unit], &atoms), "% inc 0\n#external p(1,3).\n");
    }

    #[test]
    fn minimize_instance() {
        let (unit, atoms, _) = ground_text("{ move(a,2,1) }. #minimize{W@P,X : move(X,W,P)}.", &[]);
        assert_eq!(unit.minimize_entries.len(), 1);
        let e = &unit.minimize_entries[0];
        assert_eq!((e.weight, e.priority), (2, 1));
        assert_eq!(e.tuple, vec![Term::Integer(2), Term::Integer(1), Term::symbol("a")]);
        assert_eq!(
            e.condition,
            vec![GroundLiteral::pos(atoms.lookup(&GroundAtom::parse("move(a,2,1)").unwrap()).unwrap())]
        );
    }

    #[test]
    fn comparison_filters() {
        let (unit, atoms, _) = ground_text("p(X) :- q(X), X < 3.", &["q(1)", "q(5)"]);
        assert_eq!(rules(&unit, &atoms), ["p(1) :- q(1)."]);
    }

    #[test]
    fn intervals_and_arithmetic() {
        let (unit, atoms, _) = ground_text("n(1..3). s(Y) :- n(X), Y = X * 2 + 1, Y != 5.", &[]);
        let facts: BTreeSet<String> = unit.facts.iter().map(|a| atoms.get(*a).to_string()).collect();
        let expected: BTreeSet<String> =
            ["n(1)", "n(2)", "n(3)", "s(3)", "s(7)"].iter().map(|s| s.to_string()).collect();
        assert_eq!(facts, expected);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let defs = parse_program("p(X/0) :- X = 1.").unwrap();
        let mut atoms = AtomTable::new();
        let domain = Domain::new();
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        assert!(matches!(instantiate(&defs[0], &[], &mut ctx), Err(GroundError::Arithmetic(_))));
    }

    #[test]
    fn overflow_is_an_error() {
        let defs = parse_program("p(X*X) :- X = 9223372036854775807.").unwrap();
        let mut atoms = AtomTable::new();
        let domain = Domain::new();
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        assert!(matches!(instantiate(&defs[0], &[], &mut ctx), Err(GroundError::Arithmetic(_))));
    }

    #[test]
    fn negation_of_impossible_atom_is_dropped() {
        let (unit, atoms, _) = ground_text("a :- not b.", &[]);
        assert_eq!(rules(&unit, &atoms), ["a."]);
    }

    #[test]
    fn negation_of_fact_drops_rule() {
        let (unit, atoms, _) = ground_text("b. { c }. a :- c, not b.", &[]);
        assert_eq!(rules(&unit, &atoms), ["b.", "{ c }."]);
    }

    #[test]
    fn underivable_body_is_skipped() {
        let (unit, atoms, _) = ground_text("a :- q. b :- a.", &[]);
        assert!(rules(&unit, &atoms).is_empty());
    }

    #[test]
    fn choice_elements_with_conditions() {
        let (unit, atoms, w) = ground_text("d(1..2). 1 { m(X) : d(X) } 1.", &[]);
        assert!(w.is_empty());
        assert!(rules(&unit, &atoms).contains(&"1 { m(1); m(2) } 1.".to_string()));
    }

    #[test]
    fn non_domain_condition_in_unbounded_choice() {
        let (unit, atoms, w) = ground_text("{ d(1) }. { m(X) : d(X) }.", &[]);
        assert!(w.is_empty());
        assert!(rules(&unit, &atoms).contains(&"{ m(1) } :- d(1).".to_string()));
    }

    #[test]
    fn non_domain_condition_in_bounded_choice_warns() {
        let (_, _, w) = ground_text("{ d(1) }. 1 { m(X) : d(X) } 1.", &[]);
        assert!(matches!(w.as_slice(), [Warning::ConditionNotDomain { .. }]));
    }

    #[test]
    fn recursion_reaches_fixpoint() {
        let (unit, atoms, _) =
            ground_text("e(1,2). e(2,3). e(3,1). { s(1) }. r(X) :- s(X). r(Y) :- r(X), e(X,Y).", &[]);
        let heads: BTreeSet<String> =
            unit.rules.iter().flat_map(|r| r.head_atoms().to_vec()).map(|a| atoms.get(a).to_string()).collect();
        for a in ["r(1)", "r(2)", "r(3)"] {
            assert!(heads.contains(a), "{a} missing");
        }
    }

    #[test]
    fn joint_requests_see_each_other() {
        let defs = parse_program("#program p(k). a(k) :- b(k). #program q(k). { b(k) }.").unwrap();
        let p = defs.iter().find(|d| d.name == "p").unwrap();
        let q = defs.iter().find(|d| d.name == "q").unwrap();
        let mut atoms = AtomTable::new();
        let domain = Domain::new();
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        ctx.next_tag = 3;
        let units = instantiate_all(&[(p, vec![Term::Integer(1)]), (q, vec![Term::Integer(1)])], &mut ctx).unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!((units[0].increment_tag, units[1].increment_tag), (3, 4));
        assert_eq!(rules(&units[0], &atoms), ["a(1) :- b(1)."]);
        assert_eq!(rules(&units[1], &atoms), ["{ b(1) }."]);
        let dump = dump_ground(&units, &atoms);
        assert_eq!(dump, "% inc 3\na(1) :- b(1).\n% inc 4\n{ b(1) }.\n");
    }

    #[test]
    fn constants_and_shadowing() {
        let defs = parse_program("#program p(n). a(n). b(m).").unwrap();
        let consts = vec![("n".to_string(), Term::Integer(7)), ("m".to_string(), Term::Integer(8))];
        let mut atoms = AtomTable::new();
        let domain = Domain::new();
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        ctx.consts = &consts;
        let unit = instantiate(&defs[1], &[Term::Integer(1)], &mut ctx).unwrap();
        assert!(matches!(ctx.warnings.as_slice(), [Warning::ConstShadowed { .. }]));
        assert_eq!(rules(&unit, &atoms), ["a(1).", "b(8)."]);
    }

    #[test]
    fn unsafe_rule_is_rejected() {
        let defs = parse_program("p(X) :- not q(X).").unwrap();
        let mut atoms = AtomTable::new();
        let domain = Domain::new();
        let mut ctx = GroundContext::new(&mut atoms, &domain);
        assert!(matches!(instantiate(&defs[0], &[], &mut ctx), Err(GroundError::Unsafe(_))));
    }

    #[test]
    fn deterministic_output() {
        let src = "d(1..4). { m(X,Y) : d(Y) } :- d(X). :- m(X,Y), m(Y,X). #minimize{ 1,X,Y : m(X,Y) }.";
        let (u1, a1, _) = ground_text(src, &[]);
        let (u2, a2, _) = ground_text(src, &[]);
        assert_eq!(dump_ground([&u1], &a1), dump_ground([&u2], &a2));
    }
}
