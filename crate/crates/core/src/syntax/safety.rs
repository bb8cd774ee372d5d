use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsafe variable `{name}` in `{statement}`")]
pub struct UnsafeVariable {
    pub name: String,
    pub statement: String,
}

/// One step of a body evaluation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanStep {
    /// Match a positive atom literal against candidate atoms.
    Match(usize),
    /// Evaluate a comparison whose variables are all bound.
    Test(usize),
    /// `var = term` (or `term = var`) where `term` is bound: binds `var`.
    Assign { literal: usize, var: String },
    /// Default-negated atom literal, evaluated once all its variables are bound.
    Negative(usize),
}

#[derive(Debug, Clone, Default)]
pub struct BodyPlan {
    pub steps: Vec<PlanStep>,
    /// Variables bound after all steps ran.
    pub bound: BTreeSet<String>,
    /// Literals that could not be placed because some variable stays unbound.
    pub leftover: Vec<usize>,
}

/// Splits the variables of a term into those in binding positions (plain
/// occurrences, possibly under function symbols) and those under arithmetic
/// or intervals, which can only be evaluated, never matched.
fn term_vars(t: &Term, plain: &mut Vec<String>, arith: &mut Vec<String>, under_arith: bool) {
    match t {
        Term::Variable(v) => {
            if under_arith {
                arith.push(v.clone());
            } else {
                plain.push(v.clone());
            }
        }
        Term::Integer(_) | Term::Symbol(_) => {}
        Term::Function(_, args) => args.iter().for_each(|a| term_vars(a, plain, arith, under_arith)),
        Term::BinOp(_, l, r) | Term::Interval(l, r) => {
            term_vars(l, plain, arith, true);
            term_vars(r, plain, arith, true);
        }
    }
}

fn all_vars(t: &Term) -> Vec<String> {
    let mut v = Vec::new();
    t.collect_variables(&mut v);
    v.into_iter().map(str::to_string).collect()
}

/// Computes an evaluation order for `lits` given already `bound` variables.
///
/// Comparisons run as soon as they are evaluable, assignments as soon as
/// their value side is bound, and among matchable positive literals the one
/// with the most bound variables goes first (earliest on ties). Negative
/// literals come last.
pub fn plan_body(lits: &[Literal], bound: &BTreeSet<String>) -> BodyPlan {
    let mut bound = bound.clone();
    let mut done = vec![false; lits.len()];
    let mut steps = Vec::new();
    let is_bound = |b: &BTreeSet<String>, vs: &[String]| vs.iter().all(|v| b.contains(v));
    loop {
        let mut progressed = false;
        for (i, lit) in lits.iter().enumerate() {
            if done[i] {
                continue;
            }
            if let Literal::Comparison { left, op, right } = lit {
                let (lv, rv) = (all_vars(left), all_vars(right));
                if is_bound(&bound, &lv) && is_bound(&bound, &rv) {
                    steps.push(PlanStep::Test(i));
                    done[i] = true;
                    progressed = true;
                } else if *op == RelOp::Eq {
                    let assign = match (left, right) {
                        (Term::Variable(v), other) if !bound.contains(v) && is_bound(&bound, &all_vars(other)) => {
                            Some(v.clone())
                        }
                        (other, Term::Variable(v)) if !bound.contains(v) && is_bound(&bound, &all_vars(other)) => {
                            Some(v.clone())
                        }
                        _ => None,
                    };
                    if let Some(var) = assign {
                        bound.insert(var.clone());
                        steps.push(PlanStep::Assign { literal: i, var });
                        done[i] = true;
                        progressed = true;
                    }
                }
            }
        }
        if progressed {
            continue;
        }
        let mut best: Option<(usize, usize, Vec<String>)> = None;
        for (i, lit) in lits.iter().enumerate() {
            if done[i] {
                continue;
            }
            if let Literal::Atom { sign: Sign::Positive, atom } = lit {
                let (mut plain, mut arith) = (Vec::new(), Vec::new());
                atom.args.iter().for_each(|t| term_vars(t, &mut plain, &mut arith, false));
                if !is_bound(&bound, &arith) {
                    continue;
                }
                let score = plain.iter().filter(|v| bound.contains(*v)).count() + usize::from(plain.is_empty()) * 1000;
                if best.as_ref().is_none_or(|(_, s, _)| score > *s) {
                    best = Some((i, score, plain));
                }
            }
        }
        match best {
            Some((i, _, plain)) => {
                bound.extend(plain);
                steps.push(PlanStep::Match(i));
                done[i] = true;
            }
            None => break,
        }
    }
    let mut leftover = Vec::new();
    for (i, lit) in lits.iter().enumerate() {
        if done[i] {
            continue;
        }
        let mut vs = Vec::new();
        lit.collect_variables(&mut vs);
        let all_bound = vs.iter().all(|v| bound.contains(*v));
        match lit {
            Literal::Atom { sign: Sign::NegatedByDefault, .. } if all_bound => steps.push(PlanStep::Negative(i)),
            _ => leftover.push(i),
        }
    }
    BodyPlan { steps, bound, leftover }
}

fn literal_vars(lits: &[Literal], out: &mut Vec<String>) {
    for l in lits {
        let mut vs = Vec::new();
        l.collect_variables(&mut vs);
        out.extend(vs.into_iter().map(str::to_string));
    }
}

fn atom_vars(a: &Atom, out: &mut Vec<String>) {
    for t in &a.args {
        out.extend(all_vars(t));
    }
}

fn first_unsafe(candidates: Vec<(String, BTreeSet<String>)>) -> Option<String> {
    candidates.into_iter().find(|(v, scope)| !scope.contains(v)).map(|(v, _)| v)
}

/// Checks that every variable of `rule` is bound by a positive body literal,
/// an assignment, or (for choice elements) a positive condition literal of
/// its own element. Reports the first offending variable in source order.
pub fn check_safety(rule: &Rule) -> Result<(), UnsafeVariable> {
    let global = plan_body(&rule.body, &BTreeSet::new()).bound;
    // (variable, scope it must be bound in), in source order
    let mut occurrences: Vec<(String, BTreeSet<String>)> = Vec::new();
    let mut push_all = |vars: Vec<String>, scope: &BTreeSet<String>| {
        for v in vars {
            occurrences.push((v, scope.clone()));
        }
    };
    match &rule.head {
        Head::None => {}
        Head::Atom(a) => {
            let mut vs = Vec::new();
            atom_vars(a, &mut vs);
            push_all(vs, &global);
        }
        Head::Choice { elements, lower, upper } => {
            if let Some(l) = lower {
                push_all(all_vars(l), &global);
            }
            for e in elements {
                let local = plan_body(&e.condition, &global).bound;
                let mut vs = Vec::new();
                atom_vars(&e.atom, &mut vs);
                literal_vars(&e.condition, &mut vs);
                push_all(vs, &local);
            }
            if let Some(u) = upper {
                push_all(all_vars(u), &global);
            }
        }
    }
    let mut vs = Vec::new();
    literal_vars(&rule.body, &mut vs);
    push_all(vs, &global);
    match first_unsafe(occurrences) {
        None => Ok(()),
        Some(name) => Err(UnsafeVariable { name, statement: rule.to_string() }),
    }
}

/// Safety for any statement: rules as in [`check_safety`]; `#external`
/// atoms must be bound by their condition; `#minimize` weights, priorities
/// and tuples must be bound by the element's condition.
pub fn check_statement_safety(stmt: &Statement) -> Result<(), UnsafeVariable> {
    let err = |name: String| UnsafeVariable { name, statement: stmt.to_string() };
    match stmt {
        Statement::Rule(r) => check_safety(r),
        Statement::Directive(Directive::External { atom, condition }) => {
            let scope = plan_body(condition, &BTreeSet::new()).bound;
            let mut vs = Vec::new();
            atom_vars(atom, &mut vs);
            literal_vars(condition, &mut vs);
            vs.into_iter().find(|v| !scope.contains(v)).map_or(Ok(()), |v| Err(err(v)))
        }
        Statement::Directive(Directive::Minimize { elements }) => {
            for e in elements {
                let scope = plan_body(&e.condition, &BTreeSet::new()).bound;
                let mut vs = all_vars(&e.weight);
                vs.extend(all_vars(&e.priority));
                e.terms.iter().for_each(|t| vs.extend(all_vars(t)));
                literal_vars(&e.condition, &mut vs);
                if let Some(v) = vs.into_iter().find(|v| !scope.contains(v)) {
                    return Err(err(v));
                }
            }
            Ok(())
        }
        Statement::Directive(_) => Ok(()),
    }
}
