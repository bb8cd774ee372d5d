//! Compiled term patterns and their evaluation under a variable binding.

use indexmap::IndexMap;

use super::GroundError;
use crate::syntax::{BinOp, Term};

/// A term with variables replaced by binding slots.
#[derive(Debug, Clone)]
pub(crate) enum Pat {
    Val(Term),
    Var(usize),
    Func(String, Vec<Pat>),
    Arith(BinOp, Box<Pat>, Box<Pat>),
    Range(Box<Pat>, Box<Pat>),
}

pub(crate) type Binding = Vec<Option<Term>>;

#[derive(Debug, Default)]
pub(crate) struct Slots {
    names: IndexMap<String, usize>,
}

impl Slots {
    pub fn slot(&mut self, name: &str) -> usize {
        let n = self.names.len();
        *self.names.entry(name.to_string()).or_insert(n)
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }
}

pub(crate) fn compile(t: &Term, slots: &mut Slots) -> Pat {
    if t.is_value() {
        return Pat::Val(t.clone());
    }
    match t {
        Term::Integer(_) | Term::Symbol(_) => Pat::Val(t.clone()),
        Term::Variable(v) => Pat::Var(slots.slot(v)),
        Term::Function(n, args) => Pat::Func(n.clone(), args.iter().map(|a| compile(a, slots)).collect()),
        Term::BinOp(op, l, r) => Pat::Arith(*op, Box::new(compile(l, slots)), Box::new(compile(r, slots))),
        Term::Interval(l, r) => Pat::Range(Box::new(compile(l, slots)), Box::new(compile(r, slots))),
    }
}

impl Pat {
    pub fn slots(&self, out: &mut Vec<usize>) {
        match self {
            Pat::Val(_) => {}
            Pat::Var(i) => out.push(*i),
            Pat::Func(_, args) => args.iter().for_each(|a| a.slots(out)),
            Pat::Arith(_, l, r) | Pat::Range(l, r) => {
                l.slots(out);
                r.slots(out);
            }
        }
    }

    /// Evaluates to every value the pattern denotes; intervals fan out.
    pub fn eval(&self, b: &Binding) -> Result<Vec<Term>, GroundError> {
        Ok(match self {
            Pat::Val(v) => vec![v.clone()],
            Pat::Var(i) => vec![b[*i].clone().expect("variable bound before evaluation")],
            Pat::Func(name, args) => {
                let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
                for a in args {
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
                acc.into_iter().map(|args| Term::Function(name.clone(), args)).collect()
            }
            Pat::Arith(op, l, r) => {
                let (ls, rs) = (l.eval(b)?, r.eval(b)?);
                let mut out = Vec::with_capacity(ls.len() * rs.len());
                for lv in &ls {
                    for rv in &rs {
                        out.push(Term::Integer(arith(*op, lv, rv)?));
                    }
                }
                out
            }
            Pat::Range(l, r) => {
                let (ls, rs) = (l.eval(b)?, r.eval(b)?);
                let mut out = Vec::new();
                for lv in &ls {
                    for rv in &rs {
                        let (lo, hi) = (as_int(lv)?, as_int(rv)?);
                        out.extend((lo..=hi).map(Term::Integer));
                    }
                }
                out
            }
        })
    }

    pub fn eval_single(&self, b: &Binding) -> Result<Term, GroundError> {
        let mut vals = self.eval(b)?;
        if vals.len() != 1 {
            return Err(GroundError::Arithmetic(format!("expected a single value, got {} values", vals.len())));
        }
        Ok(vals.pop().expect("one value"))
    }
}

fn as_int(t: &Term) -> Result<i64, GroundError> {
    match t {
        Term::Integer(i) => Ok(*i),
        other => Err(GroundError::Arithmetic(format!("non-integer operand `{other}`"))),
    }
}

fn arith(op: BinOp, l: &Term, r: &Term) -> Result<i64, GroundError> {
    let (a, b) = (as_int(l)?, as_int(r)?);
    let res = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div => {
            if b == 0 {
                return Err(GroundError::Arithmetic(format!("division by zero in `{a}/{b}`")));
            }
            a.checked_div(b)
        }
    };
    res.ok_or_else(|| GroundError::Arithmetic(format!("integer overflow in `{a}{}{b}`", op.symbol())))
}

/// Matches `pat` against the value `val`, binding free slots and recording
/// them on `trail` so the caller can undo.
pub(crate) fn unify(pat: &Pat, val: &Term, b: &mut Binding, trail: &mut Vec<usize>) -> Result<bool, GroundError> {
    match pat {
        Pat::Val(v) => Ok(v == val),
        Pat::Var(i) => match &b[*i] {
            Some(bound) => Ok(bound == val),
            None => {
                b[*i] = Some(val.clone());
                trail.push(*i);
                Ok(true)
            }
        },
        Pat::Func(name, args) => match val {
            Term::Function(vn, vargs) if vn == name && vargs.len() == args.len() => {
                for (p, v) in args.iter().zip(vargs) {
                    if !unify(p, v, b, trail)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
        Pat::Arith(..) | Pat::Range(..) => Ok(pat.eval(b)?.contains(val)),
    }
}
