use std::fmt;

/// Arithmetic operator inside a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// A (possibly non-ground) term.
///
/// Ground values produced by the grounder use only `Integer`, `Symbol` and
/// `Function`. Quoted strings are kept as `Symbol`s whose name includes the
/// surrounding quotes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Integer(i64),
    Symbol(String),
    Variable(String),
    Function(String, Vec<Term>),
    BinOp(BinOp, Box<Term>, Box<Term>),
    Interval(Box<Term>, Box<Term>),
}

impl Term {
    pub fn symbol(name: impl Into<String>) -> Self {
        Term::Symbol(name.into())
    }

    pub fn function(name: impl Into<String>, args: Vec<Term>) -> Self {
        if args.is_empty() {
            Term::Symbol(name.into())
        } else {
            Term::Function(name.into(), args)
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Integer(_) | Term::Symbol(_) => true,
            Term::Variable(_) => false,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
            Term::BinOp(_, l, r) | Term::Interval(l, r) => l.is_ground() && r.is_ground(),
        }
    }

    /// True for fully evaluated values (no variables, operators or intervals).
    pub fn is_value(&self) -> bool {
        match self {
            Term::Integer(_) | Term::Symbol(_) => true,
            Term::Function(_, args) => args.iter().all(Term::is_value),
            _ => false,
        }
    }

    /// Appends variables in left-to-right order of occurrence (with repeats).
    pub fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Variable(v) => out.push(v),
            Term::Integer(_) | Term::Symbol(_) => {}
            Term::Function(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
            Term::BinOp(_, l, r) | Term::Interval(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    /// Replaces constant symbols according to `map`.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Symbol(s) => map(s).unwrap_or_else(|| self.clone()),
            Term::Integer(_) | Term::Variable(_) => self.clone(),
            Term::Function(n, args) => Term::Function(n.clone(), args.iter().map(|a| a.substitute(map)).collect()),
            Term::BinOp(op, l, r) => Term::BinOp(*op, Box::new(l.substitute(map)), Box::new(r.substitute(map))),
            Term::Interval(l, r) => Term::Interval(Box::new(l.substitute(map)), Box::new(r.substitute(map))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Integer(i) => write!(f, "{i}"),
            Term::Symbol(s) | Term::Variable(s) => f.write_str(s),
            Term::Function(name, args) => {
                write!(f, "{name}(")?;
                write_sep(f, args, ",")?;
                f.write_str(")")
            }
            Term::BinOp(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
            Term::Interval(l, r) => write!(f, "({l}..{r})"),
        }
    }
}

pub(crate) fn write_sep<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// A predicate name with its arity, as used by `#show name/arity.`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl Signature {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Signature { name: name.into(), arity }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { name: name.into(), args }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.name.clone(), self.args.len())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_sep(f, &self.args, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    NegatedByDefault,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ge => RelOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, l: &T, r: &T) -> bool {
        match self {
            RelOp::Eq => l == r,
            RelOp::Ne => l != r,
            RelOp::Lt => l < r,
            RelOp::Le => l <= r,
            RelOp::Gt => l > r,
            RelOp::Ge => l >= r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Atom { sign: Sign, atom: Atom },
    Comparison { left: Term, op: RelOp, right: Term },
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal::Atom { sign: Sign::Positive, atom }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal::Atom { sign: Sign::NegatedByDefault, atom }
    }

    pub fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Literal::Atom { atom, .. } => atom.args.iter().for_each(|t| t.collect_variables(out)),
            Literal::Comparison { left, right, .. } => {
                left.collect_variables(out);
                right.collect_variables(out);
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom { sign: Sign::Positive, atom } => write!(f, "{atom}"),
            Literal::Atom { sign: Sign::NegatedByDefault, atom } => write!(f, "not {atom}"),
            Literal::Comparison { left, op, right } => write!(f, "{left}{}{right}", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

impl fmt::Display for ChoiceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_sep(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    /// Integrity constraint.
    None,
    Atom(Atom),
    Choice {
        elements: Vec<ChoiceElement>,
        lower: Option<Term>,
        upper: Option<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::None => {}
            Head::Atom(a) => write!(f, "{a}")?,
            Head::Choice { elements, lower, upper } => {
                if let Some(l) = lower {
                    write!(f, "{l} ")?;
                }
                f.write_str("{ ")?;
                write_sep(f, elements, "; ")?;
                f.write_str(" }")?;
                if let Some(u) = upper {
                    write!(f, " {u}")?;
                }
            }
        }
        if !self.body.is_empty() || matches!(self.head, Head::None) {
            if matches!(self.head, Head::None) {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            write_sep(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinimizeElement {
    pub weight: Term,
    pub priority: Term,
    pub terms: Vec<Term>,
    pub condition: Vec<Literal>,
}

impl fmt::Display for MinimizeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.weight, self.priority)?;
        for t in &self.terms {
            write!(f, ",{t}")?;
        }
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_sep(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Directive {
    External {
        atom: Atom,
        condition: Vec<Literal>,
    },
    Minimize {
        elements: Vec<MinimizeElement>,
    },
    Show(Signature),
    Const {
        name: String,
        value: Term,
    },
    /// Raw text of a `#script` block; kept for round-tripping, never executed.
    Script {
        text: String,
    },
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::External { atom, condition } => {
                write!(f, "#external {atom}")?;
                if !condition.is_empty() {
                    f.write_str(" : ")?;
                    write_sep(f, condition, ", ")?;
                }
                f.write_str(".")
            }
            Directive::Minimize { elements } => {
                f.write_str("#minimize{ ")?;
                write_sep(f, elements, "; ")?;
                f.write_str(" }.")
            }
            Directive::Show(sig) => write!(f, "#show {sig}."),
            Directive::Const { name, value } => write!(f, "#const {name}={value}."),
            Directive::Script { text } => write!(f, "#script{text}#end."),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Rule(Rule),
    Directive(Directive),
}

impl Statement {
    pub(crate) fn map_terms(&self, map: &dyn Fn(&str) -> Option<Term>) -> Statement {
        let atom = |a: &Atom| Atom { name: a.name.clone(), args: a.args.iter().map(|t| t.substitute(map)).collect() };
        let lits = |ls: &[Literal]| -> Vec<Literal> {
            ls.iter()
                .map(|l| match l {
                    Literal::Atom { sign, atom: a } => Literal::Atom { sign: *sign, atom: atom(a) },
                    Literal::Comparison { left, op, right } => {
                        Literal::Comparison { left: left.substitute(map), op: *op, right: right.substitute(map) }
                    }
                })
                .collect()
        };
        match self {
            Statement::Rule(r) => {
                let head = match &r.head {
                    Head::None => Head::None,
                    Head::Atom(a) => Head::Atom(atom(a)),
                    Head::Choice { elements, lower, upper } => Head::Choice {
                        elements: elements
                            .iter()
                            .map(|e| ChoiceElement { atom: atom(&e.atom), condition: lits(&e.condition) })
                            .collect(),
                        lower: lower.as_ref().map(|t| t.substitute(map)),
                        upper: upper.as_ref().map(|t| t.substitute(map)),
                    },
                };
                Statement::Rule(Rule { head, body: lits(&r.body) })
            }
            Statement::Directive(d) => Statement::Directive(match d {
                Directive::External { atom: a, condition } => {
                    Directive::External { atom: atom(a), condition: lits(condition) }
                }
                Directive::Minimize { elements } => Directive::Minimize {
                    elements: elements
                        .iter()
                        .map(|e| MinimizeElement {
                            weight: e.weight.substitute(map),
                            priority: e.priority.substitute(map),
                            terms: e.terms.iter().map(|t| t.substitute(map)).collect(),
                            condition: lits(&e.condition),
                        })
                        .collect(),
                },
                Directive::Const { name, value } => {
                    Directive::Const { name: name.clone(), value: value.substitute(map) }
                }
                Directive::Show(_) | Directive::Script { .. } => d.clone(),
            }),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rule(r) => r.fmt(f),
            Statement::Directive(d) => d.fmt(f),
        }
    }
}

/// A named, parameterized group of statements introduced by `#program`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubprogramDef {
    pub name: String,
    pub params: Vec<String>,
    pub statements: Vec<Statement>,
}

impl SubprogramDef {
    pub fn new(name: impl Into<String>, params: Vec<String>) -> Self {
        SubprogramDef { name: name.into(), params, statements: Vec::new() }
    }

    pub fn key(&self) -> (String, usize) {
        (self.name.clone(), self.params.len())
    }
}

impl fmt::Display for SubprogramDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#program {}", self.name)?;
        if !self.params.is_empty() {
            f.write_str("(")?;
            write_sep(f, &self.params, ",")?;
            f.write_str(")")?;
        }
        f.write_str(".\n")?;
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Renders a list of subprograms as program text that parses back to the same list.
pub fn pretty_print(defs: &[SubprogramDef]) -> String {
    defs.iter().map(|d| d.to_string()).collect()
}
