use indexmap::IndexMap;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SyntaxError};

/// Parses program text into subprograms keyed by name and parameter count.
///
/// `base/0` is always present and always first; the remaining subprograms
/// follow in order of first appearance. Blocks sharing a name and parameter
/// count are concatenated in source order, with later parameter names renamed
/// to the ones of the first block.
pub fn parse_program(text: &str) -> Result<Vec<SubprogramDef>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let mut defs: IndexMap<(String, usize), SubprogramDef> = IndexMap::new();
    defs.insert(("base".into(), 0), SubprogramDef::new("base", vec![]));
    let mut current = ("base".to_string(), 0usize);
    let mut renaming: Vec<(String, Term)> = Vec::new();
    while !p.at(&Tok::Eof) {
        if p.at_directive("program") {
            let (name, params) = p.program_header()?;
            let key = (name.clone(), params.len());
            renaming.clear();
            match defs.get(&key) {
                Some(existing) => {
                    for (new, old) in params.iter().zip(&existing.params) {
                        if new != old {
                            renaming.push((new.clone(), Term::Symbol(old.clone())));
                        }
                    }
                }
                None => {
                    defs.insert(key.clone(), SubprogramDef::new(name, params));
                }
            }
            current = key;
            continue;
        }
        let stmt = p.statement()?;
        let stmt = if renaming.is_empty() {
            stmt
        } else {
            let map = |s: &str| renaming.iter().find(|(n, _)| n == s).map(|(_, t)| t.clone());
            stmt.map_terms(&map)
        };
        defs.get_mut(&current).expect("current subprogram exists").statements.push(stmt);
    }
    Ok(defs.into_values().collect())
}

/// Parses statements without `#program` splitting; used for runtime additions.
pub fn parse_statements(text: &str) -> Result<Vec<Statement>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let mut out = Vec::new();
    while !p.at(&Tok::Eof) {
        if p.at_directive("program") {
            return Err(p.error("`#program` is not allowed here").into());
        }
        out.push(p.statement()?);
    }
    Ok(out)
}

/// Parses a single ground term, e.g. a `--const` value or a subprogram argument.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let t = p.term()?;
    p.expect(&Tok::Eof, "end of input")?;
    if !t.is_ground() {
        return Err(ParseError::NonGroundTerm(t.to_string()));
    }
    Ok(t)
}

/// Parses a ground atom such as `query(3)`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let start = p.peek().clone();
    let t = p.term()?;
    p.expect(&Tok::Eof, "end of input")?;
    let atom = term_to_atom(t, &start)?;
    if !atom.args.iter().all(Term::is_ground) {
        return Err(ParseError::NonGroundTerm(atom.to_string()));
    }
    Ok(atom)
}

fn term_to_atom(t: Term, at: &Token) -> Result<Atom, SyntaxError> {
    match t {
        Term::Symbol(s) if !s.starts_with('"') => Ok(Atom::new(s, vec![])),
        Term::Function(n, args) => Ok(Atom::new(n, args)),
        other => Err(SyntaxError::new(at.line, at.column, format!("expected an atom, found `{other}`"))),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn at(&self, t: &Tok) -> bool {
        &self.peek().tok == t
    }

    fn at_directive(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Directive(d) if d == name)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let t = self.peek();
        SyntaxError::new(t.line, t.column, msg)
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let found = match &self.peek().tok {
            Tok::Eof => "end of input".to_string(),
            t => describe(t).to_string(),
        };
        self.error(format!("expected {expected}, found {found}"))
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<Token, SyntaxError> {
        if self.at(t) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn program_header(&mut self) -> Result<(String, Vec<String>), ParseError> {
        self.bump();
        let name = self.ident("subprogram name")?;
        let mut params: Vec<String> = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let tok = self.peek().clone();
                let p = self.ident("parameter name")?;
                if params.contains(&p) {
                    return Err(ParseError::DuplicateParam { name: p, line: tok.line, column: tok.column });
                }
                params.push(p);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)`")?;
        }
        self.expect(&Tok::Dot, "`.`")?;
        Ok((name, params))
    }

    fn statement(&mut self) -> Result<Statement, SyntaxError> {
        let start = self.peek().clone();
        match &start.tok {
            Tok::Directive(d) => {
                let d = d.clone();
                self.bump();
                self.directive(&d, &start)
            }
            Tok::Script(text) => {
                let text = text.clone();
                self.bump();
                self.expect(&Tok::Dot, "`.` after `#end`")?;
                Ok(Statement::Directive(Directive::Script { text }))
            }
            Tok::If => {
                self.bump();
                let body = if self.at(&Tok::Dot) { Vec::new() } else { self.body()? };
                self.expect(&Tok::Dot, "`.`")?;
                Ok(Statement::Rule(Rule { head: Head::None, body }))
            }
            Tok::WeakIf => {
                self.bump();
                self.weak_constraint()
            }
            _ => {
                let head = self.head()?;
                let body = if self.eat(&Tok::If) {
                    if self.at(&Tok::Dot) {
                        Vec::new()
                    } else {
                        self.body()?
                    }
                } else {
                    Vec::new()
                };
                self.expect(&Tok::Dot, "`.`")?;
                Ok(Statement::Rule(Rule { head, body }))
            }
        }
    }

    fn directive(&mut self, name: &str, start: &Token) -> Result<Statement, SyntaxError> {
        let d = match name {
            "external" => {
                let atom = self.atom()?;
                let condition = if self.eat(&Tok::Colon) { self.body()? } else { Vec::new() };
                Directive::External { atom, condition }
            }
            "minimize" | "minimise" => {
                self.expect(&Tok::LBrace, "`{`")?;
                let mut elements = Vec::new();
                if !self.at(&Tok::RBrace) {
                    loop {
                        elements.push(self.minimize_element()?);
                        if !self.eat(&Tok::Semicolon) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RBrace, "`}`")?;
                Directive::Minimize { elements }
            }
            "show" => {
                let name = self.ident("predicate name")?;
                self.expect(&Tok::Slash, "`/`")?;
                let arity = match self.bump().tok {
                    Tok::Int(n) => n as usize,
                    _ => return Err(SyntaxError::new(start.line, start.column, "expected arity in #show")),
                };
                Directive::Show(Signature::new(name, arity))
            }
            "const" => {
                let name = self.ident("constant name")?;
                self.expect(&Tok::Eq, "`=`")?;
                let value = self.term()?;
                if !value.is_ground() {
                    return Err(SyntaxError::new(start.line, start.column, "#const value must be ground"));
                }
                Directive::Const { name, value }
            }
            "maximize" | "maximise" | "count" | "sum" | "min" | "max" | "heuristic" | "edge" | "project"
            | "include" | "theory" => {
                return Err(SyntaxError::new(
                    start.line,
                    start.column,
                    format!("`#{name}` is not supported by this language subset"),
                ))
            }
            other => return Err(SyntaxError::new(start.line, start.column, format!("unknown directive `#{other}`"))),
        };
        self.expect(&Tok::Dot, "`.`")?;
        Ok(Statement::Directive(d))
    }

    fn weak_constraint(&mut self) -> Result<Statement, SyntaxError> {
        let condition = if self.at(&Tok::Dot) { Vec::new() } else { self.body()? };
        self.expect(&Tok::Dot, "`.`")?;
        self.expect(&Tok::LBracket, "`[`")?;
        let weight = self.term()?;
        let priority = if self.eat(&Tok::At) { self.term()? } else { Term::Integer(0) };
        let mut terms = Vec::new();
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        self.expect(&Tok::RBracket, "`]`")?;
        Ok(Statement::Directive(Directive::Minimize {
            elements: vec![MinimizeElement { weight, priority, terms, condition }],
        }))
    }

    fn minimize_element(&mut self) -> Result<MinimizeElement, SyntaxError> {
        let weight = self.term()?;
        let priority = if self.eat(&Tok::At) { self.term()? } else { Term::Integer(0) };
        let mut terms = Vec::new();
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        let condition = if self.eat(&Tok::Colon) { self.condition()? } else { Vec::new() };
        Ok(MinimizeElement { weight, priority, terms, condition })
    }

    fn starts_choice(&self) -> bool {
        if self.at(&Tok::LBrace) {
            return true;
        }
        matches!(self.peek().tok, Tok::Int(_) | Tok::Variable(_) | Tok::Ident(_))
            && matches!(self.peek_at(1), Tok::LBrace)
    }

    fn head(&mut self) -> Result<Head, SyntaxError> {
        if self.starts_choice() {
            return self.choice_head();
        }
        self.reject_classical_negation()?;
        let start = self.peek().clone();
        let t = self.term()?;
        if matches!(self.peek().tok, Tok::Semicolon | Tok::Bar) {
            return Err(self.error("disjunctive heads are not supported"));
        }
        if self.at(&Tok::LBrace) {
            return Err(self.error("unsupported aggregate head"));
        }
        if relop(&self.peek().tok).is_some() {
            return Err(SyntaxError::new(start.line, start.column, "comparison is not allowed in a rule head"));
        }
        Ok(Head::Atom(term_to_atom(t, &start)?))
    }

    fn choice_head(&mut self) -> Result<Head, SyntaxError> {
        let lower = if self.at(&Tok::LBrace) { None } else { Some(self.primary()?) };
        self.expect(&Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        if !self.at(&Tok::RBrace) {
            loop {
                let atom = self.atom()?;
                let condition = if self.eat(&Tok::Colon) { self.condition()? } else { Vec::new() };
                elements.push(ChoiceElement { atom, condition });
                if !self.eat(&Tok::Semicolon) {
                    break;
                }
            }
        }
        self.expect(&Tok::RBrace, "`}` closing the choice")?;
        let mut lower = lower;
        let upper = if self.eat(&Tok::Eq) {
            if lower.is_some() {
                return Err(self.error("choice bound given twice"));
            }
            let b = self.primary()?;
            lower = Some(b.clone());
            Some(b)
        } else if matches!(self.peek().tok, Tok::Int(_) | Tok::Variable(_) | Tok::Ident(_) | Tok::LParen) {
            Some(self.primary()?)
        } else {
            None
        };
        Ok(Head::Choice { elements, lower, upper })
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        self.reject_classical_negation()?;
        let start = self.peek().clone();
        let t = self.term()?;
        term_to_atom(t, &start)
    }

    fn reject_classical_negation(&self) -> Result<(), SyntaxError> {
        if self.at(&Tok::Minus) && matches!(self.peek_at(1), Tok::Ident(_)) {
            return Err(self.error("classical negation is not supported"));
        }
        Ok(())
    }

    fn body(&mut self) -> Result<Vec<Literal>, SyntaxError> {
        let mut lits = vec![self.literal()?];
        loop {
            if self.eat(&Tok::Comma) {
                lits.push(self.literal()?);
            } else if self.at(&Tok::Semicolon) {
                return Err(self.error("`;` in rule bodies is not supported, use `,`"));
            } else {
                return Ok(lits);
            }
        }
    }

    /// Condition of a choice or minimize element: `,`-separated, ends at `;` or `}`.
    fn condition(&mut self) -> Result<Vec<Literal>, SyntaxError> {
        let mut lits = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let negated = if matches!(&self.peek().tok, Tok::Ident(s) if s == "not") {
            self.bump();
            if matches!(&self.peek().tok, Tok::Ident(s) if s == "not") {
                return Err(self.error("double default negation is not supported"));
            }
            true
        } else {
            false
        };
        if self.at(&Tok::LBrace)
            || matches!(&self.peek().tok, Tok::Directive(_))
            || (matches!(self.peek().tok, Tok::Int(_) | Tok::Variable(_) | Tok::Ident(_))
                && matches!(self.peek_at(1), Tok::LBrace))
        {
            return Err(self.error("body aggregates are not supported"));
        }
        let start = self.peek().clone();
        let classical = self.at(&Tok::Minus) && matches!(self.peek_at(1), Tok::Ident(_));
        let left = self.term()?;
        if let Some(op) = relop(&self.peek().tok) {
            self.bump();
            let right = self.term()?;
            let op = if negated { op.negate() } else { op };
            return Ok(Literal::Comparison { left, op, right });
        }
        if self.at(&Tok::LBrace) {
            return Err(self.error("body aggregates are not supported"));
        }
        if classical {
            return Err(SyntaxError::new(start.line, start.column, "classical negation is not supported"));
        }
        let atom = term_to_atom(left, &start)?;
        Ok(if negated { Literal::negative(atom) } else { Literal::positive(atom) })
    }

    pub(crate) fn term(&mut self) -> Result<Term, SyntaxError> {
        let lo = self.sum()?;
        if self.eat(&Tok::DotDot) {
            let hi = self.sum()?;
            return Ok(Term::Interval(Box::new(lo), Box::new(hi)));
        }
        Ok(lo)
    }

    fn sum(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.product()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(t),
            };
            self.bump();
            let r = self.product()?;
            t = Term::BinOp(op, Box::new(t), Box::new(r));
        }
    }

    fn product(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Backslash => return Err(self.error("the modulo operator is not supported")),
                _ => return Ok(t),
            };
            self.bump();
            let r = self.unary()?;
            t = Term::BinOp(op, Box::new(t), Box::new(r));
        }
    }

    fn unary(&mut self) -> Result<Term, SyntaxError> {
        if self.at(&Tok::Minus) {
            self.bump();
            if let Tok::Int(n) = self.peek().tok {
                self.bump();
                return Ok(Term::Integer(-n));
            }
            let t = self.unary()?;
            return Ok(Term::BinOp(BinOp::Sub, Box::new(Term::Integer(0)), Box::new(t)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Integer(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Term::Symbol(s))
            }
            Tok::Variable(v) => {
                self.bump();
                Ok(Term::Variable(v))
            }
            Tok::Anonymous => {
                self.bump();
                let name = format!("_{}", self.anon);
                self.anon += 1;
                Ok(Term::Variable(name))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "not" {
                    return Err(SyntaxError::new(tok.line, tok.column, "unexpected `not`"));
                }
                if self.eat(&Tok::LParen) {
                    if self.at(&Tok::RParen) {
                        return Err(self.error("function terms need at least one argument"));
                    }
                    let mut args = vec![self.term()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.term()?);
                    }
                    if self.at(&Tok::Semicolon) {
                        return Err(self.error("pooling with `;` is not supported"));
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Term::Function(name, args))
                } else {
                    Ok(Term::Symbol(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if self.at(&Tok::Comma) {
                    return Err(self.error("tuple terms are not supported"));
                }
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

fn relop(t: &Tok) -> Option<RelOp> {
    Some(match t {
        Tok::Eq => RelOp::Eq,
        Tok::Ne => RelOp::Ne,
        Tok::Lt => RelOp::Lt,
        Tok::Le => RelOp::Le,
        Tok::Gt => RelOp::Gt,
        Tok::Ge => RelOp::Ge,
        _ => return None,
    })
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Variable(s) => format!("`{s}`"),
        Tok::Anonymous => "`_`".into(),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Str(s) => s.clone(),
        Tok::Directive(d) => format!("`#{d}`"),
        Tok::Script(_) => "`#script`".into(),
        Tok::Eof => "end of input".into(),
        other => {
            let s = match other {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBrace => "{",
                Tok::RBrace => "}",
                Tok::LBracket => "[",
                Tok::RBracket => "]",
                Tok::Comma => ",",
                Tok::Semicolon => ";",
                Tok::Colon => ":",
                Tok::Dot => ".",
                Tok::DotDot => "..",
                Tok::If => ":-",
                Tok::WeakIf => ":~",
                Tok::At => "@",
                Tok::Plus => "+",
                Tok::Minus => "-",
                Tok::Star => "*",
                Tok::Slash => "/",
                Tok::Eq => "=",
                Tok::Ne => "!=",
                Tok::Lt => "<",
                Tok::Le => "<=",
                Tok::Gt => ">",
                Tok::Ge => ">=",
                Tok::Bar => "|",
                Tok::Backslash => "\\",
                _ => "?",
            };
            format!("`{s}`")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule_strings(def: &SubprogramDef) -> Vec<String> {
        def.statements.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn splits_subprograms() {
        let defs = parse_program("a(1). #program acid(k). b(k). #program base. a(2).").unwrap();
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].key(), ("base".to_string(), 0));
        assert_eq!(rule_strings(&defs[0]), ["a(1).", "a(2)."]);
        assert_eq!(defs[1].key(), ("acid".to_string(), 1));
        assert_eq!(defs[1].params, ["k"]);
        assert_eq!(rule_strings(&defs[1]), ["b(k)."]);
    }

    #[test]
    fn empty_input_has_empty_base() {
        let defs = parse_program("").unwrap();
        assert_eq!(defs, vec![SubprogramDef::new("base", vec![])]);
    }

    #[test]
    fn external_with_condition() {
        let defs = parse_program("#external p(X,Y) : q(X,Z), r(Z,Y).").unwrap();
        match &defs[0].statements[..] {
            [Statement::Directive(Directive::External { atom, condition })] => {
                assert_eq!(atom.to_string(), "p(X,Y)");
                let c: Vec<String> = condition.iter().map(|l| l.to_string()).collect();
                assert_eq!(c, ["q(X,Z)", "r(Z,Y)"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn same_name_blocks_are_concatenated_and_renamed() {
        let defs = parse_program("#program p(t). a(t). #program p(s). b(s). % trailing\n").unwrap();
        assert_eq!(defs.len(), 2);
        assert_eq!(rule_strings(&defs[1]), ["a(t).", "b(t)."]);
    }

    #[test]
    fn duplicate_params() {
        assert!(matches!(parse_program("#program p(k,k)."), Err(ParseError::DuplicateParam { .. })));
    }

    #[test]
    fn terms() {
        assert_eq!(parse_term("42").unwrap(), Term::Integer(42));
        assert_eq!(
            parse_term("f(a,3)").unwrap(),
            Term::Function("f".into(), vec![Term::Symbol("a".into()), Term::Integer(3)])
        );
        assert!(matches!(parse_term("X"), Err(ParseError::NonGroundTerm(_))));
        assert_eq!(parse_term("-3").unwrap(), Term::Integer(-3));
    }

    #[test]
    fn negated_comparison_is_flipped() {
        let defs = parse_program("p(X) :- q(X), not X < 3.").unwrap();
        assert_eq!(defs[0].statements[0].to_string(), "p(X) :- q(X), X>=3.");
    }

    #[test]
    fn weak_constraint_becomes_minimize() {
        let defs = parse_program(":~ p(X). [X@2,X]").unwrap();
        assert!(matches!(&defs[0].statements[0], Statement::Directive(Directive::Minimize { .. })));
    }

    #[test]
    fn unsupported_constructs_are_rejected() {
        for src in ["a | b.", "-a.", "a :- #count{ X : p(X) } > 2.", "a :- b", "p(."] {
            let err = parse_program(src).unwrap_err();
            assert!(matches!(err, ParseError::Syntax(_)), "{src}: {err}");
        }
    }

    #[test]
    fn error_position() {
        match parse_program("a.\nb :- c(.") {
            Err(ParseError::Syntax(e)) => assert_eq!(e.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pretty_print_round_trip() {
        let src = "#const n = 3. d(1..n). {m(X,T) : d(X)} 1 :- t(T), T > 0. :- m(X,T), not d(X).\n\
                   #minimize{ X@1,a,T : m(X,T); 2,b }. #show m/2. #external q(T) : t(T).\n\
                   #program step(t). h(t-1+2*t/1) :- q(t), \"str\" != t.";
        let defs = parse_program(src).unwrap();
        let printed = pretty_print(&defs);
        assert_eq!(parse_program(&printed).unwrap(), defs, "{printed}");
    }
}
