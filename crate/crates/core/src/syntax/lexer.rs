use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Variable(String),
    Anonymous,
    Int(i64),
    Str(String),
    Directive(String),
    /// Raw body of a `#script ... #end` block.
    Script(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Colon,
    Dot,
    DotDot,
    If,
    WeakIf,
    At,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Bar,
    Backslash,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor { chars: src.char_indices().peekable(), src, line: 1, column: 1 };
    let mut out = Vec::new();
    loop {
        // whitespace and comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('%') => {
                    let (line, column) = (cur.line, cur.column);
                    cur.bump();
                    if cur.peek() == Some('*') {
                        cur.bump();
                        let mut closed = false;
                        while let Some(c) = cur.bump() {
                            if c == '*' && cur.peek() == Some('%') {
                                cur.bump();
                                closed = true;
                                break;
                            }
                        }
                        if !closed {
                            return Err(SyntaxError::new(line, column, "unterminated block comment"));
                        }
                    } else {
                        while let Some(c) = cur.peek() {
                            if c == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                    }
                }
                _ => break,
            }
        }
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, line, column });
            return Ok(out);
        };
        let err = |msg: String| SyntaxError::new(line, column, msg);
        let tok = if c.is_ascii_digit() {
            let start = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            let text = &src[start..cur.offset()];
            Tok::Int(text.parse().map_err(|_| err(format!("integer literal `{text}` out of range")))?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = cur.offset();
            while cur.peek().is_some_and(is_ident_char) {
                cur.bump();
            }
            let text = &src[start..cur.offset()];
            if text == "_" {
                Tok::Anonymous
            } else if text.starts_with('_') || text.starts_with(|c: char| c.is_ascii_uppercase()) {
                Tok::Variable(text.to_string())
            } else {
                Tok::Ident(text.to_string())
            }
        } else if c == '"' {
            let start = cur.offset();
            cur.bump();
            loop {
                match cur.bump() {
                    None | Some('\n') => return Err(err("unterminated string literal".into())),
                    Some('\\') => {
                        cur.bump();
                    }
                    Some('"') => break,
                    Some(_) => {}
                }
            }
            Tok::Str(src[start..cur.offset()].to_string())
        } else if c == '#' {
            cur.bump();
            let start = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                cur.bump();
            }
            let name = src[start..cur.offset()].to_string();
            if name.is_empty() {
                return Err(err("expected directive name after `#`".into()));
            }
            if name == "script" {
                let body_start = cur.offset();
                loop {
                    let rest = &src[cur.offset()..];
                    if rest.is_empty() {
                        return Err(err("unterminated #script block (missing `#end.`)".into()));
                    }
                    if rest.starts_with("#end") {
                        break;
                    }
                    cur.bump();
                }
                let text = src[body_start..cur.offset()].to_string();
                for _ in 0.."#end".len() {
                    cur.bump();
                }
                Tok::Script(text)
            } else {
                Tok::Directive(name)
            }
        } else {
            cur.bump();
            let next = cur.peek();
            fn two(t: Tok, cur: &mut Cursor<'_>) -> Tok {
                cur.bump();
                t
            }
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semicolon,
                '@' => Tok::At,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '|' => Tok::Bar,
                '\\' => Tok::Backslash,
                '.' if next == Some('.') => two(Tok::DotDot, &mut cur),
                '.' => Tok::Dot,
                ':' if next == Some('-') => two(Tok::If, &mut cur),
                ':' if next == Some('~') => two(Tok::WeakIf, &mut cur),
                ':' => Tok::Colon,
                '=' if next == Some('=') => two(Tok::Eq, &mut cur),
                '=' => Tok::Eq,
                '!' if next == Some('=') => two(Tok::Ne, &mut cur),
                '<' if next == Some('=') => two(Tok::Le, &mut cur),
                '<' if next == Some('>') => two(Tok::Ne, &mut cur),
                '<' => Tok::Lt,
                '>' if next == Some('=') => two(Tok::Ge, &mut cur),
                '>' => Tok::Gt,
                other => return Err(err(format!("unexpected character `{other}`"))),
            }
        };
        out.push(Token { tok, line, column });
    }
}
