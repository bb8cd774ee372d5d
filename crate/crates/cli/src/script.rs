//! Control scripts: one command per line, `#` starts a comment.
//!
//! ```text
//! ground acid(42)
//! assign query(1) true
//! release query(1)
//! solve models=0 enum=all
//! add hyp <<END
//! #external h.
//! END
//! conf seed=3 replace
//! stats
//! ```

use mshot_core::control::parse_enum_mode;
use mshot_core::syntax::parse_atom;
use mshot_core::{EnumMode, GroundAtom, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Ground(String, Vec<Term>),
    Assign(GroundAtom, bool),
    Release(GroundAtom),
    Solve { models: Option<usize>, mode: Option<EnumMode> },
    Add { name: String, params: Vec<String>, text: String },
    Conf { options: String, replace: bool },
    Stats,
}

fn ground_atom(text: &str, line: usize) -> Result<GroundAtom, ScriptError> {
    let atom = parse_atom(text.trim()).map_err(|e| ScriptError { line, message: e.to_string() })?;
    Ok(GroundAtom::new(atom.name, atom.args))
}

/// Parses `name` or `name(p1,...,pn)` where the parameters are identifiers.
fn signature(text: &str, line: usize) -> Result<(String, Vec<String>), ScriptError> {
    let err = |m: &str| ScriptError { line, message: format!("{m}: `{text}`") };
    let ident = |s: &str| {
        s.trim_start_matches('_').starts_with(|c: char| c.is_ascii_lowercase())
            && s.chars().all(|c| c.is_alphanumeric() || c == '_')
    };
    let (name, params) = match text.split_once('(') {
        None => (text, Vec::new()),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| err("expected `)`"))?;
            let params: Vec<String> = inner.split(',').map(|p| p.trim().to_string()).collect();
            if !params.iter().all(|p| ident(p)) {
                return Err(err("invalid parameter list"));
            }
            (name, params)
        }
    };
    if !ident(name) {
        return Err(err("invalid subprogram name"));
    }
    Ok((name.to_string(), params))
}

/// Parses a script into commands paired with their 1-based line numbers.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Command)>, ScriptError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((line, raw)) = lines.next() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (word, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        let err = |m: String| ScriptError { line, message: m };
        let cmd = match word {
            "ground" => {
                let atom = ground_atom(rest, line)?;
                Command::Ground(atom.name, atom.args)
            }
            "assign" => {
                let (atom, value) = rest
                    .rsplit_once(char::is_whitespace)
                    .ok_or_else(|| err("usage: assign <atom> <true|false>".into()))?;
                let value = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(format!("expected `true` or `false`, found `{other}`"))),
                };
                Command::Assign(ground_atom(atom, line)?, value)
            }
            "release" => Command::Release(ground_atom(rest, line)?),
            "solve" => {
                let (mut models, mut mode) = (None, None);
                for opt in rest.split_whitespace() {
                    match opt.split_once('=') {
                        Some(("models", n)) => {
                            models = Some(n.parse().map_err(|_| err(format!("invalid model count `{n}`")))?)
                        }
                        Some(("enum", m)) => {
                            mode =
                                Some(parse_enum_mode(m).ok_or_else(|| err(format!("unknown enumeration mode `{m}`")))?)
                        }
                        _ => return Err(err(format!("unknown solve option `{opt}`"))),
                    }
                }
                Command::Solve { models, mode }
            }
            "add" => {
                let (sig, tag) =
                    rest.split_once("<<").ok_or_else(|| err("usage: add <name>[(params)] <<TAG".into()))?;
                let tag = tag.trim();
                if tag.is_empty() {
                    return Err(err("missing heredoc terminator".into()));
                }
                let (name, params) = signature(sig.trim(), line)?;
                let mut body = String::new();
                loop {
                    match lines.next() {
                        Some((_, l)) if l.trim() == tag => break,
                        Some((_, l)) => {
                            body.push_str(l);
                            body.push('\n');
                        }
                        None => return Err(err(format!("unterminated heredoc, expected `{tag}`"))),
                    }
                }
                Command::Add { name, params, text: body }
            }
            "conf" => {
                let mut words: Vec<&str> = rest.split_whitespace().collect();
                let replace = words.last() == Some(&"replace");
                if replace {
                    words.pop();
                }
                Command::Conf { options: words.join(" "), replace }
            }
            "stats" if rest.is_empty() => Command::Stats,
            other => return Err(err(format!("unknown command `{other}`"))),
        };
        out.push((line, cmd));
    }
    Ok(out)
}
