use std::fmt::Write;

use super::{GroundHead, GroundRule, GroundUnit, MinimizeEntry};
use crate::store::{AtomId, AtomTable};

fn body(pos: &[AtomId], neg: &[AtomId], atoms: &AtomTable) -> String {
    let mut p: Vec<String> = pos.iter().map(|a| atoms.get(*a).to_string()).collect();
    let mut n: Vec<String> = neg.iter().map(|a| format!("not {}", atoms.get(*a))).collect();
    p.sort();
    n.sort();
    p.extend(n);
    p.join(", ")
}

pub(crate) fn rule_to_string(r: &GroundRule, atoms: &AtomTable) -> String {
    let head = match &r.head {
        GroundHead::None => String::new(),
        GroundHead::Atom(a) => atoms.get(*a).to_string(),
        GroundHead::Choice { atoms: elems, lower, upper } => {
            let mut names: Vec<String> = elems.iter().map(|a| atoms.get(*a).to_string()).collect();
            names.sort();
            let mut s = String::new();
            if let Some(l) = lower {
                write!(s, "{l} ").unwrap();
            }
            write!(s, "{{ {} }}", names.join("; ")).unwrap();
            if let Some(u) = upper {
                write!(s, " {u}").unwrap();
            }
            s
        }
    };
    let b = body(&r.pos, &r.neg, atoms);
    match (head.is_empty(), b.is_empty()) {
        (false, true) => format!("{head}."),
        (false, false) => format!("{head} :- {b}."),
        (true, _) => format!(":- {b}."),
    }
}

fn minimize_to_string(e: &MinimizeEntry, atoms: &AtomTable) -> String {
    let terms: Vec<String> = e.tuple[2..].iter().map(|t| t.to_string()).collect();
    let mut s = format!("#minimize{{ {}@{}", e.weight, e.priority);
    for t in terms {
        write!(s, ",{t}").unwrap();
    }
    let pos: Vec<AtomId> = e.condition.iter().filter(|l| l.positive).map(|l| l.atom).collect();
    let neg: Vec<AtomId> = e.condition.iter().filter(|l| !l.positive).map(|l| l.atom).collect();
    let cond = body(&pos, &neg, atoms);
    if !cond.is_empty() {
        write!(s, " : {cond}").unwrap();
    }
    s.push_str(" }.");
    s
}

/// Renders ground units in input syntax, one `% inc k` section per unit.
pub fn dump_ground<'u>(units: impl IntoIterator<Item = &'u GroundUnit>, atoms: &AtomTable) -> String {
    let mut out = String::new();
    for u in units {
        writeln!(out, "% inc {}", u.increment_tag).unwrap();
        for r in &u.rules {
            writeln!(out, "{}", rule_to_string(r, atoms)).unwrap();
        }
        for e in &u.external_decls {
            writeln!(out, "#external {}.", atoms.get(*e)).unwrap();
        }
        for m in &u.minimize_entries {
            writeln!(out, "{}", minimize_to_string(m, atoms)).unwrap();
        }
        for s in &u.shown {
            writeln!(out, "#show {s}.").unwrap();
        }
    }
    out
}
