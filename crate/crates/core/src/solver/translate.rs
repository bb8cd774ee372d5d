//! Clark completion of a ground program into clauses, plus the data the
//! unfounded-set check and the cost bound need.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::cdcl::{Component, Lit, LocalBody, Solver, TRUE};
use super::SolverProgram;
use crate::grounder::GroundHead;
use crate::store::AtomId;

pub(crate) struct Translation {
    pub solver: Solver,
    /// Objective priorities, highest first; index = solver cost level.
    pub priorities: Vec<i64>,
    /// Constant added per level (from negative weights).
    pub offsets: Vec<i64>,
}

fn atom_lit(a: AtomId, positive: bool) -> Lit {
    Lit::new(a.raw(), positive)
}

struct Builder {
    solver: Solver,
    bodies: HashMap<(Vec<AtomId>, Vec<AtomId>), Lit>,
}

impl Builder {
    /// A literal equivalent to the conjunction `pos, not neg`.
    fn body(&mut self, pos: &[AtomId], neg: &[AtomId]) -> Lit {
        match (pos, neg) {
            ([], []) => return TRUE,
            ([a], []) => return atom_lit(*a, true),
            ([], [a]) => return atom_lit(*a, false),
            _ => {}
        }
        let mut key = (pos.to_vec(), neg.to_vec());
        key.0.sort_unstable();
        key.1.sort_unstable();
        if let Some(l) = self.bodies.get(&key) {
            return *l;
        }
        let b = Lit::new(self.solver.new_var(), true);
        let lits: Vec<Lit> =
            pos.iter().map(|a| atom_lit(*a, true)).chain(neg.iter().map(|a| atom_lit(*a, false))).collect();
        let mut all = vec![b];
        for l in &lits {
            self.solver.add_clause(vec![!b, *l]);
            all.push(!*l);
        }
        self.solver.add_clause(all);
        self.bodies.insert(key, b);
        b
    }

    /// A literal equivalent to the disjunction of `lits`.
    fn disjunction(&mut self, lits: &[Lit]) -> Lit {
        if let [l] = lits {
            return *l;
        }
        let t = Lit::new(self.solver.new_var(), true);
        let mut clause = vec![!t];
        for l in lits {
            clause.push(*l);
            self.solver.add_clause(vec![t, !*l]);
        }
        self.solver.add_clause(clause);
        t
    }

    /// Sequential counter over `xs`: returns `s[j]` for `j` in `1..=k`,
    /// where `s[j]` holds iff at least `j` of `xs` are true (`None` when
    /// `j > xs.len()`).
    fn at_least(&mut self, xs: &[Lit], k: usize) -> Vec<Option<Lit>> {
        // prev[j] = "at least j of the first i", prev[0] = true
        let mut prev: Vec<Option<Lit>> = vec![None; k + 1];
        prev[0] = Some(TRUE);
        for (i, x) in xs.iter().enumerate() {
            let mut cur: Vec<Option<Lit>> = vec![None; k + 1];
            cur[0] = Some(TRUE);
            for j in 1..=k.min(i + 1) {
                let s = Lit::new(self.solver.new_var(), true);
                let below = prev[j - 1].expect("j - 1 <= i");
                if let Some(same) = prev[j] {
                    self.solver.add_clause(vec![!same, s]);
                    self.solver.add_clause(vec![!s, same, below]);
                    self.solver.add_clause(vec![!s, same, *x]);
                } else {
                    self.solver.add_clause(vec![!s, below]);
                    self.solver.add_clause(vec![!s, *x]);
                }
                self.solver.add_clause(vec![!below, !*x, s]);
                cur[j] = Some(s);
            }
            prev = cur;
        }
        prev.into_iter().skip(1).collect()
    }
}

pub(crate) fn translate(p: &SolverProgram, seed: u64, restarts: bool) -> Translation {
    let mut solver = Solver::new(seed, restarts);
    for _ in 0..p.num_atoms {
        solver.new_var();
    }
    let mut b = Builder { solver, bodies: HashMap::new() };
    let n = p.num_atoms;
    let mut supports: Vec<Vec<Lit>> = vec![Vec::new(); n + 1];
    // (head, body, positive body atoms)
    let mut entries: Vec<(AtomId, Lit, &[AtomId])> = Vec::new();
    for r in &p.rules {
        let body = b.body(&r.pos, &r.neg);
        match &r.head {
            GroundHead::None => {
                b.solver.add_clause(vec![!body]);
            }
            GroundHead::Atom(h) => {
                b.solver.add_clause(vec![!body, atom_lit(*h, true)]);
                supports[h.index()].push(body);
                entries.push((*h, body, &r.pos));
            }
            GroundHead::Choice { atoms, lower, upper } => {
                for a in atoms {
                    supports[a.index()].push(body);
                    entries.push((*a, body, &r.pos));
                }
                let m = atoms.len() as i64;
                let lo = lower.unwrap_or(0).max(0);
                let hi = upper.unwrap_or(m).min(m);
                if lo > m || hi < lo {
                    b.solver.add_clause(vec![!body]);
                } else if lo > 0 || hi < m {
                    let xs: Vec<Lit> = atoms.iter().map(|a| atom_lit(*a, true)).collect();
                    let k = if hi < m { hi + 1 } else { lo } as usize;
                    let s = b.at_least(&xs, k);
                    if lo > 0 {
                        b.solver.add_clause(vec![!body, s[lo as usize - 1].expect("lo <= m")]);
                    }
                    if hi < m {
                        b.solver.add_clause(vec![!body, !s[hi as usize].expect("hi + 1 <= m")]);
                    }
                }
            }
        }
    }
    let externals: HashSet<AtomId> = p.externals.iter().copied().collect();
    for (a, support) in supports.iter().enumerate().skip(1) {
        let id = AtomId::new(a as u32);
        if externals.contains(&id) {
            continue;
        }
        let mut clause = vec![atom_lit(id, false)];
        clause.extend(support);
        b.solver.add_clause(clause);
    }

    b.solver.set_components(components(n, &entries));

    let mut priorities: Vec<i64> = p.objective.iter().map(|t| t.priority).collect();
    priorities.sort_unstable_by(|x, y| y.cmp(x));
    priorities.dedup();
    let level_of: BTreeMap<i64, usize> = priorities.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut offsets = vec![0; priorities.len()];
    let mut obj = Vec::new();
    for t in &p.objective {
        if t.weight == 0 || t.conditions.is_empty() {
            continue;
        }
        let conds: Vec<Lit> = t
            .conditions
            .iter()
            .map(|c| {
                let pos: Vec<AtomId> = c.iter().filter(|l| l.positive).map(|l| l.atom).collect();
                let neg: Vec<AtomId> = c.iter().filter(|l| !l.positive).map(|l| l.atom).collect();
                b.body(&pos, &neg)
            })
            .collect();
        let tau = b.disjunction(&conds);
        let lvl = level_of[&t.priority];
        if t.weight > 0 {
            obj.push((tau, lvl, t.weight));
        } else {
            obj.push((!tau, lvl, -t.weight));
            offsets[lvl] += t.weight;
        }
    }
    b.solver.set_objective(priorities.len(), obj);
    b.solver.set_assumptions(p.assumptions.iter().map(|l| atom_lit(l.atom, l.positive)).collect());
    b.solver.init_heuristic();
    Translation { solver: b.solver, priorities, offsets }
}

/// Cyclic SCCs of the positive dependency graph, in solver form.
fn components(n: usize, entries: &[(AtomId, Lit, &[AtomId])]) -> Vec<Component> {
    let mut succ = vec![Vec::new(); n + 1];
    let mut self_loop = vec![false; n + 1];
    for (h, _, pos) in entries {
        for a in pos.iter() {
            succ[h.index()].push(a.index());
            if a == h {
                self_loop[h.index()] = true;
            }
        }
    }
    let mut comps = Vec::new();
    let mut comp_of = vec![usize::MAX; n + 1];
    for scc in crate::graph::strongly_connected(n + 1, &succ) {
        if scc.len() < 2 && !self_loop[scc[0]] {
            continue;
        }
        let ci = comps.len();
        let mut c = Component::default();
        for a in &scc {
            comp_of[*a] = ci;
            c.atoms.push(*a as u32);
        }
        c.uses = vec![Vec::new(); c.atoms.len()];
        comps.push(c);
    }
    let local =
        |c: &Component, a: usize| c.atoms.iter().position(|x| *x as usize == a).expect("atom in component") as u32;
    let mut body_index: HashMap<(usize, Lit), usize> = HashMap::new();
    for (h, body, pos) in entries {
        let ci = comp_of[h.index()];
        if ci == usize::MAX {
            continue;
        }
        let hl = local(&comps[ci], h.index());
        let bi = match body_index.get(&(ci, *body)) {
            Some(bi) => *bi,
            None => {
                let c = &comps[ci];
                let mut lp: Vec<u32> =
                    pos.iter().filter(|a| comp_of[a.index()] == ci).map(|a| local(c, a.index())).collect();
                lp.sort_unstable();
                lp.dedup();
                let bi = c.bodies.len();
                let c = &mut comps[ci];
                for a in &lp {
                    c.uses[*a as usize].push(bi as u32);
                }
                c.bodies.push(LocalBody { lit: *body, pos: lp, heads: Vec::new() });
                body_index.insert((ci, *body), bi);
                bi
            }
        };
        let heads = &mut comps[ci].bodies[bi].heads;
        if !heads.contains(&hl) {
            heads.push(hl);
        }
    }
    comps
}
