//! Conflict-driven clause learning over the completion, with SCC-local
//! unfounded-set checks and a lexicographic cost bound.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Self {
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Variable 0 is true at the root level; the translation uses it for empty
/// bodies.
pub(crate) const TRUE: Lit = Lit(0);

const NO_REASON: u32 = u32::MAX;

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

/// A cyclic SCC of the positive dependency graph.
#[derive(Debug, Default, Clone)]
pub(crate) struct Component {
    /// Atom variables.
    pub atoms: Vec<u32>,
    pub bodies: Vec<LocalBody>,
    /// For each local atom, local bodies having it in their positive part.
    pub uses: Vec<Vec<u32>>,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct LocalBody {
    pub lit: Lit,
    /// Local indices of positive body atoms inside the component.
    pub pos: Vec<u32>,
    /// Local indices of the atoms this body supports.
    pub heads: Vec<u32>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub choices: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

pub(crate) enum SearchResult {
    Model,
    Unsat,
    Interrupted,
}

enum Prop {
    Ok,
    Conflict(u32),
    Unsat,
}

enum Integrated {
    Done,
    Conflict(u32),
    Unsat,
}

#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

impl VarHeap {
    const ABSENT: usize = usize::MAX;

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, Self::ABSENT);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != Self::ABSENT
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            let cv = self.heap[c];
            if act[cv as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = cv;
            self.pos[cv as usize] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }
}

fn luby(mut x: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

pub(crate) struct Solver {
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    num_learnts: usize,
    max_learnts: f64,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    assumptions: Vec<Lit>,
    comps: Vec<Component>,
    dirty_on: Vec<Vec<u32>>,
    comp_dirty: Vec<bool>,
    dirty_list: Vec<u32>,
    obj_lits: Vec<(Lit, usize, i64)>,
    obj_on: Vec<Vec<u32>>,
    sums: Vec<i64>,
    bound: Option<Vec<i64>>,
    restarts: bool,
    luby_index: u64,
    conflicts_since_restart: u64,
    ok: bool,
    seed: u64,
    pub stats: SearchStats,
}

impl Solver {
    pub fn new(seed: u64, restarts: bool) -> Self {
        let mut s = Solver {
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            num_learnts: 0,
            max_learnts: 2000.0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            assumptions: Vec::new(),
            comps: Vec::new(),
            dirty_on: Vec::new(),
            comp_dirty: Vec::new(),
            dirty_list: Vec::new(),
            obj_lits: Vec::new(),
            obj_on: Vec::new(),
            sums: Vec::new(),
            bound: None,
            restarts,
            luby_index: 0,
            conflicts_since_restart: 0,
            ok: true,
            seed,
            stats: SearchStats::default(),
        };
        let t = s.new_var();
        debug_assert_eq!(t, TRUE.var());
        s.enqueue(TRUE, NO_REASON);
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.assigns.len() as u32;
        self.assigns.push(0);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.polarity.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.dirty_on.push(Vec::new());
        self.dirty_on.push(Vec::new());
        self.obj_on.push(Vec::new());
        self.obj_on.push(Vec::new());
        self.heap.grow(self.assigns.len());
        v
    }

    /// Gives every variable a small seeded random activity so that
    /// different seeds explore in different orders.
    pub fn init_heuristic(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for v in 1..self.num_vars() {
            self.activity[v] = rng.gen::<f64>() * 1e-3;
            self.heap.insert(v as u32, &self.activity);
        }
    }

    pub fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var() as usize];
        if l.positive() {
            v
        } else {
            -v
        }
    }

    fn lit_level(&self, l: Lit) -> u32 {
        self.level[l.var() as usize]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn is_true(&self, var: u32) -> bool {
        self.assigns[var as usize] == 1
    }

    pub fn set_assumptions(&mut self, lits: Vec<Lit>) {
        self.assumptions = lits;
    }

    pub fn set_components(&mut self, comps: Vec<Component>) {
        for (ci, c) in comps.iter().enumerate() {
            for b in &c.bodies {
                // dirty when the body becomes false, i.e. its negation true
                let on = &mut self.dirty_on[(!b.lit).idx()];
                if on.last() != Some(&(ci as u32)) {
                    on.push(ci as u32);
                }
            }
        }
        self.comp_dirty = vec![true; comps.len()];
        self.dirty_list = (0..comps.len() as u32).collect();
        self.comps = comps;
    }

    /// `lits` are `(literal, level, weight)` with positive weights; level 0
    /// is the most significant.
    pub fn set_objective(&mut self, levels: usize, lits: Vec<(Lit, usize, i64)>) {
        self.sums = vec![0; levels];
        for (i, (l, lvl, w)) in lits.iter().enumerate() {
            self.obj_on[l.idx()].push(i as u32);
            if self.value(*l) == 1 {
                self.sums[*lvl] += w;
            }
        }
        self.obj_lits = lits;
    }

    pub fn set_bound(&mut self, bound: Vec<i64>) {
        self.bound = Some(bound);
    }

    pub fn cost_sums(&self) -> &[i64] {
        &self.sums
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        debug_assert_eq!(self.assigns[v], 0);
        self.assigns[v] = if l.positive() { 1 } else { -1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
        for i in 0..self.dirty_on[l.idx()].len() {
            let c = self.dirty_on[l.idx()][i] as usize;
            if !self.comp_dirty[c] {
                self.comp_dirty[c] = true;
                self.dirty_list.push(c as u32);
            }
        }
        for i in 0..self.obj_on[l.idx()].len() {
            let (_, lvl, w) = self.obj_lits[self.obj_on[l.idx()][i] as usize];
            self.sums[lvl] += w;
        }
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.assigns[v] = 0;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.positive();
            for k in 0..self.obj_on[l.idx()].len() {
                let (_, ol, w) = self.obj_lits[self.obj_on[l.idx()][k] as usize];
                self.sums[ol] -= w;
            }
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
        // derived unfounded atoms may have been undone
        for c in 0..self.comps.len() {
            if !self.comp_dirty[c] {
                self.comp_dirty[c] = true;
                self.dirty_list.push(c as u32);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        debug_assert!(lits.len() >= 2);
        let ci = self.clauses.len() as u32;
        self.watches[(!lits[0]).idx()].push(Watcher { clause: ci, blocker: lits[1] });
        self.watches[(!lits[1]).idx()].push(Watcher { clause: ci, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        ci
    }

    /// Adds a clause of the initial translation, at the root level.
    pub fn add_clause(&mut self, mut lits: Vec<Lit>) -> bool {
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return false;
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) || lits.iter().any(|l| self.value(*l) == 1) {
            return true;
        }
        lits.retain(|l| self.value(*l) != -1);
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], NO_REASON);
                true
            }
            _ => {
                self.attach(lits, false);
                true
            }
        }
    }

    /// Adds a clause at any point of the search. The clause may be unit or
    /// conflicting under the current assignment.
    fn integrate(&mut self, mut lits: Vec<Lit>, learnt: bool) -> Integrated {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return Integrated::Done;
        }
        lits.sort_by_key(|l| match self.value(*l) {
            -1 => (1, u32::MAX - self.lit_level(*l)),
            _ => (0, 0),
        });
        match lits.len() {
            0 => return Integrated::Unsat,
            1 => {
                self.backtrack(0);
                return match self.value(lits[0]) {
                    -1 => Integrated::Unsat,
                    0 => {
                        self.enqueue(lits[0], NO_REASON);
                        Integrated::Done
                    }
                    _ => Integrated::Done,
                };
            }
            _ => {}
        }
        let (v0, v1) = (self.value(lits[0]), self.value(lits[1]));
        if v0 == -1 {
            let top = self.lit_level(lits[0]);
            if top == 0 {
                return Integrated::Unsat;
            }
            self.backtrack(top);
            let ci = self.attach(lits, learnt);
            return Integrated::Conflict(ci);
        }
        let first = lits[0];
        let ci = self.attach(lits, learnt);
        if v0 == 0 && v1 == -1 {
            self.enqueue(first, ci);
        }
        Integrated::Done
    }

    /// Adds a clause after backtracking to the root. Returns false when the
    /// problem became unsatisfiable.
    pub fn add_clause_at_root(&mut self, lits: Vec<Lit>) -> bool {
        self.backtrack(0);
        match self.integrate(lits, false) {
            Integrated::Done => true,
            Integrated::Conflict(_) | Integrated::Unsat => {
                self.ok = false;
                false
            }
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let ci = w.clause as usize;
                if self.clauses[ci].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[ci].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[ci].lits[0];
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = Watcher { clause: w.clause, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[ci].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[ci].lits[k];
                    if self.value(l) != -1 {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[(!l).idx()].push(Watcher { clause: w.clause, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { clause: w.clause, blocker: first };
                j += 1;
                if self.value(first) == -1 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            // watchers pushed onto this list while it was taken are kept
            let pushed = std::mem::take(&mut self.watches[p.idx()]);
            ws.extend(pushed);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, ci: u32) {
        let c = &mut self.clauses[ci as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal
    /// first) and the level to backtrack to.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let dl = self.decision_level();
        let mut learnt = vec![TRUE];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize];
            debug_assert_ne!(confl, NO_REASON);
        }
        learnt[0] = !p.expect("uip");
        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, l)| {
                if i == 0 {
                    return true;
                }
                let r = self.reason[l.var() as usize];
                if r == NO_REASON {
                    return true;
                }
                !self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var() as usize;
                    self.seen[v] || self.level[v] == 0
                })
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut out: Vec<Lit> = learnt.into_iter().zip(keep).filter_map(|(l, k)| k.then_some(l)).collect();
        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.lit_level(out[i]) > self.lit_level(out[max_i]) {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.lit_level(out[1]);
        }
        (out, bt)
    }

    fn locked(&self, ci: u32) -> bool {
        let l = self.clauses[ci as usize].lits[0];
        self.value(l) == 1 && self.reason[l.var() as usize] == ci
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|c| {
                let cl = &self.clauses[*c as usize];
                cl.learnt && !cl.deleted && cl.lits.len() > 2
            })
            .collect();
        learnts.sort_by(|a, b| self.clauses[*a as usize].activity.total_cmp(&self.clauses[*b as usize].activity));
        let mut removed = 0;
        for &c in &learnts[..learnts.len() / 2] {
            if !self.locked(c) {
                let cl = &mut self.clauses[c as usize];
                cl.deleted = true;
                cl.lits = Vec::new();
                removed += 1;
            }
        }
        self.num_learnts -= removed;
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
        self.max_learnts *= 1.1;
    }

    fn check_bound(&self) -> Option<Vec<Lit>> {
        let bound = self.bound.as_ref()?;
        let mut upto = self.sums.len();
        for (i, (s, b)) in self.sums.iter().zip(bound).enumerate() {
            if s < b {
                return None;
            }
            if s > b {
                upto = i + 1;
                break;
            }
        }
        Some(
            self.obj_lits
                .iter()
                .filter(|(l, lvl, _)| *lvl < upto && self.value(*l) == 1)
                .map(|(l, _, _)| !*l)
                .collect(),
        )
    }

    /// Greatest unfounded set of component `ci` under the current
    /// assignment, with the (all false) bodies external to it.
    fn unfounded(&self, ci: usize) -> (Vec<u32>, Vec<Lit>) {
        let c = &self.comps[ci];
        let mut in_u: Vec<bool> = c.atoms.iter().map(|a| self.assigns[*a as usize] != -1).collect();
        let mut cnt: Vec<u32> =
            c.bodies.iter().map(|b| b.pos.iter().filter(|a| in_u[**a as usize]).count() as u32).collect();
        let mut queue = Vec::new();
        let release = |b: &LocalBody, in_u: &mut Vec<bool>, queue: &mut Vec<u32>| {
            for h in &b.heads {
                if in_u[*h as usize] {
                    in_u[*h as usize] = false;
                    queue.push(*h);
                }
            }
        };
        for (bi, b) in c.bodies.iter().enumerate() {
            if cnt[bi] == 0 && self.value(b.lit) != -1 {
                release(b, &mut in_u, &mut queue);
            }
        }
        while let Some(a) = queue.pop() {
            for &bi in &c.uses[a as usize] {
                cnt[bi as usize] -= 1;
                let b = &c.bodies[bi as usize];
                if cnt[bi as usize] == 0 && self.value(b.lit) != -1 {
                    release(b, &mut in_u, &mut queue);
                }
            }
        }
        let unfounded: Vec<u32> = (0..c.atoms.len() as u32).filter(|i| in_u[*i as usize]).collect();
        if unfounded.is_empty() {
            return (unfounded, Vec::new());
        }
        let mut ext: Vec<Lit> = c
            .bodies
            .iter()
            .enumerate()
            .filter(|(bi, b)| cnt[*bi] == 0 && b.heads.iter().any(|h| in_u[*h as usize]))
            .map(|(_, b)| b.lit)
            .collect();
        ext.sort_unstable();
        ext.dedup();
        (unfounded.into_iter().map(|i| c.atoms[i as usize]).collect(), ext)
    }

    fn propagate_all(&mut self) -> Prop {
        'outer: loop {
            if let Some(c) = self.propagate() {
                return Prop::Conflict(c);
            }
            if let Some(clause) = self.check_bound() {
                return match self.integrate(clause, true) {
                    Integrated::Conflict(ci) => Prop::Conflict(ci),
                    Integrated::Unsat => Prop::Unsat,
                    Integrated::Done => continue,
                };
            }
            while let Some(ci) = self.dirty_list.pop() {
                let ci = ci as usize;
                self.comp_dirty[ci] = false;
                let (mut atoms, ext) = self.unfounded(ci);
                atoms.retain(|a| self.assigns[*a as usize] != -1);
                if atoms.is_empty() {
                    continue;
                }
                // a true unfounded atom is a conflict; handle it first
                atoms.sort_by_key(|a| self.assigns[*a as usize] != 1);
                for a in atoms {
                    if self.assigns[a as usize] == -1 {
                        continue;
                    }
                    let mut clause = vec![Lit::new(a, false)];
                    clause.extend_from_slice(&ext);
                    match self.integrate(clause, true) {
                        Integrated::Conflict(ci) => return Prop::Conflict(ci),
                        Integrated::Unsat => return Prop::Unsat,
                        Integrated::Done => {}
                    }
                }
                continue 'outer;
            }
            return Prop::Ok;
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == 0 {
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    /// Searches for the next total assignment that is a stable model.
    pub fn search(&mut self, interrupt: &AtomicBool) -> SearchResult {
        if !self.ok {
            return SearchResult::Unsat;
        }
        let mut restart_limit = 100 * luby(self.luby_index);
        loop {
            if interrupt.load(Ordering::Relaxed) {
                return SearchResult::Interrupted;
            }
            match self.propagate_all() {
                Prop::Unsat => {
                    self.ok = false;
                    return SearchResult::Unsat;
                }
                Prop::Conflict(confl) => {
                    self.stats.conflicts += 1;
                    self.conflicts_since_restart += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        return SearchResult::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.backtrack(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let first = learnt[0];
                        let ci = self.attach(learnt, true);
                        self.bump_clause(ci);
                        self.enqueue(first, ci);
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                }
                Prop::Ok => {
                    if self.restarts && self.conflicts_since_restart >= restart_limit {
                        self.conflicts_since_restart = 0;
                        self.luby_index += 1;
                        restart_limit = 100 * luby(self.luby_index);
                        self.stats.restarts += 1;
                        self.backtrack(0);
                        continue;
                    }
                    if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                    }
                    let mut next = None;
                    while (self.decision_level() as usize) < self.assumptions.len() {
                        let a = self.assumptions[self.decision_level() as usize];
                        match self.value(a) {
                            1 => self.trail_lim.push(self.trail.len()),
                            -1 => return SearchResult::Unsat,
                            _ => {
                                next = Some(a);
                                break;
                            }
                        }
                    }
                    let next = match next {
                        Some(a) => a,
                        None => match self.pick_branch() {
                            Some(l) => {
                                self.stats.choices += 1;
                                l
                            }
                            None => return SearchResult::Model,
                        },
                    };
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(next, NO_REASON);
                }
            }
        }
    }

    /// Backtracks to the root so that clauses or bounds can be added.
    pub fn reset(&mut self) {
        self.backtrack(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i32) -> Lit {
        Lit::new(v.unsigned_abs(), v > 0)
    }

    fn solver(vars: u32, clauses: &[&[i32]]) -> Solver {
        let mut s = Solver::new(0, true);
        for _ in 0..vars {
            s.new_var();
        }
        for c in clauses {
            s.add_clause(c.iter().map(|v| lit(*v)).collect());
        }
        s.init_heuristic();
        s
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn literal_encoding() {
        let l = Lit::new(7, true);
        assert_eq!(l.var(), 7);
        assert!(l.positive());
        assert!(!(!l).positive());
        assert_eq!(!!l, l);
    }

    #[test]
    fn simple_sat_and_unsat() {
        let stop = AtomicBool::new(false);
        let mut s = solver(2, &[&[1, 2], &[-1, 2], &[1, -2]]);
        assert!(matches!(s.search(&stop), SearchResult::Model));
        assert!(s.is_true(1) && s.is_true(2));
        let mut s = solver(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert!(matches!(s.search(&stop), SearchResult::Unsat));
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p(i,h) = 1 + 2*i + h
        let v = |i: i32, h: i32| 1 + 2 * i + h;
        let mut cls: Vec<Vec<i32>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    cls.push(vec![-v(i, h), -v(j, h)]);
                }
            }
        }
        let refs: Vec<&[i32]> = cls.iter().map(|c| c.as_slice()).collect();
        let mut s = solver(6, &refs);
        assert!(matches!(s.search(&AtomicBool::new(false)), SearchResult::Unsat));
        assert!(s.stats.conflicts > 0);
    }

    #[test]
    fn assumptions_are_decisions() {
        let stop = AtomicBool::new(false);
        let mut s = solver(2, &[&[-1, 2]]);
        s.set_assumptions(vec![lit(1)]);
        assert!(matches!(s.search(&stop), SearchResult::Model));
        assert!(s.is_true(2));
        let mut s = solver(2, &[&[-1, 2], &[-2]]);
        s.set_assumptions(vec![lit(1)]);
        assert!(matches!(s.search(&stop), SearchResult::Unsat));
    }

    #[test]
    fn interrupted_before_start() {
        let mut s = solver(1, &[]);
        assert!(matches!(s.search(&AtomicBool::new(true)), SearchResult::Interrupted));
    }
}
