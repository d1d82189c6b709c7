//! Condition synthesis: the greedy clause solver and the DNF solver built on
//! representative clauses.

use std::collections::{BTreeSet, HashMap, HashSet};

use rustc_hash::{FxHashMap, FxHashSet};
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::cond::{Atom, AtomOp, Clause, Dnf, Literal};
use crate::error::{SynthError, TaskError};
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::size::ProgramSize;

/// Inputs a condition must accept (`positives`) and reject (`negatives`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolTask {
    arity: usize,
    positives: Vec<Vec<i64>>,
    negatives: Vec<Vec<i64>>,
}

impl BoolTask {
    pub fn new(
        arity: usize,
        positives: Vec<Vec<i64>>,
        negatives: Vec<Vec<i64>>,
    ) -> Result<Self, TaskError> {
        for (index, input) in positives.iter().chain(&negatives).enumerate() {
            if input.len() != arity {
                return Err(TaskError::Arity { index, expected: arity, got: input.len() });
            }
        }
        for (second, n) in negatives.iter().enumerate() {
            if let Some(first) = positives.iter().position(|p| p == n) {
                return Err(TaskError::Conflict { first, second, input: n.clone() });
            }
        }
        Ok(BoolTask { arity, positives, negatives })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn positives(&self) -> &[Vec<i64>] {
        &self.positives
    }

    pub fn negatives(&self) -> &[Vec<i64>] {
        &self.negatives
    }

    /// True on every positive and false on every negative.
    pub fn accepts(&self, d: &Dnf) -> bool {
        self.positives.iter().all(|i| d.eval(i) == Ok(true))
            && self.negatives.iter().all(|i| d.eval(i) == Ok(false))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondSolverConfig {
    pub c0: f64,
    /// Largest outer parameter `s` tried.
    pub s_cap: u64,
    /// Collapse literals that agree on every input of the task.
    pub literal_semantic_dedup: bool,
}

impl Default for CondSolverConfig {
    fn default() -> Self {
        CondSolverConfig { c0: 2.0, s_cap: 16, literal_semantic_dedup: true }
    }
}

fn var_cost(a: i64) -> u64 {
    match a.abs() {
        0 => 0,
        1 => 1,
        _ => 3,
    }
}

/// Every non-constant canonical atom with at most `size_bound` nodes whose
/// numbers exist in `g`, ordered by node count and then canonically.
pub fn enumerate_conditions(g: &GrammarParams, size_bound: u64) -> Vec<Atom> {
    type Cache = Mutex<HashMap<(GrammarParams, u64), Arc<Vec<Atom>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(*g, size_bound)) {
        return hit.as_ref().clone();
    }
    let atoms = Arc::new(build_conditions(g, size_bound));
    cache.lock().unwrap().insert((*g, size_bound), Arc::clone(&atoms));
    atoms.as_ref().clone()
}

fn build_conditions(g: &GrammarParams, size_bound: u64) -> Vec<Atom> {
    let m = g.max_magnitude();
    let mut choices: Vec<i64> = vec![0, 1, -1];
    for a in 2..=m {
        choices.push(a);
        choices.push(-a);
    }
    let mut found: BTreeSet<(u64, Atom)> = BTreeSet::new();
    let mut coeffs = vec![0i64; g.num_vars()];
    fn rec(
        k: usize,
        cost: u64,
        coeffs: &mut Vec<i64>,
        choices: &[i64],
        g: &GrammarParams,
        bound: u64,
        found: &mut BTreeSet<(u64, Atom)>,
    ) {
        if 1 + cost > bound {
            return;
        }
        if k == coeffs.len() {
            if cost == 0 {
                return;
            }
            let m = g.max_magnitude();
            for c in -(m + 1)..=(m + 1) {
                for op in [AtomOp::Le, AtomOp::Eq] {
                    let Some(a) = Atom::try_new(LinearExpr::from_dense(c, coeffs), op) else { continue };
                    if a.constant_value().is_some() {
                        continue;
                    }
                    let n = a.node_count();
                    if n <= bound && a.check_range(g).is_ok() {
                        found.insert((n, a));
                    }
                }
            }
            return;
        }
        for &a in choices {
            coeffs[k] = a;
            rec(k + 1, cost + var_cost(a), coeffs, choices, g, bound, found);
        }
        coeffs[k] = 0;
    }
    rec(0, 0, &mut coeffs, &choices, g, size_bound, &mut found);
    found.into_iter().map(|(_, a)| a).collect()
}

/// Atoms and their negations, ordered by size then canonically. With
/// `dedup`, literals that agree on every input of `t` are collapsed onto the
/// first (smallest) one.
pub fn literals_for(atoms: &[Atom], t: &BoolTask, dedup: bool) -> Vec<Literal> {
    let mut all: BTreeSet<(u64, Literal)> = BTreeSet::new();
    for a in atoms {
        for l in [Literal::positive(a.clone()), a.negate()] {
            if l.atom().constant_value().is_none() {
                all.insert((l.node_count(), l));
            }
        }
    }
    if !dedup {
        return all.into_iter().map(|(_, l)| l).collect();
    }
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut out = Vec::new();
    for (_, l) in all {
        let sig: Vec<bool> =
            t.positives.iter().chain(&t.negatives).map(|i| l.eval(i).unwrap_or(false)).collect();
        if seen.insert(sig) {
            out.push(l);
        }
    }
    out
}

/// Per-literal truth tables over a fixed `BoolTask`.
struct Table {
    lits: Vec<Literal>,
    nodes: Vec<u64>,
    /// Positives on which the literal holds.
    pos: Vec<Bits>,
    /// Negatives the literal rejects.
    negf: Vec<Bits>,
    /// Per positive, the literals holding on it.
    at_pos: Vec<Bits>,
    n_pos: usize,
    n_neg: usize,
}

impl Table {
    fn new(lits: Vec<Literal>, t: &BoolTask) -> Self {
        let n_pos = t.positives.len();
        let n_neg = t.negatives.len();
        let pos: Vec<Bits> = lits
            .iter()
            .map(|l| Bits::from_fn(n_pos, |i| l.eval(&t.positives[i]).unwrap_or(false)))
            .collect();
        let negf = lits
            .iter()
            .map(|l| Bits::from_fn(n_neg, |i| !l.eval(&t.negatives[i]).unwrap_or(true)))
            .collect();
        let nodes = lits.iter().map(|l| l.node_count()).collect();
        let mut at_pos = vec![Bits::empty(lits.len()); n_pos];
        for (l, p) in pos.iter().enumerate() {
            for j in p.ones() {
                at_pos[j].insert(l);
            }
        }
        Table { lits, nodes, pos, negf, at_pos, n_pos, n_neg }
    }

    fn clause(&self, idx: &[usize]) -> Clause {
        Clause::new(idx.iter().map(|&i| self.lits[i].clone()))
    }

    fn clause_nodes(&self, idx: &[usize]) -> u64 {
        if idx.is_empty() {
            1
        } else {
            idx.iter().map(|&i| self.nodes[i]).sum::<u64>() + idx.len() as u64 - 1
        }
    }

    fn accepted(&self, idx: &[usize]) -> Bits {
        idx.iter().fold(Bits::full(self.n_pos), |acc, &i| acc.and(&self.pos[i]))
    }

    /// Greedy weighted set cover of the negatives by `candidate`'s literals:
    /// best newly-rejected count per node, ties to fewer nodes, then to the
    /// lower index. `None` if `candidate` cannot reject every negative.
    fn simplify(&self, candidate: &[usize]) -> Option<Vec<usize>> {
        let mut remaining = Bits::full(self.n_neg);
        let mut chosen: Vec<usize> = Vec::new();
        while !remaining.is_empty() {
            let mut best: Option<(usize, u64, usize)> = None;
            for &l in candidate {
                let gain = self.negf[l].and_count(&remaining);
                if gain == 0 {
                    continue;
                }
                let size = self.nodes[l];
                let better = match best {
                    None => true,
                    Some((bg, bs, bl)) => {
                        let lhs = gain as u128 * bs as u128;
                        let rhs = bg as u128 * size as u128;
                        lhs > rhs || (lhs == rhs && (size, l) < (bs, bl))
                    }
                };
                if better {
                    best = Some((gain, size, l));
                }
            }
            let (_, _, l) = best?;
            remaining.minus_assign(&self.negf[l]);
            chosen.push(l);
        }
        chosen.sort_unstable();
        Some(chosen)
    }

    /// The representative clauses over the positives in `view`: for every
    /// achievable set of accepted positives of size at least `|view| / k`,
    /// the largest clause accepting exactly that set.
    fn representatives(&self, view: &Bits, k: u64) -> Vec<(Vec<usize>, Bits)> {
        self.achievable(view, k).into_iter().map(|p| (self.closure(&p).ones().collect(), p)).collect()
    }

    /// Every positive set of size at least `|view| / k` cut out of `view` by
    /// literals, in discovery order.
    fn achievable(&self, view: &Bits, k: u64) -> Vec<Bits> {
        let floor_ok = |b: &Bits| b.count() as u64 * k >= view.count() as u64;
        let mut keys: Vec<Bits> = vec![view.clone()];
        let mut seen: FxHashSet<Bits> = FxHashSet::default();
        seen.insert(view.clone());
        let mut np = Bits::empty(self.n_pos);
        for l in 0..self.lits.len() {
            for i in 0..keys.len() {
                np.set_and(&keys[i], &self.pos[l]);
                if floor_ok(&np) && !seen.contains(&np) {
                    seen.insert(np.clone());
                    keys.push(np.clone());
                }
            }
        }
        keys
    }

    /// The largest clause accepting `p`: every literal holding on all of it.
    fn closure(&self, p: &Bits) -> Bits {
        let mut ones = p.ones();
        let Some(first) = ones.next() else { return Bits::full(self.lits.len()) };
        let mut c = self.at_pos[first].clone();
        for j in ones {
            c.and_assign(&self.at_pos[j]);
        }
        c
    }

    /// Simplified representatives that reject every negative, most positives
    /// first, then fewest nodes.
    fn possible_clauses(&self, view: &Bits, k: u64) -> Vec<(Vec<usize>, Bits)> {
        let mut out: Vec<(Vec<usize>, Bits)> = Vec::new();
        let mut seen: FxHashSet<Bits> = FxHashSet::default();
        let mut closure: Vec<usize> = Vec::new();
        let mut rejected = Bits::empty(self.n_neg);
        for p in self.achievable(view, k) {
            let cb = self.closure(&p);
            if seen.contains(&cb) {
                continue;
            }
            closure.clear();
            closure.extend(cb.ones());
            seen.insert(cb);
            rejected.clear();
            for &l in &closure {
                rejected.or_assign(&self.negf[l]);
            }
            if rejected.count() != self.n_neg {
                continue;
            }
            let Some(c) = self.simplify(&closure) else { continue };
            if out.iter().any(|(o, _)| *o == c) {
                continue;
            }
            let acc = self.accepted(&c).and(view);
            out.push((c, acc));
        }
        out.sort_by(|a, b| {
            b.1.count()
                .cmp(&a.1.count())
                .then(self.clause_nodes(&a.0).cmp(&self.clause_nodes(&b.0)))
                .then(a.0.cmp(&b.0))
        });
        out
    }
}

fn indexed(lits: &[Literal], t: &BoolTask) -> Table {
    Table::new(lits.to_vec(), t)
}

fn sorted_table(lits: impl IntoIterator<Item = Literal>, t: &BoolTask) -> Table {
    let set: BTreeSet<(u64, Literal)> = lits.into_iter().map(|l| (l.node_count(), l)).collect();
    Table::new(set.into_iter().map(|(_, l)| l).collect(), t)
}

/// Greedy weighted set cover: picks literals of `candidate` by rejected
/// negatives per node until every negative of `t` is rejected. `None` when
/// `candidate` itself does not reject every negative.
pub fn simplify_clause(candidate: &Clause, t: &BoolTask) -> Option<Clause> {
    let table = sorted_table(candidate.literals().cloned(), t);
    let all: Vec<usize> = (0..table.lits.len()).collect();
    table.simplify(&all).map(|c| table.clause(&c))
}

/// The literals true on every positive, simplified against the negatives;
/// `None` if they cannot reject every negative.
pub fn clause_solve(literals: &[Literal], t: &BoolTask) -> Option<Clause> {
    let table = sorted_table(literals.iter().cloned(), t);
    let full = Bits::full(table.n_pos);
    let cu: Vec<usize> = (0..table.lits.len()).filter(|&l| full.is_subset(&table.pos[l])).collect();
    table.simplify(&cu).map(|c| table.clause(&c))
}

/// Representative clauses of `t`'s positives with coverage floor
/// `|positives| / k`, before filtering against the negatives.
pub fn representative_clauses(literals: &[Literal], t: &BoolTask, k: u64) -> Vec<Clause> {
    let table = indexed(literals, t);
    let view = Bits::full(table.n_pos);
    table.representatives(&view, k).into_iter().map(|(c, _)| table.clause(&c)).collect()
}

/// Representative clauses that reject every negative, each simplified.
pub fn get_possible_clauses(literals: &[Literal], t: &BoolTask, k: u64) -> Vec<Clause> {
    let table = indexed(literals, t);
    let view = Bits::full(table.n_pos);
    table.possible_clauses(&view, k).into_iter().map(|(c, _)| table.clause(&c)).collect()
}

type ClauseCache = FxHashMap<(Bits, u64), Rc<Vec<(Vec<usize>, Bits)>>>;

struct DnfSearch<'a> {
    table: &'a Table,
    /// Possible clauses per `(view, k)`; independent of the size filter, so
    /// shared by every cell over the same table.
    clauses: &'a mut ClauseCache,
    c0: f64,
    memo: FxHashSet<(Bits, u64)>,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl DnfSearch<'_> {
    fn search(&mut self, view: &Bits, k: u64, s: u64) -> Option<Vec<Vec<usize>>> {
        if view.is_empty() {
            return Some(Vec::new());
        }
        if k == 0 || self.memo.contains(&(view.clone(), k)) {
            return None;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            return None;
        }
        let t_len = (view.count() + self.table.n_neg) as f64;
        let bound = self.c0 * s as f64 * t_len.ln().max(1.0);
        let key = (view.clone(), k);
        let options = match self.clauses.get(&key) {
            Some(o) => Rc::clone(o),
            None => {
                let o = Rc::new(self.table.possible_clauses(view, k));
                self.clauses.insert(key, Rc::clone(&o));
                o
            }
        };
        for (c, acc) in options.iter() {
            if self.table.clause_nodes(c) as f64 > bound || acc.is_empty() {
                continue;
            }
            if let Some(mut rest) = self.search(&view.minus(acc), k - 1, s) {
                rest.insert(0, c.clone());
                return Some(rest);
            }
            if self.timed_out {
                return None;
            }
        }
        self.memo.insert((view.clone(), k));
        None
    }
}

/// Searches for a DNF of at most `k` clauses, each within the size filter
/// `c0 * s * ln|T|`, over an explicit literal sequence.
pub fn dnf_search(literals: &[Literal], t: &BoolTask, k: u64, s: u64, c0: f64) -> Option<Dnf> {
    let table = indexed(literals, t);
    let mut clauses = ClauseCache::default();
    let mut search =
        DnfSearch { table: &table, clauses: &mut clauses, c0, memo: FxHashSet::default(), deadline: None, timed_out: false };
    let view = Bits::full(table.n_pos);
    search.search(&view, k, s).map(|cs| Dnf::new(cs.iter().map(|c| table.clause(c))))
}

/// Outer loop: for `s = 1, 2, ...` visits unvisited `(k, s')` cells with
/// `k <= c0 * s` and `s' <= s` in ascending `(k + s', k)` order, using the
/// literals of atoms with at most `s'` nodes.
pub fn dnf_solve(t: &BoolTask, g: &GrammarParams, cfg: &CondSolverConfig) -> Result<Dnf, SynthError> {
    dnf_solve_until(t, g, cfg, None)
}

pub fn dnf_solve_until(
    t: &BoolTask,
    g: &GrammarParams,
    cfg: &CondSolverConfig,
    deadline: Option<Instant>,
) -> Result<Dnf, SynthError> {
    if t.positives.is_empty() {
        return Ok(Dnf::falsity());
    }
    if t.negatives.is_empty() {
        return Ok(Dnf::truth());
    }
    let mut tables: HashMap<u64, (Table, ClauseCache)> = HashMap::new();
    let mut visited: HashSet<(u64, u64)> = HashSet::new();
    for s in 1..=cfg.s_cap {
        let k_l = (cfg.c0 * s as f64).ceil().max(1.0) as u64;
        let mut cells: Vec<(u64, u64)> = (1..=k_l)
            .flat_map(|k| (1..=s).map(move |sp| (k, sp)))
            .filter(|c| !visited.contains(c))
            .collect();
        cells.sort_by_key(|&(k, sp)| (k + sp, k));
        for (k, sp) in cells {
            visited.insert((k, sp));
            let (table, clauses) = tables.entry(sp).or_insert_with(|| {
                let atoms = enumerate_conditions(g, sp);
                (Table::new(literals_for(&atoms, t, cfg.literal_semantic_dedup), t), ClauseCache::default())
            });
            if table.lits.is_empty() {
                continue;
            }
            let mut search = DnfSearch {
                table,
                clauses,
                c0: cfg.c0,
                memo: FxHashSet::default(),
                deadline,
                timed_out: false,
            };
            let view = Bits::full(table.n_pos);
            if let Some(cs) = search.search(&view, k, s) {
                let d = Dnf::new(cs.iter().map(|c| table.clause(c)));
                debug_assert!(t.accepts(&d));
                return Ok(d);
            }
            if search.timed_out {
                return Err(SynthError::Timeout);
            }
        }
    }
    Err(SynthError::ConditionsExhausted { s_cap: cfg.s_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivating;

    fn ge(coeffs: &[(usize, i64)], c: i64) -> Literal {
        // sum >= c
        let lhs = LinearExpr::new(0, coeffs.iter().copied());
        Literal::positive(Atom::compare(&LinearExpr::constant(c), AtomOp::Le, &lhs).unwrap())
    }

    fn inputs(range: std::ops::Range<usize>) -> Vec<Vec<i64>> {
        motivating::examples()[range].iter().map(|(i, _)| i.clone()).collect()
    }

    fn c1_task() -> BoolTask {
        BoolTask::new(3, inputs(0..3), inputs(3..9)).unwrap()
    }

    fn paper_literals() -> Vec<Literal> {
        let l3 = ge(&[(1, 1), (2, 1)], 1).negate(); // y + z < 1
        let l5 = Literal::positive(Atom::new(LinearExpr::var(2), AtomOp::Le)); // z <= 0
        vec![ge(&[(0, 1), (1, 1)], 1), ge(&[(0, 1), (2, 1)], 1), l3, ge(&[(0, 1), (1, 1)], 0), l5]
    }

    #[test]
    fn clause_solver_picks_the_two_sum_atoms() {
        let ls = paper_literals();
        let got = clause_solve(&ls, &c1_task()).unwrap();
        assert_eq!(got, Clause::new([ls[0].clone(), ls[1].clone()]));
        let simplified =
            simplify_clause(&Clause::new([ls[0].clone(), ls[1].clone(), ls[3].clone()]), &c1_task());
        assert_eq!(simplified, Some(Clause::new([ls[0].clone(), ls[1].clone()])));
    }

    #[test]
    fn clause_solver_edges() {
        let no_neg = BoolTask::new(3, inputs(0..3), vec![]).unwrap();
        assert_eq!(clause_solve(&paper_literals(), &no_neg), Some(Clause::truth()));
        assert_eq!(clause_solve(&[], &c1_task()), None);
    }

    #[test]
    fn possible_clauses_meet_the_floor() {
        let t = BoolTask::new(3, inputs(3..6), inputs(6..9)).unwrap();
        let ls = paper_literals();
        let got = get_possible_clauses(&ls, &t, 2);
        assert!(got.iter().all(|c| {
            let n = t.positives().iter().filter(|i| c.eval(i).unwrap()).count();
            2 * n >= 3 && t.negatives().iter().all(|i| !c.eval(i).unwrap())
        }));
        // x + y >= 1 holds on e4 and e5 and rejects e7..e9
        let l1_only: Vec<bool> = t.positives().iter().map(|i| ls[0].eval(i).unwrap()).collect();
        assert!(got.iter().any(|c| {
            t.positives().iter().map(|i| c.eval(i).unwrap()).collect::<Vec<_>>() == l1_only
        }));
    }

    #[test]
    fn dnf_solver_separates_c1() {
        let g = motivating::grammar();
        let d = dnf_solve(&c1_task(), &g, &CondSolverConfig::default()).unwrap();
        assert!(c1_task().accepts(&d));
        let t = BoolTask::new(3, inputs(0..3), vec![]).unwrap();
        assert_eq!(dnf_solve(&t, &g, &CondSolverConfig::default()).unwrap(), Dnf::truth());
    }

    #[test]
    fn dnf_search_edges() {
        let t = c1_task();
        assert_eq!(dnf_search(&paper_literals(), &t, 0, 5, 2.0), None);
        let empty = BoolTask::new(3, vec![], inputs(3..9)).unwrap();
        assert_eq!(dnf_search(&paper_literals(), &empty, 0, 5, 2.0), Some(Dnf::falsity()));
        let c2 = BoolTask::new(3, inputs(3..6), inputs(6..9)).unwrap();
        let d = dnf_search(&paper_literals(), &c2, 2, 5, 2.0).unwrap();
        assert!(c2.accepts(&d));
    }

    #[test]
    fn enumeration_small_grammar() {
        let g = GrammarParams::new(1, -1, 1).unwrap();
        let atoms = enumerate_conditions(&g, 3);
        let x = LinearExpr::var(0);
        for a in [
            Atom::new(x.clone(), AtomOp::Le),
            Atom::new(x.clone(), AtomOp::Eq),
            Atom::new(x.clone(), AtomOp::Lt),
            Atom::new(LinearExpr::new(1, [(0, 1)]), AtomOp::Le),
            Atom::new(LinearExpr::new(-1, [(0, 1)]), AtomOp::Eq),
        ] {
            assert!(atoms.contains(&a), "{a}");
        }
        assert!(enumerate_conditions(&g, 2).is_empty());
    }

    #[test]
    fn enumeration_contains_pair_sums() {
        let atoms = enumerate_conditions(&motivating::grammar(), 5);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let lit = ge(&[(a, 1), (b, 1)], 1);
            assert!(atoms.contains(lit.atom()));
        }
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        assert!(BoolTask::new(1, vec![vec![1]], vec![vec![1]]).is_err());
    }
}
