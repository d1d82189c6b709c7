//! The sampling term solver: decomposes a task into per-term sub-tasks by
//! fitting random small subsets of examples and backtracking over the fits.

use std::collections::HashSet;

use rustc_hash::{FxHashMap, FxHashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{synth_min_linear_capped, DomainSolverConfig};
use crate::error::SynthError;
use crate::expr::LinearExpr;
use crate::size::expr_nodes;
use crate::task::{Example, PbeTask};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermSolverConfig {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Upper bound on sampling turns per candidate call.
    pub turn_cap: u64,
    /// Largest outer parameter `s` tried.
    pub s_cap: u64,
    pub rng_seed: u64,
    /// Remember failed `(examples, k)` searches within a `(k, n_t)` cell.
    pub memoize: bool,
    pub domain: DomainSolverConfig,
}

impl Default for TermSolverConfig {
    fn default() -> Self {
        TermSolverConfig {
            c: 2.0,
            alpha: 1.0,
            beta: 0.0,
            turn_cap: 10_000,
            s_cap: 12,
            rng_seed: 0,
            memoize: true,
            domain: DomainSolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSolveFailure {
    pub error: SynthError,
    /// Terms of the largest partial cover seen.
    pub partial: Vec<LinearExpr>,
}

/// Solver state for one task: the fit cache and the RNG persist across all
/// `(k, n_t)` cells.
pub struct TermSolver<'a> {
    task: &'a PbeTask,
    cfg: TermSolverConfig,
    rng: ChaCha8Rng,
    /// Fit per sorted sample, with the node cap it was searched under.
    fits: FxHashMap<Vec<usize>, (Option<LinearExpr>, u64)>,
    memo: FxHashSet<(Vec<usize>, u64)>,
    deadline: Option<Instant>,
    timed_out: bool,
    stack: Vec<LinearExpr>,
    best: (usize, Vec<LinearExpr>),
}

impl<'a> TermSolver<'a> {
    pub fn new(task: &'a PbeTask, cfg: TermSolverConfig) -> Self {
        TermSolver {
            task,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            fits: FxHashMap::default(),
            memo: FxHashSet::default(),
            deadline: None,
            timed_out: false,
            stack: Vec::new(),
            best: (0, Vec::new()),
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    fn examples(&self) -> &'a [Example] {
        self.task.examples()
    }

    fn size_bound(&self, s: u64, n_t: u64) -> f64 {
        self.cfg.c * (s as f64).powf(self.cfg.alpha) * (n_t as f64).powf(self.cfg.beta)
    }

    /// Minimal fit of the sorted, deduplicated `sample` if it has at most
    /// `node_cap` nodes.
    fn fit(&mut self, sample: &[usize], node_cap: u64) -> Option<&LinearExpr> {
        let fresh = match self.fits.get(sample) {
            Some((Some(_), _)) => false,
            Some((None, searched)) => *searched < node_cap,
            None => true,
        };
        if fresh {
            let exs: Vec<Example> = sample.iter().map(|&i| self.examples()[i].clone()).collect();
            let r = synth_min_linear_capped(&exs, self.task.grammar(), &self.cfg.domain, node_cap);
            self.fits.insert(sample.to_vec(), (r, node_cap));
        }
        self.fits[sample].0.as_ref().filter(|e| expr_nodes(e) <= node_cap)
    }

    fn covered_in(&self, e: &LinearExpr, view: &[usize]) -> Vec<usize> {
        view.iter()
            .copied()
            .filter(|&i| {
                let ex = &self.examples()[i];
                e.eval(&ex.input) == Ok(ex.output)
            })
            .collect()
    }

    fn out_of_time(&mut self) -> bool {
        if !self.timed_out && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Fits of `n_t` examples sampled with replacement from `view`, kept when
    /// they cover at least `|view| / k` of `view` and respect the size bound.
    pub fn get_candidates(&mut self, view: &[usize], k: u64, n_t: u64, s: u64) -> Vec<LinearExpr> {
        let mut out: Vec<LinearExpr> = Vec::new();
        if view.is_empty() || k == 0 || n_t == 0 {
            return out;
        }
        let turns = (n_t as f64 * (k as f64).powf(n_t as f64)).min(self.cfg.turn_cap as f64) as u64;
        let node_cap = self.size_bound(s, n_t).floor() as u64;
        let mut sample = Vec::with_capacity(n_t as usize);
        for turn in 0..turns {
            if turn % 64 == 0 && self.out_of_time() {
                break;
            }
            sample.clear();
            sample.extend((0..n_t).map(|_| view[self.rng.gen_range(0..view.len())]));
            sample.sort_unstable();
            sample.dedup();
            let Some(p) = self.fit(&sample, node_cap) else { continue };
            if out.contains(p) {
                continue;
            }
            let p = p.clone();
            let cov = self.covered_in(&p, view).len();
            if cov as u64 * k >= view.len() as u64 {
                out.push(p);
            }
        }
        out
    }

    /// Backtracking search for at most `k` terms covering `view`.
    pub fn search(&mut self, view: &[usize], k: u64, n_t: u64, s: u64) -> Option<Vec<LinearExpr>> {
        let covered = self.examples().len() - view.len();
        if covered > self.best.0 {
            self.best = (covered, self.stack.clone());
        }
        if view.is_empty() {
            return Some(Vec::new());
        }
        let key = (view.to_vec(), k);
        if k == 0 || (self.cfg.memoize && self.memo.contains(&key)) || self.out_of_time() {
            return None;
        }
        for p in self.get_candidates(view, k, n_t, s) {
            let hit: HashSet<usize> = self.covered_in(&p, view).into_iter().collect();
            let rest: Vec<usize> = view.iter().copied().filter(|i| !hit.contains(i)).collect();
            self.stack.push(p.clone());
            let r = self.search(&rest, k - 1, n_t, s);
            self.stack.pop();
            if let Some(mut tail) = r {
                tail.insert(0, p);
                return Some(tail);
            }
        }
        if self.cfg.memoize {
            self.memo.insert(key);
        }
        None
    }

    /// Outer loop over `s`; within each `s`, unvisited `(k, n_t)` cells in
    /// ascending `(k + n_t, k)` order.
    pub fn solve(&mut self) -> Result<Vec<LinearExpr>, TermSolveFailure> {
        let all: Vec<usize> = (0..self.examples().len()).collect();
        if all.is_empty() {
            return Ok(Vec::new());
        }
        let ln_t = (all.len() as f64).ln().max(1.0);
        let mut visited: HashSet<(u64, u64)> = HashSet::new();
        let exponent = self.cfg.alpha / (1.0 - self.cfg.beta);
        for s in 1..=self.cfg.s_cap {
            let n_l = (self.cfg.c * (s as f64).powf(exponent)).ceil().max(1.0) as u64;
            let k_l = (self.cfg.c * s as f64 * ln_t).ceil().max(1.0) as u64;
            let mut cells: Vec<(u64, u64)> = (1..=k_l)
                .flat_map(|k| (1..=n_l).map(move |n| (k, n)))
                .filter(|c| !visited.contains(c))
                .collect();
            cells.sort_by_key(|&(k, n)| (k + n, k));
            for (k, n_t) in cells {
                visited.insert((k, n_t));
                self.memo.clear();
                if let Some(terms) = self.search(&all, k, n_t, s) {
                    return Ok(terms);
                }
                if self.timed_out {
                    return Err(self.failure(SynthError::Timeout));
                }
            }
        }
        Err(self.failure(SynthError::TermsExhausted {
            s_cap: self.cfg.s_cap,
            covered: self.best.0,
            total: self.examples().len(),
        }))
    }

    fn failure(&self, error: SynthError) -> TermSolveFailure {
        TermSolveFailure { error, partial: self.best.1.clone() }
    }
}

/// Terms jointly covering every example of `task`, in the order found.
pub fn solve_terms(task: &PbeTask, cfg: &TermSolverConfig) -> Result<Vec<LinearExpr>, TermSolveFailure> {
    TermSolver::new(task, *cfg).solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarParams;
    use crate::motivating;
    use crate::task::covered;

    fn cfg(seed: u64) -> TermSolverConfig {
        TermSolverConfig { rng_seed: seed, ..TermSolverConfig::default() }
    }

    #[test]
    fn motivating_task_needs_three_terms() {
        let task = motivating::task();
        for seed in 0..5 {
            let terms = solve_terms(&task, &cfg(seed)).unwrap();
            assert!(terms.len() <= 3, "seed {seed}: {terms:?}");
            let mut hit = vec![false; task.len()];
            for t in &terms {
                for i in covered(t, task.examples()) {
                    hit[i] = true;
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn search_edge_cases() {
        let task = motivating::task();
        let mut solver = TermSolver::new(&task, cfg(1));
        assert_eq!(solver.search(&[], 0, 1, 1), Some(vec![]));
        assert_eq!(solver.search(&[0, 1], 0, 1, 1), None);
    }

    #[test]
    fn single_example_fits_directly() {
        let g = GrammarParams::new(1, -2, 2).unwrap();
        let task = PbeTask::new(g, [Example::new(vec![3], 2)]).unwrap();
        let mut solver = TermSolver::new(&task, cfg(0));
        assert_eq!(solver.get_candidates(&[0], 1, 1, 1), vec![LinearExpr::constant(2)]);
    }

    #[test]
    fn reproducible_under_seed() {
        let task = motivating::task();
        assert_eq!(solve_terms(&task, &cfg(7)), solve_terms(&task, &cfg(7)));
    }
}
