//! Decision-list unification and the complete PolyGen pipeline.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::condition::{dnf_solve_until, BoolTask, CondSolverConfig};
use crate::cond::Dnf;
use crate::error::SynthError;
use crate::expr::LinearExpr;
use crate::program::Program;
use crate::size::program_size;
use crate::soundness;
use crate::task::{Example, PbeTask};
use crate::terms::{TermSolver, TermSolverConfig};

/// The condition for `terms[i]`: true where only `terms[i]` (among
/// `terms[i..]`) is correct, false where `terms[i]` is wrong. Examples that a
/// later term also covers are left out.
pub fn build_condition_task(terms: &[LinearExpr], i: usize, examples: &[Example], arity: usize) -> BoolTask {
    let hits = |e: &LinearExpr, ex: &Example| e.eval(&ex.input) == Ok(ex.output);
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for ex in examples {
        if !hits(&terms[i], ex) {
            negatives.push(ex.input.clone());
        } else if !terms[i + 1..].iter().any(|t| hits(t, ex)) {
            positives.push(ex.input.clone());
        }
    }
    BoolTask::new(arity, positives, negatives).expect("inputs of a task are distinct")
}

/// Builds `if c1 then t1 else if c2 then t2 ... else tm` with one DNF per
/// term except the last. Requires `terms` to cover `task`.
pub fn unify(terms: &[LinearExpr], task: &PbeTask, cfg: &CondSolverConfig) -> Result<Program, SynthError> {
    unify_until(terms, task, cfg, None)
}

pub fn unify_until(
    terms: &[LinearExpr],
    task: &PbeTask,
    cfg: &CondSolverConfig,
    deadline: Option<Instant>,
) -> Result<Program, SynthError> {
    let Some((last, init)) = terms.split_last() else {
        return Ok(Program::DecisionList { branches: Vec::new(), default: LinearExpr::zero() });
    };
    let mut residual: Vec<Example> = task.examples().to_vec();
    let mut branches: Vec<(Dnf, LinearExpr)> = Vec::with_capacity(init.len());
    for i in 0..init.len() {
        let bt = build_condition_task(terms, i, &residual, task.arity());
        let cond = if bt.positives().is_empty() {
            Dnf::falsity()
        } else {
            dnf_solve_until(&bt, task.grammar(), cfg, deadline)?
        };
        residual.retain(|ex| cond.eval(&ex.input) != Ok(true));
        branches.push((cond, terms[i].clone()));
    }
    Ok(Program::DecisionList { branches, default: last.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygenConfig {
    pub terms: TermSolverConfig,
    pub conditions: CondSolverConfig,
    /// Term sets up to this size are unified in every order and the smallest
    /// program kept; larger sets use emission order.
    pub order_search_cap: usize,
}

impl Default for PolygenConfig {
    fn default() -> Self {
        PolygenConfig {
            terms: TermSolverConfig::default(),
            conditions: CondSolverConfig::default(),
            order_search_cap: 3,
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Term solving followed by unification; the result is checked against
/// every example of `task`.
pub fn polygen_solve(task: &PbeTask, cfg: &PolygenConfig, seed: u64) -> Result<Program, SynthError> {
    polygen_solve_until(task, cfg, seed, None)
}

pub fn polygen_solve_until(
    task: &PbeTask,
    cfg: &PolygenConfig,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<Program, SynthError> {
    let term_cfg = TermSolverConfig { rng_seed: seed, ..cfg.terms };
    let terms = TermSolver::new(task, term_cfg)
        .with_deadline(deadline)
        .solve()
        .map_err(|f| f.error)?;
    let program = if terms.len() > 1 && terms.len() <= cfg.order_search_cap {
        smallest_unification(&terms, task, cfg, deadline)?
    } else {
        match unify_until(&terms, task, &cfg.conditions, deadline) {
            Err(SynthError::Timeout) => return Err(SynthError::Timeout),
            Err(_) => {
                let reversed: Vec<LinearExpr> = terms.iter().rev().cloned().collect();
                unify_until(&reversed, task, &cfg.conditions, deadline)?
            }
            Ok(p) => p,
        }
    };
    soundness::record(&program, task.examples());
    Ok(program)
}

/// Unifies every ordering of `terms`; ties go to the earliest ordering,
/// starting with emission order.
fn smallest_unification(
    terms: &[LinearExpr],
    task: &PbeTask,
    cfg: &PolygenConfig,
    deadline: Option<Instant>,
) -> Result<Program, SynthError> {
    let mut best: Option<(u64, Program)> = None;
    let mut last_err = None;
    for perm in permutations(terms.len()) {
        let ordered: Vec<LinearExpr> = perm.iter().map(|&i| terms[i].clone()).collect();
        match unify_until(&ordered, task, &cfg.conditions, deadline) {
            Ok(p) => {
                let size = program_size(&p, task.grammar()).unwrap_or(u64::MAX);
                if best.as_ref().is_none_or(|(b, _)| size < *b) {
                    best = Some((size, p));
                }
            }
            Err(SynthError::Timeout) => return Err(SynthError::Timeout),
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some((_, p)), _) => Ok(p),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one ordering is tried"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarParams;
    use crate::motivating;
    use crate::task::consistent;

    fn xyz() -> Vec<LinearExpr> {
        (0..3).map(|i| LinearExpr::new(1, [(i, 1)])).collect()
    }

    #[test]
    fn first_condition_task_splits_groups() {
        let t = motivating::task();
        let bt = build_condition_task(&xyz(), 0, t.examples(), 3);
        let inputs = |r: std::ops::Range<usize>| -> Vec<Vec<i64>> {
            t.examples()[r].iter().map(|e| e.input.clone()).collect()
        };
        assert_eq!(bt.positives(), inputs(0..3).as_slice());
        assert_eq!(bt.negatives(), inputs(3..9).as_slice());
    }

    #[test]
    fn shared_examples_are_dont_care() {
        let g = GrammarParams::new(1, -3, 3).unwrap();
        let t = PbeTask::new(g, [Example::new(vec![0], 0), Example::new(vec![2], 2), Example::new(vec![1], 0)])
            .unwrap();
        let terms = vec![LinearExpr::var(0), LinearExpr::zero()];
        let bt = build_condition_task(&terms, 0, t.examples(), 1);
        assert_eq!(bt.positives(), &[vec![2]]);
        assert_eq!(bt.negatives(), &[vec![1]]);
    }

    #[test]
    fn unify_motivating_terms() {
        let t = motivating::task();
        let p = unify(&xyz(), &t, &CondSolverConfig::default()).unwrap();
        assert!(consistent(&p, t.examples()));
        assert_eq!(p.branch_count(), 2);
        assert_eq!(p.terms(), xyz());
    }

    #[test]
    fn single_term_is_a_bare_default() {
        let t = motivating::task().subset([0, 1, 2]);
        let x1 = LinearExpr::new(1, [(0, 1)]);
        let p = unify(std::slice::from_ref(&x1), &t, &CondSolverConfig::default()).unwrap();
        assert_eq!(p, Program::DecisionList { branches: vec![], default: x1 });
    }

    #[test]
    fn end_to_end_motivating() {
        let t = motivating::task();
        for seed in 0..3 {
            let p = polygen_solve(&t, &PolygenConfig::default(), seed).unwrap();
            assert!(consistent(&p, t.examples()));
            assert!(p.branch_count() <= 2);
        }
    }

    #[test]
    fn permutations_are_sorted_and_complete() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn order_search_is_no_larger_than_emission_order() {
        let t = motivating::task();
        let cfg = PolygenConfig::default();
        let g = t.grammar();
        let searched = smallest_unification(&xyz(), &t, &cfg, None).unwrap();
        for perm in permutations(3) {
            let ordered: Vec<LinearExpr> = perm.iter().map(|&i| xyz()[i].clone()).collect();
            let p = unify(&ordered, &t, &cfg.conditions).unwrap();
            assert!(program_size(&searched, g).unwrap() <= program_size(&p, g).unwrap());
        }
        assert!(consistent(&searched, t.examples()));
    }
}
