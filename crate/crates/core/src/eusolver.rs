//! The enumerative baseline: terms in increasing size with distinct covered
//! sets, unified by an ID3 decision tree.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cond::{Atom, Dnf};
use crate::condition::enumerate_conditions;
use crate::domain::{shapes, Slot};
use crate::error::SynthError;
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;
use crate::soundness;
use crate::task::{covered, Example, PbeTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EusolverConfig {
    /// Largest term node count enumerated.
    pub term_size_cap: u64,
    /// Largest condition node count enumerated.
    pub cond_size_cap: u64,
    pub coeff_cap: i64,
    pub const_cap: i64,
    pub max_depth: usize,
}

impl Default for EusolverConfig {
    fn default() -> Self {
        EusolverConfig { term_size_cap: 20, cond_size_cap: 16, coeff_cap: 64, const_cap: 1024, max_depth: 64 }
    }
}

/// All expressions with exactly `nodes` nodes, in canonical order.
fn exprs_with_nodes(g: &GrammarParams, cfg: &EusolverConfig, nodes: u64) -> Vec<LinearExpr> {
    let coeffs: Vec<i64> = (-cfg.coeff_cap..=cfg.coeff_cap)
        .filter(|a| a.abs() >= 2 && g.const_in_range(*a))
        .collect();
    let consts: Vec<i64> = (g.const_min().max(-cfg.const_cap)..=g.const_max().min(cfg.const_cap))
        .filter(|&c| c != 0)
        .collect();
    let live: Vec<usize> = (0..g.num_vars()).collect();
    let mut out = Vec::new();
    for shape in shapes(&live, nodes) {
        let mut partial: Vec<LinearExpr> = vec![LinearExpr::zero()];
        for &(i, slot) in &shape.slots {
            let choices: Vec<i64> = match slot {
                Slot::Absent => continue,
                Slot::Plus => vec![1],
                Slot::Minus => vec![-1],
                Slot::Scaled => coeffs.clone(),
            };
            partial = partial
                .iter()
                .flat_map(|e| choices.iter().map(move |&a| LinearExpr::new(e.constant_term(), e.coeffs().chain([(i, a)]))))
                .collect();
        }
        if shape.constant {
            partial = partial
                .iter()
                .flat_map(|e| consts.iter().map(move |&c| LinearExpr::new(c, e.coeffs())))
                .collect();
        }
        out.extend(partial);
    }
    out.sort();
    out
}

/// Terms in increasing size, each admitted when its covered set is nonempty
/// and differs from every earlier one, until the union covers `examples`.
/// `Err` carries the partial set when the size cap is reached first.
pub fn enum_terms(
    examples: &[Example],
    g: &GrammarParams,
    cfg: &EusolverConfig,
) -> Result<Vec<LinearExpr>, Vec<LinearExpr>> {
    enum_terms_until(examples, g, cfg, None).map_err(|(_, partial)| partial)
}

fn enum_terms_until(
    examples: &[Example],
    g: &GrammarParams,
    cfg: &EusolverConfig,
    deadline: Option<Instant>,
) -> Result<Vec<LinearExpr>, (SynthError, Vec<LinearExpr>)> {
    let mut terms = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut hit = vec![false; examples.len()];
    let mut remaining = examples.len();
    if remaining == 0 {
        return Ok(terms);
    }
    for nodes in 1..=cfg.term_size_cap {
        for (n, e) in exprs_with_nodes(g, cfg, nodes).into_iter().enumerate() {
            if n % 1024 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return Err((SynthError::Timeout, terms));
            }
            let cov = covered(&e, examples);
            if cov.is_empty() || seen.contains(&cov) {
                continue;
            }
            for &i in &cov {
                if !hit[i] {
                    hit[i] = true;
                    remaining -= 1;
                }
            }
            seen.push(cov);
            terms.push(e);
            if remaining == 0 {
                return Ok(terms);
            }
        }
    }
    Err((SynthError::EnumerationExhausted { size_cap: cfg.term_size_cap }, terms))
}

fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

struct Id3<'a> {
    examples: &'a [Example],
    /// `cover[j][i]`: term `j` is correct on example `i`.
    cover: Vec<Vec<bool>>,
    terms: &'a [LinearExpr],
    truth: Vec<Vec<bool>>,
    atoms: &'a [Atom],
    max_depth: usize,
}

impl Id3<'_> {
    fn label_entropy(&self, idx: &[usize]) -> f64 {
        let counts: Vec<usize> = self.cover.iter().map(|c| idx.iter().filter(|&&i| c[i]).count()).collect();
        entropy(&counts)
    }

    fn build(&self, idx: &[usize], depth: usize) -> Result<Program, SynthError> {
        if let Some(j) = (0..self.terms.len()).find(|&j| idx.iter().all(|&i| self.cover[j][i])) {
            return Ok(Program::TreeLeaf(self.terms[j].clone()));
        }
        if depth >= self.max_depth {
            return Err(SynthError::NoUsefulCondition);
        }
        let base = self.label_entropy(idx);
        let n = idx.len() as f64;
        let mut best: Option<(f64, usize)> = None;
        for (a, row) in self.truth.iter().enumerate() {
            let (yes, no): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| row[i]);
            if yes.is_empty() || no.is_empty() {
                continue;
            }
            let gain = base
                - (yes.len() as f64 / n) * self.label_entropy(&yes)
                - (no.len() as f64 / n) * self.label_entropy(&no);
            if best.is_none_or(|(g, _)| gain > g + 1e-12) {
                best = Some((gain, a));
            }
        }
        let (_, a) = best.ok_or(SynthError::NoUsefulCondition)?;
        let (yes, no): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.truth[a][i]);
        Ok(Program::ite(
            Dnf::atom(self.atoms[a].clone()),
            self.build(&yes, depth + 1)?,
            self.build(&no, depth + 1)?,
        ))
    }
}

/// ID3 over single-atom conditions. Leaves are the first term correct on
/// every example reaching them.
pub fn id3_unify(
    terms: &[LinearExpr],
    examples: &[Example],
    conditions: &[Atom],
    max_depth: usize,
) -> Result<Program, SynthError> {
    let cover = terms
        .iter()
        .map(|t| examples.iter().map(|ex| t.eval(&ex.input) == Ok(ex.output)).collect())
        .collect();
    let truth = conditions
        .iter()
        .map(|a| examples.iter().map(|ex| a.eval(&ex.input).unwrap_or(false)).collect())
        .collect();
    let id3 = Id3 { examples, cover, terms, truth, atoms: conditions, max_depth };
    let all: Vec<usize> = (0..id3.examples.len()).collect();
    id3.build(&all, 0)
}

/// Term enumeration followed by ID3 with progressively larger condition
/// sets.
pub fn eusolver_solve(
    task: &PbeTask,
    cfg: &EusolverConfig,
    deadline: Option<Instant>,
) -> Result<Program, SynthError> {
    let g = task.grammar();
    let terms = enum_terms_until(task.examples(), g, cfg, deadline).map_err(|(e, _)| e)?;
    let program = if terms.len() <= 1 {
        Program::Term(terms.into_iter().next().unwrap_or_else(LinearExpr::zero))
    } else {
        let mut result = Err(SynthError::NoUsefulCondition);
        let mut last_count = 0;
        for bound in 1..=cfg.cond_size_cap {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(SynthError::Timeout);
            }
            let atoms = enumerate_conditions(g, bound);
            if atoms.len() == last_count {
                continue;
            }
            last_count = atoms.len();
            result = id3_unify(&terms, task.examples(), &atoms, cfg.max_depth);
            if result.is_ok() {
                break;
            }
        }
        result?
    };
    soundness::record(&program, task.examples());
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivating;
    use crate::task::consistent;

    #[test]
    fn constants_come_first_on_motivating_task() {
        let t = motivating::task();
        let terms = enum_terms(t.examples(), t.grammar(), &EusolverConfig::default()).unwrap();
        assert!(terms.len() >= 7);
        for c in -1..=5 {
            assert!(terms.contains(&LinearExpr::constant(c)), "missing {c}");
        }
    }

    #[test]
    fn never_reaches_x_plus_one_when_constants_suffice() {
        let n = 6;
        let g = GrammarParams::new(1, 0, n + 1).unwrap();
        let exs: Vec<Example> = (1..=n).map(|x| Example::new(vec![x], x + 1)).collect();
        let terms = enum_terms(&exs, &g, &EusolverConfig::default()).unwrap();
        assert_eq!(terms, (2..=n + 1).map(LinearExpr::constant).collect::<Vec<_>>());
    }

    #[test]
    fn single_example_gives_smallest_fit() {
        let g = GrammarParams::new(2, -2, 2).unwrap();
        let exs = [Example::new(vec![3, 4], 4)];
        assert_eq!(enum_terms(&exs, &g, &EusolverConfig::default()).unwrap(), vec![LinearExpr::var(1)]);
    }

    #[test]
    fn id3_builds_consistent_tree() {
        let t = motivating::task();
        let terms: Vec<LinearExpr> = (0..3).map(|i| LinearExpr::new(1, [(i, 1)])).collect();
        let atoms = enumerate_conditions(t.grammar(), 5);
        let p = id3_unify(&terms, t.examples(), &atoms, 64).unwrap();
        assert!(consistent(&p, t.examples()));
        let one = id3_unify(&terms[..1], &t.examples()[..3], &atoms, 64).unwrap();
        assert_eq!(one, Program::TreeLeaf(terms[0].clone()));
        assert_eq!(id3_unify(&terms, t.examples(), &atoms, 0), Err(SynthError::NoUsefulCondition));
    }

    #[test]
    fn full_baseline_is_consistent() {
        let t = motivating::task();
        let p = eusolver_solve(&t, &EusolverConfig::default(), None).unwrap();
        assert!(consistent(&p, t.examples()));
    }
}
