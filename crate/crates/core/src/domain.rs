//! Minimal-size linear fitting.
//!
//! Iterative deepening over the node count: for each budget every "shape"
//! (per variable: absent, `x`, `-x` or `k*x`; constant present or not) of
//! exactly that many nodes is tried. Fixed `±1` coefficients move to the
//! right-hand side, the remaining unknowns are solved with exact rational
//! elimination, and free unknowns are enumerated over their bounded domains.
//! The first budget with a solution is the minimum.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::task::Example;

type Q = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSolverConfig {
    /// Largest |coefficient| tried.
    pub coeff_cap: i64,
    /// Largest |constant| tried.
    pub const_cap: i64,
    /// Largest node count tried.
    pub size_cap: u64,
}

impl Default for DomainSolverConfig {
    fn default() -> Self {
        DomainSolverConfig { coeff_cap: 64, const_cap: 1024, size_cap: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Absent,
    Plus,
    Minus,
    Scaled,
}

impl Slot {
    fn nodes(self) -> u64 {
        match self {
            Slot::Absent => 0,
            Slot::Plus => 1,
            Slot::Minus => 2,
            Slot::Scaled => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Shape {
    pub slots: Vec<(usize, Slot)>,
    pub constant: bool,
}

fn shape_nodes(slots: &[(usize, Slot)], constant: bool) -> u64 {
    let nodes: u64 = slots.iter().map(|(_, s)| s.nodes()).sum::<u64>() + constant as u64;
    let operands = slots.iter().filter(|(_, s)| *s != Slot::Absent).count() as u64 + constant as u64;
    if operands == 0 {
        1
    } else {
        nodes + operands - 1
    }
}

/// All shapes over `live` variables with exactly `budget` nodes.
pub(crate) fn shapes(live: &[usize], budget: u64) -> Vec<Shape> {
    fn rec(live: &[usize], k: usize, acc: &mut Vec<(usize, Slot)>, budget: u64, out: &mut Vec<Shape>) {
        // lower bound on nodes so far, for pruning
        let used: u64 = acc.iter().map(|(_, s)| s.nodes()).sum::<u64>();
        let ops = acc.iter().filter(|(_, s)| *s != Slot::Absent).count() as u64;
        if used + ops.saturating_sub(1) > budget {
            return;
        }
        if k == live.len() {
            for constant in [false, true] {
                if shape_nodes(acc, constant) == budget {
                    out.push(Shape { slots: acc.clone(), constant });
                }
            }
            return;
        }
        for slot in [Slot::Absent, Slot::Plus, Slot::Minus, Slot::Scaled] {
            acc.push((live[k], slot));
            rec(live, k + 1, acc, budget, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(live, 0, &mut Vec::new(), budget, &mut out);
    out
}

/// Reduced row echelon form of `[a | b]`. Returns pivot columns, or `None`
/// when the system is inconsistent.
fn rref(rows: &mut Vec<Vec<Q>>, cols: usize) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != Q::from_integer(0)) else { continue };
        rows.swap(r, p);
        let inv = Q::from_integer(1) / rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != Q::from_integer(0) {
                let f = rows[i][c];
                for j in c..=cols {
                    let d = rows[r][j] * f;
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|row| row[cols] != Q::from_integer(0)) {
        return None;
    }
    rows.truncate(r);
    Some(pivots)
}

struct Fit<'a> {
    examples: &'a [Example],
    g: &'a GrammarParams,
    cfg: &'a DomainSolverConfig,
    arity: usize,
}

type Key = (usize, Vec<i64>, i64);

fn key(e: &LinearExpr, arity: usize) -> Key {
    (e.num_nonzero(), e.dense_coeffs(arity), e.constant_term())
}

impl Fit<'_> {
    fn coeff_ok(&self, a: i64) -> bool {
        a.abs() >= 2 && a.abs() <= self.cfg.coeff_cap && self.g.const_in_range(a)
    }

    fn const_ok(&self, c: i64) -> bool {
        c != 0 && c.abs() <= self.cfg.const_cap && self.g.const_in_range(c)
    }

    fn coeff_domain(&self) -> Vec<i64> {
        let cap = self.cfg.coeff_cap;
        (-cap..=cap).filter(|&a| self.coeff_ok(a)).collect()
    }

    fn const_domain(&self) -> Vec<i64> {
        let lo = self.g.const_min().max(-self.cfg.const_cap);
        let hi = self.g.const_max().min(self.cfg.const_cap);
        (lo..=hi).filter(|&c| c != 0).collect()
    }

    /// Best solution (by tie-break key) of one shape.
    fn solve_shape(&self, shape: &Shape) -> Option<LinearExpr> {
        let scaled: Vec<usize> =
            shape.slots.iter().filter(|(_, s)| *s == Slot::Scaled).map(|&(i, _)| i).collect();
        let unknowns = scaled.len() + shape.constant as usize;
        let base: Vec<(usize, i64)> = shape
            .slots
            .iter()
            .filter_map(|&(i, s)| match s {
                Slot::Plus => Some((i, 1)),
                Slot::Minus => Some((i, -1)),
                _ => None,
            })
            .collect();
        let rhs_of = |ex: &Example| -> i128 {
            ex.output as i128 - base.iter().map(|&(i, a)| a as i128 * ex.input[i] as i128).sum::<i128>()
        };
        let build = |vals: &[i64]| -> LinearExpr {
            let c = if shape.constant { vals[scaled.len()] } else { 0 };
            LinearExpr::new(c, base.iter().copied().chain(scaled.iter().copied().zip(vals.iter().copied())))
        };
        if unknowns == 0 {
            let ok = self.examples.iter().all(|ex| rhs_of(ex) == 0);
            return ok.then(|| build(&[]));
        }
        let mut rows: Vec<Vec<Q>> = self
            .examples
            .iter()
            .map(|ex| {
                let mut row: Vec<Q> = scaled.iter().map(|&i| Q::from_integer(ex.input[i] as i128)).collect();
                if shape.constant {
                    row.push(Q::from_integer(1));
                }
                row.push(Q::from_integer(rhs_of(ex)));
                row
            })
            .collect();
        let pivots = rref(&mut rows, unknowns)?;
        let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
        let is_const = |c: usize| shape.constant && c == scaled.len();
        let domains: Vec<Vec<i64>> = free
            .iter()
            .map(|&c| if is_const(c) { self.const_domain() } else { self.coeff_domain() })
            .collect();
        if domains.iter().any(|d| d.is_empty()) {
            return None;
        }
        let mut best: Option<LinearExpr> = None;
        let mut idx = vec![0usize; free.len()];
        let mut vals = vec![0i64; unknowns];
        'outer: loop {
            for (k, &c) in free.iter().enumerate() {
                vals[c] = domains[k][idx[k]];
            }
            let mut ok = true;
            for (r, &p) in pivots.iter().enumerate() {
                let mut v = rows[r][unknowns];
                for &c in &free {
                    v -= rows[r][c] * Q::from_integer(vals[c] as i128);
                }
                if !v.is_integer() || v.to_integer().abs() > i64::MAX as i128 {
                    ok = false;
                    break;
                }
                let v = v.to_integer() as i64;
                let valid = if is_const(p) { self.const_ok(v) } else { self.coeff_ok(v) };
                if !valid {
                    ok = false;
                    break;
                }
                vals[p] = v;
            }
            if ok {
                let e = build(&vals);
                if best.as_ref().is_none_or(|b| key(&e, self.arity) < key(b, self.arity)) {
                    best = Some(e);
                }
            }
            for k in (0..free.len()).rev() {
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        best
    }
}

/// A linear expression consistent with every example, of minimal size among
/// those within the caps; ties go to fewer variables, then the smaller dense
/// coefficient vector, then the smaller constant. `None` when no such
/// expression exists.
pub fn synth_min_linear(
    examples: &[Example],
    g: &GrammarParams,
    cfg: &DomainSolverConfig,
) -> Option<LinearExpr> {
    synth_min_linear_capped(examples, g, cfg, cfg.size_cap)
}

/// As [`synth_min_linear`], searching only up to `node_cap` nodes.
pub(crate) fn synth_min_linear_capped(
    examples: &[Example],
    g: &GrammarParams,
    cfg: &DomainSolverConfig,
    node_cap: u64,
) -> Option<LinearExpr> {
    if examples.is_empty() {
        return Some(LinearExpr::zero());
    }
    let arity = g.num_vars();
    if examples.iter().any(|ex| ex.input.len() != arity) {
        return None;
    }
    let live: Vec<usize> = (0..arity).filter(|&i| examples.iter().any(|ex| ex.input[i] != 0)).collect();
    if !affine_consistent(examples, &live) {
        return None;
    }
    let fit = Fit { examples, g, cfg, arity };
    let max_nodes = cfg.size_cap.min(node_cap).min(4 * live.len() as u64 + 1);
    for budget in 1..=max_nodes {
        let best = shapes(&live, budget)
            .iter()
            .filter_map(|s| fit.solve_shape(s))
            .min_by(|a, b| key(a, arity).cmp(&key(b, arity)));
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Whether some rational affine function of the live variables fits every
/// example; every shape is a restriction of this system.
fn affine_consistent(examples: &[Example], live: &[usize]) -> bool {
    let mut rows: Vec<Vec<Q>> = examples
        .iter()
        .map(|ex| {
            let mut row: Vec<Q> = live.iter().map(|&i| Q::from_integer(ex.input[i] as i128)).collect();
            row.push(Q::from_integer(1));
            row.push(Q::from_integer(ex.output as i128));
            row
        })
        .collect();
    rref(&mut rows, live.len() + 1).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::size::program_size;

    fn ex(input: &[i64], output: i64) -> Example {
        Example::new(input.to_vec(), output)
    }

    #[test]
    fn fits_x_plus_one_from_two_rows() {
        let g = GrammarParams::new(3, -1, 5).unwrap();
        let got = synth_min_linear(&[ex(&[0, 1, 2], 1), ex(&[1, 0, 2], 2)], &g, &DomainSolverConfig::default());
        assert_eq!(got, Some(LinearExpr::new(1, [(0, 1)])));
    }

    #[test]
    fn single_point_at_origin_is_a_constant() {
        let g = GrammarParams::new(3, -1, 5).unwrap();
        let got = synth_min_linear(&[ex(&[0, 0, 0], 5)], &g, &DomainSolverConfig::default());
        assert_eq!(got, Some(LinearExpr::constant(5)));
    }

    #[test]
    fn conflicting_rows_are_unrealizable() {
        let g = GrammarParams::new(1, -5, 5).unwrap();
        let cfg = DomainSolverConfig::default();
        assert_eq!(synth_min_linear(&[ex(&[0], 1), ex(&[0], 2)], &g, &cfg), None);
        assert_eq!(synth_min_linear(&[], &g, &cfg), Some(LinearExpr::zero()));
    }

    #[test]
    fn non_integer_solutions_are_rejected() {
        // 2x = 1 at x = 1 has no integer solution; 2x = 2 at x = 1 does
        let g = GrammarParams::new(1, -5, 5).unwrap();
        let cfg = DomainSolverConfig::default();
        assert_eq!(
            synth_min_linear(&[ex(&[2], 1), ex(&[4], 2)], &g, &cfg),
            None,
        );
        assert_eq!(
            synth_min_linear(&[ex(&[1], 3), ex(&[2], 6)], &g, &cfg),
            Some(LinearExpr::new(0, [(0, 3)]))
        );
    }

    #[test]
    fn respects_grammar_range() {
        // 7x fits but 7 is outside [-5, 5]
        let g = GrammarParams::new(1, -5, 5).unwrap();
        let cfg = DomainSolverConfig::default();
        assert_eq!(synth_min_linear(&[ex(&[1], 7), ex(&[2], 14)], &g, &cfg), None);
    }

    fn brute_min(examples: &[Example], g: &GrammarParams, cap: i64) -> Option<u64> {
        let mut best = None;
        for a0 in -cap..=cap {
            for a1 in -cap..=cap {
                for a2 in -cap..=cap {
                    let e = LinearExpr::from_dense(a0, &[a1, a2]);
                    if examples.iter().all(|x| e.eval(&x.input) == Ok(x.output)) {
                        if let Ok(s) = program_size(&e, g) {
                            best = Some(best.map_or(s, |b: u64| b.min(s)));
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_on_small_tasks() {
        let g = GrammarParams::new(2, -6, 6).unwrap();
        let cfg = DomainSolverConfig { coeff_cap: 6, const_cap: 6, size_cap: 64 };
        let pts: Vec<[i64; 2]> = vec![[0, 0], [1, -1], [2, 1], [-2, 3], [1, 2]];
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                for o1 in -3..=3 {
                    for o2 in -3..=3 {
                        let exs = [ex(p, o1), ex(q, o2)];
                        let got = synth_min_linear(&exs, &g, &cfg);
                        let want = brute_min(&exs, &g, 6);
                        assert_eq!(got.as_ref().map(|e| program_size(e, &g).unwrap()), want, "{exs:?}");
                        if let Some(e) = got {
                            assert!(exs.iter().all(|x| e.eval(&x.input) == Ok(x.output)));
                        }
                    }
                }
            }
        }
    }
}
