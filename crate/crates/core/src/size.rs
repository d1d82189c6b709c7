//! The normalized size metric: `ceil(log2 N) * |p|`, where `|p|` counts the
//! grammar rules in the derivation of `p`.
//!
//! Node-count convention for linear expressions: a variable with coefficient
//! 1 is one node (`x`), with coefficient -1 two nodes (`- x`), any other
//! coefficient three (`* a x`). A nonzero constant is one node, and a sum of
//! `m` operands adds `m - 1` binary `+` nodes. The zero expression is the
//! single constant `0`.
//!
//! Comparisons are sized through [`Atom::rendering`]: one node for the
//! relation plus both sides, each side holding only non-negative numbers.
//! `and`/`or` are binary, `not` and `ite` are one node each, and the empty
//! clause/DNF (`true`/`false`) count as a single node.

use crate::cond::{Atom, Clause, Dnf, Literal};
use crate::error::SizeError;
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;

fn coeff_nodes(a: i64) -> u64 {
    match a {
        1 => 1,
        -1 => 2,
        _ => 3,
    }
}

/// `|e|` for a linear expression.
pub fn expr_nodes(e: &LinearExpr) -> u64 {
    let mut nodes: u64 = e.coeffs().map(|(_, a)| coeff_nodes(a)).sum();
    let mut operands = e.num_nonzero() as u64;
    if e.constant_term() != 0 {
        nodes += 1;
        operands += 1;
    }
    if operands == 0 {
        1
    } else {
        nodes + operands - 1
    }
}

fn check_vars(e: &LinearExpr, g: &GrammarParams) -> Result<(), SizeError> {
    match e.coeffs().map(|(i, _)| i).find(|&i| i >= g.num_vars()) {
        Some(index) => Err(SizeError::VariableOutOfRange { index, arity: g.num_vars() }),
        None => Ok(()),
    }
}

fn check_term_range(e: &LinearExpr, g: &GrammarParams) -> Result<(), SizeError> {
    check_vars(e, g)?;
    for (_, a) in e.coeffs() {
        if a.abs() != 1 && !g.const_in_range(a) {
            return Err(SizeError::ConstantOutOfRange(a));
        }
    }
    let c = e.constant_term();
    if c != 0 && !g.const_in_range(c) {
        return Err(SizeError::ConstantOutOfRange(c));
    }
    Ok(())
}

fn check_side_range(e: &LinearExpr, g: &GrammarParams) -> Result<(), SizeError> {
    check_vars(e, g)?;
    for (_, a) in e.coeffs() {
        if a != 1 && !g.magnitude_in_range(a) {
            return Err(SizeError::ConstantOutOfRange(a));
        }
    }
    let c = e.constant_term();
    if c != 0 && !g.magnitude_in_range(c) {
        return Err(SizeError::ConstantOutOfRange(c));
    }
    Ok(())
}

/// Anything with a derivation in the CLIA grammar.
pub trait ProgramSize {
    /// `|p|`: number of grammar rules in the derivation.
    fn node_count(&self) -> u64;

    /// Checks that every constant literal the derivation needs exists in `g`.
    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError>;

    /// `ceil(log2 N) * |p|`.
    fn size(&self, g: &GrammarParams) -> Result<u64, SizeError> {
        self.check_range(g)?;
        Ok(g.bits_per_rule() * self.node_count())
    }
}

impl ProgramSize for LinearExpr {
    fn node_count(&self) -> u64 {
        expr_nodes(self)
    }

    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        check_term_range(self, g)
    }
}

impl ProgramSize for Atom {
    fn node_count(&self) -> u64 {
        self.rendering().nodes()
    }

    /// In range when some rendering no larger than the cheapest one is;
    /// `not (x <= 2)` becomes `3 <= x`, which is also `2 < x`.
    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        let nodes = self.rendering().nodes();
        let mut first_err = None;
        for r in self.renderings().into_iter().filter(|r| r.nodes() <= nodes) {
            match check_side_range(&r.left, g).and_then(|_| check_side_range(&r.right, g)) {
                Ok(()) => return Ok(()),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.expect("an atom has at least one rendering"))
    }
}

impl ProgramSize for Literal {
    fn node_count(&self) -> u64 {
        self.atom().node_count() + self.is_negated() as u64
    }

    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        self.atom().check_range(g)
    }
}

impl ProgramSize for Clause {
    fn node_count(&self) -> u64 {
        if self.is_empty() {
            return 1;
        }
        self.literals().map(|l| l.node_count()).sum::<u64>() + self.len() as u64 - 1
    }

    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        self.literals().try_for_each(|l| l.check_range(g))
    }
}

impl ProgramSize for Dnf {
    fn node_count(&self) -> u64 {
        let clauses = self.clauses();
        if clauses.is_empty() {
            return 1;
        }
        clauses.iter().map(|c| c.node_count()).sum::<u64>() + clauses.len() as u64 - 1
    }

    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        self.clauses().iter().try_for_each(|c| c.check_range(g))
    }
}

impl ProgramSize for Program {
    fn node_count(&self) -> u64 {
        match self {
            Program::Term(e) | Program::TreeLeaf(e) => e.node_count(),
            Program::DecisionList { branches, default } => {
                branches.iter().map(|(c, t)| 1 + c.node_count() + t.node_count()).sum::<u64>()
                    + default.node_count()
            }
            Program::IteTree { cond, then, otherwise } => {
                1 + cond.node_count() + then.node_count() + otherwise.node_count()
            }
        }
    }

    fn check_range(&self, g: &GrammarParams) -> Result<(), SizeError> {
        match self {
            Program::Term(e) | Program::TreeLeaf(e) => e.check_range(g),
            Program::DecisionList { branches, default } => {
                for (c, t) in branches {
                    c.check_range(g)?;
                    t.check_range(g)?;
                }
                default.check_range(g)
            }
            Program::IteTree { cond, then, otherwise } => {
                cond.check_range(g)?;
                then.check_range(g)?;
                otherwise.check_range(g)
            }
        }
    }
}

/// Normalized size of any program fragment.
pub fn program_size<P: ProgramSize + ?Sized>(p: &P, g: &GrammarParams) -> Result<u64, SizeError> {
    p.size(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond::AtomOp;

    #[test]
    fn x_plus_one_in_toy_grammar_is_six() {
        let g = GrammarParams::with_operator_count(1, 0, 1, 1).unwrap();
        let e = LinearExpr::new(1, [(0, 1)]);
        assert_eq!(e.node_count(), 3);
        assert_eq!(program_size(&e, &g), Ok(6));
        assert_eq!(program_size(&LinearExpr::var(0), &g), Ok(2));
    }

    #[test]
    fn x_plus_one_is_three_rules_in_any_grammar() {
        for (vars, lo, hi) in [(1, -1, 1), (3, -5, 5), (7, 0, 12)] {
            let g = GrammarParams::new(vars, lo, hi).unwrap();
            let e = LinearExpr::new(1, [(0, 1)]);
            let bits = (g.rule_count() as f64).log2().ceil() as u64;
            assert_eq!(program_size(&e, &g), Ok(3 * bits));
        }
    }

    #[test]
    fn node_counts_of_terms() {
        assert_eq!(expr_nodes(&LinearExpr::zero()), 1);
        assert_eq!(expr_nodes(&LinearExpr::constant(-4)), 1);
        assert_eq!(expr_nodes(&LinearExpr::new(0, [(0, -1)])), 2);
        assert_eq!(expr_nodes(&LinearExpr::new(0, [(0, 3)])), 3);
        // 4x - y + z + 5: (3) + (2) + (1) + (1) + 3 pluses
        assert_eq!(expr_nodes(&LinearExpr::new(5, [(0, 4), (1, -1), (2, 1)])), 10);
    }

    #[test]
    fn range_errors() {
        let g = GrammarParams::new(2, -1, 5).unwrap();
        assert_eq!(
            program_size(&LinearExpr::constant(7), &g),
            Err(SizeError::ConstantOutOfRange(7))
        );
        assert_eq!(
            program_size(&LinearExpr::new(0, [(0, -2)]), &g),
            Err(SizeError::ConstantOutOfRange(-2))
        );
        assert!(program_size(&LinearExpr::new(0, [(0, -1)]), &g).is_ok());
        assert!(matches!(
            program_size(&LinearExpr::var(2), &g),
            Err(SizeError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn atom_sizes() {
        // x + y >= 1 is written (>= (+ x y) 1): five rules
        let a = Atom::compare(
            &LinearExpr::constant(1),
            AtomOp::Le,
            &LinearExpr::new(0, [(0, 1), (1, 1)]),
        )
        .unwrap();
        assert_eq!(a.node_count(), 5);
        // x < 0 is canonically x + 1 <= 0 but costs three rules
        let b = Atom::new(LinearExpr::var(0), AtomOp::Lt);
        assert_eq!(b.node_count(), 3);
        let eq = Atom::new(LinearExpr::new(0, [(0, 1), (1, -1)]), AtomOp::Eq);
        assert_eq!(eq.node_count(), 3);
        assert_eq!(eq.negate().node_count(), 4);
    }

    #[test]
    fn boolean_structure() {
        let l = Literal::positive(Atom::new(LinearExpr::var(0), AtomOp::Le));
        let m = Literal::positive(Atom::new(LinearExpr::var(1), AtomOp::Eq));
        assert_eq!(Clause::truth().node_count(), 1);
        assert_eq!(Dnf::falsity().node_count(), 1);
        let c = Clause::new([l.clone(), m.clone()]);
        assert_eq!(c.node_count(), 3 + 3 + 1);
        let d = Dnf::new([c.clone(), Clause::new([l])]);
        assert_eq!(d.node_count(), 7 + 3 + 1);
    }
}
