use std::collections::BTreeSet;
use std::fmt;

use crate::error::EvalError;
use crate::expr::LinearExpr;
use crate::size::expr_nodes;

/// Comparison against zero: `lhs < 0`, `lhs <= 0` or `lhs = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomOp {
    Lt,
    Le,
    Eq,
}

/// A comparison atom `lhs op 0` in canonical form.
///
/// Strict comparisons are folded into `<=` (`l < 0` iff `l + 1 <= 0` over the
/// integers), coefficients are divided by their gcd, and equalities have a
/// positive leading coefficient. Atoms without variables collapse to the
/// canonical `0 <= 0` (true) or `1 <= 0` (false).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    lhs: LinearExpr,
    op: AtomOp,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

impl Atom {
    /// Canonicalizes `lhs op 0`. Returns `None` only on integer overflow.
    pub fn try_new(lhs: LinearExpr, op: AtomOp) -> Option<Atom> {
        match op {
            AtomOp::Lt => {
                let shifted = lhs.with_constant(lhs.constant_term().checked_add(1)?);
                Atom::try_new(shifted, AtomOp::Le)
            }
            AtomOp::Le => {
                if lhs.is_constant() {
                    return Some(Atom::truth(lhs.constant_term() <= 0));
                }
                let g = lhs.coeffs().fold(0, |g, (_, a)| gcd(g, a));
                let coeffs = lhs.coeffs().map(|(i, a)| (i, a / g));
                let c = div_ceil(lhs.constant_term(), g);
                Some(Atom { lhs: LinearExpr::new(c, coeffs), op: AtomOp::Le })
            }
            AtomOp::Eq => {
                if lhs.is_constant() {
                    return Some(Atom::truth(lhs.constant_term() == 0));
                }
                let g = lhs.coeffs().fold(0, |g, (_, a)| gcd(g, a));
                if lhs.constant_term() % g != 0 {
                    return Some(Atom::truth(false));
                }
                let sign = if lhs.coeffs().next().map_or(1, |(_, a)| a) < 0 { -1 } else { 1 };
                let coeffs = lhs.coeffs().map(|(i, a)| (i, sign * a / g));
                let c = sign * (lhs.constant_term() / g);
                Some(Atom { lhs: LinearExpr::new(c, coeffs), op: AtomOp::Eq })
            }
        }
    }

    pub fn new(lhs: LinearExpr, op: AtomOp) -> Atom {
        Atom::try_new(lhs, op).expect("overflow while canonicalizing atom")
    }

    /// `left op right`, i.e. `left - right op 0`.
    pub fn compare(left: &LinearExpr, op: AtomOp, right: &LinearExpr) -> Option<Atom> {
        Atom::try_new(left.checked_sub(right)?, op)
    }

    pub fn truth(value: bool) -> Atom {
        Atom { lhs: LinearExpr::constant(if value { 0 } else { 1 }), op: AtomOp::Le }
    }

    pub fn lhs(&self) -> &LinearExpr {
        &self.lhs
    }

    pub fn op(&self) -> AtomOp {
        self.op
    }

    /// `Some(v)` for atoms without variables.
    pub fn constant_value(&self) -> Option<bool> {
        self.lhs.is_constant().then(|| self.lhs.constant_term() <= 0)
    }

    pub fn eval(&self, input: &[i64]) -> Result<bool, EvalError> {
        let v = self.lhs.eval(input)?;
        Ok(match self.op {
            AtomOp::Lt => v < 0,
            AtomOp::Le => v <= 0,
            AtomOp::Eq => v == 0,
        })
    }

    /// Negation as a canonical literal. `<=` atoms negate to another atom;
    /// equalities need an explicit `not`.
    pub fn negate(&self) -> Literal {
        Literal::new(self.clone(), true)
    }

    /// Picks the cheapest way to write the atom as `left rel right` with
    /// non-negative coefficients on both sides.
    pub fn rendering(&self) -> Rendering {
        let mut all = self.renderings();
        let primary = all.remove(0);
        match all.pop() {
            Some(strict) if strict.nodes() < primary.nodes() => strict,
            _ => primary,
        }
    }

    /// Every way of writing the atom: as stored, and for `<=` atoms also as
    /// a strict comparison with the constant shifted by one.
    pub fn renderings(&self) -> Vec<Rendering> {
        let split = |lhs: &LinearExpr, rel: AtomOp| {
            let left = LinearExpr::new(
                lhs.constant_term().max(0),
                lhs.coeffs().filter(|&(_, a)| a > 0),
            );
            let right = LinearExpr::new(
                (-lhs.constant_term()).max(0),
                lhs.coeffs().filter(|&(_, a)| a < 0).map(|(i, a)| (i, -a)),
            );
            Rendering { rel, left, right }
        };
        let mut out = vec![split(&self.lhs, self.op)];
        if self.op == AtomOp::Le && !self.lhs.is_constant() {
            if let Some(c) = self.lhs.constant_term().checked_sub(1) {
                out.push(split(&self.lhs.with_constant(c), AtomOp::Lt));
            }
        }
        out
    }
}

/// `left rel right` where both sides only carry non-negative numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendering {
    pub rel: AtomOp,
    pub left: LinearExpr,
    pub right: LinearExpr,
}

impl Rendering {
    pub fn nodes(&self) -> u64 {
        1 + expr_nodes(&self.left) + expr_nodes(&self.right)
    }
}

/// A possibly negated atom. `<=` atoms are never stored negated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    atom: Atom,
    negated: bool,
}

impl Literal {
    pub fn new(atom: Atom, negated: bool) -> Literal {
        if !negated {
            return Literal { atom, negated };
        }
        if let Some(v) = atom.constant_value() {
            return Literal { atom: Atom::truth(!v), negated: false };
        }
        match atom.op {
            AtomOp::Eq => Literal { atom, negated: true },
            // not (l <= 0)  <=>  -l + 1 <= 0
            _ => {
                let flipped = atom
                    .lhs
                    .checked_neg()
                    .and_then(|l| Atom::try_new(l, AtomOp::Lt))
                    .expect("overflow while negating atom");
                Literal { atom: flipped, negated: false }
            }
        }
    }

    pub fn positive(atom: Atom) -> Literal {
        Literal { atom, negated: false }
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn negate(&self) -> Literal {
        if self.negated {
            Literal::positive(self.atom.clone())
        } else {
            self.atom.negate()
        }
    }

    pub fn eval(&self, input: &[i64]) -> Result<bool, EvalError> {
        Ok(self.atom.eval(input)? != self.negated)
    }
}

/// Conjunction of literals; the empty clause is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    literals: BTreeSet<Literal>,
}

impl Clause {
    pub fn truth() -> Clause {
        Clause::default()
    }

    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Clause {
        Clause { literals: literals.into_iter().collect() }
    }

    /// Like [`Clause::new`] but `None` when some literal occurs with both
    /// polarities or is constantly false.
    pub fn satisfiable(literals: impl IntoIterator<Item = Literal>) -> Option<Clause> {
        let mut set = BTreeSet::new();
        for l in literals {
            match l.atom.constant_value() {
                Some(v) if v != l.negated => continue,
                Some(_) => return None,
                None => {}
            }
            if set.contains(&l.negate()) {
                return None;
            }
            set.insert(l);
        }
        Some(Clause { literals: set })
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn eval(&self, input: &[i64]) -> Result<bool, EvalError> {
        for l in &self.literals {
            if !l.eval(input)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause { literals: self.literals.union(&other.literals).cloned().collect() }
    }
}

/// Disjunction of clauses; the empty DNF is `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dnf {
    clauses: Vec<Clause>,
}

impl Dnf {
    pub fn falsity() -> Dnf {
        Dnf::default()
    }

    pub fn truth() -> Dnf {
        Dnf { clauses: vec![Clause::truth()] }
    }

    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Dnf {
        Dnf { clauses: clauses.into_iter().collect() }
    }

    pub fn literal(l: Literal) -> Dnf {
        Dnf::new([Clause::new([l])])
    }

    pub fn atom(a: Atom) -> Dnf {
        Dnf::literal(Literal::positive(a))
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn eval(&self, input: &[i64]) -> Result<bool, EvalError> {
        for c in &self.clauses {
            if c.eval(input)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn or(&self, other: &Dnf) -> Dnf {
        let mut clauses = self.clauses.clone();
        for c in &other.clauses {
            if !clauses.contains(c) {
                clauses.push(c.clone());
            }
        }
        Dnf { clauses }
    }

    /// Distributes the conjunction into DNF, dropping unsatisfiable clauses.
    pub fn and(&self, other: &Dnf) -> Dnf {
        let mut clauses: Vec<Clause> = Vec::new();
        for a in &self.clauses {
            for b in &other.clauses {
                if let Some(c) = Clause::satisfiable(a.literals.iter().chain(&b.literals).cloned()) {
                    if !clauses.contains(&c) {
                        clauses.push(c);
                    }
                }
            }
        }
        Dnf { clauses }
    }

    /// De Morgan, re-expanded into DNF.
    pub fn negate(&self) -> Dnf {
        self.clauses.iter().fold(Dnf::truth(), |acc, clause| {
            let negated = Dnf::new(clause.literals().map(|l| Clause::new([l.negate()])));
            acc.and(&negated)
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::atom_to_sexp(self))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::literal_to_sexp(self))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::clause_to_sexp(self))
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::dnf_to_sexp(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: i64, coeffs: &[(usize, i64)]) -> LinearExpr {
        LinearExpr::new(c, coeffs.iter().copied())
    }

    #[test]
    fn strict_folds_into_non_strict() {
        // x < 0  ==  x + 1 <= 0
        let a = Atom::new(e(0, &[(0, 1)]), AtomOp::Lt);
        assert_eq!(a, Atom::new(e(1, &[(0, 1)]), AtomOp::Le));
        assert_eq!(a.op(), AtomOp::Le);
    }

    #[test]
    fn le_divides_gcd_and_rounds_constant() {
        // 2x + 4y - 3 <= 0  ==  x + 2y <= 1.5  ==  x + 2y - 1 <= 0
        let a = Atom::new(e(-3, &[(0, 2), (1, 4)]), AtomOp::Le);
        assert_eq!(a.lhs(), &e(-1, &[(0, 1), (1, 2)]));
        // 2x + 3 <= 0 == x <= -1.5 == x + 2 <= 0
        let b = Atom::new(e(3, &[(0, 2)]), AtomOp::Le);
        assert_eq!(b.lhs(), &e(2, &[(0, 1)]));
    }

    #[test]
    fn eq_normalizes_sign_and_detects_infeasible() {
        let a = Atom::new(e(4, &[(0, -2), (1, 2)]), AtomOp::Eq);
        assert_eq!(a.lhs(), &e(-2, &[(0, 1), (1, -1)]));
        let b = Atom::new(e(3, &[(0, 2)]), AtomOp::Eq);
        assert_eq!(b, Atom::truth(false));
    }

    #[test]
    fn constant_atoms() {
        assert_eq!(Atom::new(e(-2, &[]), AtomOp::Le), Atom::truth(true));
        assert_eq!(Atom::new(e(0, &[]), AtomOp::Lt), Atom::truth(false));
        assert_eq!(Atom::new(e(0, &[]), AtomOp::Eq), Atom::truth(true));
        assert_eq!(Atom::truth(true).constant_value(), Some(true));
    }

    #[test]
    fn negating_le_gives_an_atom() {
        let a = Atom::new(e(-1, &[(0, 1)]), AtomOp::Le); // x <= 1
        let n = a.negate();
        assert!(!n.is_negated());
        for x in -3..=3 {
            assert_eq!(n.eval(&[x]).unwrap(), x > 1);
        }
        let eq = Atom::new(e(0, &[(0, 1)]), AtomOp::Eq);
        assert!(eq.negate().is_negated());
        assert_eq!(eq.negate().negate(), Literal::positive(eq));
    }

    #[test]
    fn canonicalization_is_semantic() {
        let forms = [
            Atom::new(e(0, &[(0, 1), (1, 1)]), AtomOp::Lt),
            Atom::new(e(1, &[(0, 1), (1, 1)]), AtomOp::Le),
            Atom::new(e(2, &[(0, 2), (1, 2)]), AtomOp::Le),
            Atom::new(e(1, &[(0, 2), (1, 2)]), AtomOp::Lt),
        ];
        for f in &forms[1..] {
            assert_eq!(f, &forms[0]);
        }
    }

    #[test]
    fn empty_forms() {
        assert!(!Dnf::falsity().eval(&[1]).unwrap());
        assert!(Dnf::truth().eval(&[1]).unwrap());
        assert!(Clause::truth().eval(&[1]).unwrap());
    }

    #[test]
    fn dnf_negation_is_complement() {
        let a = Literal::positive(Atom::new(e(-1, &[(0, 1), (1, 1)]), AtomOp::Le));
        let b = Literal::positive(Atom::new(e(0, &[(0, 1)]), AtomOp::Eq)).negate();
        let c = Literal::positive(Atom::new(e(2, &[(1, 1)]), AtomOp::Le));
        let d = Dnf::new([Clause::new([a, b]), Clause::new([c])]);
        let n = d.negate();
        for x in -4..=4 {
            for y in -4..=4 {
                assert_ne!(d.eval(&[x, y]).unwrap(), n.eval(&[x, y]).unwrap());
            }
        }
    }

    #[test]
    fn contradictory_clause_is_dropped() {
        let eq = Literal::positive(Atom::new(e(0, &[(0, 1)]), AtomOp::Eq));
        assert!(Clause::satisfiable([eq.clone(), eq.negate()]).is_none());
        let d = Dnf::literal(eq.clone()).and(&Dnf::literal(eq.negate()));
        assert_eq!(d, Dnf::falsity());
    }
}
