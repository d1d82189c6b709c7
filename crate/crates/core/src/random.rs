//! Seeded generators for expressions, atoms and if-then-else trees, used by
//! property tests and the acceptance suite.

use rand::Rng;

use crate::cond::{Atom, AtomOp, Dnf};
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;

/// Coefficients and constant drawn from `[-r, r]`, clipped to the grammar's
/// constant range.
pub fn random_expr<R: Rng>(rng: &mut R, g: &GrammarParams, r: i64) -> LinearExpr {
    let lo = (-r).max(g.const_min());
    let hi = r.min(g.const_max());
    let pick = |rng: &mut R| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(lo..=hi) };
    let c = pick(rng);
    let coeffs: Vec<(usize, i64)> = (0..g.num_vars()).map(|i| (i, pick(rng))).collect();
    LinearExpr::new(c, coeffs)
}

/// A non-constant atom whose canonical form stays in the grammar range.
pub fn random_atom<R: Rng>(rng: &mut R, g: &GrammarParams, r: i64) -> Atom {
    loop {
        let lhs = random_expr(rng, g, r);
        let op = match rng.gen_range(0..3) {
            0 => AtomOp::Lt,
            1 => AtomOp::Le,
            _ => AtomOp::Eq,
        };
        if let Some(a) = Atom::try_new(lhs, op) {
            if a.constant_value().is_none() && a.lhs().coeffs().all(|(_, c)| g.const_in_range(c)) && g.const_in_range(a.lhs().constant_term()) {
                return a;
            }
        }
    }
}

/// An if-then-else tree of depth at most `depth` with single-atom
/// conditions.
pub fn random_tree<R: Rng>(rng: &mut R, g: &GrammarParams, depth: usize, r: i64) -> Program {
    if depth == 0 || rng.gen_bool(0.25) {
        return Program::TreeLeaf(random_expr(rng, g, r));
    }
    let cond = Dnf::atom(random_atom(rng, g, r));
    Program::ite(cond, random_tree(rng, g, depth - 1, r), random_tree(rng, g, depth - 1, r))
}

/// A chain of at most `max_ite` nested `ite`s, nesting in the else branch.
pub fn random_chain<R: Rng>(rng: &mut R, g: &GrammarParams, max_ite: usize, r: i64) -> Program {
    let depth = rng.gen_range(0..=max_ite);
    let mut p = Program::Term(random_expr(rng, g, r));
    for _ in 0..depth {
        let cond = Dnf::atom(random_atom(rng, g, r));
        p = Program::ite(cond, Program::TreeLeaf(random_expr(rng, g, r)), p);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::size::program_size;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_respect_grammar() {
        let g = GrammarParams::new(2, -2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_tree(&mut rng, &g, 3, 2);
            assert!(program_size(&p, &g).is_ok());
        }
    }
}
