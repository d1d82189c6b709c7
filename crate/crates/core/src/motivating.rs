//! The running three-variable example: nine input/output pairs split evenly
//! between the terms `x + 1`, `y + 1` and `z + 1`.

use crate::cond::{Atom, AtomOp, Dnf};
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;
use crate::task::{Example, PbeTask};

pub fn examples() -> Vec<(Vec<i64>, i64)> {
    vec![
        (vec![0, 1, 2], 1),
        (vec![1, 0, 2], 2),
        (vec![-1, 3, 2], 0),
        (vec![0, 2, 0], 3),
        (vec![-1, 3, 0], 4),
        (vec![-1, 1, -1], 2),
        (vec![0, 0, 1], 2),
        (vec![-3, 3, -2], -1),
        (vec![-1, 0, 4], 5),
    ]
}

/// Constants -1..5, the range the example outputs span.
pub fn grammar() -> GrammarParams {
    GrammarParams::new(3, -1, 5).expect("valid grammar")
}

pub fn task() -> PbeTask {
    PbeTask::new(grammar(), examples().into_iter().map(|(i, o)| Example::new(i, o)))
        .expect("valid task")
}

fn sum_at_least_one(a: usize, b: usize) -> Dnf {
    let sum = LinearExpr::new(0, [(a, 1), (b, 1)]);
    Dnf::atom(Atom::compare(&LinearExpr::constant(1), AtomOp::Le, &sum).expect("no overflow"))
}

/// `if x+y >= 1 then (if x+z >= 1 then x+1 else y+1)
///  else (if y+z >= 1 then z+1 else y+1)`
pub fn target() -> Program {
    let leaf = |i: usize| Program::TreeLeaf(LinearExpr::new(1, [(i, 1)]));
    Program::ite(
        sum_at_least_one(0, 1),
        Program::ite(sum_at_least_one(0, 2), leaf(0), leaf(1)),
        Program::ite(sum_at_least_one(1, 2), leaf(2), leaf(1)),
    )
}
