//! Programming-by-example synthesis for conditional linear integer
//! arithmetic (CLIA).
//!
//! [`polygen_solve`] splits a task into a small set of linear terms and
//! unifies them into a decision list. [`eusolver_solve`] is the enumerative
//! baseline, and [`oracle`] drives both through counterexample and random
//! example loops.

mod bits;
pub mod bench;
pub mod cond;
pub mod condition;
pub mod domain;
pub mod error;
pub mod eusolver;
pub mod expr;
pub mod grammar;
pub mod motivating;
pub mod oracle;
pub mod program;
pub mod random;
pub mod size;
pub mod solver;
pub mod soundness;
pub mod task;
pub mod terms;
pub mod text;
pub mod unify;

pub use cond::{Atom, AtomOp, Clause, Dnf, Literal};
pub use error::{EvalError, GrammarError, ParseError, SizeError, SynthError, TaskError};
pub use expr::LinearExpr;
pub use grammar::GrammarParams;
pub use program::Program;
pub use size::{program_size, ProgramSize};
pub use task::{covered, Example, PbeTask};
pub use domain::{synth_min_linear, DomainSolverConfig};
pub use terms::{solve_terms, TermSolver, TermSolverConfig};
pub use condition::{
    clause_solve, dnf_solve, enumerate_conditions, get_possible_clauses, simplify_clause, BoolTask,
    CondSolverConfig,
};
pub use unify::{polygen_solve, unify, PolygenConfig};
pub use eusolver::{enum_terms, eusolver_solve, id3_unify, EusolverConfig};
pub use oracle::{cegis_loop, random_loop, verify_equiv, OracleConfig, OracleModel, SynthesisReport, Verdict};
pub use solver::{Eusolver, PbeSolver, PolyGen};
pub use bench::{run_matrix, Aggregate, MatrixReport, ReportRow};
