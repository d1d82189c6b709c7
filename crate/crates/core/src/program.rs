use std::fmt;

use crate::cond::Dnf;
use crate::error::EvalError;
use crate::expr::LinearExpr;

/// A CLIA program.
///
/// `IteTree`/`TreeLeaf` form the general conditional space; `DecisionList`
/// is the normal form where nesting only happens in the else branch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Program {
    Term(LinearExpr),
    DecisionList { branches: Vec<(Dnf, LinearExpr)>, default: LinearExpr },
    IteTree { cond: Dnf, then: Box<Program>, otherwise: Box<Program> },
    TreeLeaf(LinearExpr),
}

impl Program {
    pub fn ite(cond: Dnf, then: Program, otherwise: Program) -> Program {
        Program::IteTree { cond, then: Box::new(then), otherwise: Box::new(otherwise) }
    }

    pub fn eval(&self, input: &[i64]) -> Result<i64, EvalError> {
        match self {
            Program::Term(e) | Program::TreeLeaf(e) => e.eval(input),
            Program::DecisionList { branches, default } => {
                for (cond, term) in branches {
                    if cond.eval(input)? {
                        return term.eval(input);
                    }
                }
                default.eval(input)
            }
            Program::IteTree { cond, then, otherwise } => {
                if cond.eval(input)? {
                    then.eval(input)
                } else {
                    otherwise.eval(input)
                }
            }
        }
    }

    /// Number of conditional branches (`ite` nodes).
    pub fn branch_count(&self) -> usize {
        match self {
            Program::Term(_) | Program::TreeLeaf(_) => 0,
            Program::DecisionList { branches, .. } => branches.len(),
            Program::IteTree { then, otherwise, .. } => 1 + then.branch_count() + otherwise.branch_count(),
        }
    }

    /// Distinct leaf terms in first-occurrence order.
    pub fn terms(&self) -> Vec<LinearExpr> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms(&self, out: &mut Vec<LinearExpr>) {
        let mut push = |e: &LinearExpr| {
            if !out.contains(e) {
                out.push(e.clone());
            }
        };
        match self {
            Program::Term(e) | Program::TreeLeaf(e) => push(e),
            Program::DecisionList { branches, default } => {
                branches.iter().for_each(|(_, t)| push(t));
                push(default);
            }
            Program::IteTree { then, otherwise, .. } => {
                then.collect_terms(out);
                otherwise.collect_terms(out);
            }
        }
    }

    /// Decision-list normal form.
    ///
    /// Each distinct leaf term gets one branch whose condition is the
    /// disjunction of its root-to-leaf path conditions; the last distinct
    /// term becomes the default.
    pub fn to_decision_list(&self) -> Program {
        match self {
            Program::DecisionList { .. } => self.clone(),
            Program::Term(e) | Program::TreeLeaf(e) => {
                Program::DecisionList { branches: Vec::new(), default: e.clone() }
            }
            Program::IteTree { .. } => {
                let mut leaves: Vec<(LinearExpr, Dnf)> = Vec::new();
                collect_paths(self, Dnf::truth(), &mut leaves);
                let mut branches: Vec<(Dnf, LinearExpr)> = Vec::new();
                for (term, path) in leaves {
                    match branches.iter_mut().find(|(_, t)| *t == term) {
                        Some((cond, _)) => *cond = cond.or(&path),
                        None => branches.push((path, term)),
                    }
                }
                let (_, default) = branches.pop().expect("a tree has at least one reachable leaf");
                Program::DecisionList { branches, default }
            }
        }
    }
}

fn collect_paths(p: &Program, path: Dnf, out: &mut Vec<(LinearExpr, Dnf)>) {
    if path.clauses().is_empty() {
        return;
    }
    match p {
        Program::Term(e) | Program::TreeLeaf(e) => out.push((e.clone(), path)),
        Program::IteTree { cond, then, otherwise } => {
            collect_paths(then, path.and(cond), out);
            collect_paths(otherwise, path.and(&cond.negate()), out);
        }
        Program::DecisionList { branches, default } => {
            let mut rest = path;
            for (cond, term) in branches {
                let taken = rest.and(cond);
                if !taken.clauses().is_empty() {
                    out.push((term.clone(), taken));
                }
                rest = rest.and(&cond.negate());
                if rest.clauses().is_empty() {
                    return;
                }
            }
            out.push((default.clone(), rest));
        }
    }
}

impl From<LinearExpr> for Program {
    fn from(e: LinearExpr) -> Self {
        Program::Term(e)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::program_to_sexp(self))
    }
}
