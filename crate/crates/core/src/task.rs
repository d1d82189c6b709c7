use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::TaskError;
use crate::expr::LinearExpr;
use crate::grammar::GrammarParams;
use crate::program::Program;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Example {
    pub input: Vec<i64>,
    pub output: i64,
}

impl Example {
    pub fn new(input: Vec<i64>, output: i64) -> Self {
        Example { input, output }
    }
}

/// An ordered, input-functional set of examples over a fixed grammar.
///
/// Exact duplicates are dropped on insertion; two examples sharing an input
/// with different outputs are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbeTask {
    grammar: GrammarParams,
    examples: Vec<Example>,
    index: HashMap<Vec<i64>, usize>,
}

impl PbeTask {
    pub fn empty(grammar: GrammarParams) -> Self {
        PbeTask { grammar, examples: Vec::new(), index: HashMap::new() }
    }

    pub fn new(
        grammar: GrammarParams,
        examples: impl IntoIterator<Item = Example>,
    ) -> Result<Self, TaskError> {
        let mut task = PbeTask::empty(grammar);
        for (i, ex) in examples.into_iter().enumerate() {
            task.push_numbered(ex, i)?;
        }
        Ok(task)
    }

    /// Adds an example; `Ok(false)` when it was already present.
    pub fn push(&mut self, ex: Example) -> Result<bool, TaskError> {
        let n = self.examples.len();
        self.push_numbered(ex, n)
    }

    fn push_numbered(&mut self, ex: Example, number: usize) -> Result<bool, TaskError> {
        if ex.input.len() != self.grammar.num_vars() {
            return Err(TaskError::Arity {
                index: number,
                expected: self.grammar.num_vars(),
                got: ex.input.len(),
            });
        }
        if let Some(&j) = self.index.get(&ex.input) {
            if self.examples[j].output == ex.output {
                return Ok(false);
            }
            return Err(TaskError::Conflict { first: j, second: number, input: ex.input });
        }
        self.index.insert(ex.input.clone(), self.examples.len());
        self.examples.push(ex);
        Ok(true)
    }

    pub fn grammar(&self) -> &GrammarParams {
        &self.grammar
    }

    pub fn arity(&self) -> usize {
        self.grammar.num_vars()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn output_for(&self, input: &[i64]) -> Option<i64> {
        self.index.get(input).map(|&i| self.examples[i].output)
    }

    /// The sub-task made of the given example indices, in the given order.
    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> PbeTask {
        let mut task = PbeTask::empty(self.grammar);
        for i in indices {
            task.push(self.examples[i].clone()).expect("a subset of a valid task is valid");
        }
        task
    }
}

/// Indices of the examples `e` reproduces exactly.
pub fn covered(e: &LinearExpr, examples: &[Example]) -> Vec<usize> {
    examples
        .iter()
        .enumerate()
        .filter(|(_, ex)| e.eval(&ex.input) == Ok(ex.output))
        .map(|(i, _)| i)
        .collect()
}

/// Whether `p` reproduces every example.
pub fn consistent(p: &Program, examples: &[Example]) -> bool {
    examples.iter().all(|ex| p.eval(&ex.input) == Ok(ex.output))
}
