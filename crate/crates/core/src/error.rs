use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar needs at least one input variable")]
    NoVariables,
    #[error("constant range [{const_min}, {const_max}] must contain 0")]
    ZeroNotInRange { const_min: i64, const_max: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("input has {got} values but variable x{index} is referenced")]
    Arity { index: usize, got: usize },
    #[error("integer overflow during evaluation")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SizeError {
    #[error("constant {0} is outside the grammar's constant range")]
    ConstantOutOfRange(i64),
    #[error("variable x{index} is outside the grammar's arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("example {index} has {got} inputs, expected {expected}")]
    Arity { index: usize, expected: usize, got: usize },
    #[error("examples {first} and {second} share input {input:?} but disagree on the output")]
    Conflict { first: usize, second: usize, input: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("term solver gave up at s = {s_cap}; best partial cover has {covered} of {total} examples")]
    TermsExhausted { s_cap: u64, covered: usize, total: usize },
    #[error("condition solver gave up at s = {s_cap}")]
    ConditionsExhausted { s_cap: u64 },
    #[error("no condition separates the remaining examples")]
    NoUsefulCondition,
    #[error("enumeration reached size {size_cap} without covering every example")]
    EnumerationExhausted { size_cap: u64 },
    #[error("time limit reached")]
    Timeout,
}
