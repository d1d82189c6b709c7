use serde::{Deserialize, Serialize};

use crate::error::GrammarError;

/// Operators of the CLIA grammar: `+`, `*`, unary `-`, `ite`, `<`, `<=`, `=`,
/// `and`, `or`, `not`.
pub const CLIA_OPERATOR_COUNT: u32 = 10;

/// Parameters of a CLIA grammar instance: arity, the range of constant
/// literals and the number of operator rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrammarParams {
    num_vars: usize,
    const_min: i64,
    const_max: i64,
    operator_count: u32,
}

impl GrammarParams {
    pub fn new(num_vars: usize, const_min: i64, const_max: i64) -> Result<Self, GrammarError> {
        Self::with_operator_count(num_vars, const_min, const_max, CLIA_OPERATOR_COUNT)
    }

    /// Grammar with a custom operator count, e.g. the single-`+` toy grammar
    /// used when checking the size metric by hand.
    pub fn with_operator_count(
        num_vars: usize,
        const_min: i64,
        const_max: i64,
        operator_count: u32,
    ) -> Result<Self, GrammarError> {
        if num_vars == 0 {
            return Err(GrammarError::NoVariables);
        }
        if const_min > 0 || const_max < 0 {
            return Err(GrammarError::ZeroNotInRange { const_min, const_max });
        }
        Ok(GrammarParams { num_vars, const_min, const_max, operator_count })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn const_min(&self) -> i64 {
        self.const_min
    }

    pub fn const_max(&self) -> i64 {
        self.const_max
    }

    pub fn operator_count(&self) -> u32 {
        self.operator_count
    }

    /// N: number of distinct grammar rules.
    pub fn rule_count(&self) -> u64 {
        self.num_vars as u64 + (self.const_max - self.const_min + 1) as u64 + self.operator_count as u64
    }

    /// ceil(log2 N), the per-rule encoding length.
    pub fn bits_per_rule(&self) -> u64 {
        let n = self.rule_count();
        (u64::BITS - (n - 1).leading_zeros()) as u64
    }

    pub fn const_in_range(&self, c: i64) -> bool {
        self.const_min <= c && c <= self.const_max
    }

    /// A non-negative magnitude that appears on one side of a comparison can be
    /// written either as itself or, moved across, as its negation.
    pub fn magnitude_in_range(&self, m: i64) -> bool {
        self.const_in_range(m) || self.const_in_range(-m)
    }

    /// Largest magnitude usable as a literal on a comparison side.
    pub fn max_magnitude(&self) -> i64 {
        self.const_max.max(-self.const_min)
    }
}
