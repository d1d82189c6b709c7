use std::collections::BTreeMap;
use std::fmt;

use crate::error::EvalError;

/// An affine integer expression `a0 + a1*x1 + ... + an*xn`.
///
/// Zero coefficients are never stored, so structural equality coincides with
/// semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinearExpr {
    coeffs: BTreeMap<usize, i64>,
    constant: i64,
}

impl LinearExpr {
    pub fn zero() -> Self {
        LinearExpr::default()
    }

    pub fn constant(c: i64) -> Self {
        LinearExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(index: usize) -> Self {
        Self::new(0, [(index, 1)])
    }

    pub fn new(constant: i64, coeffs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, a) in coeffs {
            *map.entry(i).or_insert(0) += a;
        }
        map.retain(|_, a| *a != 0);
        LinearExpr { coeffs: map, constant }
    }

    /// Builds an expression from a dense coefficient vector.
    pub fn from_dense(constant: i64, coeffs: &[i64]) -> Self {
        Self::new(constant, coeffs.iter().copied().enumerate())
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, index: usize) -> i64 {
        self.coeffs.get(&index).copied().unwrap_or(0)
    }

    /// Nonzero coefficients in ascending variable order.
    pub fn coeffs(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&i, &a)| (i, a))
    }

    pub fn num_nonzero(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant == 0
    }

    /// One past the largest variable index referenced.
    pub fn min_arity(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, |&i| i + 1)
    }

    pub fn dense_coeffs(&self, arity: usize) -> Vec<i64> {
        (0..arity).map(|i| self.coeff(i)).collect()
    }

    pub fn eval(&self, input: &[i64]) -> Result<i64, EvalError> {
        let mut acc = self.constant;
        for (&i, &a) in &self.coeffs {
            let x = *input.get(i).ok_or(EvalError::Arity { index: i, got: input.len() })?;
            let term = a.checked_mul(x).ok_or(EvalError::Overflow)?;
            acc = acc.checked_add(term).ok_or(EvalError::Overflow)?;
        }
        Ok(acc)
    }

    pub fn checked_add(&self, other: &LinearExpr) -> Option<LinearExpr> {
        let mut map = self.coeffs.clone();
        for (&i, &a) in &other.coeffs {
            let e = map.entry(i).or_insert(0);
            *e = e.checked_add(a)?;
        }
        map.retain(|_, a| *a != 0);
        Some(LinearExpr { coeffs: map, constant: self.constant.checked_add(other.constant)? })
    }

    pub fn checked_neg(&self) -> Option<LinearExpr> {
        self.checked_scale(-1)
    }

    pub fn checked_scale(&self, k: i64) -> Option<LinearExpr> {
        if k == 0 {
            return Some(LinearExpr::zero());
        }
        let mut map = BTreeMap::new();
        for (&i, &a) in &self.coeffs {
            map.insert(i, a.checked_mul(k)?);
        }
        Some(LinearExpr { coeffs: map, constant: self.constant.checked_mul(k)? })
    }

    pub fn checked_sub(&self, other: &LinearExpr) -> Option<LinearExpr> {
        self.checked_add(&other.checked_neg()?)
    }

    pub(crate) fn with_constant(&self, constant: i64) -> LinearExpr {
        LinearExpr { coeffs: self.coeffs.clone(), constant }
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::expr_to_sexp(self))
    }
}
