//! Exact arbitrary-precision rational and multivariate-polynomial arithmetic.
//!
//! Every symbolic coefficient in the pipeline lives here: sparse polynomials
//! over `BigRational` in exactly two indeterminates, and rational functions
//! kept in canonical form with factored denominators. No floating point.

mod poly;
mod ratfun;

pub use poly::{Monomial, Polynomial};
pub use ratfun::RationalFunction;

use serde::{Deserialize, Serialize};

/// The two variable contexts the pipeline uses.
///
/// Cumulant recursion happens over `(m, alpha)`; the final entropy formulas
/// live over `(m, n)` after the substitution `alpha := n - m`. Expressions
/// from different contexts never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarContext {
    /// Variables `m`, `alpha` (dimension and dimension difference).
    MAlpha,
    /// Variables `m`, `n` (the two subsystem dimensions).
    MN,
}

impl VarContext {
    /// Ordered variable names of this context.
    pub fn variables(self) -> [&'static str; 2] {
        match self {
            VarContext::MAlpha => ["m", "alpha"],
            VarContext::MN => ["m", "n"],
        }
    }
}

/// Errors from exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("context mismatch: {0:?} vs {1:?}")]
    ContextMismatch(VarContext, VarContext),
    #[error("division by zero rational function")]
    DivisionByZero,
    #[error("pole: denominator vanishes at evaluation point")]
    Pole,
}
