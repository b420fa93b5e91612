//! Canonical-normal-form differential polynomials over jet space.
//!
//! An [`Expr`] is a finite sum of monomials with exact rational coefficients.
//! Monomial factors are jet coordinates, independent variables and symbolic
//! parameters, each raised to an [`Exponent`] that is affine in the
//! parameters. Like terms are always merged and terms are kept in a fixed
//! total order, so two normalized expressions are equal iff they are
//! structurally identical.

mod eval;
mod exponent;
mod expr;
mod raw;
mod symbol;

pub use eval::{NumericPoint, Number};
pub use exponent::Exponent;
pub use expr::{Expr, Monomial};
pub use raw::{normalize, to_raw, RawExpr};
pub use symbol::{Jet, MultiIndex, Symbol, Var};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Exact rational scalar used for every coefficient.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by a non-monomial expression")]
    NonMonomialDivisor,
    #[error("division by zero")]
    DivisionByZero,
    #[error("a sum can only be raised to a nonnegative integer power")]
    NonIntegerPowerOfSum,
    #[error("exponent would leave the affine class: {0}")]
    NonAffineExponent(String),
    #[error("no numeric assignment for `{0}`")]
    MissingAssignment(String),
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("non-integer exponent needs a positive base")]
    NonIntegerExponentNeedsPositiveBase,
}
