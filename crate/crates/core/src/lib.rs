//! The free multiplicative central limit: the law of `Y`, the limit of
//! normalized products of free positive elements whose logarithms have
//! variance `σ²`.
//!
//! Numeric routines are generic over [`scalar::Field`] / [`scalar::Real`] and
//! run on `f64`, arbitrary-precision [`BigReal`], or exact [`Rational`].

// `!(x > 0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bigreal;
pub mod error;
pub mod scalar;
pub mod momproblem;
pub mod moments;
pub mod radius;
pub mod rmt;
pub mod series;
pub mod specfun;

pub use bigreal::BigReal;
pub use error::{Error, Result};
pub use scalar::{Field, PrecisionContext, Real};

pub type Integer = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;
