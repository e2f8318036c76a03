//! Scalar abstractions shared by every numeric routine.
//!
//! Routines are written once against [`Field`] (exact or approximate
//! arithmetic) or [`Real`] (adds ordering and transcendental functions) and
//! instantiated with `f64`, [`BigReal`](crate::BigReal) or, for the
//! field-only routines, exact [`Rational`](crate::Rational).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary precision used for arbitrary-precision evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_BITS: u32 = 256;
    /// Precision used for the complete-monotonicity check.
    pub const MONOTONE_BITS: u32 = 1024;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Self { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Same context with `extra` guard bits added.
    pub fn guarded(self, extra: u32) -> Self {
        Self {
            bits: self.bits + extra,
        }
    }

    pub fn doubled(self) -> Self {
        Self {
            bits: self.bits * 2,
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            bits: Self::DEFAULT_BITS,
        }
    }
}

/// Arithmetic closed under the four operations.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64, pc: PrecisionContext) -> Self;
    fn from_bigint(v: &BigInt, pc: PrecisionContext) -> Self;
    fn from_rational(v: &BigRational, pc: PrecisionContext) -> Self;
    fn is_zero_value(&self) -> bool;

    /// Rounds (or widens) to the precision of `pc`. Identity for exact and
    /// fixed-width types.
    fn with_precision(&self, _pc: PrecisionContext) -> Self {
        self.clone()
    }
}

/// An ordered approximate field with the elementary transcendental functions.
pub trait Real: Field + PartialOrd {
    fn from_f64(v: f64, pc: PrecisionContext) -> Self;
    fn to_f64(&self) -> f64;

    /// Significand bits actually carried under `pc` (53 for `f64`).
    fn effective_bits(pc: PrecisionContext) -> u32;

    /// Precision this value carries (the default context for `f64`).
    fn context(&self) -> PrecisionContext;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn pi(pc: PrecisionContext) -> Self;
    fn is_finite(&self) -> bool;

    /// `self · 2^n`, exact.
    fn ldexp(&self, n: i32) -> Self;

    fn zero(pc: PrecisionContext) -> Self {
        Self::from_i64(0, pc)
    }

    fn one(pc: PrecisionContext) -> Self {
        Self::from_i64(1, pc)
    }

    /// `2^(-n)` at precision `pc`.
    fn exp2_neg(n: u32, pc: PrecisionContext) -> Self {
        Self::one(pc).ldexp(-(n as i32))
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.context());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Real power `self^p` for `self > 0`.
    fn powf(&self, p: &Self) -> Self {
        (self.ln() * p.clone()).exp()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Field for f64 {
    fn from_i64(v: i64, _pc: PrecisionContext) -> Self {
        v as f64
    }

    fn from_bigint(v: &BigInt, _pc: PrecisionContext) -> Self {
        v.to_f64().unwrap_or(if v.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    }

    fn from_rational(v: &BigRational, _pc: PrecisionContext) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn is_zero_value(&self) -> bool {
        *self == 0.0
    }
}

impl Real for f64 {
    fn from_f64(v: f64, _pc: PrecisionContext) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn effective_bits(_pc: PrecisionContext) -> u32 {
        f64::MANTISSA_DIGITS
    }

    fn context(&self) -> PrecisionContext {
        PrecisionContext::default()
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn pi(_pc: PrecisionContext) -> Self {
        std::f64::consts::PI
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn ldexp(&self, n: i32) -> Self {
        // powi(2, n) alone underflows for n < -1022 even when the product would not.
        let half = n / 2;
        self * 2f64.powi(half) * 2f64.powi(n - half)
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }

    fn powf(&self, p: &Self) -> Self {
        f64::powf(*self, *p)
    }
}

impl Field for BigRational {
    fn from_i64(v: i64, _pc: PrecisionContext) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(v: &BigInt, _pc: PrecisionContext) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn from_rational(v: &BigRational, _pc: PrecisionContext) -> Self {
        v.clone()
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// Parses an exact rational from `"3"`, `"-0.25"`, `"1e-4"`, `"2.5E3"` or `"1/4"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Domain(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let den: BigInt = d.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn precision_floor() {
        assert!(PrecisionContext::new(63).is_err());
        assert_eq!(PrecisionContext::new(64).unwrap().bits(), 64);
        assert_eq!(PrecisionContext::default().bits(), 256);
    }

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-2.5e1").unwrap(), q(-25, 1));
        assert_eq!(parse_rational("1e-4").unwrap(), q(1, 10_000));
        assert_eq!(parse_rational(" 3/12 ").unwrap(), q(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn f64_ldexp_handles_deep_exponents() {
        assert_eq!(1.0f64.ldexp(-1074), f64::from_bits(1));
        assert_eq!(3.0f64.ldexp(2), 12.0);
    }

    #[test]
    fn generic_powi() {
        assert_eq!(Real::powi(&3.0f64, 4), 81.0);
        assert_eq!(Real::powi(&3.0f64, 0), 1.0);
    }
}
