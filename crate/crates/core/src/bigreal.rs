//! Arbitrary-precision real backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;

use crate::scalar::{Field, PrecisionContext, Real};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    // Cached constants (pi, ln 2, ...) used by exp/ln; per thread, never shared.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary floating-point number with a caller-chosen significand width.
///
/// Binary operations round to the wider of the two operand precisions.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    bits: u32,
}

impl BigReal {
    fn wrap(value: BigFloat, bits: u32) -> Self {
        Self { value, bits }
    }

    fn p(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_nan(&self) -> bool {
        self.value.is_nan()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn inner(&self) -> &BigFloat {
        &self.value
    }

    /// Decimal scientific notation rounded to `digits` significant digits,
    /// e.g. `1.6487212707e0`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.value.is_nan() {
            return "NaN".into();
        }
        if self.value.is_inf() {
            return if self.value.is_negative() { "-inf" } else { "inf" }.into();
        }
        if self.value.is_zero() {
            return "0".into();
        }
        let digits = digits.max(1);
        let full = with_consts(|cc| self.value.format(Radix::Dec, RM, cc))
            .unwrap_or_else(|_| "NaN".into());
        round_decimal(&full, digits)
    }
}

/// Rounds astro-float's `[-]d.ddd...e[+-]x` output to `digits` significant digits.
fn round_decimal(full: &str, digits: usize) -> String {
    let (negative, body) = match full.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, full),
    };
    let (mant, exp) = body.split_once('e').unwrap_or((body, "0"));
    let mut exp: i64 = exp.trim_start_matches('+').parse().unwrap_or(0);
    let mut ds: Vec<u8> = mant
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();
    // Leading zeros can appear for some formatting paths.
    while ds.len() > 1 && ds[0] == 0 {
        ds.remove(0);
        exp -= 1;
    }
    if ds.len() > digits {
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && *ds.last().unwrap() == 0 {
        ds.pop();
    }
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        out.push('.');
        out.extend(ds[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{exp}"));
    out
}

fn bigint_to_bigfloat(v: &BigInt, bits: u32) -> BigFloat {
    let (sign, words) = v.to_u64_digits();
    if words.is_empty() {
        return BigFloat::from_word(0, bits as usize);
    }
    let words: Vec<Word> = words.into_iter().map(|w| w as Word).collect();
    let s = if sign == IntSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let e = (words.len() * Word::BITS as usize) as i32;
    let mut f = BigFloat::from_words(&words, s, e);
    f.set_precision(bits as usize, RM)
        .expect("precision within astro-float limits");
    f
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} bits)", self.to_sci_string(30), self.bits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.bits as f64) * std::f64::consts::LOG10_2) as usize);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal::wrap(self.value.$method(&rhs.value, bits as usize, RM), bits)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-self.value, self.bits)
    }
}

impl Field for BigReal {
    fn from_i64(v: i64, pc: PrecisionContext) -> Self {
        BigReal::wrap(BigFloat::from_i64(v, pc.bits() as usize), pc.bits())
    }

    fn from_bigint(v: &BigInt, pc: PrecisionContext) -> Self {
        BigReal::wrap(bigint_to_bigfloat(v, pc.bits()), pc.bits())
    }

    fn from_rational(v: &BigRational, pc: PrecisionContext) -> Self {
        // Operands carry guard bits so the quotient is correctly rounded up to
        // a couple of ulps.
        let g = pc.guarded(64).bits();
        let n = bigint_to_bigfloat(v.numer(), g);
        let d = bigint_to_bigfloat(v.denom(), g);
        BigReal::wrap(n.div(&d, pc.bits() as usize, RM), pc.bits())
    }

    fn is_zero_value(&self) -> bool {
        self.value.is_zero()
    }

    fn with_precision(&self, pc: PrecisionContext) -> Self {
        let mut v = self.value.clone();
        v.set_precision(pc.bits() as usize, RM)
            .expect("precision within astro-float limits");
        BigReal::wrap(v, pc.bits())
    }
}

impl Real for BigReal {
    fn from_f64(v: f64, pc: PrecisionContext) -> Self {
        BigReal::wrap(BigFloat::from_f64(v, pc.bits() as usize), pc.bits())
    }

    fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf() {
            return if self.value.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        if self.value.is_zero() {
            return 0.0;
        }
        let (words, _, sign, exponent, _) = self.value.as_raw_parts().expect("finite value");
        let top = *words.last().expect("non-empty mantissa");
        // Value is 0.m × 2^exponent with the top mantissa bit set.
        let mag = (top as f64).ldexp(exponent - 64);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    fn effective_bits(pc: PrecisionContext) -> u32 {
        pc.bits()
    }

    fn context(&self) -> PrecisionContext {
        PrecisionContext::new(self.bits).expect("BigReal carries at least 64 bits")
    }

    fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }

    fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }

    fn sqrt(&self) -> Self {
        BigReal::wrap(self.value.sqrt(self.p(), RM), self.bits)
    }

    fn abs(&self) -> Self {
        BigReal::wrap(self.value.abs(), self.bits)
    }

    fn pi(pc: PrecisionContext) -> Self {
        let v = with_consts(|cc| cc.pi(pc.bits() as usize, RM));
        BigReal::wrap(v, pc.bits())
    }

    fn is_finite(&self) -> bool {
        !self.value.is_nan() && !self.value.is_inf()
    }

    fn ldexp(&self, n: i32) -> Self {
        if self.value.is_zero() || !self.is_finite() {
            return self.clone();
        }
        let mut v = self.value.clone();
        let e = v.exponent().expect("finite value");
        v.set_exponent(e + n);
        BigReal::wrap(v, self.bits)
    }
}
