use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring of series coefficients.
///
/// Values carry whatever shape they need (e.g. a truncation order), so the
/// additive and multiplicative identities are produced from an existing
/// value.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, q: &BigRational) -> Self;
    /// Multiplicative inverse when `self` is a unit.
    fn inverse(&self) -> Option<Self>;
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Ring for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

/// Polynomial in ε with exact coefficients, truncated above degree `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsPoly {
    coeffs: Vec<BigRational>,
}

impl EpsPoly {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut p = Self::zero(order);
        p.coeffs[0] = c;
        p
    }

    /// Builds from coefficients of ε⁰, ε¹, …, padding or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &BigRational {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let order = self.order().min(rhs.order());
        Self {
            coeffs: (0..=order).map(|j| f(&self.coeffs[j], &rhs.coeffs[j])).collect(),
        }
    }
}

impl Ring for EpsPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.order())
    }
    fn one_like(&self) -> Self {
        Self::constant(BigRational::one(), self.order())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
    fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !Zero::is_zero(b) {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn scale(&self, q: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        let a0 = self.coeffs[0].inverse()?;
        let n = self.order();
        let mut r = vec![BigRational::zero(); n + 1];
        r[0] = a0.clone();
        for k in 1..=n {
            let s: BigRational = (1..=k).map(|i| &self.coeffs[i] * &r[k - i]).sum();
            r[k] = -(s * &a0);
        }
        Some(Self { coeffs: r })
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
