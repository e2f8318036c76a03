use num_bigint::BigInt;
use num_rational::BigRational;

use super::ring::{EpsPoly, Ring};
use crate::error::{Error, Result};

/// Power series in `z` truncated above degree `order`, with coefficients in
/// a [`Ring`]. All arithmetic is exact in the coefficient ring; truncation
/// only drops degrees beyond the order.
#[derive(Clone, PartialEq, Debug)]
pub struct PowerSeries<C> {
    coeffs: Vec<C>,
}

/// Series in `z` over exact rationals.
pub type UnivariateSeries = PowerSeries<BigRational>;

/// Series in `z` whose coefficients are truncated polynomials in `ε`.
pub type BivariateSeries = PowerSeries<EpsPoly>;

impl<C: Ring> PowerSeries<C> {
    /// Series with the given coefficients of `z⁰, z¹, …`. Missing degrees up
    /// to `order` are filled with zeros shaped like `proto`.
    pub fn from_coeffs(mut coeffs: Vec<C>, order: usize, proto: &C) -> Self {
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, proto.zero_like());
        Self { coeffs }
    }

    pub fn zero(order: usize, proto: &C) -> Self {
        Self::from_coeffs(Vec::new(), order, proto)
    }

    pub fn one(order: usize, proto: &C) -> Self {
        Self::from_coeffs(vec![proto.one_like()], order, proto)
    }

    /// The series `z`.
    pub fn z(order: usize, proto: &C) -> Self {
        Self::from_coeffs(vec![proto.zero_like(), proto.one_like()], order, proto)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    fn proto(&self) -> &C {
        &self.coeffs[0]
    }

    /// Same series truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].add(&rhs.coeffs[i])).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].sub(&rhs.coeffs[i])).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(Ring::neg).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect(),
        }
    }

    pub fn scale_by(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut out = Self::zero(n, self.proto());
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        out
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0].inverse().ok_or_else(|| {
            Error::Domain("series reciprocal needs an invertible constant term".into())
        })?;
        let n = self.order();
        let mut r: Vec<C> = Vec::with_capacity(n + 1);
        r.push(a0.clone());
        for k in 1..=n {
            let mut s = a0.zero_like();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    s = s.add(&self.coeffs[i].mul(&r[k - i]));
                }
            }
            r.push(s.mul(&a0).neg());
        }
        Ok(Self { coeffs: r })
    }

    /// Drops the constant term and divides by `z`; the order falls by one.
    pub fn div_z(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.order() == 0 {
            return Err(Error::Domain("series is not divisible by z".into()));
        }
        Ok(Self {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Multiplies by `z`, keeping the order.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(self.proto().zero_like());
        coeffs.extend_from_slice(&self.coeffs[..self.order()]);
        Self { coeffs }
    }

    /// `self ∘ inner`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "composition needs an inner series without constant term".into(),
            ));
        }
        // Horner in the inner series.
        let n = self.order().min(inner.order());
        let mut acc = Self::zero(n, self.proto());
        for c in self.coeffs[..=n].iter().rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange–Bürmann:
    /// `g_n = (1/n) [w^{n−1}] (w/f(w))^n`.
    ///
    /// With ε-polynomial coefficients this inverts in `z` order by order in
    /// `ε`, which only needs the `ε⁰` part of the linear coefficient to be
    /// nonzero.
    pub fn invert(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "series inversion needs a zero constant term".into(),
            ));
        }
        let m = self.order();
        if m == 0 {
            return Ok(self.clone());
        }
        if self.coeffs[1].inverse().is_none() {
            return Err(Error::Domain(
                "series inversion needs an invertible linear coefficient".into(),
            ));
        }
        let w_over_f = self.div_z()?.reciprocal()?;
        let mut out = Self::zero(m, self.proto());
        let mut power = w_over_f.clone();
        for n in 1..=m {
            let inv_n = BigRational::new(BigInt::from(1), BigInt::from(n));
            out.coeffs[n] = power.coeffs[n - 1].scale(&inv_n);
            if n < m {
                power = power.mul(&w_over_f);
            }
        }
        Ok(out)
    }
}

impl UnivariateSeries {
    /// Truncated expansion of `num(z) / den(z)` for polynomial numerator and
    /// denominator given by ascending coefficients.
    pub fn rational_function(num: &[BigRational], den: &[BigRational], order: usize) -> Result<Self> {
        let proto = BigRational::from_integer(BigInt::from(0));
        let n = Self::from_coeffs(num.to_vec(), order, &proto);
        let d = Self::from_coeffs(den.to_vec(), order, &proto);
        Ok(n.mul(&d.reciprocal()?))
    }

    /// `exp(c·z)` truncated.
    pub fn exp_linear(c: &BigRational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = BigRational::from_integer(BigInt::from(1));
        coeffs.push(term.clone());
        for n in 1..=order {
            term = term * c / BigRational::from_integer(BigInt::from(n));
            coeffs.push(term.clone());
        }
        Self { coeffs }
    }
}

impl BivariateSeries {
    /// Empty series with `z` degrees `0..=z_order` and `ε` degrees `0..=eps_order`.
    pub fn new(z_order: usize, eps_order: usize) -> Self {
        Self::zero(z_order, &EpsPoly::zero(eps_order))
    }

    pub fn z_order(&self) -> usize {
        self.order()
    }

    pub fn eps_order(&self) -> usize {
        self.coeffs[0].order()
    }

    /// Coefficient of `z^i ε^j`.
    pub fn coeff_at(&self, i: usize, j: usize) -> &BigRational {
        self.coeffs[i].coeff(j)
    }

    /// The coefficient of `ε^j`, as a series in `z`.
    pub fn layer(&self, j: usize) -> UnivariateSeries {
        UnivariateSeries {
            coeffs: self.coeffs.iter().map(|c| c.coeff(j).clone()).collect(),
        }
    }

    /// Assembles a series from its `ε` layers (layer `j` is the coefficient of `ε^j`).
    pub fn from_layers(layers: &[UnivariateSeries]) -> Self {
        let eps_order = layers.len().saturating_sub(1);
        let z_order = layers.iter().map(|l| l.order()).min().unwrap_or(0);
        Self {
            coeffs: (0..=z_order)
                .map(|i| {
                    EpsPoly::from_coeffs(layers.iter().map(|l| l.coeffs[i].clone()).collect(), eps_order)
                })
                .collect(),
        }
    }

    /// Shifts every coefficient down by `s` powers of `ε` (multiplies by
    /// `ε^{−s}`); the lowest `s` layers must vanish.
    pub fn eps_shift_down(&self, s: usize) -> Result<Self> {
        let e = self.eps_order();
        if s > e {
            return Err(Error::Domain("shift exceeds the eps order".into()));
        }
        let layers: Vec<UnivariateSeries> = (0..=e).map(|j| self.layer(j)).collect();
        if layers[..s].iter().any(|l| l.coeffs.iter().any(|c| !Ring::is_zero(c))) {
            return Err(Error::Domain(format!(
                "eps layers below {s} are not zero; cannot divide by eps^{s}"
            )));
        }
        Ok(Self::from_layers(&layers[s..]))
    }
}

#[cfg(test)]
mod tests {
    use super::super::ring::rat;
    use super::*;

    fn uni(c: &[(i64, i64)], order: usize) -> UnivariateSeries {
        UnivariateSeries::from_coeffs(c.iter().map(|&(n, d)| rat(n, d)).collect(), order, &rat(0, 1))
    }

    #[test]
    fn mobius_pair() {
        // z/(1−z) = z + z² + …  inverts to z/(1+z).
        let m = 12;
        let f = UnivariateSeries::rational_function(&[rat(0, 1), rat(1, 1)], &[rat(1, 1), rat(-1, 1)], m)
            .unwrap();
        let g = f.invert().unwrap();
        let want =
            UnivariateSeries::rational_function(&[rat(0, 1), rat(1, 1)], &[rat(1, 1), rat(1, 1)], m).unwrap();
        assert_eq!(g, want);
        assert_eq!(f.compose(&g).unwrap(), UnivariateSeries::z(m, &rat(0, 1)));
    }

    #[test]
    fn invert_rejects_degenerate() {
        assert!(uni(&[(1, 1), (1, 1)], 4).invert().is_err());
        assert!(uni(&[(0, 1), (0, 1), (1, 1)], 4).invert().is_err());
    }

    #[test]
    fn exp_series() {
        let e = UnivariateSeries::exp_linear(&rat(2, 1), 4);
        assert_eq!(e, uni(&[(1, 1), (2, 1), (2, 1), (4, 3), (2, 3)], 4));
        let inv = UnivariateSeries::exp_linear(&rat(-2, 1), 4);
        assert_eq!(e.mul(&inv), UnivariateSeries::one(4, &rat(0, 1)));
    }

    #[test]
    fn bivariate_layers_round_trip() {
        let a = uni(&[(0, 1), (1, 1), (3, 2)], 5);
        let b = uni(&[(0, 1), (0, 1), (-1, 7)], 5);
        let s = BivariateSeries::from_layers(&[a.clone(), b.clone()]);
        assert_eq!(s.layer(0), a);
        assert_eq!(s.layer(1), b);
        assert_eq!(s.coeff_at(2, 1), &rat(-1, 7));
        assert_eq!(s.eps_order(), 1);
        assert!(s.eps_shift_down(1).is_err());
    }
}
