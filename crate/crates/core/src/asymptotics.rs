//! Growth constants of `φ(Y^k)`: the bound `c₀`, the prefactor `α₀`, the
//! Bessel-type asymptotic moment, and a saddle-point cross-check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Real};
use crate::specfun::{bessel_i1_kernel, lambert_w0};

const GUARD: u32 = 32;

fn check_sigma<R: Real>(sigma_sq: &R) -> Result<()> {
    if !(sigma_sq.clone() > R::zero(sigma_sq.context())) || !sigma_sq.is_finite() {
        return Err(Error::Domain(format!(
            "sigma_sq must be positive and finite, got {}",
            sigma_sq.to_f64()
        )));
    }
    Ok(())
}

/// `c₀ = σ√(1+σ²/4) + 2 log(σ/2 + √(1+σ²/4))`: `log φ(Y^k) / k → c₀`, and
/// the support of `log Y` is `[−c₀, c₀]`.
pub fn c0_of<R: Real>(sigma_sq: &R, pc: PrecisionContext) -> Result<R> {
    check_sigma(sigma_sq)?;
    let wp = pc.guarded(GUARD);
    let s2 = sigma_sq.with_precision(wp);
    let sigma = s2.sqrt();
    let root = (R::one(wp) + s2 / R::from_i64(4, wp)).sqrt();
    let half_sigma = sigma.clone() / R::from_i64(2, wp);
    let v = sigma * root.clone() + R::from_i64(2, wp) * (half_sigma + root).ln();
    Ok(v.with_precision(pc))
}

/// `α₀ = c₀^{3/2} / (2 σ^{3/2} (4+σ²)^{1/4})`.
pub fn alpha0_of<R: Real>(sigma_sq: &R, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let c0 = c0_of(sigma_sq, wp)?;
    let s2 = sigma_sq.with_precision(wp);
    let sigma = s2.sqrt();
    let quarter = (R::from_i64(4, wp) + s2).sqrt().sqrt();
    let v = c0.clone() * c0.sqrt()
        / (R::from_i64(2, wp) * sigma.clone() * sigma.sqrt() * quarter);
    Ok(v.with_precision(pc))
}

/// Leading-order asymptotic of `φ(Y^k)`: `2α₀ I₁(c₀k)/(c₀k)`.
pub fn moment_asymptotic<R: Real>(k: u32, sigma_sq: &R, pc: PrecisionContext) -> Result<R> {
    if k == 0 {
        return Err(Error::Domain("moment order k must be at least 1".into()));
    }
    let wp = pc.guarded(GUARD);
    let c0 = c0_of(sigma_sq, wp)?;
    let alpha0 = alpha0_of(sigma_sq, wp)?;
    let x = c0 * R::from_i64(k as i64, wp);
    Ok((alpha0 * bessel_i1_kernel(&x, wp)).with_precision(pc))
}

/// Order at which the saddle-point constants are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleOrder {
    Finite(u32),
    Infinite,
}

/// Constants describing the growth of `φ(Y^k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticConstants<R> {
    pub sigma_sq: R,
    pub c0: R,
    pub alpha0: R,
    /// Location of the dominant term of the moment sum, as a fraction of `k`.
    pub kappa: R,
}

impl<R: Real> AsymptoticConstants<R> {
    /// Closed-form `c₀` and `α₀`, with `κ` the exact saddle of the binomial
    /// moment sum: the root in `(0, 1)` of `κ² = σ²(1−κ)`.
    pub fn closed_form(sigma_sq: &R, pc: PrecisionContext) -> Result<Self> {
        let c0 = c0_of(sigma_sq, pc)?;
        let alpha0 = alpha0_of(sigma_sq, pc)?;
        let wp = pc.guarded(GUARD);
        let s2 = sigma_sq.with_precision(wp);
        let disc = (s2.clone() * s2.clone() + R::from_i64(4, wp) * s2.clone()).sqrt();
        let kappa = ((disc - s2) / R::from_i64(2, wp)).with_precision(pc);
        Ok(Self {
            sigma_sq: sigma_sq.with_precision(pc),
            c0,
            alpha0,
            kappa,
        })
    }

    /// Exponential rate of the dominant term at `κ`; equals `c₀` at the
    /// saddle.
    pub fn saddle_rate(sigma_sq: &R, kappa: &R, pc: PrecisionContext) -> R {
        let wp = pc.guarded(GUARD);
        let s2 = sigma_sq.with_precision(wp);
        let k = kappa.with_precision(wp);
        let one = R::one(wp);
        let rest = one.clone() - k.clone();
        let two = R::from_i64(2, wp);
        let v = s2.clone() / two.clone() + k.clone() * s2.ln() - two * k.clone() * k.ln() + k
            - rest.clone() * rest.ln();
        v.with_precision(pc)
    }
}

/// Saddle-point constants of the unit-variance moment sum under the normal
/// approximation of the binomial weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleConstants<R> {
    /// `κ = W₀(4·e^{2−4/k})/4`, or `W₀(4e²)/4` in the limit.
    pub kappa: R,
    /// `log 2 + κ + 2κ²`.
    pub c0: R,
    /// `α₀` from the closed form, for comparison.
    pub alpha0: R,
    /// `e^{c₀k}/(k√(2π(κ+1/4)k))`; `None` in the limit.
    pub moment: Option<R>,
}

pub fn saddle_constants<R: Real>(order: SaddleOrder, pc: PrecisionContext) -> Result<SaddleConstants<R>> {
    let wp = pc.guarded(GUARD);
    let four = R::from_i64(4, wp);
    let exponent = match order {
        SaddleOrder::Finite(0) => {
            return Err(Error::Domain("saddle order k must be at least 1".into()))
        }
        SaddleOrder::Finite(k) => R::from_i64(2, wp) - four.clone() / R::from_i64(k as i64, wp),
        SaddleOrder::Infinite => R::from_i64(2, wp),
    };
    let kappa = lambert_w0(&(four.clone() * exponent.exp()), wp)? / four.clone();
    let c0 = R::from_i64(2, wp).ln() + kappa.clone() + R::from_i64(2, wp) * kappa.clone() * kappa.clone();
    let moment = match order {
        SaddleOrder::Finite(k) => {
            let kk = R::from_i64(k as i64, wp);
            let quarter = R::one(wp) / four;
            let spread = (R::from_i64(2, wp) * R::pi(wp) * (kappa.clone() + quarter) * kk.clone()).sqrt();
            Some(((c0.clone() * kk.clone()).exp() / (kk * spread)).with_precision(pc))
        }
        SaddleOrder::Infinite => None,
    };
    Ok(SaddleConstants {
        kappa: kappa.with_precision(pc),
        c0: c0.with_precision(pc),
        alpha0: alpha0_of(&R::one(wp), pc)?,
        moment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::BigReal;
    use crate::scalar::Field;

    fn pc(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    #[test]
    fn unit_variance_constants() {
        let p = pc(128);
        let c0: f64 = c0_of(&1.0, p).unwrap();
        assert!((c0 - 2.080_457_638_869_1).abs() < 1e-12);
        let a0: f64 = alpha0_of(&1.0, p).unwrap();
        assert!((a0 - 1.003_380_875_9).abs() < 1e-9);
        let big: BigReal = c0_of(&BigReal::one(p), p).unwrap();
        assert!((big.to_f64() - c0).abs() < 1e-15);
        assert!(c0_of(&0.0, p).is_err());
        assert!(c0_of(&-1.0, p).is_err());
    }

    #[test]
    fn limiting_regimes() {
        let p = pc(128);
        let small = 1e-6;
        assert!((c0_of(&small, p).unwrap() / (2.0 * small.sqrt()) - 1.0).abs() < 1e-3);
        assert!((alpha0_of(&small, p).unwrap() - 1.0).abs() < 1e-3);
        let large = 1e6;
        assert!((c0_of(&large, p).unwrap() / (large / 2.0) - 1.0).abs() < 1e-2);
        let a = alpha0_of(&large, p).unwrap();
        assert!((a / (2f64.sqrt() * large.sqrt() / 8.0) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn c0_increasing() {
        let p = PrecisionContext::default();
        let mut last = 0.0;
        for i in 0..=80 {
            let s = 10f64.powf(-4.0 + 0.1 * i as f64);
            let c: f64 = c0_of(&s, p).unwrap();
            assert!(c > last);
            last = c;
        }
    }

    #[test]
    fn exact_saddle_reproduces_c0() {
        let p = pc(256);
        for s in ["1/4", "1", "4", "37/3", "1000"] {
            let s = BigReal::from_rational(&crate::scalar::parse_rational(s).unwrap(), p);
            let k = AsymptoticConstants::closed_form(&s, p).unwrap();
            assert!(k.kappa > BigReal::zero(p) && k.kappa < BigReal::one(p));
            let rate = AsymptoticConstants::saddle_rate(&s, &k.kappa, p);
            assert!(((rate - k.c0.clone()) / k.c0).abs() < BigReal::exp2_neg(240, p));
        }
    }

    #[test]
    fn normal_approximation_saddle() {
        let p = pc(128);
        let inf: SaddleConstants<f64> = saddle_constants(SaddleOrder::Infinite, p).unwrap();
        assert!((inf.kappa - 0.62).abs() < 0.005);
        assert!((inf.kappa - 0.619_650_084_9).abs() < 1e-9);
        assert!((inf.c0 - 2.0807).abs() < 1e-4);
        let c0: f64 = c0_of(&1.0, p).unwrap();
        assert!((inf.c0 - c0).abs() <= 3e-4);
        assert!(inf.moment.is_none());

        let fin: SaddleConstants<f64> = saddle_constants(SaddleOrder::Finite(200), p).unwrap();
        assert!(fin.kappa < inf.kappa);
        assert!(fin.moment.unwrap() > 0.0);
        assert!(saddle_constants::<f64>(SaddleOrder::Finite(0), p).is_err());
    }

    #[test]
    fn asymptotic_growth_rate() {
        let p = pc(256);
        let c0: f64 = c0_of(&1.0, p).unwrap();
        // log m_k / k = c₀ − (3/2) log k / k + O(1/k).
        let m: BigReal = moment_asymptotic(2000, &BigReal::one(p), p).unwrap();
        let rate = m.ln().to_f64() / 2000.0;
        assert!(rate < c0 && rate > c0 - 1e-2, "rate={rate}");
    }
}
