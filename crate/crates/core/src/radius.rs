//! Implied radii: the radius of the log-semicircle (or semicircle) law whose
//! `k`-th moment matches that of `Y` (or `log Y`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::c0_of;
use crate::error::{Error, Result};
use crate::moments::{log_moment_exact, moment_y, ModelParams};
use crate::scalar::{PrecisionContext, Real};
use crate::specfun::{bessel_i1_kernel, bessel_i1_kernel_derivative, catalan};

const GUARD: u32 = 32;
const MAX_ITER: usize = 400;
const MONOTONE_SAMPLES: usize = 8;

/// Which moments are matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusKind {
    /// `2I₁(kr)/(kr) = φ(Y^k)`.
    YMoment,
    /// `C_k (r/2)^{2k} = φ(log^{2k} Y)`.
    LogMoment,
}

/// Catalan index used on the semicircle side of the log-moment match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalanIndex {
    /// `C_k`, the `2k`-th semicircle moment coefficient.
    #[default]
    K,
    /// `C_{2k}`.
    TwoK,
}

/// The bracket `[10⁻⁶, 64σ² + 8]` for the y-kind root.
fn bracket<R: Real>(params: &ModelParams, wp: PrecisionContext) -> (R, R) {
    let lo = R::from_f64(1e-6, wp);
    let hi = params.sigma_sq_as::<R>(wp) * R::from_i64(64, wp) + R::from_i64(8, wp);
    (lo, hi)
}

/// Unique `r > 0` with `2I₁(kr)/(kr) = φ(Y^k)`.
///
/// Newton on `log(2I₁(kr)/(kr)) − log φ(Y^k)` starting at `c₀`, falling back
/// to bisection whenever a step leaves the current bracket. The objective
/// is checked to increase across the bracket first.
pub fn implied_radius_y<R: Real>(k: u32, params: &ModelParams, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let target: R = moment_y(k, params, wp)?;
    let log_target = target.ln();
    let kk = R::from_i64(k as i64, wp);
    let objective = |r: &R| bessel_i1_kernel(&(r.clone() * kk.clone()), wp).ln() - log_target.clone();

    let (mut lo, mut hi) = bracket::<R>(params, wp);
    let mut prev: Option<R> = None;
    let log_lo = lo.ln();
    let log_step = (hi.ln() - log_lo.clone()) / R::from_i64(MONOTONE_SAMPLES as i64 - 1, wp);
    for i in 0..MONOTONE_SAMPLES {
        let r = (log_lo.clone() + log_step.clone() * R::from_i64(i as i64, wp)).exp();
        let v = objective(&r);
        if let Some(p) = &prev {
            if !(v > *p) {
                return Err(Error::Convergence(format!(
                    "radius objective not increasing on the bracket for k = {k}"
                )));
            }
        }
        prev = Some(v);
    }
    if !(objective(&lo) < R::zero(wp)) || !(objective(&hi) > R::zero(wp)) {
        return Err(Error::Convergence(format!(
            "radius root for k = {k} is not bracketed by [1e-6, 64 sigma^2 + 8]"
        )));
    }

    let sigma: R = params.sigma_sq_as(wp);
    let mut r = c0_of(&sigma, wp)?;
    if !(r > lo && r < hi) {
        r = (lo.clone() + hi.clone()) / R::from_i64(2, wp);
    }
    let tol = R::exp2_neg(R::effective_bits(wp).saturating_sub(16), wp);
    for _ in 0..MAX_ITER {
        let x = r.clone() * kk.clone();
        let f = bessel_i1_kernel(&x, wp);
        let g = f.ln() - log_target.clone();
        if g.is_zero_value() {
            return Ok(r.with_precision(pc));
        }
        if g < R::zero(wp) {
            lo = r.clone();
        } else {
            hi = r.clone();
        }
        let slope = kk.clone() * bessel_i1_kernel_derivative(&x, wp) / f;
        let mut next = r.clone() - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo.clone() + hi.clone()) / R::from_i64(2, wp);
        }
        let step = (next.clone() - r.clone()).abs();
        r = next;
        if step <= tol.clone() * r.clone() || (hi.clone() - lo.clone()) <= tol.clone() * r.clone() {
            return Ok(r.with_precision(pc));
        }
    }
    Err(Error::Convergence(format!(
        "implied radius for k = {k} did not converge"
    )))
}

/// `r = 2 (φ(log^{2k} Y) / C)^{1/(2k)}` with `C = C_k` (default) or `C_{2k}`.
pub fn implied_radius_log<R: Real>(
    k: u32,
    params: &ModelParams,
    index: CatalanIndex,
    pc: PrecisionContext,
) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let moment = log_moment_exact(k, params)?;
    let c = match index {
        CatalanIndex::K => catalan(k),
        CatalanIndex::TwoK => catalan(2 * k),
    };
    let ratio = R::from_rational(&(moment / c), wp);
    let exponent = R::one(wp) / R::from_i64(2 * k as i64, wp);
    Ok((R::from_i64(2, wp) * ratio.powf(&exponent)).with_precision(pc))
}

/// Implied radii for `k = 1..=k_max`.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusCurve<R> {
    pub kind: RadiusKind,
    pub points: Vec<(u32, R)>,
    /// Whether `r_k` strictly decreases in `k`.
    pub monotone_decreasing: bool,
}

impl<R: Real> RadiusCurve<R> {
    pub fn r(&self, k: u32) -> Option<&R> {
        self.points.iter().find(|(j, _)| *j == k).map(|(_, r)| r)
    }

    /// `r_1 − r_{k_max}`.
    pub fn span(&self) -> Option<R> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        Some(first.1.clone() - last.1.clone())
    }
}

pub fn radius_curve<R: Real>(
    kind: RadiusKind,
    k_max: u32,
    params: &ModelParams,
    index: CatalanIndex,
    pc: PrecisionContext,
) -> Result<RadiusCurve<R>> {
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let points = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let r = match kind {
                RadiusKind::YMoment => implied_radius_y(k, params, pc),
                RadiusKind::LogMoment => implied_radius_log(k, params, index, pc),
            }?;
            Ok((k, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone_decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(RadiusCurve {
        kind,
        points,
        monotone_decreasing,
    })
}
