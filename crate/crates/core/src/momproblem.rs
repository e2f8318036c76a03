//! Complete monotonicity of `m_k = φ(Y^k)·e^{−c₀k}`, the Hausdorff
//! condition for `Y·e^{−c₀}` to live on `[0, 1]`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::asymptotics::{alpha0_of, c0_of};
use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::moments::{moment_y_rational_part, ModelParams};
use crate::scalar::{Field, PrecisionContext, Real};

/// Margins must clear their error bars by this many bits.
const SAFETY_BITS: i32 = 32;

/// A sequence `m_0, …, m_K` with an absolute error bound per entry.
#[derive(Debug, Clone)]
pub struct ScaledMomentSequence {
    pub values: Vec<BigReal>,
    pub errors: Vec<BigReal>,
    pub precision: PrecisionContext,
}

impl ScaledMomentSequence {
    /// Wraps values that are exact up to rounding at `pc`.
    pub fn from_values(values: Vec<BigReal>, pc: PrecisionContext) -> Self {
        let errors = values
            .iter()
            .map(|v| v.abs() * BigReal::exp2_neg(pc.bits(), pc))
            .collect();
        Self {
            values,
            errors,
            precision: pc,
        }
    }

    /// Largest index `K`.
    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest absolute error bound over the entries.
    pub fn error_bound(&self) -> BigReal {
        self.errors
            .iter()
            .cloned()
            .fold(BigReal::zero(self.precision), BigReal::max_of)
    }
}

/// `m_k = φ(Y^k)·e^{−c₀k}` for `k = 0..=K`.
///
/// Each entry is the exact rational part of the moment times
/// `exp(k(σ²/2 − c₀))`, with `c₀` and the exponent evaluated at twice the
/// working precision. The per-entry bound `|m_k|·2^{−bits}·(8+k)` covers
/// the rounding of the rational, the exponent and the product.
pub fn build_scaled_sequence(
    k_max: u32,
    params: &ModelParams,
    pc: PrecisionContext,
) -> Result<ScaledMomentSequence> {
    if k_max < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k_max}")));
    }
    let hp = pc.doubled();
    let sigma: BigReal = params.sigma_sq_as(hp);
    let c0 = c0_of(&sigma, hp)?;
    let rate = sigma / BigReal::from_i64(2, hp) - c0;
    let ulp = BigReal::exp2_neg(pc.bits(), pc);
    let mut values = vec![BigReal::one(pc)];
    let mut errors = vec![BigReal::zero(pc)];
    for k in 1..=k_max {
        let g = BigReal::from_rational(&moment_y_rational_part(k, params)?, hp);
        let scale = (rate.clone() * BigReal::from_i64(k as i64, hp)).exp();
        let m = (g * scale).with_precision(pc);
        errors.push(m.abs() * ulp.clone() * BigReal::from_i64(8 + k as i64, pc));
        values.push(m);
    }
    Ok(ScaledMomentSequence {
        values,
        errors,
        precision: pc,
    })
}

/// Result of the complete-monotonicity check.
#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub k_max: usize,
    pub order: usize,
    /// First `(j, k)` in row-major order with `(−1)^j (Δ^j m)_k < 0`.
    pub first_violation: Option<(usize, usize)>,
    /// Smallest `(−1)^j (Δ^j m)_k` over the table.
    pub min_margin: f64,
    pub min_margin_at: (usize, usize),
    /// Error bar attached to the smallest margin.
    pub min_margin_error: f64,
    /// Largest error bar anywhere in the table.
    pub error_bound: f64,
    /// Smallest `log₂(|margin| / error bar)` over the table.
    pub min_margin_to_error_bits: f64,
}

fn log2_ratio(a: &BigReal, b: &BigReal) -> f64 {
    if b.is_zero_value() {
        return f64::INFINITY;
    }
    if a.is_zero_value() {
        return f64::NEG_INFINITY;
    }
    // The ratio itself can leave f64 range; logs cannot.
    (a.abs().ln() - b.ln()).to_f64() / std::f64::consts::LN_2
}

/// Checks `(−1)^j (Δ^j m)_k ≥ 0` for `0 ≤ j ≤ J`, `0 ≤ k ≤ K−j` using the
/// in-place difference table `d_j[k] = d_{j−1}[k] − d_{j−1}[k+1]`, which
/// equals `(−1)^j (Δ^j m)_k` directly.
///
/// Error bars add through each subtraction plus one rounding. Any entry
/// whose magnitude does not clear its error bar by 2³² is reported as a
/// [`Error::Precision`] rather than a verdict.
pub fn check_completely_monotone(seq: &ScaledMomentSequence, order: usize) -> Result<MonotoneReport> {
    let k_max = seq.k_max();
    if order > k_max {
        return Err(Error::Domain(format!(
            "difference order J = {order} exceeds K = {k_max}"
        )));
    }
    let pc = seq.precision;
    let ulp = BigReal::exp2_neg(pc.bits(), pc);
    let mut row = seq.values.clone();
    let mut err = seq.errors.clone();
    let mut first_violation = None;
    let mut min_margin: Option<(BigReal, BigReal, (usize, usize))> = None;
    let mut error_bound = BigReal::zero(pc);
    let mut min_bits = f64::INFINITY;

    for j in 0..=order {
        if j > 0 {
            let n = row.len() - 1;
            let next: Vec<BigReal> = (0..n).map(|k| row[k].clone() - row[k + 1].clone()).collect();
            err = (0..n)
                .map(|k| err[k].clone() + err[k + 1].clone() + next[k].abs() * ulp.clone())
                .collect();
            row = next;
        }
        for (k, (v, e)) in row.iter().zip(&err).enumerate() {
            let bits = log2_ratio(v, e);
            if bits < SAFETY_BITS as f64 {
                return Err(Error::Precision(format!(
                    "difference (j={j}, k={k}) = {:e} does not clear its error bar {:e} by 2^{SAFETY_BITS}; raise the precision above {} bits",
                    v.to_f64(),
                    e.to_f64(),
                    pc.bits()
                )));
            }
            min_bits = min_bits.min(bits);
            error_bound = error_bound.max_of(e.clone());
            if first_violation.is_none() && v < &BigReal::zero(pc) {
                first_violation = Some((j, k));
            }
            let smaller = match &min_margin {
                None => true,
                Some((m, _, _)) => v < m,
            };
            if smaller {
                min_margin = Some((v.clone(), e.clone(), (j, k)));
            }
        }
    }
    let (margin, margin_err, at) = min_margin.expect("table is non-empty");
    Ok(MonotoneReport {
        pass: first_violation.is_none(),
        k_max,
        order,
        first_violation,
        min_margin: margin.to_f64(),
        min_margin_at: at,
        min_margin_error: margin_err.to_f64(),
        error_bound: error_bound.to_f64(),
        min_margin_to_error_bits: min_bits,
    })
}

/// `2α₀/(c₀√(2πc₀))`, the limit of `m_k·k^{3/2}`.
pub fn scaled_moment_limit<R: Real>(sigma_sq: &R, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(32);
    let c0 = c0_of(sigma_sq, wp)?;
    let a0 = alpha0_of(sigma_sq, wp)?;
    let two = R::from_i64(2, wp);
    let v = two.clone() * a0 / (c0.clone() * (two * R::pi(wp) * c0).sqrt());
    Ok(v.with_precision(pc))
}

fn k_three_halves(k: u32, pc: PrecisionContext) -> BigReal {
    let kk = BigReal::from_bigint(&BigInt::from(k), pc);
    kk.clone() * kk.sqrt()
}

impl ScaledMomentSequence {
    /// `m_k·k^{3/2}`, which tends to [`scaled_moment_limit`].
    pub fn normalized(&self, k: u32) -> BigReal {
        self.values[k as usize].clone() * k_three_halves(k, self.precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn geometric(r: &str, n: usize, p: PrecisionContext) -> ScaledMomentSequence {
        let r = BigReal::from_rational(&crate::scalar::parse_rational(r).unwrap(), p);
        let mut v = vec![BigReal::one(p)];
        for i in 1..=n {
            let next = v[i - 1].clone() * r.clone();
            v.push(next);
        }
        ScaledMomentSequence::from_values(v, p)
    }

    #[test]
    fn geometric_sequences_pass() {
        let p = pc(512);
        for r in ["0.3", "0.9", "1/7"] {
            let rep = check_completely_monotone(&geometric(r, 40, p), 40).unwrap();
            assert!(rep.pass, "r={r}");
            assert!(rep.first_violation.is_none());
        }
    }

    #[test]
    fn perturbed_increment_is_located() {
        let p = pc(512);
        let mut seq = geometric("0.5", 30, p);
        // Make m_11 − m_10 positive: the first differences break at k = 10.
        let bump = seq.values[10].clone() * BigReal::from_i64(3, p) / BigReal::from_i64(2, p);
        seq.values[11] = bump;
        let rep = check_completely_monotone(&seq, 10).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_violation, Some((1, 10)));
    }

    #[test]
    fn order_above_length_rejected() {
        let p = pc(128);
        assert!(check_completely_monotone(&geometric("0.5", 5, p), 6).is_err());
        assert!(build_scaled_sequence(1, &ModelParams::from_int(1).unwrap(), p).is_err());
    }

    #[test]
    fn insufficient_precision_is_an_error() {
        // Differences of order 40 of a slowly decaying sequence fall below
        // what 64 bits can certify.
        let p = pc(64);
        let r = check_completely_monotone(&geometric("0.99", 60, p), 40);
        assert!(matches!(r, Err(Error::Precision(_))));
    }

    #[test]
    fn scaled_sequence_first_terms() {
        let params = ModelParams::from_int(1).unwrap();
        let p = pc(256);
        let seq = build_scaled_sequence(20, &params, p).unwrap();
        assert_eq!(seq.values[0], BigReal::one(p));
        let c0: f64 = c0_of(&1.0, p).unwrap();
        assert!((seq.values[1].to_f64() - (0.5 - c0).exp()).abs() < 1e-15);
        assert!((seq.values[1].to_f64() - 0.2059).abs() < 1e-4);
        for k in 5..20 {
            assert!(seq.values[k + 1] < seq.values[k]);
        }
    }

    #[test]
    fn scaled_sequence_prefactor_limit() {
        let params = ModelParams::from_int(1).unwrap();
        let p = pc(256);
        let seq = build_scaled_sequence(200, &params, p).unwrap();
        let limit: f64 = scaled_moment_limit(&1.0, p).unwrap();
        assert!((limit - 0.266_79).abs() < 1e-5);
        let a = seq.normalized(100).to_f64();
        let b = seq.normalized(200).to_f64();
        assert!((b - limit).abs() < (a - limit).abs());
        assert!((b / limit - 1.0).abs() < 2e-3);
    }

    #[test]
    fn verdict_stable_under_doubling() {
        let params = ModelParams::from_int(1).unwrap();
        let lo = check_completely_monotone(&build_scaled_sequence(60, &params, pc(512)).unwrap(), 24).unwrap();
        let hi = check_completely_monotone(&build_scaled_sequence(60, &params, pc(1024)).unwrap(), 24).unwrap();
        assert!(lo.pass && hi.pass);
        assert_eq!(lo.first_violation, hi.first_violation);
        assert_eq!(lo.min_margin_at, hi.min_margin_at);
        assert!((lo.min_margin - hi.min_margin).abs() <= lo.min_margin_error + hi.min_margin_error);
    }
}
