use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Real};

const GUARD: u32 = 32;
const SMALL_RUN: usize = 32;
const MAX_TERMS: usize = 1_000_000;
const MAX_RETRIES: usize = 6;

/// Returns `Some(n)` when `v` is the integer `n ≤ 0`.
fn nonpositive_integer<R: Real>(v: &R, pc: PrecisionContext) -> Option<i64> {
    let f = v.to_f64();
    if f > 0.5 || f.fract() != 0.0 || f < -((1u64 << 52) as f64) {
        return None;
    }
    let n = f as i64;
    (R::from_i64(n, pc) == v.with_precision(pc)).then_some(n)
}

/// Confluent hypergeometric function `₁F₁(a; b; z) = Σ (a)_m z^m / ((b)_m m!)`.
///
/// A nonpositive integer `a` truncates the series to a polynomial. Otherwise
/// the series is summed until 32 consecutive terms fall below
/// `2^(−bits−16)` of the running sum. When alternating terms cancel, the
/// sum is redone with the lost bits added back as guard bits.
pub fn hyp1f1<R: Real>(a: &R, b: &R, z: &R, pc: PrecisionContext) -> Result<R> {
    if nonpositive_integer(b, pc.guarded(GUARD)).is_some() {
        return Err(Error::Domain(format!(
            "hyp1f1 requires b not a nonpositive integer, got b = {}",
            b.to_f64()
        )));
    }
    let terms = nonpositive_integer(a, pc.guarded(GUARD)).map(|n| (-n) as usize);

    let mut extra = GUARD;
    for _ in 0..MAX_RETRIES {
        let wp = pc.guarded(extra);
        let (sum, peak) = sum_series(a, b, z, terms, pc, wp)?;
        if sum.is_zero_value() {
            return Ok(sum.with_precision(pc));
        }
        let lost = (peak / sum.abs()).to_f64().log2().max(0.0);
        if !lost.is_finite() {
            // Ratio beyond f64 range: more bits than we can estimate.
            extra = extra.saturating_mul(2);
            continue;
        }
        let needed = lost.ceil() as u32 + GUARD;
        if needed <= extra || R::effective_bits(wp) == R::effective_bits(pc) {
            return Ok(sum.with_precision(pc));
        }
        extra = needed + 16;
    }
    Err(Error::Precision(format!(
        "hyp1f1 cancellation not resolved for a={}, b={}, z={}",
        a.to_f64(),
        b.to_f64(),
        z.to_f64()
    )))
}

fn sum_series<R: Real>(
    a: &R,
    b: &R,
    z: &R,
    terms: Option<usize>,
    pc: PrecisionContext,
    wp: PrecisionContext,
) -> Result<(R, R)> {
    let a = a.with_precision(wp);
    let b = b.with_precision(wp);
    let z = z.with_precision(wp);
    let tol = R::exp2_neg(R::effective_bits(pc) + 16, wp);
    let mut term = R::one(wp);
    let mut sum = term.clone();
    let mut peak = R::one(wp);
    let mut small_run = 0;
    let limit = terms.unwrap_or(MAX_TERMS);
    for m in 0..limit {
        let mm = R::from_i64(m as i64, wp);
        term = term * (a.clone() + mm.clone()) * z.clone()
            / ((b.clone() + mm) * R::from_i64(m as i64 + 1, wp));
        sum = sum + term.clone();
        let mag = term.abs();
        peak = peak.max_of(mag.clone());
        if terms.is_some() {
            continue;
        }
        if mag <= tol.clone() * sum.abs() {
            small_run += 1;
            if small_run >= SMALL_RUN {
                return Ok((sum, peak));
            }
        } else {
            small_run = 0;
        }
    }
    if terms.is_some() {
        Ok((sum, peak))
    } else {
        Err(Error::Convergence(format!(
            "hyp1f1 series did not settle within {MAX_TERMS} terms"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::BigReal;
    use crate::scalar::Field;

    fn pc(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn big(v: i64, p: PrecisionContext) -> BigReal {
        BigReal::from_i64(v, p)
    }

    #[test]
    fn spec_examples() {
        let p = pc(256);
        for z in [-5, 0, 3] {
            assert_eq!(hyp1f1(&big(0, p), &big(2, p), &big(z, p), p).unwrap(), big(1, p));
        }
        assert_eq!(hyp1f1(&big(-1, p), &big(2, p), &big(-2, p), p).unwrap(), big(2, p));
        assert_eq!(hyp1f1(&-1.0, &2.0, &-2.0, p).unwrap(), 2.0);
    }

    #[test]
    fn forbidden_b() {
        let p = pc(128);
        for b in [0, -1, -7] {
            let r = hyp1f1(&big(1, p), &big(b, p), &big(1, p), p);
            assert!(matches!(r, Err(Error::Domain(_))));
        }
        assert!(hyp1f1(&1.0, &-0.5, &1.0, p).is_ok());
    }

    #[test]
    fn kummer_identity_for_exponential() {
        // 1F1(a; a; z) = e^z, including the cancelling negative-z case.
        let p = pc(256);
        let tol = BigReal::exp2_neg(248, p);
        let a = BigReal::from_f64(2.5, p);
        for z in [-40, -3, 1, 25] {
            let z = big(z, p);
            let got = hyp1f1(&a, &a, &z, p).unwrap();
            let want = z.exp();
            assert!(((got - want.clone()) / want).abs() < tol.clone());
        }
    }

    #[test]
    fn kummer_transformation() {
        // 1F1(a; b; z) = e^z 1F1(b−a; b; −z).
        let p = pc(256);
        let a = BigReal::from_f64(0.75, p);
        let b = big(2, p);
        let z = big(-12, p);
        let lhs = hyp1f1(&a, &b, &z, p).unwrap();
        let rhs = z.exp() * hyp1f1(&(b.clone() - a), &b, &(-z), p).unwrap();
        assert!(((lhs - rhs.clone()) / rhs).abs() < BigReal::exp2_neg(248, p));
    }
}
