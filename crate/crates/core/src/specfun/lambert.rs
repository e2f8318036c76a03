use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Real};

const GUARD: u32 = 32;
const MAX_ITER: usize = 200;

/// Principal branch `W₀(x)` of the Lambert W function, `W·e^W = x`, for
/// `x ≥ −1/e`.
pub fn lambert_w0<R: Real>(x: &R, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let x = x.with_precision(wp);
    let one = R::one(wp);
    let branch = -(-one.clone()).exp();
    // Allow for rounding of a caller-supplied -1/e.
    let slack = R::exp2_neg(R::effective_bits(pc).saturating_sub(4), wp);
    if x < branch.clone() - slack {
        return Err(Error::Domain(format!(
            "lambert_w0 requires x >= -1/e, got {}",
            x.to_f64()
        )));
    }
    if x <= branch {
        return Ok(-R::one(pc));
    }
    if x.is_zero_value() {
        return Ok(R::zero(pc));
    }

    let mut w = R::from_f64(initial_guess(x.to_f64()), wp);
    let tol = R::exp2_neg(R::effective_bits(wp).saturating_sub(2), wp);
    let two = R::from_i64(2, wp);
    for _ in 0..MAX_ITER {
        // Halley step.
        let ew = w.exp();
        let f = w.clone() * ew.clone() - x.clone();
        let wp1 = w.clone() + one.clone();
        let denom = ew * wp1.clone()
            - (w.clone() + two.clone()) * f.clone() / (two.clone() * wp1);
        let step = f / denom;
        w = w - step.clone();
        let scale = w.abs().max_of(R::exp2_neg(20, wp));
        if step.abs() <= tol.clone() * scale {
            return Ok(w.with_precision(pc));
        }
    }
    Err(Error::Convergence(format!(
        "lambert_w0 did not converge for x = {}",
        x.to_f64()
    )))
}

fn initial_guess(x: f64) -> f64 {
    let e = std::f64::consts::E;
    if x < -0.25 {
        // Series about the branch point in p = sqrt(2(e x + 1)).
        let p = (2.0 * (e * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        // Winitzki's approximation.
        let l = (1.0 + x).ln();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else if x.is_finite() {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else {
        // Beyond f64 range: log of the big value is still representable.
        700.0
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

    #[test]
    fn trivial_values() {
        let p = pc(256);
        assert!(lambert_w0(&BigReal::zero(p), p).unwrap().is_zero_value());
        let e = BigReal::one(p).exp();
        let w = lambert_w0(&e, p).unwrap();
        assert!((w - BigReal::one(p)).abs() < BigReal::exp2_neg(248, p));
        assert!((lambert_w0(&std::f64::consts::E, p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saddle_fraction_value() {
        let p = pc(128);
        let arg = BigReal::from_i64(4, p) * BigReal::from_i64(2, p).exp();
        let kappa = lambert_w0(&arg, p).unwrap() / BigReal::from_i64(4, p);
        assert!((kappa.to_f64() - 0.62).abs() < 0.005);
    }

    #[test]
    fn domain_error_below_branch_point() {
        let p = pc(128);
        assert!(matches!(lambert_w0(&-0.4f64, p), Err(Error::Domain(_))));
        let branch = -(-BigReal::one(p)).exp();
        let w = lambert_w0(&branch, p).unwrap();
        assert_eq!(w, -BigReal::one(p));
    }

    #[test]
    fn round_trip_over_grid() {
        let p = pc(256);
        let bound = BigReal::exp2_neg(248, p);
        let inv_e = (-BigReal::one(p)).exp();
        let mut xs = vec![-inv_e + BigReal::from_f64(1e-6, p)];
        for i in 0..=60 {
            // Log-spaced positive grid plus a linear negative segment.
            let t = i as f64 / 60.0;
            xs.push(BigReal::from_f64(10f64.powf(-6.0 + 12.0 * t), p));
            xs.push(BigReal::from_f64(-0.3678 * t, p));
        }
        for x in xs {
            let w = lambert_w0(&x, p).unwrap();
            let resid = (w.clone() * w.exp() - x.clone()).abs();
            assert!(resid <= bound.clone() * x.abs(), "x={x:?}");
        }
    }

    #[test]
    fn f64_round_trip() {
        let p = PrecisionContext::default();
        for x in [-0.36, -0.1, 0.5, 10.0, 1e6] {
            let w: f64 = lambert_w0(&x, p).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-13 * x.abs());
        }
    }
}
