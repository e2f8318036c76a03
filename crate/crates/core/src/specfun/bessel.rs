use crate::scalar::{PrecisionContext, Real};

const GUARD: u32 = 32;

/// `Σ_m (x²/4)^m / (m! (m+ν)!)`, i.e. `I_ν(x) / (x/2)^ν`.
///
/// Terms are positive, so the only stopping concern is the tail: summation
/// stops once past the peak term and the current term drops below
/// `2^(−bits−16)` of the partial sum.
fn reduced_series<R: Real>(nu: u32, x: &R, pc: PrecisionContext) -> R {
    let wp = pc.guarded(GUARD);
    let x = x.with_precision(wp);
    let quarter_sq = x.clone() * x / R::from_i64(4, wp);
    let tol = R::exp2_neg(R::effective_bits(pc) + 16, wp);

    let mut term = R::one(wp);
    for j in 1..=nu {
        term = term / R::from_i64(j as i64, wp);
    }
    let mut sum = term.clone();
    let mut m: i64 = 0;
    loop {
        let denom = R::from_i64((m + 1) * (m + 1 + nu as i64), wp);
        term = term * quarter_sq.clone() / denom.clone();
        sum = sum + term.clone();
        m += 1;
        let decreasing = quarter_sq < denom;
        if decreasing && term < tol.clone() * sum.clone() {
            break;
        }
        if term.is_zero_value() || !sum.is_finite() {
            break;
        }
    }
    sum.with_precision(pc)
}

/// Modified Bessel function of the first kind `I_ν(x)` for integer order,
/// by its power series.
pub fn bessel_i<R: Real>(nu: u32, x: &R, pc: PrecisionContext) -> R {
    let wp = pc.guarded(GUARD);
    let half = x.with_precision(wp) / R::from_i64(2, wp);
    (half.powi(nu) * reduced_series(nu, x, pc).with_precision(wp)).with_precision(pc)
}

/// `2 I₁(x) / x`, the `k`-th moment kernel of the log-semicircle law
/// (`x = kR`). Equals 1 at `x = 0`.
pub fn bessel_i1_kernel<R: Real>(x: &R, pc: PrecisionContext) -> R {
    reduced_series(1, x, pc)
}

/// Derivative of [`bessel_i1_kernel`]: `d/dx [2 I₁(x)/x] = 2 I₂(x)/x`.
pub fn bessel_i1_kernel_derivative<R: Real>(x: &R, pc: PrecisionContext) -> R {
    let wp = pc.guarded(GUARD);
    let half = x.with_precision(wp) / R::from_i64(2, wp);
    (half * reduced_series(2, x, pc).with_precision(wp)).with_precision(pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::BigReal;
    use crate::scalar::Field;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;

    fn pc(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    /// 60-term exact rational sum of I_1(2) = Σ 1/(m!(m+1)!).
    fn i1_of_two_oracle() -> BigRational {
        let mut total = BigRational::from_integer(BigInt::from(0));
        let mut fact_m = BigInt::one();
        for m in 0..60u32 {
            if m > 0 {
                fact_m *= m;
            }
            let fact_m1 = &fact_m * (m + 1);
            total += BigRational::new(BigInt::one(), &fact_m * fact_m1);
        }
        total
    }

    #[test]
    fn i1_of_two_matches_rational_oracle() {
        let p = pc(256);
        let got = bessel_i(1, &BigReal::from_i64(2, p), p);
        let want = BigReal::from_rational(&i1_of_two_oracle(), p);
        assert!(((got.clone() - want.clone()) / want).abs() < BigReal::exp2_neg(248, p));
        assert_eq!(got.to_sci_string(9), "1.59063685e0");
        assert!((bessel_i(1, &2.0f64, p) - 1.590_636_854_637_329).abs() < 1e-14);
    }

    #[test]
    fn zero_argument() {
        let p = pc(128);
        assert!(bessel_i(1, &BigReal::zero(p), p).is_zero_value());
        assert_eq!(bessel_i(0, &0.0f64, p), 1.0);
        assert_eq!(bessel_i1_kernel(&BigReal::zero(p), p), BigReal::one(p));
        assert_eq!(bessel_i1_kernel(&0.0f64, p), 1.0);
        assert!((bessel_i1_kernel(&1e-9f64, p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn f64_overflow_terminates() {
        let p = PrecisionContext::default();
        assert_eq!(bessel_i1_kernel(&5000.0f64, p), f64::INFINITY);
    }

    #[test]
    fn recurrence_identity_i0_minus_i2() {
        let p = pc(256);
        let tol = BigReal::exp2_neg(248, p);
        for x in ["0.5", "1", "2", "5", "10"] {
            let x = BigReal::from_rational(&crate::scalar::parse_rational(x).unwrap(), p);
            let lhs = bessel_i(0, &x, p) - bessel_i(2, &x, p);
            let rhs = bessel_i1_kernel(&x, p);
            assert!(((lhs - rhs.clone()) / rhs).abs() < tol.clone());
        }
    }

    #[test]
    fn kernel_derivative_matches_finite_difference() {
        let p = pc(256);
        let x = BigReal::from_i64(7, p);
        let h = BigReal::exp2_neg(40, p);
        let fd = (bessel_i1_kernel(&(x.clone() + h.clone()), p)
            - bessel_i1_kernel(&(x.clone() - h.clone()), p))
            / (h * BigReal::from_i64(2, p));
        let d = bessel_i1_kernel_derivative(&x, p);
        assert!(((fd - d.clone()) / d).abs() < BigReal::exp2_neg(70, p));
    }

    #[test]
    fn large_argument_agrees_across_precisions() {
        let lo = pc(256);
        let hi = pc(512);
        let x = BigReal::from_i64(416, hi);
        let a = bessel_i(1, &x.with_precision(lo), lo);
        let b = bessel_i(1, &x, hi);
        let rel = ((a.with_precision(hi) - b.clone()) / b).abs();
        assert!(rel < BigReal::exp2_neg(248, hi));
    }
}
