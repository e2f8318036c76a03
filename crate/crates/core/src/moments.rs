//! Closed-form moments of the limit `Y`, of `log Y`, and of the semicircle
//! and log-semicircle reference laws.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Field, PrecisionContext, Real};
use crate::specfun::{bessel_i1_kernel, binomial, catalan, hyp1f1, laguerre, StirlingTable};

const GUARD: u32 = 32;

/// Variance `σ²` of the log-increments, kept exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    sigma_sq: BigRational,
}

impl ModelParams {
    pub fn new(sigma_sq: BigRational) -> Result<Self> {
        if !sigma_sq.is_positive() {
            return Err(Error::Domain(format!("sigma_sq must be positive, got {sigma_sq}")));
        }
        Ok(Self { sigma_sq })
    }

    /// Parses forms like `"1"`, `"0.25"`, `"1e-4"` or `"1/4"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rational(text)?)
    }

    pub fn from_int(v: i64) -> Result<Self> {
        Self::new(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn sigma_sq(&self) -> &BigRational {
        &self.sigma_sq
    }

    pub fn sigma_sq_as<R: Real>(&self, pc: PrecisionContext) -> R {
        R::from_rational(&self.sigma_sq, pc)
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("moment order k must be at least 1".into()));
    }
    Ok(())
}

/// `e^{σ²k/2}` at working precision.
fn exp_half_sigma_k<R: Real>(k: u32, params: &ModelParams, wp: PrecisionContext) -> R {
    let x = R::from_rational(&(params.sigma_sq() * BigInt::from(k) / BigInt::from(2)), wp);
    x.exp()
}

/// `φ(Y^k) = e^{σ²k/2}/k · L^{(1)}_{k−1}(−σ²k)`.
pub fn moment_y<R: Real>(k: u32, params: &ModelParams, pc: PrecisionContext) -> Result<R> {
    check_k(k)?;
    let wp = pc.guarded(GUARD);
    let x = -R::from_rational(&(params.sigma_sq() * BigInt::from(k)), wp);
    let l = laguerre(k - 1, &R::one(wp), &x, wp);
    let v = exp_half_sigma_k::<R>(k, params, wp) * l / R::from_i64(k as i64, wp);
    Ok(v.with_precision(pc))
}

/// Exact rational factor `g_k` of `φ(Y^k) = g_k·e^{σ²k/2}`:
/// `g_k = (1/k) Σ_{m=0}^{k−1} (σ²k)^m/m! · C(k, m+1)`.
pub fn moment_y_rational_part(k: u32, params: &ModelParams) -> Result<BigRational> {
    check_k(k)?;
    let x = params.sigma_sq() * BigInt::from(k);
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for m in 0..k {
        if m > 0 {
            term = term * &x / BigInt::from(m);
        }
        sum += &term * binomial(k, m + 1);
    }
    Ok(sum / BigInt::from(k))
}

/// `φ(Y^k)` from the explicit sum: exact rational part times `e^{σ²k/2}`.
pub fn moment_y_sum<R: Real>(k: u32, params: &ModelParams, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let g = R::from_rational(&moment_y_rational_part(k, params)?, wp);
    Ok((g * exp_half_sigma_k::<R>(k, params, wp)).with_precision(pc))
}

/// Exact polynomial in `σ²` equal to `φ(log^{2k} Y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogMomentPolynomial {
    k: u32,
    /// Coefficient of `(σ²)^{k+i}` at index `i`.
    coeffs: Vec<BigRational>,
}

impl LogMomentPolynomial {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Coefficient of `(σ²)^p`; zero outside `k ≤ p ≤ 2k`.
    pub fn coeff(&self, p: u32) -> BigRational {
        if p < self.k || p > 2 * self.k {
            return BigRational::zero();
        }
        self.coeffs[(p - self.k) as usize].clone()
    }

    /// Coefficient of the lowest power `(σ²)^k`.
    pub fn leading(&self) -> &BigRational {
        &self.coeffs[0]
    }

    /// Coefficient of the highest power `(σ²)^{2k}`.
    pub fn trailing(&self) -> &BigRational {
        self.coeffs.last().expect("non-empty")
    }

    /// `(power, coefficient)` pairs in ascending power.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.k + i as u32, c))
    }

    pub fn eval<T: Field>(&self, sigma_sq: &T, pc: PrecisionContext) -> T {
        // Horner in σ², then the common factor (σ²)^k.
        let mut acc = T::from_i64(0, pc);
        for c in self.coeffs.iter().rev() {
            acc = acc * sigma_sq.clone() + T::from_rational(c, pc);
        }
        let mut base = T::from_i64(1, pc);
        for _ in 0..self.k {
            base = base * sigma_sq.clone();
        }
        acc * base
    }
}

/// `φ(log^{2k} Y)` as an exact polynomial, assembled from Stirling numbers
/// of the first kind:
///
/// `f_i = Σ_{j=⌈i/2⌉}^{i} s(j+1, i+1−j) σ^{2j} / (j!(j+1)!)`,
/// `φ(log^{2k} Y) = (2k)! Σ_{i=0}^{2k} f_i (σ²)^{2k−i} / (2^{2k−i} (2k−i)!)`.
pub fn log_moment_poly(k: u32) -> Result<LogMomentPolynomial> {
    check_k(k)?;
    let n = 2 * k;
    let table = StirlingTable::new(n + 1);
    let facts: Vec<BigInt> = {
        let mut v = vec![BigInt::one()];
        for i in 1..=n + 1 {
            let next = &v[i as usize - 1] * i;
            v.push(next);
        }
        v
    };
    // With i = 2k − r, every term times D = (2k+1)!·2^{2k} is the integer
    // C(2k, r) · (i!/j!) · ((2k+1)!/(j+1)!) · s(j+1, i+1−j) · 2^i.
    let mut numer = vec![BigInt::zero(); k as usize + 1];
    for i in 0..=n {
        let r = n - i;
        let outer = binomial(n, r) << i as usize;
        for j in i.div_ceil(2)..=i {
            let s = table.get(j + 1, i + 1 - j).expect("within table");
            if s.is_zero() {
                continue;
            }
            let a = &facts[i as usize] / &facts[j as usize];
            let b = &facts[n as usize + 1] / &facts[j as usize + 1];
            numer[(j + r - k) as usize] += &outer * a * b * s;
        }
    }
    let denom = &facts[n as usize + 1] << n as usize;
    let coeffs = numer
        .into_iter()
        .map(|c| BigRational::new(c, denom.clone()))
        .collect();
    Ok(LogMomentPolynomial { k, coeffs })
}

/// `φ(log^{2k} Y)` exactly.
pub fn log_moment_exact(k: u32, params: &ModelParams) -> Result<BigRational> {
    Ok(log_moment_poly(k)?.eval(params.sigma_sq(), PrecisionContext::default()))
}

/// `φ(log^{2k} Y)`, evaluated exactly and then rounded.
pub fn log_moment<R: Real>(k: u32, params: &ModelParams, pc: PrecisionContext) -> Result<R> {
    Ok(R::from_rational(&log_moment_exact(k, params)?, pc))
}

/// Moment generating function of `log Y`:
/// `φ(Y^s) = e^{σ²s/2} ₁F₁(1−s; 2; −σ²s)`. Even in `s`.
pub fn mgf_log_y<R: Real>(s: &R, params: &ModelParams, pc: PrecisionContext) -> Result<R> {
    let wp = pc.guarded(GUARD);
    let s = s.with_precision(wp);
    let sig = params.sigma_sq_as::<R>(wp);
    let two = R::from_i64(2, wp);
    let f = hyp1f1(&(R::one(wp) - s.clone()), &two, &(-(sig.clone() * s.clone())), wp)?;
    Ok(((sig * s / two).exp() * f).with_precision(pc))
}

/// Moments of the semicircle law of radius `r`: zero for odd `k`,
/// `(r/2)^{2m} C_m` for `k = 2m`.
pub fn semicircle_moment<R: Real>(k: u32, r: &R, pc: PrecisionContext) -> R {
    if k % 2 == 1 {
        return R::zero(pc);
    }
    let m = k / 2;
    let half = r.with_precision(pc) / R::from_i64(2, pc);
    half.powi(2 * m) * R::from_bigint(&catalan(m), pc)
}

/// `φ(e^{kZ})` for `Z` semicircular of radius `r`: `2 I₁(kr)/(kr)`.
pub fn log_semicircle_moment<R: Real>(k: u32, r: &R, pc: PrecisionContext) -> R {
    let x = r.with_precision(pc) * R::from_i64(k as i64, pc);
    bessel_i1_kernel(&x, pc)
}

/// Semicircle density `2/(πr²)·√(r²−t²)` on `[−r, r]`.
pub fn semicircle_pdf<R: Real>(t: &R, r: &R, pc: PrecisionContext) -> R {
    let t = t.with_precision(pc);
    let r = r.with_precision(pc);
    let r2 = r.clone() * r;
    let inside = r2.clone() - t.clone() * t;
    if !(inside > R::zero(pc)) {
        return R::zero(pc);
    }
    R::from_i64(2, pc) / (R::pi(pc) * r2) * inside.sqrt()
}

/// Semicircle law on `[−radius, radius]` in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemicircleLaw {
    pub radius: f64,
}

impl SemicircleLaw {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn pdf(&self, t: f64) -> f64 {
        semicircle_pdf(&t, &self.radius, PrecisionContext::default())
    }

    pub fn moment(&self, k: u32) -> f64 {
        semicircle_moment(k, &self.radius, PrecisionContext::default())
    }

    /// Distribution function, in closed form.
    pub fn cdf(&self, t: f64) -> f64 {
        let x = (t / self.radius).clamp(-1.0, 1.0);
        0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI
    }
}
