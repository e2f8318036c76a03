//! Exact truncated power series in `z` and the small parameter `ε = n^{−1/2}`.
//!
//! The moment function of `exp(εv)` is expanded in `ε`, inverted in `z`
//! order by order, and turned into the exponent `n·log S` of the
//! S-transform of the `n`-fold free product. Moments of the limit law are
//! recovered by inverting its `χ` function.

mod power;
mod ring;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use power::{BivariateSeries, PowerSeries, UnivariateSeries};
pub use ring::{EpsPoly, Ring};

use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Real};

/// Default `z` truncation order.
pub const DEFAULT_Z_ORDER: usize = 16;
/// Default `ε` truncation order.
pub const DEFAULT_EPS_ORDER: usize = 4;

/// Moments of the zero-mean increment `v`: `φ(v²)`, `φ(v³)`, `φ(v⁴)` and
/// optionally `φ(v⁵), φ(v⁶), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct VMoments {
    pub sigma_sq: BigRational,
    pub m3: BigRational,
    pub m4: BigRational,
    pub extra: Vec<BigRational>,
}

impl VMoments {
    pub fn new(sigma_sq: BigRational, m3: BigRational, m4: BigRational) -> Result<Self> {
        if !sigma_sq.is_positive() {
            return Err(Error::Domain(format!("sigma_sq must be positive, got {sigma_sq}")));
        }
        Ok(Self {
            sigma_sq,
            m3,
            m4,
            extra: Vec::new(),
        })
    }

    /// Like [`VMoments::new`] but also rejects `m4 < σ⁴`, which no genuine
    /// distribution satisfies.
    pub fn strict(sigma_sq: BigRational, m3: BigRational, m4: BigRational) -> Result<Self> {
        if m4 < &sigma_sq * &sigma_sq {
            return Err(Error::Domain(format!(
                "m4 = {m4} is below sigma_sq^2 = {}",
                &sigma_sq * &sigma_sq
            )));
        }
        Self::new(sigma_sq, m3, m4)
    }

    pub fn with_extra(mut self, extra: Vec<BigRational>) -> Self {
        self.extra = extra;
        self
    }

    /// `φ(v^j)` for `j ≥ 0`, if known.
    fn moment(&self, j: usize) -> Option<BigRational> {
        match j {
            0 => Some(BigRational::one()),
            1 => Some(BigRational::zero()),
            2 => Some(self.sigma_sq.clone()),
            3 => Some(self.m3.clone()),
            4 => Some(self.m4.clone()),
            _ => self.extra.get(j - 5).cloned(),
        }
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `ψ_{e^{εv}}(z) = Σ_{l≥1} φ(e^{lεv}) z^l` with
/// `φ(e^{lεv}) = Σ_j (lε)^j φ(v^j)/j!`, truncated at `z^M` and `ε^E`.
pub fn psi_exp_series(vm: &VMoments, m: usize, e: usize) -> Result<BivariateSeries> {
    if m < 1 {
        return Err(Error::InvalidConfig("z order must be at least 1".into()));
    }
    let mut weights = Vec::with_capacity(e + 1);
    let mut fact = BigInt::one();
    for j in 0..=e {
        if j > 0 {
            fact *= j;
        }
        let mu = vm.moment(j).ok_or_else(|| {
            Error::Domain(format!(
                "eps order {e} needs phi(v^{j}), which was not supplied"
            ))
        })?;
        weights.push(mu / BigRational::from_integer(fact.clone()));
    }
    let mut coeffs = vec![EpsPoly::zero(e)];
    for l in 1..=m {
        let lq = int(l as i64);
        let mut lpow = BigRational::one();
        let mut layer = Vec::with_capacity(e + 1);
        for w in &weights {
            layer.push(w * &lpow);
            lpow *= &lq;
        }
        coeffs.push(EpsPoly::from_coeffs(layer, e));
    }
    Ok(BivariateSeries::from_coeffs(coeffs, m, &EpsPoly::zero(e)))
}

/// Compositional inverse in `z` (order by order in `ε` for bivariate series).
pub fn invert_series<C: Ring>(s: &PowerSeries<C>) -> Result<PowerSeries<C>> {
    s.invert()
}

/// `χ_{e^{εv}}`, the inverse of [`psi_exp_series`].
pub fn chi_exp_series(vm: &VMoments, m: usize, e: usize) -> Result<BivariateSeries> {
    psi_exp_series(vm, m, e)?.invert()
}

/// Exponent of `S_{Y_n} = S^n` with `n = ε^{−2}`: the series `n·log S`
/// where `S = (1+z)/z · χ`. Layer `j` multiplies `ε^j = n^{−j/2}`; layer 0 is
/// the limit exponent. The result has `z` order `M−1` and `ε` order `E−2`.
pub fn s_transform_yn(vm: &VMoments, m: usize, e: usize) -> Result<BivariateSeries> {
    if e < 2 {
        return Err(Error::InvalidConfig("eps order must be at least 2".into()));
    }
    let chi = chi_exp_series(vm, m, e)?;
    let proto = EpsPoly::zero(e);
    let one_plus_z = BivariateSeries::one(m - 1, &proto).add(&BivariateSeries::z(m - 1, &proto));
    let s = chi.div_z()?.mul(&one_plus_z);
    let t = s.sub(&BivariateSeries::one(m - 1, &proto));
    if !t.layer(0).coeffs().iter().all(Zero::is_zero) {
        return Err(Error::Domain(
            "S-transform does not reduce to 1 at eps = 0; psi must start with z/(1-z)".into(),
        ));
    }
    // log(1+T) = T − T²/2 + …; T starts at ε² so E/2 terms suffice.
    let mut log_s = BivariateSeries::zero(m - 1, &proto);
    let mut power = t.clone();
    for k in 1..=e / 2 {
        let c = BigRational::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
        log_s = log_s.add(&power.scale(&c));
        power = power.mul(&t);
    }
    log_s.eps_shift_down(2)
}

/// Exact coefficients `g_k` with `φ(Y^k) = g_k·e^{σ²k/2}`, from inverting
/// `χ_Y(z) = z/(1+z)·e^{−σ²(z+1/2)}`. Index 0 holds `g_1`.
pub fn psi_y_scaled_coefficients(sigma_sq: &BigRational, k_max: usize) -> Result<Vec<BigRational>> {
    if k_max < 1 {
        return Err(Error::InvalidConfig("k_max must be at least 1".into()));
    }
    let zero = BigRational::zero();
    let z_over = UnivariateSeries::rational_function(&[zero.clone(), int(1)], &[int(1), int(1)], k_max)?;
    let f = z_over.mul(&UnivariateSeries::exp_linear(&-sigma_sq.clone(), k_max));
    let g = f.invert()?;
    Ok(g.coeffs()[1..].to_vec())
}

/// First `k_max` moments of `Y` by Lagrange–Bürmann inversion of `χ_Y`,
/// with `e^{σ²k/2}` applied in `R` at the end.
pub fn moments_from_chi<R: Real>(
    sigma_sq: &BigRational,
    k_max: usize,
    pc: PrecisionContext,
) -> Result<Vec<R>> {
    let wp = pc.guarded(32);
    let half_sigma = R::from_rational(&(sigma_sq / int(2)), wp);
    Ok(psi_y_scaled_coefficients(sigma_sq, k_max)?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let k = R::from_i64(i as i64 + 1, wp);
            (R::from_rational(g, wp) * (half_sigma.clone() * k).exp()).with_precision(pc)
        })
        .collect())
}

/// Named polynomials appearing in the `ε` expansions (ascending coefficients).
pub mod polys {
    use super::{int, BigRational};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Numerator of `Σ l³ z^l = z·g₃(z)/(1−z)`, i.e. `g₃ = (1+4z+z²)/(1−z)³`.
    pub fn g3_numerator() -> Vec<BigRational> {
        vec![int(1), int(4), int(1)]
    }

    /// Numerator of `g₄ = (1+11z+11z²+z³)/(1−z)⁴`.
    pub fn g4_numerator() -> Vec<BigRational> {
        vec![int(1), int(11), int(11), int(1)]
    }

    /// `h₃ = z² + z + 1/6`.
    pub fn h3() -> Vec<BigRational> {
        vec![q(1, 6), int(1), int(1)]
    }

    /// `h₄ = z³ + 2z² + 7z/6 + 5/24`.
    pub fn h4() -> Vec<BigRational> {
        vec![q(5, 24), q(7, 6), int(2), int(1)]
    }
}

/// Outcome of checking one closed-form layer against the series engine.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn poly(c: &[BigRational], order: usize) -> UnivariateSeries {
    UnivariateSeries::from_coeffs(c.to_vec(), order, &BigRational::zero())
}

fn one_minus_z_pow(p: usize) -> Vec<BigRational> {
    (0..=p)
        .map(|i| {
            let c = BigRational::from_integer(crate::specfun::binomial(p as u32, i as u32));
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// `z/(1+z) · p(z)` truncated.
fn z_over_one_plus_z_times(p: &[BigRational], order: usize) -> Result<UnivariateSeries> {
    let base = UnivariateSeries::rational_function(&[int(0), int(1)], &[int(1), int(1)], order)?;
    Ok(base.mul(&poly(p, order)))
}

/// Checks the closed forms of the `ε` layers of `ψ`, `χ` and the S-exponent
/// at truncation `(m, e)`, `e ≥ 4`.
///
/// Each check uses unit variance; `φ(v³) = 2` keeps the cubic layer
/// visibly nonzero and `φ(v⁴) = 1` is the setting in which the quartic `χ`
/// layer collapses to `h₄`. The quartic `ψ` layer enters with a positive
/// sign.
pub fn verify_identities(m: usize, e: usize) -> Result<Vec<IdentityCheck>> {
    if e < 4 {
        return Err(Error::InvalidConfig("identity checks need eps order >= 4".into()));
    }
    let vm = VMoments::new(int(1), int(2), int(1))?;
    let psi = psi_exp_series(&vm, m, e)?;
    let chi = psi.invert()?;
    let expo = s_transform_yn(&vm, m, e)?;
    let zero = BigRational::zero();
    let mut checks = Vec::new();
    let mut push = |name, lhs: UnivariateSeries, rhs: UnivariateSeries, detail: &str| {
        let n = lhs.order().min(rhs.order());
        let pass = lhs.truncate(n) == rhs.truncate(n);
        checks.push(IdentityCheck {
            name,
            pass,
            detail: detail.to_string(),
        });
    };

    let z_num = |p: Vec<BigRational>| -> Vec<BigRational> {
        std::iter::once(zero.clone()).chain(p).collect()
    };

    let psi0 = UnivariateSeries::rational_function(&z_num(vec![int(1)]), &one_minus_z_pow(1), m)?;
    push("psi_eps0", psi.layer(0), psi0, "z/(1-z)");

    let psi2 = UnivariateSeries::rational_function(&z_num(vec![int(1), int(1)]), &one_minus_z_pow(3), m)?
        .scale(&(&vm.sigma_sq / int(2)));
    push("psi_eps2", psi.layer(2), psi2, "sigma^2 z(1+z)/(2(1-z)^3)");

    let g3 = UnivariateSeries::rational_function(&z_num(polys::g3_numerator()), &one_minus_z_pow(4), m)?
        .scale(&(&vm.m3 / int(6)));
    push("g3", psi.layer(3), g3, "m3 z g3(z)/(6(1-z))");

    let g4 = UnivariateSeries::rational_function(&z_num(polys::g4_numerator()), &one_minus_z_pow(5), m)?
        .scale(&(&vm.m4 / int(24)));
    push("g4", psi.layer(4), g4, "+m4 z g4(z)/(24(1-z))");

    let chi2 = z_over_one_plus_z_times(&[BigRational::new(1.into(), 2.into()), int(1)], m)?
        .scale(&-vm.sigma_sq.clone());
    push("chi_eps2", chi.layer(2), chi2, "-sigma^2 (z+1/2) z/(1+z)");

    let h3 = z_over_one_plus_z_times(&polys::h3(), m)?.scale(&-vm.m3.clone());
    push("h3", chi.layer(3), h3, "-m3 h3(z) z/(1+z)");

    let h4 = z_over_one_plus_z_times(&polys::h4(), m)?.scale(&vm.m4);
    push("h4", chi.layer(4), h4, "m4 h4(z) z/(1+z) at sigma^2 = m4 = 1");

    let limit = poly(&[BigRational::new((-1).into(), 2.into()), int(-1)], m).scale(&vm.sigma_sq);
    push("limit_S", expo.layer(0), limit, "-sigma^2 (z+1/2)");

    let expo1 = poly(&polys::h3(), m).scale(&-vm.m3.clone());
    push("exponent_eps1", expo.layer(1), expo1, "-m3 h3(z)");

    Ok(checks)
}
