use freeclt::asymptotics::{c0_of, AsymptoticConstants};
use freeclt::moments::{log_moment_poly, mgf_log_y, moment_y, moment_y_rational_part, ModelParams};
use freeclt::rmt::{histogram_of, jackknife_mean, ks_two_sample};
use freeclt::series::{psi_y_scaled_coefficients, UnivariateSeries};
use freeclt::specfun::{binomial, catalan, factorial, hyp1f1, laguerre, lambert_w0};
use freeclt::{BigReal, Field, PrecisionContext, Rational, Real};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn pc(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=60, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

/// A series `a₁z + a₂z² + …` with `a₁ ≠ 0`.
fn invertible_series(order: usize) -> impl Strategy<Value = UnivariateSeries> {
    (
        rational().prop_filter("nonzero linear term", |a| !a.is_zero()),
        proptest::collection::vec(rational(), order - 1),
    )
        .prop_map(move |(a1, rest)| {
            let mut c = vec![Rational::zero(), a1];
            c.extend(rest);
            UnivariateSeries::from_coeffs(c, order, &Rational::zero())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_inverse_composes_to_identity(f in invertible_series(7)) {
        let g = f.invert().unwrap();
        let z = UnivariateSeries::z(7, &Rational::zero());
        prop_assert_eq!(f.compose(&g).unwrap(), z.clone());
        prop_assert_eq!(g.compose(&f).unwrap(), z);
        prop_assert_eq!(g.invert().unwrap(), f);
    }

    #[test]
    fn laguerre_recurrence_matches_explicit_sum(n in 0u32..=20, alpha in positive_rational(), x in rational()) {
        // L_n^{(α)}(x) = Σ_m (−x)^m/m! · Π_{j=m+1}^{n} (α+j) / (n−m)!
        let p = PrecisionContext::default();
        let mut want = Rational::zero();
        for m in 0..=n {
            let mut rising = Rational::one();
            for j in (m + 1)..=n {
                rising *= alpha.clone() + Rational::from_integer(j.into());
            }
            let term = num_traits::pow(-x.clone(), m as usize) * rising
                / Rational::from_integer(factorial(m) * factorial(n - m));
            want += term;
        }
        prop_assert_eq!(laguerre(n, &alpha, &x, p), want);
    }

    #[test]
    fn lambert_round_trip(x in -0.3678f64..1e6) {
        let p = pc(128);
        let xr = BigReal::from_f64(x, p);
        let w = lambert_w0(&xr, p).unwrap();
        let back = w.clone() * w.exp();
        let err = (back - xr.clone()).abs();
        let scale = xr.abs().max_of(BigReal::one(p));
        prop_assert!(err <= scale * BigReal::exp2_neg(100, p));
        prop_assert!(w >= -BigReal::one(p));
    }

    #[test]
    fn kummer_transformation(a in -6.0f64..6.0, b in 0.5f64..6.0, z in -20.0f64..20.0) {
        // ₁F₁(a; b; z) = e^z ₁F₁(b − a; b; −z)
        let p = pc(160);
        let (a, b, z) = (BigReal::from_f64(a, p), BigReal::from_f64(b, p), BigReal::from_f64(z, p));
        let lhs = hyp1f1(&a, &b, &z, p).unwrap();
        let rhs = z.exp() * hyp1f1(&(b.clone() - a), &b, &-z, p).unwrap();
        let scale = lhs.abs().max_of(rhs.abs()).max_of(BigReal::exp2_neg(40, p));
        prop_assert!((lhs - rhs).abs() <= scale * BigReal::exp2_neg(120, p));
    }

    #[test]
    fn moment_rational_part_matches_series(s2 in positive_rational()) {
        let coeffs = psi_y_scaled_coefficients(&s2, 12).unwrap();
        let params = ModelParams::new(s2).unwrap();
        for k in 1..=12u32 {
            prop_assert_eq!(&moment_y_rational_part(k, &params).unwrap(), &coeffs[k as usize - 1]);
        }
    }

    #[test]
    fn moments_grow_at_most_like_c0(s2 in positive_rational(), k in 1u32..=60) {
        let p = pc(192);
        let params = ModelParams::new(s2.clone()).unwrap();
        let m: BigReal = moment_y(k, &params, p).unwrap();
        let c0: BigReal = c0_of(&BigReal::from_rational(&s2, p), p).unwrap();
        prop_assert!(m > BigReal::one(p));
        prop_assert!(m.ln() < c0 * BigReal::from_i64(k as i64, p));
    }

    #[test]
    fn exact_saddle_rate_is_c0(s2 in positive_rational()) {
        let p = pc(192);
        let s = BigReal::from_rational(&s2, p);
        let k = AsymptoticConstants::closed_form(&s, p).unwrap();
        let rate = AsymptoticConstants::saddle_rate(&s, &k.kappa, p);
        prop_assert!(((rate - k.c0.clone()) / k.c0).abs() < BigReal::exp2_neg(150, p));
    }

    #[test]
    fn mgf_is_even_and_positive(s2 in positive_rational(), s in 0.01f64..4.0) {
        let p = pc(128);
        let params = ModelParams::new(s2).unwrap();
        let sp = BigReal::from_f64(s, p);
        let plus: BigReal = mgf_log_y(&sp, &params, p).unwrap();
        let minus: BigReal = mgf_log_y(&-sp, &params, p).unwrap();
        prop_assert!(plus > BigReal::one(p));
        prop_assert!(((plus.clone() - minus) / plus).abs() < BigReal::exp2_neg(90, p));
    }

    #[test]
    fn log_moment_polynomial_is_positive(k in 1u32..=14) {
        let poly = log_moment_poly(k).unwrap();
        prop_assert!(poly.terms().all(|(_, c)| c > &Rational::zero()));
        prop_assert_eq!(poly.terms().count() as u32, k + 1);
        prop_assert_eq!(poly.leading(), &Rational::from_integer(catalan(k)));
    }

    #[test]
    fn catalan_from_binomials(k in 0u32..=60) {
        prop_assert_eq!(catalan(k) * (k + 1), binomial(2 * k, k));
    }

    #[test]
    fn histogram_has_unit_mass(
        values in proptest::collection::vec(-3.0f64..3.0, 1..400),
        bins in 3usize..80,
    ) {
        let h = histogram_of(&values, 3.0, bins).unwrap();
        prop_assert_eq!(h.densities.len(), bins);
        prop_assert_eq!(h.out_of_range, 0);
        prop_assert!(h.densities.iter().all(|d| *d >= 0.0));
        let mass: f64 = h.densities.iter().map(|d| d * h.bin_width()).sum();
        prop_assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ks_is_symmetric_and_bounded(
        mut a in proptest::collection::vec(-5.0f64..5.0, 1..100),
        mut b in proptest::collection::vec(-5.0f64..5.0, 1..100),
    ) {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (d_ab, crit) = ks_two_sample(&a, &b);
        let (d_ba, _) = ks_two_sample(&b, &a);
        prop_assert!((0.0..=1.0).contains(&d_ab));
        prop_assert_eq!(d_ab, d_ba);
        prop_assert!(crit > 0.0);
        prop_assert_eq!(ks_two_sample(&a, &a).0, 0.0);
    }

    #[test]
    fn jackknife_mean_is_pooled_mean(groups in proptest::collection::vec(
        proptest::collection::vec(-10.0f64..10.0, 1..20), 2..8)) {
        let (mean, se) = jackknife_mean(&groups, |x| x);
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let pooled = all.iter().sum::<f64>() / all.len() as f64;
        prop_assert!((mean - pooled).abs() < 1e-9);
        prop_assert!(se >= 0.0);
    }
}
