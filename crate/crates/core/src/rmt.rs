//! Monte Carlo for the free multiplicative central limit with large
//! Hermitian positive-definite matrices.
//!
//! Factors `X_i = U diag(e^{g/√n}) U†` with Haar `U` are asymptotically free,
//! so the spectrum of `Y_n = X_n^{1/2} ⋯ X_1^{1/2} X_1^{1/2} ⋯ X_n^{1/2}`
//! approximates the law of `Y`. Every trial draws from its own ChaCha8
//! stream (`seed`, stream = trial index), so results do not depend on
//! scheduling or thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::asymptotics::c0_of;
use crate::error::{Error, Result};
use crate::moments::SemicircleLaw;
use crate::scalar::PrecisionContext;

pub type ComplexMatrix = DMatrix<Complex64>;

/// How the log-eigenvalues of each factor are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigScheme {
    /// Independent `N(0, σ²)` draws.
    #[default]
    IidNormal,
    /// Normal quantiles at `(i − 1/2)/dim`, randomly permuted.
    Quantile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dim: usize,
    pub n_factors: usize,
    pub trials: usize,
    pub sigma_sq: f64,
    pub seed: u64,
    pub eig_scheme: EigScheme,
    pub bins: usize,
    pub range_mult: f64,
}

impl SimConfig {
    pub const DEFAULT_BINS: usize = 101;
    pub const DEFAULT_RANGE_MULT: f64 = 1.1;

    /// 128×128 matrices, 64 factors, 20 trials.
    pub fn desk(sigma_sq: f64, seed: u64) -> Self {
        Self {
            dim: 128,
            n_factors: 64,
            trials: 20,
            sigma_sq,
            seed,
            eig_scheme: EigScheme::IidNormal,
            bins: Self::DEFAULT_BINS,
            range_mult: Self::DEFAULT_RANGE_MULT,
        }
    }

    /// 512×512 matrices, 256 factors, 100 trials: 51,200 eigenvalues.
    pub fn full(sigma_sq: f64, seed: u64) -> Self {
        Self {
            dim: 512,
            n_factors: 256,
            trials: 100,
            ..Self::desk(sigma_sq, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.dim < 2 {
            return bad(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.n_factors < 1 || self.trials < 1 {
            return bad("factors and trials must be positive".into());
        }
        if !(self.sigma_sq > 0.0 && self.sigma_sq.is_finite()) {
            return bad(format!("sigma_sq must be positive, got {}", self.sigma_sq));
        }
        if self.bins < 3 {
            return bad(format!("bins must be at least 3, got {}", self.bins));
        }
        if !(self.range_mult >= 1.0 && self.range_mult.is_finite()) {
            return bad(format!("range_mult must be at least 1, got {}", self.range_mult));
        }
        Ok(())
    }

    /// The bound `c₀(σ²)` in double precision.
    pub fn c0(&self) -> Result<f64> {
        c0_of(&self.sigma_sq, PrecisionContext::default())
    }
}

/// The RNG of one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn complex_gaussian<G: Rng + ?Sized>(rng: &mut G) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<G: Rng + ?Sized>(dim: usize, rng: &mut G) -> ComplexMatrix {
    let z = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).scale_mut_complex(phase);
    }
    q
}

trait ScaleColumn {
    fn scale_mut_complex(&mut self, c: Complex64);
}

impl<S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>> ScaleColumn
    for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_complex(&mut self, c: Complex64) {
        for v in self.iter_mut() {
            *v *= c;
        }
    }
}

/// `U diag(d) U†` for real `d`.
fn conjugate_diag(u: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let mut ud = u.clone();
    for (j, &w) in d.iter().enumerate() {
        ud.column_mut(j).scale_mut_complex(Complex64::new(w, 0.0));
    }
    ud * u.adjoint()
}

/// A factor `X = U diag(e^{ℓ}) U†`, kept in spectral form.
#[derive(Debug, Clone)]
pub struct HermitianFactor {
    pub unitary: ComplexMatrix,
    /// The log-eigenvalues `ℓ_i = scale·g_i`.
    pub log_eigs: Vec<f64>,
}

impl HermitianFactor {
    pub fn matrix(&self) -> ComplexMatrix {
        let d: Vec<f64> = self.log_eigs.iter().map(|l| l.exp()).collect();
        conjugate_diag(&self.unitary, &d)
    }

    /// Positive square root, from the same spectral decomposition.
    pub fn sqrt_matrix(&self) -> ComplexMatrix {
        let d: Vec<f64> = self.log_eigs.iter().map(|l| (0.5 * l).exp()).collect();
        conjugate_diag(&self.unitary, &d)
    }
}

/// Standard-normal draws per `scheme`, scaled by `sigma`.
fn draw_log_eigs<G: Rng + ?Sized>(dim: usize, sigma: f64, scheme: EigScheme, rng: &mut G) -> Vec<f64> {
    match scheme {
        EigScheme::IidNormal => {
            let n = Normal::new(0.0, sigma).expect("positive standard deviation");
            (0..dim).map(|_| n.sample(rng)).collect()
        }
        EigScheme::Quantile => {
            let n = NormalDist::new(0.0, sigma).expect("positive standard deviation");
            let mut g: Vec<f64> = (0..dim)
                .map(|i| n.inverse_cdf((i as f64 + 0.5) / dim as f64))
                .collect();
            g.shuffle(rng);
            g
        }
    }
}

/// Draws `X = U diag(exp(scale·g)) U†` with Haar `U` and `g` per `scheme`.
pub fn sample_factor<G: Rng + ?Sized>(
    dim: usize,
    sigma_sq: f64,
    scale: f64,
    scheme: EigScheme,
    rng: &mut G,
) -> HermitianFactor {
    let g = draw_log_eigs(dim, sigma_sq.sqrt(), scheme, rng);
    let unitary = haar_unitary(dim, rng);
    HermitianFactor {
        unitary,
        log_eigs: g.into_iter().map(|x| scale * x).collect(),
    }
}

/// Log-eigenvalues of `Y_n` across all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    /// All log-eigenvalues, sorted ascending.
    pub log_eigs: Vec<f64>,
    /// Sorted log-eigenvalues of each trial, in trial order.
    pub per_trial: Vec<Vec<f64>>,
    pub config: SimConfig,
}

impl SpectrumSample {
    pub fn max_abs_log(&self) -> f64 {
        self.log_eigs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn run_trial(config: &SimConfig, trial: usize) -> Result<Vec<f64>> {
    let mut rng = trial_rng(config.seed, trial);
    let scale = 1.0 / (config.n_factors as f64).sqrt();
    let mut y = ComplexMatrix::identity(config.dim, config.dim);
    for step in 0..config.n_factors {
        let x = sample_factor(config.dim, config.sigma_sq, scale, config.eig_scheme, &mut rng);
        let s = x.sqrt_matrix();
        y = &s * y * &s;
        y = (&y + y.adjoint()) * Complex64::new(0.5, 0.0);
        if nalgebra::linalg::Cholesky::new(y.clone()).is_none() {
            return Err(Error::Numerical {
                trial,
                step,
                detail: format!(
                    "product lost positive definiteness (dim {}, sigma^2 {})",
                    config.dim, config.sigma_sq
                ),
            });
        }
    }
    let eigs = y.symmetric_eigenvalues();
    let mut logs = Vec::with_capacity(config.dim);
    for &l in eigs.iter() {
        if !(l > 0.0) {
            return Err(Error::Numerical {
                trial,
                step: config.n_factors,
                detail: format!("non-positive eigenvalue {l:e} in the final spectrum"),
            });
        }
        logs.push(l.ln());
    }
    logs.sort_by(f64::total_cmp);
    Ok(logs)
}

/// Runs all trials (in parallel) and collects the log-spectrum.
pub fn free_product_clt(config: &SimConfig) -> Result<SpectrumSample> {
    config.validate()?;
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<Vec<_>>>()?;
    let mut log_eigs: Vec<f64> = per_trial.iter().flatten().copied().collect();
    log_eigs.sort_by(f64::total_cmp);
    Ok(SpectrumSample {
        log_eigs,
        per_trial,
        config: config.clone(),
    })
}

/// Unit-mass density histogram on `[−range_mult·c₀, range_mult·c₀]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    /// Samples outside the range (not counted in the densities).
    pub out_of_range: usize,
    /// Whether the x-axis is in units of `c₀`.
    pub normalized: bool,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Largest gap between a bin density and the law's mean density over
    /// the same bin.
    pub fn sup_distance(&self, law: &SemicircleLaw) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| {
                let expected = (law.cdf(w[1]) - law.cdf(w[0])) / (w[1] - w[0]);
                (d - expected).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Bins `values` on `[−half_width, half_width]`; used by [`histogram`].
pub fn histogram_of(values: &[f64], half_width: f64, bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Domain("cannot histogram an empty sample".into()));
    }
    if bins < 1 || !(half_width > 0.0) {
        return Err(Error::Domain("histogram needs bins >= 1 and a positive range".into()));
    }
    let width = 2.0 * half_width / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| -half_width + i as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    let mut out_of_range = 0;
    for &v in values {
        if !(v >= -half_width && v <= half_width) {
            out_of_range += 1;
            continue;
        }
        let i = (((v + half_width) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let inside = values.len() - out_of_range;
    if inside == 0 {
        return Err(Error::Domain("no samples fall inside the histogram range".into()));
    }
    let densities = counts
        .iter()
        .map(|&c| c as f64 / (inside as f64 * width))
        .collect();
    Ok(Histogram {
        edges,
        densities,
        out_of_range,
        normalized: false,
    })
}

/// Histogram of the log-spectrum on `±range_mult·c₀` with the configured
/// bin count; with `normalize` the x-axis is divided by `c₀`.
pub fn histogram(sample: &SpectrumSample, normalize: bool) -> Result<Histogram> {
    let cfg = &sample.config;
    let c0 = cfg.c0()?;
    if normalize {
        let scaled: Vec<f64> = sample.log_eigs.iter().map(|x| x / c0).collect();
        let mut h = histogram_of(&scaled, cfg.range_mult, cfg.bins)?;
        h.normalized = true;
        Ok(h)
    } else {
        histogram_of(&sample.log_eigs, cfg.range_mult * c0, cfg.bins)
    }
}

/// Mean of `f` over all eigenvalues with its jackknife-over-trials
/// standard error.
pub fn jackknife_mean(per_trial: &[Vec<f64>], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let sums: Vec<(f64, usize)> = per_trial
        .iter()
        .map(|t| (t.iter().map(|&x| f(x)).sum::<f64>(), t.len()))
        .collect();
    let total: f64 = sums.iter().map(|s| s.0).sum();
    let count: usize = sums.iter().map(|s| s.1).sum();
    let mean = total / count as f64;
    let n = sums.len();
    if n < 2 {
        return (mean, f64::NAN);
    }
    let loo: Vec<f64> = sums
        .iter()
        .map(|&(s, c)| (total - s) / (count - c) as f64)
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / n as f64;
    let var = loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (mean, var.sqrt())
}

/// Empirical `φ(Y^k)` and `φ(log^{2k} Y)` with jackknife standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoment {
    pub k: u32,
    pub y_moment: f64,
    pub y_stderr: f64,
    pub log_moment: f64,
    pub log_stderr: f64,
}

/// `k·max|log λ|` must stay below this for `λ^k` to be safely summed.
pub const OVERFLOW_LOG_LIMIT: f64 = 700.0 * std::f64::consts::LN_2;

pub fn empirical_moments(sample: &SpectrumSample, ks: &[u32]) -> Result<Vec<EmpiricalMoment>> {
    let max_abs_log = sample.max_abs_log();
    ks.iter()
        .map(|&k| {
            if k as f64 * max_abs_log >= OVERFLOW_LOG_LIMIT {
                return Err(Error::OverflowGuard { k, max_abs_log });
            }
            let (y_moment, y_stderr) = jackknife_mean(&sample.per_trial, |x| (k as f64 * x).exp());
            let (log_moment, log_stderr) = jackknife_mean(&sample.per_trial, |x| x.powi(2 * k as i32));
            Ok(EmpiricalMoment {
                k,
                y_moment,
                y_stderr,
                log_moment,
                log_stderr,
            })
        })
        .collect()
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic 1% critical
/// value `1.628·√((n+m)/(nm))`. Inputs must be sorted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let crit = 1.628 * (((n + m) as f64) / ((n * m) as f64)).sqrt();
    (d, crit)
}
