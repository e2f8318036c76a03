use serde::Serialize;
use serde_json::{json, Map, Value};

use freeclt::asymptotics::{moment_asymptotic, saddle_constants, AsymptoticConstants, SaddleOrder};
use freeclt::momproblem::{build_scaled_sequence, check_completely_monotone};
use freeclt::moments::{log_moment, log_moment_exact, mgf_log_y, moment_y, moment_y_sum, ModelParams, SemicircleLaw};
use freeclt::radius::{radius_curve, CatalanIndex, RadiusKind};
use freeclt::rmt::{self, EigScheme, SimConfig};
use freeclt::series::{moments_from_chi, verify_identities};
use freeclt::{BigReal, PrecisionContext, Real};

use crate::output::Output;
use crate::{
    AsymArgs, CatalanArg, Cli, CliError, Command, DensityArgs, KindArg, LogMomentsArgs, MgfArgs, MomentMethod,
    MomentsArgs, MonotoneArgs, RadiusArgs, SchemeArg, SeriesArgs, SimulateArgs,
};

struct Ctx<'a> {
    params: ModelParams,
    pc: PrecisionContext,
    digits: usize,
    out: Output<'a>,
}

impl Ctx<'_> {
    fn fmt(&self, v: &BigReal) -> String {
        v.to_sci_string(self.digits)
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let ctx = Ctx {
        params: ModelParams::parse(&g.sigma2)?,
        pc: PrecisionContext::new(g.bits)?,
        digits: g.digits.max(1),
        out: Output::new(cli),
    };
    match &cli.command {
        Command::Moments(a) => moments(&ctx, a),
        Command::LogMoments(a) => log_moments(&ctx, a),
        Command::Mgf(a) => mgf(&ctx, a),
        Command::C0 => c0(&ctx),
        Command::Asym(a) => asym(&ctx, a),
        Command::Radius(a) => radius(&ctx, a),
        Command::Monotone(a) => monotone(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, cli.global.seed, a),
        Command::SeriesVerify(a) => series_verify(&ctx, a),
        Command::Density(a) => density(&ctx, a),
    }
}

fn require_positive(name: &str, v: u32) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn moments(ctx: &Ctx, a: &MomentsArgs) -> Result<(), CliError> {
    require_positive("kmax", a.kmax)?;
    let values: Vec<BigReal> = match a.method {
        MomentMethod::Laguerre => (1..=a.kmax)
            .map(|k| moment_y(k, &ctx.params, ctx.pc))
            .collect::<Result<_, _>>()?,
        MomentMethod::Sum => (1..=a.kmax)
            .map(|k| moment_y_sum(k, &ctx.params, ctx.pc))
            .collect::<Result<_, _>>()?,
        MomentMethod::Chi => moments_from_chi(ctx.params.sigma_sq(), a.kmax as usize, ctx.pc)?,
    };
    let rows: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{},{}", i + 1, ctx.fmt(v)))
        .collect();
    ctx.out.csv("k,value", &rows, None)
}

fn log_moments(ctx: &Ctx, a: &LogMomentsArgs) -> Result<(), CliError> {
    require_positive("kmax", a.kmax)?;
    let mut rows = Vec::with_capacity(a.kmax as usize);
    for k in 1..=a.kmax {
        let v = if a.exact {
            log_moment_exact(k, &ctx.params)?.to_string()
        } else {
            ctx.fmt(&log_moment::<BigReal>(k, &ctx.params, ctx.pc)?)
        };
        rows.push(format!("{k},{v}"));
    }
    ctx.out.csv("k,value", &rows, None)
}

fn mgf(ctx: &Ctx, a: &MgfArgs) -> Result<(), CliError> {
    if a.points < 2 || a.smax <= a.smin || !a.smin.is_finite() || !a.smax.is_finite() {
        return Err(CliError::Usage("mgf needs --points >= 2 and --smin < --smax".into()));
    }
    let step = (a.smax - a.smin) / (a.points - 1) as f64;
    let mut rows = Vec::with_capacity(a.points);
    for i in 0..a.points {
        let s = a.smin + step * i as f64;
        let v: BigReal = mgf_log_y(&BigReal::from_f64(s, ctx.pc), &ctx.params, ctx.pc)?;
        rows.push(format!("{s},{}", ctx.fmt(&v)));
    }
    ctx.out.csv("s,value", &rows, None)
}

#[derive(Serialize)]
struct C0Report {
    sigma2: String,
    c0: f64,
    alpha0: f64,
    kappa: f64,
    c0_decimal: String,
    alpha0_decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_saddle: Option<Value>,
}

fn c0(ctx: &Ctx) -> Result<(), CliError> {
    let s: BigReal = ctx.params.sigma_sq_as(ctx.pc);
    let k = AsymptoticConstants::closed_form(&s, ctx.pc)?;
    // The normal-approximation saddle is specific to unit variance.
    let normal_saddle = if ctx.params.sigma_sq() == &freeclt::Rational::from_integer(1.into()) {
        let sc = saddle_constants::<BigReal>(SaddleOrder::Infinite, ctx.pc)?;
        Some(json!({ "kappa": sc.kappa.to_f64(), "c0": sc.c0.to_f64() }))
    } else {
        None
    };
    ctx.out.json(C0Report {
        sigma2: ctx.params.sigma_sq().to_string(),
        c0: k.c0.to_f64(),
        alpha0: k.alpha0.to_f64(),
        kappa: k.kappa.to_f64(),
        c0_decimal: ctx.fmt(&k.c0),
        alpha0_decimal: ctx.fmt(&k.alpha0),
        normal_saddle,
    })
}

fn asym(ctx: &Ctx, a: &AsymArgs) -> Result<(), CliError> {
    require_positive("kmax", a.kmax)?;
    let s: BigReal = ctx.params.sigma_sq_as(ctx.pc);
    let mut rows = Vec::with_capacity(a.kmax as usize);
    for k in 1..=a.kmax {
        let exact: BigReal = moment_y(k, &ctx.params, ctx.pc)?;
        let approx = moment_asymptotic(k, &s, ctx.pc)?;
        let rel = (exact.clone() / approx.clone() - BigReal::one(ctx.pc)).abs();
        rows.push(format!("{k},{},{},{}", ctx.fmt(&exact), ctx.fmt(&approx), rel.to_sci_string(6)));
    }
    ctx.out.csv("k,exact,asymptotic,rel_error", &rows, None)
}

fn radius(ctx: &Ctx, a: &RadiusArgs) -> Result<(), CliError> {
    require_positive("kmax", a.kmax)?;
    let kind = match a.kind {
        KindArg::Y => RadiusKind::YMoment,
        KindArg::Log => RadiusKind::LogMoment,
    };
    let index = match a.catalan {
        CatalanArg::K => CatalanIndex::K,
        CatalanArg::TwoK => CatalanIndex::TwoK,
    };
    let curve = radius_curve::<BigReal>(kind, a.kmax, &ctx.params, index, ctx.pc)?;
    let rows: Vec<String> = curve
        .points
        .iter()
        .map(|(k, r)| format!("{k},{}", ctx.fmt(r)))
        .collect();
    let c0 = freeclt::asymptotics::c0_of(&ctx.params.sigma_sq_as::<BigReal>(ctx.pc), ctx.pc)?;
    let extra = json!({
        "monotone_decreasing": curve.monotone_decreasing,
        "span": curve.span().map(|s| s.to_f64()),
        "c0": c0.to_f64(),
    });
    ctx.out.csv("k,r_k", &rows, Some(extra))
}

fn monotone(ctx: &Ctx, a: &MonotoneArgs) -> Result<(), CliError> {
    let seq = build_scaled_sequence(a.k_max, &ctx.params, ctx.pc)?;
    let report = check_completely_monotone(&seq, a.order)?;
    let mut v = serde_json::to_value(&report).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    if let (Value::Object(m), Some(t)) = (&mut v, ctx.out.elapsed()) {
        m.insert("runtime_s".into(), json!(t));
    }
    ctx.out.json(v)
}

fn simulate(ctx: &Ctx, seed: u64, a: &SimulateArgs) -> Result<(), CliError> {
    let config = SimConfig {
        dim: a.dim,
        n_factors: a.factors,
        trials: a.trials,
        sigma_sq: ctx.params.sigma_sq_as::<f64>(ctx.pc),
        seed,
        eig_scheme: match a.scheme {
            SchemeArg::IidNormal => EigScheme::IidNormal,
            SchemeArg::Quantile => EigScheme::Quantile,
        },
        bins: a.bins,
        range_mult: a.range_mult,
    };
    let sample = rmt::free_product_clt(&config)?;
    let hist = rmt::histogram(&sample, a.normalize)?;
    let c0 = config.c0()?;
    let law = SemicircleLaw::new(if a.normalize { 1.0 } else { c0 })?;

    let rows: Vec<String> = hist
        .edges
        .windows(2)
        .zip(&hist.densities)
        .map(|(w, d)| format!("{},{},{}", w[0], w[1], d))
        .collect();

    let max_abs_log = sample.max_abs_log();
    let mut moments = Vec::new();
    for m in rmt::empirical_moments(&sample, &[1, 2])? {
        let y_target: f64 = moment_y(m.k, &ctx.params, ctx.pc)?;
        let log_target: f64 = log_moment(m.k, &ctx.params, ctx.pc)?;
        moments.push(json!({
            "k": m.k,
            "y_moment": m.y_moment,
            "y_stderr": m.y_stderr,
            "y_theory": y_target,
            "log_moment": m.log_moment,
            "log_stderr": m.log_stderr,
            "log_theory": log_target,
        }));
    }
    let odd: Vec<Value> = [1, 3]
        .iter()
        .map(|&p| {
            let (mean, se) = rmt::jackknife_mean(&sample.per_trial, |x| x.powi(p));
            json!({ "power": p, "mean": mean, "stderr": se })
        })
        .collect();
    let reflected: Vec<f64> = sample.log_eigs.iter().rev().map(|x| -x).collect();
    let (ks, ks_crit) = rmt::ks_two_sample(&sample.log_eigs, &reflected);

    let mut extra = Map::new();
    extra.insert("config".into(), json!(config));
    extra.insert("eigenvalues".into(), json!(sample.log_eigs.len()));
    extra.insert("c0".into(), json!(c0));
    extra.insert("max_abs_log".into(), json!(max_abs_log));
    extra.insert("max_abs_log_over_c0".into(), json!(max_abs_log / c0));
    extra.insert("out_of_range".into(), json!(hist.out_of_range));
    extra.insert("normalized".into(), json!(hist.normalized));
    extra.insert("sup_distance_to_semicircle".into(), json!(hist.sup_distance(&law)));
    extra.insert("moments".into(), Value::Array(moments));
    extra.insert("odd_log_moments".into(), Value::Array(odd));
    extra.insert("reflection_ks".into(), json!({ "statistic": ks, "critical_1pct": ks_crit }));
    ctx.out.csv("bin_left,bin_right,density", &rows, Some(Value::Object(extra)))
}

fn series_verify(ctx: &Ctx, a: &SeriesArgs) -> Result<(), CliError> {
    let checks = verify_identities(a.z_order, a.eps_order)?;
    let mut m = Map::new();
    for c in &checks {
        m.insert(c.name.into(), json!(if c.pass { "pass" } else { "fail" }));
    }
    m.insert("all_pass".into(), json!(checks.iter().all(|c| c.pass)));
    m.insert("details".into(), json!(checks));
    ctx.out.json(Value::Object(m))
}

fn density(ctx: &Ctx, a: &DensityArgs) -> Result<(), CliError> {
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let c0 = freeclt::asymptotics::c0_of(&ctx.params.sigma_sq_as::<f64>(ctx.pc), ctx.pc)?;
    let radius = if a.normalize { 1.0 } else { c0 };
    let law = SemicircleLaw::new(radius)?;
    let rows: Vec<String> = (0..a.points)
        .map(|i| {
            let t = -radius + 2.0 * radius * i as f64 / (a.points - 1) as f64;
            format!("{t},{}", law.pdf(t))
        })
        .collect();
    ctx.out.csv("t,density", &rows, Some(json!({ "c0": c0, "normalized": a.normalize })))
}
