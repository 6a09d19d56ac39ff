use std::collections::BTreeMap;

use confcalc::conformable::{
    chain_rule_residual, compose_orders, conf_deriv, mixed_partials_residual,
};
use confcalc::hardy::{
    exp_weight_instance, hardy_general, hardy_uncertified, hpw_anisotropic_check, hpw_check,
    power_weight_instance, ExpWeightConfig, HardyOptions, InequalityReport, PowerWeightConfig,
    WeightSystem, DEFAULT_GRID, DEFAULT_TOL,
};
use confcalc::identities::{
    divergence_residual, gauss_mean_value_residual, green_first_residual, green_second_residual,
    picone_l, picone_r, IdentityResidual,
};
use confcalc::optimize::{estimate_best_constant, OptimizerConfig, QuotientProblem};
use confcalc::quadrature::{fundamental_theorem_residuals, integration_by_parts_residual};
use confcalc::report::{format_float, reports_to_csv};
use confcalc::suite::{bump_suite, random_point, rng, shifted_bump_suite};
use confcalc::{
    parse, AlphaOrder, BoxDomain, Error, ExponentVec, Expr, PiconePair, Point, QuadratureSpec,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::*;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or infeasible parameters.
    Usage(String),
    /// The computation ran and the check did not hold.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SubsolutionViolated { .. } | Error::AllRestartsInfeasible => {
                Failure::Verification(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

/// Everything a command produces.
pub struct Outcome {
    pub report: Value,
    pub csv: String,
    pub pass: bool,
    /// Short human-readable result.
    pub summary: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: String,
    params: Value,
    seed: u64,
    quadrature: &'a QuadratureSpec,
    version: &'static str,
    timestamp: Option<&'a str>,
}

pub struct Context<'a> {
    pub global: &'a GlobalOpts,
    pub spec: QuadratureSpec,
}

impl Context<'_> {
    fn manifest<P: Serialize>(&self, command: &str, params: &P) -> Value {
        let m = RunManifest {
            command: command.to_string(),
            params: serde_json::to_value(params).expect("arguments serialize"),
            seed: self.global.seed,
            quadrature: &self.spec,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: self.global.timestamp.as_deref(),
        };
        serde_json::to_value(m).expect("manifest serializes")
    }

    fn tol(&self, default: f64) -> f64 {
        self.global.tol.unwrap_or(default)
    }
}

pub fn spec_from(global: &GlobalOpts) -> Res<QuadratureSpec> {
    Ok(QuadratureSpec::new(global.panels, global.order, true)?)
}

fn numbers(text: &str, what: &str) -> Res<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("invalid number '{s}' in {what}")))
        })
        .collect()
}

fn point(text: &str) -> Res<Point> {
    Point::new(numbers(text, "point")?).map_err(|e| Failure::Usage(e.to_string()))
}

fn interval(text: &str) -> Res<(f64, f64)> {
    let Some((a, b)) = text.split_once(':') else {
        return usage(format!("expected an interval a:b, got '{text}'"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("invalid interval '{text}'")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// `a:b,c:d,...`; one interval is repeated to dimension `n`.
fn domain(text: &str, n: Option<usize>) -> Res<BoxDomain> {
    let parts = text
        .split(',')
        .map(interval)
        .collect::<Res<Vec<_>>>()?;
    let parts = match (parts.len(), n) {
        (1, Some(n)) => vec![parts[0]; n],
        (len, Some(n)) if len != n => {
            return usage(format!("box has {len} intervals but n = {n}"));
        }
        _ => parts,
    };
    let (lo, hi) = parts.into_iter().unzip();
    Ok(BoxDomain::new(lo, hi)?)
}

fn exponents(text: &str, n: usize) -> Res<ExponentVec> {
    let p = numbers(text, "p")?;
    let p = match p.len() {
        1 => vec![p[0]; n],
        len if len == n => p,
        len => return usage(format!("{len} exponents given for n = {n}")),
    };
    Ok(ExponentVec::new(p)?)
}

fn order(v: f64) -> Res<AlphaOrder> {
    Ok(AlphaOrder::new(v)?)
}

/// Largest variable index used by any of `texts`, at least 1.
fn inferred_dim(texts: &[&str]) -> Res<usize> {
    let mut n = 1;
    for t in texts {
        let e = parse(t, usize::MAX).map_err(|e| Failure::Usage(format!("in '{t}': {e}")))?;
        n = n.max(e.max_var());
    }
    Ok(n)
}

fn expr(text: &str, n: usize) -> Res<Expr> {
    parse(text, n).map_err(|e| Failure::Usage(format!("in '{text}': {e}")))
}

/// Header plus one row of the top-level fields; nested values as JSON.
fn flat_csv(report: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(map) = report {
        for (k, v) in map {
            if k == "manifest" {
                continue;
            }
            header.push(k.clone());
            row.push(match v {
                Value::Number(x) if x.is_f64() => format_float(x.as_f64().unwrap()),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            });
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    w.write_record(&row).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn deriv(ctx: &Context, args: &DerivArgs) -> Res<Outcome> {
    let at = args.at.as_deref().map(point).transpose()?;
    let n = match (args.n, &at) {
        (Some(n), _) => n,
        (None, Some(p)) => p.dim(),
        (None, None) => inferred_dim(&[&args.expr])?.max(args.var),
    };
    if args.var == 0 || args.var > n {
        return usage(format!("--var {} is outside 1..={n}", args.var));
    }
    let e = expr(&args.expr, n)?;
    let at = match at {
        Some(p) if p.dim() != n => return usage(format!("point has {} coordinates, expected {n}", p.dim())),
        Some(p) => p,
        None => Point::new(vec![1.0; n]).expect("ones are positive"),
    };
    let d = conf_deriv(&e, args.var, order(args.alpha)?);
    let value = d.eval(&at).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = json!({
        "manifest": ctx.manifest("deriv", args),
        "expr": e.to_string(),
        "derivative": d.to_string(),
        "value": value,
    });
    Ok(Outcome {
        csv: flat_csv(&report),
        report,
        pass: true,
        summary: format!("{d}\n{}", format_float(value)),
    })
}

#[derive(Serialize)]
struct CheckReport {
    identity: &'static str,
    residual: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<&'static str>,
    details: BTreeMap<&'static str, f64>,
}

impl CheckReport {
    fn new(identity: &'static str, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            identity,
            residual,
            tolerance,
            pass: residual <= tolerance,
            status: None,
            details: BTreeMap::new(),
        }
    }

    fn detail(mut self, name: &'static str, value: f64) -> Self {
        self.details.insert(name, value);
        self
    }

    fn from_identity(identity: &'static str, r: IdentityResidual, tolerance: f64) -> Self {
        let mut c = CheckReport::new(identity, r.residual / (1.0 + r.flux.abs()), tolerance)
            .detail("volume", r.volume)
            .detail("flux", r.flux)
            .detail("absolute_residual", r.residual);
        c.pass = r.within(tolerance);
        c
    }
}

pub fn check(ctx: &Context, cmd: &CheckCommand) -> Res<Outcome> {
    let spec = &ctx.spec;
    let (name, params, report) = match cmd {
        CheckCommand::Picone(a) => ("picone", ctx.manifest("check picone", a), picone(ctx, a)?),
        CheckCommand::Green1(a) | CheckCommand::Green2(a) => {
            let first = matches!(cmd, CheckCommand::Green1(_));
            let omega = domain(&a.domain, None)?;
            let n = omega.dim();
            let (u, v) = (expr(&a.u, n)?, expr(&a.v, n)?);
            let alpha = order(a.alpha)?;
            let tol = ctx.tol(1e-7);
            if first {
                let r = green_first_residual(&u, &v, &omega, alpha, spec)?;
                ("green1", ctx.manifest("check green1", a), CheckReport::from_identity("green1", r, tol))
            } else {
                let r = green_second_residual(&u, &v, &omega, alpha, spec)?;
                ("green2", ctx.manifest("check green2", a), CheckReport::from_identity("green2", r, tol))
            }
        }
        CheckCommand::Divergence(a) => {
            let n = a.field.len();
            let omega = domain(&a.domain, Some(n))?;
            let f = a.field.iter().map(|t| expr(t, n)).collect::<Res<Vec<_>>>()?;
            let r = divergence_residual(&f, &omega, order(a.alpha)?, spec)?;
            (
                "divergence",
                ctx.manifest("check divergence", a),
                CheckReport::from_identity("divergence", r, ctx.tol(1e-7)),
            )
        }
        CheckCommand::Parts(a) => {
            let (lo, hi) = interval(&a.domain)?;
            let (f, g) = (expr(&a.f, 1)?, expr(&a.g, 1)?);
            let r = integration_by_parts_residual(&f, &g, lo, hi, order(a.alpha)?, spec)?;
            ("parts", ctx.manifest("check parts", a), CheckReport::new("parts", r, ctx.tol(1e-8)))
        }
        CheckCommand::Ftc(a) => {
            let f = expr(&a.f, 1)?;
            let (r1, r2) = fundamental_theorem_residuals(&f, a.a, a.t, order(a.alpha)?, spec)?;
            let c = CheckReport::new("ftc", r1.max(r2), ctx.tol(1e-8))
                .detail("r1", r1)
                .detail("r2", r2);
            ("ftc", ctx.manifest("check ftc", a), c)
        }
        CheckCommand::Clairaut(a) => {
            let at = point(&a.at)?;
            let f = expr(&a.f, at.dim())?;
            if at.dim() < 2 {
                return usage("clairaut needs a point with at least two coordinates");
            }
            let r = mixed_partials_residual(&f, order(a.alpha)?, order(a.beta)?, &at)?;
            ("clairaut", ctx.manifest("check clairaut", a), CheckReport::new("clairaut", r, ctx.tol(1e-9)))
        }
        CheckCommand::Chain(a) => {
            let at = point(&a.at)?;
            let outer = expr(&a.f, 1)?;
            let inner = expr(&a.v, at.dim())?;
            if a.var == 0 || a.var > at.dim() {
                return usage(format!("--var {} is outside 1..={}", a.var, at.dim()));
            }
            let r = chain_rule_residual(&outer, &inner, a.var, order(a.alpha)?, &at)?;
            ("chain", ctx.manifest("check chain", a), CheckReport::new("chain", r, ctx.tol(1e-9)))
        }
        CheckCommand::Compose(a) => {
            let f = expr(&a.f, 1)?;
            let at = Point::new(vec![a.at]).map_err(|e| Failure::Usage(e.to_string()))?;
            let (lhs, rhs) = compose_orders(&f, order(a.alpha)?, order(a.beta)?, &at)?;
            let tol = ctx.tol(1e-12);
            let mut c = CheckReport::new("compose", (lhs - rhs).abs(), tol)
                .detail("lhs", lhs)
                .detail("rhs", rhs);
            // a nonzero gap is the expected finding, not a failure
            c.status = Some(if c.residual > tol { "not-composable" } else { "composable" });
            c.pass = true;
            ("compose", ctx.manifest("check compose", a), c)
        }
        CheckCommand::Gauss(a) => {
            let omega = domain(&a.domain, None)?;
            let u = expr(&a.u, omega.dim())?;
            let flux = gauss_mean_value_residual(&u, &omega, order(a.alpha)?, spec)?;
            ("gauss", ctx.manifest("check gauss", a), CheckReport::new("gauss", flux, ctx.tol(1e-9)))
        }
    };
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value
        .as_object_mut()
        .expect("object")
        .insert("manifest".into(), params);
    let summary = match report.status {
        Some(s) => format!("{name}: {s}, gap {}", format_float(report.residual)),
        None => format!(
            "{name}: {} (residual {}, tolerance {})",
            if report.pass { "pass" } else { "FAIL" },
            format_float(report.residual),
            format_float(report.tolerance)
        ),
    };
    Ok(Outcome {
        csv: flat_csv(&value),
        pass: report.pass,
        report: value,
        summary,
    })
}

fn picone(ctx: &Context, a: &PiconeArgs) -> Res<CheckReport> {
    let at = a.at.as_deref().map(point).transpose()?;
    let n = match (a.n, &at) {
        (Some(n), _) => n,
        (None, Some(p)) => p.dim(),
        (None, None) => inferred_dim(&[&a.u, &a.v])?,
    };
    let pair = PiconePair::new(expr(&a.u, n)?, expr(&a.v, n)?);
    let p = exponents(&a.p, n)?;
    let alpha = order(a.alpha)?;
    let points = match at {
        Some(pt) => vec![pt],
        None => {
            let mut r = rng(ctx.global.seed);
            (0..a.points.max(1)).map(|_| random_point(n, 0.5, 3.0, &mut r)).collect()
        }
    };
    let (mut gap, mut min_l, mut min_a1, mut min_a2) = (0.0f64, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for pt in &points {
        let r = picone_r(&pair, alpha, &p, pt)?;
        let s = picone_l(&pair, alpha, &p, pt)?;
        gap = gap.max((r - s.l).abs() / (1.0 + s.l.abs()));
        min_l = min_l.min(s.l);
        min_a1 = min_a1.min(s.a1);
        min_a2 = min_a2.min(s.a2);
    }
    let mut c = CheckReport::new("picone", gap, ctx.tol(1e-9))
        .detail("points", points.len() as f64)
        .detail("min_l", min_l)
        .detail("min_a1", min_a1)
        .detail("min_a2", min_a2);
    c.pass &= min_l >= -1e-12 && min_a1 >= -1e-12 && min_a2 >= -1e-12;
    Ok(c)
}

pub fn hardy(ctx: &Context, args: &HardyArgs) -> Res<Outcome> {
    let omega = domain(&args.domain, args.n)?;
    let n = omega.dim();
    let alpha = order(args.alpha)?;
    let tol = ctx.tol(DEFAULT_TOL);
    let spec = &ctx.spec;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for {}", label(args.theorem))));

    let us: Vec<Expr> = match &args.u {
        Some(t) => vec![expr(t, n)?],
        None if args.shifted => shifted_bump_suite(&omega, args.suite, ctx.global.seed),
        None => bump_suite(&omega, args.suite, ctx.global.seed),
    };

    let (reports, constants): (Vec<InequalityReport>, Vec<f64>) = match args.theorem {
        Theorem::Hpw => {
            let reports = us
                .par_iter()
                .map(|u| Ok(hpw_check(u, &omega, alpha, spec)?.report(alpha, spec, tol)))
                .collect::<Res<_>>()?;
            let c = (n as f64 - 2.0) / 2.0;
            (reports, vec![c * c])
        }
        Theorem::HpwAniso => {
            let p = exponents(&args.p, n)?;
            let m = need(args.m, "m")?;
            let reports = us
                .par_iter()
                .map(|u| Ok(hpw_anisotropic_check(u, &omega, alpha, &p, m, spec, tol)?))
                .collect::<Res<_>>()?;
            (reports, p.as_slice().iter().map(|pk| (pk - 1.0) * m.abs()).collect())
        }
        theorem => {
            let (v, ws, p) = weights(args, theorem, n, alpha, &need)?;
            let opts = HardyOptions { tol, grid: DEFAULT_GRID };
            let name = label(theorem);
            let reports = us
                .par_iter()
                .map(|u| {
                    let r = if args.uncertified {
                        hardy_uncertified(name, u, &v, &ws, alpha, &p, &omega, spec, &opts)
                    } else {
                        hardy_general(name, u, &v, &ws, alpha, &p, &omega, spec, &opts)
                    };
                    Ok(r?)
                })
                .collect::<Res<_>>()?;
            (reports, ws.l.clone())
        }
    };

    let passed = reports.iter().filter(|r| r.pass).count();
    let pass = passed == reports.len();
    let worst = reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let report = json!({
        "manifest": ctx.manifest(&format!("hardy {}", label(args.theorem)), args),
        "summary": {
            "theorem": label(args.theorem),
            "count": reports.len(),
            "passed": passed,
            "min_margin": worst,
            "constants": constants,
            "pass": pass,
        },
        "reports": reports,
    });
    let csv = reports_to_csv(&reports)?;
    Ok(Outcome {
        report,
        csv,
        pass,
        summary: format!(
            "hardy {}: {passed}/{} passed, min margin {}",
            label(args.theorem),
            reports.len(),
            format_float(worst)
        ),
    })
}

fn label(t: Theorem) -> &'static str {
    match t {
        Theorem::General => "3.2",
        Theorem::Power => "3.3",
        Theorem::PowerM0 => "3.4",
        Theorem::PowerMAlpha => "3.5",
        Theorem::Exponential => "3.6",
        Theorem::Isotropic => "3.7",
        Theorem::Hpw => "hpw",
        Theorem::HpwAniso => "hpw-aniso",
    }
}

type Need<'a> = dyn Fn(Option<f64>, &str) -> Res<f64> + 'a;

fn weights(
    args: &HardyArgs,
    theorem: Theorem,
    n: usize,
    alpha: AlphaOrder,
    need: &Need,
) -> Res<(Expr, WeightSystem, ExponentVec)> {
    let p = || exponents(&args.p, n);
    Ok(match theorem {
        Theorem::General => {
            let v = args
                .v
                .as_deref()
                .ok_or_else(|| Failure::Usage("--v is required for 3.2".into()))?;
            if args.w.len() != n || args.h.len() != n {
                return usage(format!("3.2 needs {n} --w and {n} --h weights"));
            }
            let l = numbers(args.l.as_deref().unwrap_or(""), "--l")?;
            let w = args.w.iter().map(|t| expr(t, n)).collect::<Res<Vec<_>>>()?;
            let h = args.h.iter().map(|t| expr(t, n)).collect::<Res<Vec<_>>>()?;
            (expr(v, n)?, WeightSystem::new(w, h, l)?, p()?)
        }
        Theorem::Power => {
            let cfg = PowerWeightConfig::new(need(args.m, "m")?, need(args.a, "a")?, alpha, p()?)?;
            let (v, ws) = power_weight_instance(&cfg, n)?;
            (v, ws, p()?)
        }
        Theorem::PowerM0 => {
            let cfg = PowerWeightConfig::corollary_34(need(args.a, "a")?, alpha, p()?)?;
            let (v, ws) = power_weight_instance(&cfg, n)?;
            (v, ws, p()?)
        }
        Theorem::PowerMAlpha => {
            let cfg = PowerWeightConfig::corollary_35(need(args.a, "a")?, alpha, p()?)?;
            let (v, ws) = power_weight_instance(&cfg, n)?;
            (v, ws, p()?)
        }
        Theorem::Exponential => {
            let cfg = ExpWeightConfig::new(need(args.m, "m")?, alpha, p()?)?;
            let (v, ws) = exp_weight_instance(&cfg, n)?;
            (v, ws, p()?)
        }
        Theorem::Isotropic => {
            let cfg = ExpWeightConfig::remark_37(n, alpha)?;
            let (v, ws) = exp_weight_instance(&cfg, n)?;
            (v, ws, ExponentVec::uniform(2.0, n)?)
        }
        Theorem::Hpw | Theorem::HpwAniso => unreachable!("handled by the caller"),
    })
}

pub fn constant(ctx: &Context, args: &ConstantArgs) -> Res<Outcome> {
    let omega = domain(&args.domain, args.n)?;
    let n = omega.dim();
    let alpha = order(args.alpha)?;
    let p = ExponentVec::uniform(args.p, n)?;
    let bounds = interval(&args.bounds)?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Failure::Usage(format!("--{flag} is required")));
    let problem = match args.theorem {
        ConstantTheorem::Power => {
            let cfg = PowerWeightConfig::new(need(args.m, "m")?, need(args.a, "a")?, alpha, p)?;
            QuotientProblem::power(&cfg, &omega, args.d, bounds, &ctx.spec)?
        }
        ConstantTheorem::Exponential => {
            let cfg = ExpWeightConfig::new(need(args.m, "m")?, alpha, p)?;
            QuotientProblem::exponential(&cfg, &omega, args.d, bounds, &ctx.spec)?
        }
    };
    let cfg = OptimizerConfig {
        restarts: args.restarts,
        max_evals: args.max_evals,
        seed: ctx.global.seed,
        ..Default::default()
    };
    let est = estimate_best_constant(&problem, &cfg, None)?;
    let pass = est.valid(ctx.tol(1e-6));
    let summary = format!(
        "constant {}: L = {}, Q* = {}, gap {}",
        est.theorem,
        format_float(est.paper_constant),
        format_float(est.q_star),
        format_float(est.gap)
    );
    let mut report = serde_json::to_value(&est).expect("estimate serializes");
    let obj = report.as_object_mut().expect("object");
    obj.insert("pass".into(), Value::Bool(pass));
    obj.insert("optimizer".into(), serde_json::to_value(cfg).expect("config serializes"));
    obj.insert("manifest".into(), ctx.manifest("constant", args));
    Ok(Outcome {
        csv: flat_csv(&report),
        report,
        pass,
        summary,
    })
}
