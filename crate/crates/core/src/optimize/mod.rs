//! Numerical probe of Hardy constants: minimize
//! `Σ_k∫W_k|D_k u|^p d_αx / Σ_k∫H_k|u|^p d_αx` over the family
//! `u_θ = B·(1 + Σ_j θ_j φ_j)` where `B = Π_k(x_k−a_k)(b_k−x_k)`.

mod nelder_mead;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformable::{conf_deriv, AlphaOrder};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::hardy::{
    exp_weight_instance, power_weight_instance, ExpWeightConfig, PowerWeightConfig, WeightSystem,
};
use crate::quadrature::{pairwise_sum, BoxDomain, QuadratureSpec, TensorGrid};
use crate::suite::{box_bubble, rng};

pub use nelder_mead::{nelder_mead, Minimum, OptimizerConfig};

/// Largest supported family dimension.
pub const MAX_FAMILY_DIM: usize = 8;
/// Sample points per axis for the `u_θ ≥ 0` check.
const FEASIBILITY_GRID: usize = 21;

/// Basis function `φ_j = t_{(j mod n)+1}^{⌊j/n⌋+1}` with `t_k` the
/// coordinate rescaled to `[0, 1]`; `j` is 0-based.
pub fn basis_function(omega: &BoxDomain, j: usize) -> Expr {
    let n = omega.dim();
    let k = j % n + 1;
    let power = (j / n + 1) as f64;
    let (a, b) = (omega.lo(k), omega.hi(k));
    let t = Expr::mul(
        Expr::Const(1.0 / (b - a)),
        Expr::sub(Expr::var(k), Expr::Const(a)),
    );
    Expr::pow(t, power)
}

/// Quotient minimization problem with the family sampled once at the
/// quadrature nodes; evaluating a `θ` is then linear algebra only.
#[derive(Debug, Clone)]
pub struct QuotientProblem {
    label: String,
    alpha: AlphaOrder,
    p: f64,
    omega: BoxDomain,
    d: usize,
    lo: f64,
    hi: f64,
    constant: f64,
    weights: Vec<f64>,
    base: Vec<f64>,
    // [k][i]
    dbase: Vec<Vec<f64>>,
    // [j][i]
    phi: Vec<Vec<f64>>,
    // [k][j][i]
    dphi: Vec<Vec<Vec<f64>>>,
    w: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    // [j][g] on the feasibility grid
    phi_check: Vec<Vec<f64>>,
}

impl QuotientProblem {
    /// `constant` is the closed-form value the minimized quotient is
    /// compared against.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        ws: &WeightSystem,
        constant: f64,
        alpha: AlphaOrder,
        p: f64,
        omega: &BoxDomain,
        d: usize,
        bounds: (f64, f64),
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let n = omega.dim();
        if ws.dim() != n {
            return Err(Error::InvalidParameter(format!(
                "weight system of dimension {} on a box of dimension {n}",
                ws.dim()
            )));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent p = {p} must exceed 1")));
        }
        if d > MAX_FAMILY_DIM {
            return Err(Error::InvalidParameter(format!(
                "family dimension {d} exceeds {MAX_FAMILY_DIM}"
            )));
        }
        let (lo, hi) = bounds;
        if !(lo < hi && lo <= 0.0 && hi >= 0.0 && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "family bounds {lo}:{hi} must satisfy lo < hi and contain 0"
            )));
        }
        let grid = TensorGrid::volume(omega, alpha, spec)?;
        let b = box_bubble(omega);
        let basis: Vec<Expr> = (0..d).map(|j| basis_function(omega, j)).collect();
        let mut exprs = vec![b.clone()];
        exprs.extend((1..=n).map(|k| conf_deriv(&b, k, alpha)));
        exprs.extend(basis.iter().cloned());
        for k in 1..=n {
            exprs.extend(basis.iter().map(|f| conf_deriv(f, k, alpha)));
        }
        exprs.extend(ws.w.iter().cloned());
        exprs.extend(ws.h.iter().cloned());
        let mut vals = grid.sample(&exprs)?.into_iter();
        let base = vals.next().unwrap();
        let dbase: Vec<_> = vals.by_ref().take(n).collect();
        let phi: Vec<_> = vals.by_ref().take(d).collect();
        let dphi: Vec<Vec<_>> = (0..n).map(|_| vals.by_ref().take(d).collect()).collect();
        let w: Vec<_> = vals.by_ref().take(n).collect();
        let h: Vec<_> = vals.by_ref().take(n).collect();

        let check_rules: Vec<_> = (1..=n)
            .map(|k| crate::quadrature::AxisRule {
                nodes: (0..FEASIBILITY_GRID)
                    .map(|i| {
                        omega.lo(k)
                            + (omega.hi(k) - omega.lo(k)) * i as f64 / (FEASIBILITY_GRID - 1) as f64
                    })
                    .collect(),
                weights: vec![1.0; FEASIBILITY_GRID],
            })
            .collect();
        let check = TensorGrid::from_rules(&check_rules);
        let phi_check = check.sample(&basis)?;
        Ok(QuotientProblem {
            label: label.into(),
            alpha,
            p,
            omega: omega.clone(),
            d,
            lo,
            hi,
            constant,
            weights: grid.weights().to_vec(),
            base,
            dbase,
            phi,
            dphi,
            w,
            h,
            phi_check,
        })
    }

    /// Power-weight preset; requires uniform exponents.
    pub fn power(
        cfg: &PowerWeightConfig,
        omega: &BoxDomain,
        d: usize,
        bounds: (f64, f64),
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let p = uniform(cfg.p())?;
        let (_, ws) = power_weight_instance(cfg, omega.dim())?;
        let l = ws.l.iter().cloned().fold(f64::INFINITY, f64::min);
        QuotientProblem::new("3.3", &ws, l, cfg.alpha(), p, omega, d, bounds, spec)
    }

    /// Exponential-weight preset; requires uniform exponents.
    pub fn exponential(
        cfg: &ExpWeightConfig,
        omega: &BoxDomain,
        d: usize,
        bounds: (f64, f64),
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let p = uniform(cfg.p())?;
        let (_, ws) = exp_weight_instance(cfg, omega.dim())?;
        let l = ws.l.iter().cloned().fold(f64::INFINITY, f64::min);
        QuotientProblem::new("3.6", &ws, l, cfg.alpha(), p, omega, d, bounds, spec)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn alpha(&self) -> AlphaOrder {
        self.alpha
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    /// `u_θ` as an expression.
    pub fn family_member(&self, theta: &[f64]) -> Expr {
        let g = Expr::add(
            Expr::Const(1.0),
            Expr::sum(
                theta
                    .iter()
                    .enumerate()
                    .map(|(j, t)| Expr::mul(Expr::Const(*t), basis_function(&self.omega, j))),
            ),
        );
        Expr::mul(box_bubble(&self.omega), g)
    }

    fn feasible(&self, theta: &[f64]) -> bool {
        if theta.iter().any(|t| !(*t >= self.lo && *t <= self.hi)) {
            return false;
        }
        let points = self.phi_check.first().map_or(0, Vec::len);
        (0..points).all(|g| {
            1.0 + theta
                .iter()
                .zip(&self.phi_check)
                .map(|(t, f)| t * f[g])
                .sum::<f64>()
                >= 0.0
        })
    }
}

fn uniform(p: &crate::identities::ExponentVec) -> Result<f64> {
    p.uniform_value().ok_or_else(|| {
        Error::InvalidParameter("the quotient is only defined for uniform exponents".into())
    })
}

/// Hardy quotient of `u_θ`, or `+∞` when `θ` leaves the bounds, makes
/// `u_θ` negative, or the denominator is below `1e−14`.
pub fn quotient(problem: &QuotientProblem, theta: &[f64]) -> f64 {
    if theta.len() != problem.d || !problem.feasible(theta) {
        return f64::INFINITY;
    }
    let pr = problem;
    let n = pr.dbase.len();
    let m = pr.weights.len();
    let mut num = Vec::with_capacity(m);
    let mut den = Vec::with_capacity(m);
    for i in 0..m {
        let g = 1.0 + theta.iter().zip(&pr.phi).map(|(t, f)| t * f[i]).sum::<f64>();
        let u = pr.base[i] * g;
        let mut top = 0.0;
        let mut bottom = 0.0;
        for k in 0..n {
            let dg: f64 = theta.iter().zip(&pr.dphi[k]).map(|(t, f)| t * f[i]).sum();
            let du = pr.dbase[k][i] * g + pr.base[i] * dg;
            top += pr.w[k][i] * du.abs().powf(pr.p);
            bottom += pr.h[k][i] * u.abs().powf(pr.p);
        }
        num.push(pr.weights[i] * top);
        den.push(pr.weights[i] * bottom);
    }
    let d = pairwise_sum(&den);
    if !(d > 1e-14) {
        return f64::INFINITY;
    }
    pairwise_sum(&num) / d
}

/// Hardy quotient of an arbitrary expression, integrated symbolically.
pub fn quotient_of(
    u: &Expr,
    ws: &WeightSystem,
    alpha: AlphaOrder,
    p: f64,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = omega.dim();
    let au = Expr::abs(u.clone());
    let top = Expr::sum((1..=n).map(|k| {
        Expr::mul(ws.w[k - 1].clone(), Expr::pow(Expr::abs(conf_deriv(u, k, alpha)), p))
    }));
    let bottom = Expr::sum((1..=n).map(|k| Expr::mul(ws.h[k - 1].clone(), Expr::pow(au.clone(), p))));
    let ints = TensorGrid::volume(omega, alpha, spec)?.integrate_many(&[top, bottom])?;
    if !(ints[1] > 1e-14) {
        return Err(Error::InvalidParameter("quotient denominator vanishes".into()));
    }
    Ok(ints[0] / ints[1])
}

/// Best quotient found and how it compares with the closed-form constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub theorem: String,
    pub paper_constant: f64,
    pub q_star: f64,
    pub gap: f64,
    pub theta: Vec<f64>,
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
}

impl ConstantEstimate {
    /// `Q* ≥ L − tol`.
    pub fn valid(&self, tol: f64) -> bool {
        self.q_star >= self.paper_constant - tol
    }
}

/// Minimize the quotient with Nelder–Mead restarts. Restart 0 starts at
/// `warm_start` (padded with zeros) or at `θ = 0`; the others start at
/// seeded random feasible points.
pub fn estimate_best_constant(
    problem: &QuotientProblem,
    cfg: &OptimizerConfig,
    warm_start: Option<&[f64]>,
) -> Result<ConstantEstimate> {
    cfg.validate()?;
    let d = problem.d;
    let mut start0 = vec![0.0; d];
    if let Some(w) = warm_start {
        for (s, v) in start0.iter_mut().zip(w) {
            *s = *v;
        }
    }
    let starts: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|r| {
            if r == 0 {
                return start0.clone();
            }
            let mut g = rng(cfg.seed.wrapping_add(r as u64));
            let mut x: Vec<f64> = (0..d).map(|_| g.gen_range(problem.lo..=problem.hi)).collect();
            for _ in 0..40 {
                if problem.feasible(&x) {
                    break;
                }
                x.iter_mut().for_each(|t| *t *= 0.5);
            }
            x
        })
        .collect();
    let steps: Vec<f64> = vec![cfg.init_scale * (problem.hi - problem.lo); d];
    let runs: Vec<Minimum> = starts
        .par_iter()
        .map(|x0| nelder_mead(|t| quotient(problem, t), x0, &steps, cfg))
        .collect();
    let evaluations = runs.iter().map(|m| m.evals).sum();
    let restart_values: Vec<f64> = runs.iter().map(|m| m.value).collect();
    // first index wins ties, independent of scheduling
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    if !best.value.is_finite() {
        return Err(Error::AllRestartsInfeasible);
    }
    Ok(ConstantEstimate {
        theorem: problem.label.clone(),
        paper_constant: problem.constant,
        q_star: best.value,
        gap: best.value - problem.constant,
        theta: best.x,
        restart_values,
        evaluations,
    })
}
