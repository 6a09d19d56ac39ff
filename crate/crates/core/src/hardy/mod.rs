//! Weighted Hardy-type inequalities driven by a positive subsolution.
//!
//! Given `v > 0` with
//! `−D_k(W_k |D_k v|^{p_k−2} D_k v) ≥ L_k H_k v^{p_k−1}` on a box, every
//! `u ≥ 0` satisfies
//! `Σ∫W_k|D_k u|^{p_k} ≥ Σ L_k∫H_k|u|^{p_k} + boundary flux`.
//! [`hardy_general`] evaluates all three terms by quadrature.

mod hpw;
mod instances;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::conformable::{conf_deriv, AlphaOrder};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::identities::ExponentVec;
use crate::quadrature::{alpha_flux_terms, BoxDomain, QuadratureSpec, TensorGrid};

pub use hpw::{hpw_anisotropic_check, hpw_check, HpwResult};
pub use instances::{
    corollary_38_bound, corollary_39_bound, exp_weight_instance, power_weight_instance,
    sharp_corollary_39_instance, ExpWeightConfig, PowerRegime, PowerWeightConfig,
};

/// Default relative tolerance for inequality margins.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Absolute tolerance on the subsolution slack.
pub const SUBSOLUTION_TOL: f64 = 1e-10;
/// Default sample points per axis for the subsolution grid.
pub const DEFAULT_GRID: usize = 20;

/// Weights `W_k`, `H_k` and constants `L_k` of the differential inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    pub w: Vec<Expr>,
    pub h: Vec<Expr>,
    pub l: Vec<f64>,
}

impl WeightSystem {
    pub fn new(w: Vec<Expr>, h: Vec<Expr>, l: Vec<f64>) -> Result<Self> {
        if w.len() != h.len() || w.len() != l.len() || w.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "weight system needs equal nonzero counts, got {} W, {} H, {} L",
                w.len(),
                h.len(),
                l.len()
            )));
        }
        if let Some(bad) = l.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "constants L_k must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(WeightSystem { w, h, l })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
}

/// Where the smallest subsolution slack occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsolutionCheck {
    pub min_slack: f64,
    pub axis: usize,
    pub point: Vec<f64>,
}

impl SubsolutionCheck {
    pub fn certified(&self) -> bool {
        self.min_slack >= -SUBSOLUTION_TOL
    }
}

/// `−D_k(W_k|D_k v|^{p_k−2}D_k v) − L_k H_k v^{p_k−1}` for every axis.
pub fn subsolution_slack_exprs(v: &Expr, ws: &WeightSystem, alpha: AlphaOrder, p: &ExponentVec) -> Vec<Expr> {
    (1..=ws.dim())
        .map(|k| {
            let pk = p.get(k);
            let flux = Expr::mul(
                ws.w[k - 1].clone(),
                Expr::signed_pow(conf_deriv(v, k, alpha), pk - 1.0),
            );
            Expr::sub(
                Expr::neg(conf_deriv(&flux, k, alpha)),
                Expr::mul(
                    Expr::Const(ws.l[k - 1]),
                    Expr::mul(ws.h[k - 1].clone(), Expr::pow(v.clone(), pk - 1.0)),
                ),
            )
        })
        .collect()
}

/// Minimum slack of the subsolution inequality over a uniform grid with
/// `samples` points per axis, endpoints included.
pub fn verify_subsolution(
    v: &Expr,
    ws: &WeightSystem,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    samples: usize,
) -> Result<SubsolutionCheck> {
    let n = omega.dim();
    if ws.dim() != n || p.len() != n {
        return Err(Error::InvalidParameter(format!(
            "dimension mismatch: box {n}, weights {}, exponents {}",
            ws.dim(),
            p.len()
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("subsolution grid needs at least 2 points per axis".into()));
    }
    let slack: Vec<_> = subsolution_slack_exprs(v, ws, alpha, p)
        .iter()
        .map(Expr::compile)
        .collect();
    let vc = v.compile();
    let total = samples.pow(n as u32);
    let mut best = SubsolutionCheck {
        min_slack: f64::INFINITY,
        axis: 1,
        point: Vec::new(),
    };
    let mut x = vec![0.0; n];
    let mut stack = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        for k in (0..n).rev() {
            let i = rem % samples;
            rem /= samples;
            let (a, b) = (omega.lo(k + 1), omega.hi(k + 1));
            x[k] = if i + 1 == samples {
                b
            } else {
                a + (b - a) * i as f64 / (samples - 1) as f64
            };
        }
        let singular = |source| Error::Singular {
            point: x.clone(),
            source,
        };
        let vx = vc.eval_with(&x, &mut stack).map_err(singular)?;
        if !(vx > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "auxiliary function must be positive, got {vx} at {x:?}"
            )));
        }
        for (k, s) in slack.iter().enumerate() {
            let val = s.eval_with(&x, &mut stack).map_err(singular)?;
            if val < best.min_slack {
                best = SubsolutionCheck {
                    min_slack: val,
                    axis: k + 1,
                    point: x.clone(),
                };
            }
        }
    }
    Ok(best)
}

/// Panels and order of the rule behind a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureMeta {
    pub panels: usize,
    pub order: usize,
}

impl From<&QuadratureSpec> for QuadratureMeta {
    fn from(s: &QuadratureSpec) -> Self {
        QuadratureMeta {
            panels: s.panels(),
            order: s.order(),
        }
    }
}

/// The three terms of a weighted inequality and its margin
/// `lhs − rhs_interior − boundary_term`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub alpha: f64,
    pub p: Vec<f64>,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs_interior: f64,
    pub boundary_term: f64,
    pub margin: f64,
    pub subsolution_min_slack: Option<f64>,
    pub quadrature: QuadratureMeta,
    pub pass: bool,
    #[serde(skip)]
    pub lhs_terms: Vec<f64>,
    #[serde(skip)]
    pub rhs_terms: Vec<f64>,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem: impl Into<String>,
        alpha: AlphaOrder,
        p: &[f64],
        lhs_terms: Vec<f64>,
        rhs_terms: Vec<f64>,
        boundary_term: f64,
        spec: &QuadratureSpec,
        tol: f64,
    ) -> Self {
        let lhs: f64 = lhs_terms.iter().sum();
        let rhs_interior: f64 = rhs_terms.iter().sum();
        let margin = lhs - rhs_interior - boundary_term;
        InequalityReport {
            theorem: theorem.into(),
            alpha: alpha.value(),
            p: p.to_vec(),
            params: BTreeMap::new(),
            lhs,
            rhs_interior,
            boundary_term,
            margin,
            subsolution_min_slack: None,
            quadrature: spec.into(),
            pass: margin >= -tol * (1.0 + lhs.abs()),
            lhs_terms,
            rhs_terms,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.subsolution_min_slack = Some(slack);
        self
    }

    /// Margin without the boundary term.
    pub fn interior_margin(&self) -> f64 {
        self.lhs - self.rhs_interior
    }
}

/// Options shared by the Hardy checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyOptions {
    pub tol: f64,
    pub grid: usize,
}

impl Default for HardyOptions {
    fn default() -> Self {
        HardyOptions {
            tol: DEFAULT_TOL,
            grid: DEFAULT_GRID,
        }
    }
}

/// Integrate both sides and the boundary flux without checking the
/// subsolution inequality.
#[allow(clippy::too_many_arguments)]
pub fn hardy_terms(
    theorem: &str,
    u: &Expr,
    v: &Expr,
    ws: &WeightSystem,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<InequalityReport> {
    let n = omega.dim();
    if ws.dim() != n || p.len() != n {
        return Err(Error::InvalidParameter(format!(
            "dimension mismatch: box {n}, weights {}, exponents {}",
            ws.dim(),
            p.len()
        )));
    }
    let au = Expr::abs(u.clone());
    let mut volume = Vec::with_capacity(4 * n);
    for k in 1..=n {
        let pk = p.get(k);
        volume.push(Expr::mul(
            ws.w[k - 1].clone(),
            Expr::pow(Expr::abs(conf_deriv(u, k, alpha)), pk),
        ));
    }
    for k in 1..=n {
        volume.push(Expr::mul(ws.h[k - 1].clone(), Expr::pow(au.clone(), p.get(k))));
    }
    volume.extend(ws.w.iter().cloned());
    volume.extend(ws.h.iter().cloned());
    let grid = TensorGrid::volume(omega, alpha, spec)?;
    let vals = grid.sample(&volume)?;
    for (j, weight) in vals[2 * n..].iter().enumerate() {
        if let Some(i) = weight.iter().position(|x| *x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight {} on axis {} is negative at {:?}",
                if j < n { "W" } else { "H" },
                j % n + 1,
                grid.point(i)
            )));
        }
    }
    let lhs_terms: Vec<f64> = vals[..n].iter().map(|v| grid.weighted_sum(v)).collect();
    let rhs_terms: Vec<f64> = vals[n..2 * n]
        .iter()
        .zip(&ws.l)
        .map(|(v, l)| l * grid.weighted_sum(v))
        .collect();
    let field: Vec<Expr> = (1..=n)
        .map(|k| {
            let pk = p.get(k);
            Expr::mul(
                Expr::div(Expr::pow(au.clone(), pk), Expr::pow(v.clone(), pk - 1.0)),
                Expr::mul(
                    ws.w[k - 1].clone(),
                    Expr::signed_pow(conf_deriv(v, k, alpha), pk - 1.0),
                ),
            )
        })
        .collect();
    let faces = alpha_flux_terms(&field, omega, alpha, spec)?;
    let boundary: f64 = faces.iter().map(|(_, x)| x).sum();
    Ok(InequalityReport::new(
        theorem,
        alpha,
        p.as_slice(),
        lhs_terms,
        rhs_terms,
        boundary,
        spec,
        tol,
    ))
}

/// Hardy inequality with its subsolution certificate enforced.
///
/// Fails with [`Error::SubsolutionViolated`] when the grid slack drops
/// below `−1e−10`.
#[allow(clippy::too_many_arguments)]
pub fn hardy_general(
    theorem: &str,
    u: &Expr,
    v: &Expr,
    ws: &WeightSystem,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
    opts: &HardyOptions,
) -> Result<InequalityReport> {
    let check = verify_subsolution(v, ws, alpha, p, omega, opts.grid)?;
    if !check.certified() {
        return Err(Error::SubsolutionViolated {
            axis: check.axis,
            slack: check.min_slack,
            point: check.point,
        });
    }
    Ok(hardy_terms(theorem, u, v, ws, alpha, p, omega, spec, opts.tol)?.with_slack(check.min_slack))
}

/// Hardy inequality evaluated as a plain margin; the subsolution slack is
/// recorded but not required to be nonnegative.
#[allow(clippy::too_many_arguments)]
pub fn hardy_uncertified(
    theorem: &str,
    u: &Expr,
    v: &Expr,
    ws: &WeightSystem,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
    opts: &HardyOptions,
) -> Result<InequalityReport> {
    let check = verify_subsolution(v, ws, alpha, p, omega, opts.grid)?;
    Ok(hardy_terms(theorem, u, v, ws, alpha, p, omega, spec, opts.tol)?.with_slack(check.min_slack))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn al(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    #[test]
    fn weight_system_validation() {
        let one = || vec![Expr::Const(1.0)];
        assert!(WeightSystem::new(one(), one(), vec![-1.0]).is_err());
        assert!(WeightSystem::new(one(), vec![], vec![1.0]).is_err());
        assert!(WeightSystem::new(one(), one(), vec![0.5]).is_ok());
    }

    #[test]
    fn zero_constant_needs_only_nonincreasing_flux() {
        // W = 1, v = x^0.5, α = 1: −(|v'|^0 v')' = x^{-1.5}/4 ≥ 0
        let v = parse("x1^0.5", 1).unwrap();
        let ws = WeightSystem::new(vec![Expr::Const(1.0)], vec![Expr::Const(1.0)], vec![0.0]).unwrap();
        let p = ExponentVec::uniform(2.0, 1).unwrap();
        let b = BoxDomain::cube(1, 0.5, 2.0).unwrap();
        let c = verify_subsolution(&v, &ws, AlphaOrder::ONE, &p, &b, 20).unwrap();
        assert!(c.min_slack >= 0.0);
        assert_eq!(c.point, vec![2.0]);
    }

    #[test]
    fn zero_function_gives_zero_terms() {
        let (v, ws) = power_weight_instance(&PowerWeightConfig::new(2.0, 1.0, al(0.5), ExponentVec::uniform(2.0, 1).unwrap()).unwrap(), 1).unwrap();
        let b = BoxDomain::cube(1, 0.5, 2.0).unwrap();
        let r = hardy_general(
            "3.3",
            &Expr::Const(0.0),
            &v,
            &ws,
            al(0.5),
            &ExponentVec::uniform(2.0, 1).unwrap(),
            &b,
            &QuadratureSpec::default(),
            &HardyOptions::default(),
        )
        .unwrap();
        assert_eq!((r.lhs, r.rhs_interior, r.boundary_term), (0.0, 0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn violated_subsolution_is_reported() {
        let cfg = ExpWeightConfig::new(-1.0, al(0.5), ExponentVec::uniform(2.0, 1).unwrap()).unwrap();
        let (v, ws) = exp_weight_instance(&cfg, 1).unwrap();
        let b = BoxDomain::cube(1, 0.5, 2.0).unwrap();
        let u = parse("(x1 - 0.5)*(2 - x1)", 1).unwrap();
        let p = ExponentVec::uniform(2.0, 1).unwrap();
        let spec = QuadratureSpec::default();
        let err = hardy_general("3.6", &u, &v, &ws, al(0.5), &p, &b, &spec, &HardyOptions::default());
        assert!(matches!(err, Err(Error::SubsolutionViolated { axis: 1, .. })));
        let r = hardy_uncertified("3.6", &u, &v, &ws, al(0.5), &p, &b, &spec, &HardyOptions::default()).unwrap();
        assert!(r.subsolution_min_slack.unwrap() < 0.0);
    }
}
