use serde::Serialize;

use super::{hardy_terms, InequalityReport, WeightSystem};
use crate::conformable::AlphaOrder;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::identities::ExponentVec;
use crate::quadrature::{BoxDomain, QuadratureSpec};

/// Which sign pattern certifies the power-weight subsolution.
///
/// With `X_k = p_k(1−α) − (a−α)` the slack of the differential inequality
/// for `v = Π x_k^{β_k}` is `−|β_k|^{p_k−2} β_k X_k · v^{p_k−1} x_k^{m−αp_k}`,
/// so it is nonnegative exactly when `β_k X_k ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerRegime {
    /// `β_k < 0`, `X_k ≥ 0`: `a > α`, `1 < p_k < a + m`, `p_k(1−α) ≥ a − α`.
    Standard,
    /// `m = 0`, `β_k > 0`, `X_k ≤ 0`: `a > α`, `p_k > a`, `p_k(1−α) ≤ a − α`.
    Mirrored,
}

/// Power weights `W_k = x_k^m`, `H_k = x_k^{m−αp_k}` with
/// `β_k = −(m+a−p_k)/p_k` and `L_k = |β_k|^{p_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerWeightConfig {
    m: f64,
    a: f64,
    alpha: AlphaOrder,
    p: ExponentVec,
    regime: PowerRegime,
}

fn infeasible(msg: String) -> Error {
    Error::Infeasible(msg)
}

impl PowerWeightConfig {
    /// Checks `a > α`, `1 < p_k < a + m` and `p_k(1−α) ≥ a − α` in that order.
    pub fn new(m: f64, a: f64, alpha: AlphaOrder, p: ExponentVec) -> Result<Self> {
        let al = alpha.value();
        if !(m.is_finite() && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("m = {m} and a = {a} must be finite")));
        }
        if !(a > al) {
            return Err(infeasible(format!("a>α (a = {a}, α = {al})")));
        }
        for k in 1..=p.len() {
            let pk = p.get(k);
            if !(pk < a + m) {
                return Err(infeasible(format!(
                    "1<p_k<a+m (p_{k} = {pk}, a+m = {})",
                    a + m
                )));
            }
            if !(pk * (1.0 - al) >= a - al) {
                return Err(infeasible(format!(
                    "p_k(1−α) ≥ a−α (p_{k}(1−α) = {}, a−α = {})",
                    pk * (1.0 - al),
                    a - al
                )));
            }
        }
        Ok(PowerWeightConfig {
            m,
            a,
            alpha,
            p,
            regime: PowerRegime::Standard,
        })
    }

    /// Unweighted case `m = 0` in the mirrored regime.
    pub fn corollary_34(a: f64, alpha: AlphaOrder, p: ExponentVec) -> Result<Self> {
        let al = alpha.value();
        if !(a > al && a.is_finite()) {
            return Err(infeasible(format!("a>α (a = {a}, α = {al})")));
        }
        for k in 1..=p.len() {
            let pk = p.get(k);
            if !(pk > a) {
                return Err(infeasible(format!("p_k>a (p_{k} = {pk}, a = {a})")));
            }
            if !(pk * (1.0 - al) <= a - al) {
                return Err(infeasible(format!(
                    "p_k(1−α) ≤ a−α (p_{k}(1−α) = {}, a−α = {})",
                    pk * (1.0 - al),
                    a - al
                )));
            }
        }
        Ok(PowerWeightConfig {
            m: 0.0,
            a,
            alpha,
            p,
            regime: PowerRegime::Mirrored,
        })
    }

    /// `m = α`.
    pub fn corollary_35(a: f64, alpha: AlphaOrder, p: ExponentVec) -> Result<Self> {
        PowerWeightConfig::new(alpha.value(), a, alpha, p)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> AlphaOrder {
        self.alpha
    }

    pub fn p(&self) -> &ExponentVec {
        &self.p
    }

    pub fn regime(&self) -> PowerRegime {
        self.regime
    }

    pub fn beta(&self, k: usize) -> f64 {
        let pk = self.p.get(k);
        -(self.m + self.a - pk) / pk
    }

    pub fn constant(&self, k: usize) -> f64 {
        self.beta(k).abs().powf(self.p.get(k))
    }

    /// `−|β_k|^{p_k−2} β_k X_k`, the slack divided by `v^{p_k−1} x_k^{m−αp_k}`.
    pub fn slack_coefficient(&self, k: usize) -> f64 {
        let pk = self.p.get(k);
        let b = self.beta(k);
        let al = self.alpha.value();
        let x = pk * (1.0 - al) - (self.a - al);
        -b.abs().powf(pk - 2.0) * b * x
    }
}

/// `v = Π x_k^{β_k}` with the power weight system.
pub fn power_weight_instance(cfg: &PowerWeightConfig, n: usize) -> Result<(Expr, WeightSystem)> {
    if cfg.p.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} exponents for dimension {n}",
            cfg.p.len()
        )));
    }
    let al = cfg.alpha.value();
    let v = Expr::product((1..=n).map(|k| Expr::pow(Expr::var(k), cfg.beta(k))));
    let w = (1..=n).map(|k| Expr::pow(Expr::var(k), cfg.m)).collect();
    let h = (1..=n)
        .map(|k| Expr::pow(Expr::var(k), cfg.m - al * cfg.p.get(k)))
        .collect();
    let l = (1..=n).map(|k| cfg.constant(k)).collect();
    Ok((v, WeightSystem::new(w, h, l)?))
}

/// Exponential auxiliary function `v = exp(m Σ_k x_k)`, `m < 0`, with
/// `W_k = 1`, `H_k = x_k^{p_k(1−α)}` and `L_k = (p_k−1)|m|^{p_k}`.
///
/// The subsolution slack on axis `k` is
/// `(p_k−1)|m|^{p_k−1} v^{p_k−1} x_k^{(1−α)(p_k−1)−α} [(1−α) − 2|m|x_k]`,
/// nonnegative only for `x_k ≤ (1−α)/(2|m|)`; see [`Self::certified_upper`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpWeightConfig {
    m: f64,
    alpha: AlphaOrder,
    p: ExponentVec,
}

impl ExpWeightConfig {
    pub fn new(m: f64, alpha: AlphaOrder, p: ExponentVec) -> Result<Self> {
        if !(m < 0.0 && m.is_finite()) {
            return Err(infeasible(format!("m<0 (m = {m})")));
        }
        Ok(ExpWeightConfig { m, alpha, p })
    }

    /// `p_k = 2`, `m = −(n−2)/2`, giving `L_k = ((n−2)/2)^2`.
    pub fn remark_37(n: usize, alpha: AlphaOrder) -> Result<Self> {
        if n < 3 {
            return Err(infeasible(format!("n ≥ 3 (n = {n})")));
        }
        ExpWeightConfig::new(-(n as f64 - 2.0) / 2.0, alpha, ExponentVec::uniform(2.0, n)?)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn alpha(&self) -> AlphaOrder {
        self.alpha
    }

    pub fn p(&self) -> &ExponentVec {
        &self.p
    }

    pub fn constant(&self, k: usize) -> f64 {
        let pk = self.p.get(k);
        (pk - 1.0) * self.m.abs().powf(pk)
    }

    /// Largest coordinate at which the subsolution slack is nonnegative.
    pub fn certified_upper(&self) -> f64 {
        (1.0 - self.alpha.value()) / (2.0 * self.m.abs())
    }
}

pub fn exp_weight_instance(cfg: &ExpWeightConfig, n: usize) -> Result<(Expr, WeightSystem)> {
    if cfg.p.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} exponents for dimension {n}",
            cfg.p.len()
        )));
    }
    let al = cfg.alpha.value();
    let v = Expr::exp(Expr::mul(
        Expr::Const(cfg.m),
        Expr::sum((1..=n).map(Expr::var)),
    ));
    let w = vec![Expr::Const(1.0); n];
    let h = (1..=n)
        .map(|k| Expr::pow(Expr::var(k), cfg.p.get(k) * (1.0 - al)))
        .collect();
    let l = (1..=n).map(|k| cfg.constant(k)).collect();
    Ok((v, WeightSystem::new(w, h, l)?))
}

fn unweighted_instance(betas: &[f64], constants: &[f64], alpha: AlphaOrder, p: &ExponentVec) -> Result<(Expr, WeightSystem)> {
    let n = p.len();
    let al = alpha.value();
    let v = Expr::product((1..=n).map(|k| Expr::pow(Expr::var(k), betas[k - 1])));
    let w = vec![Expr::Const(1.0); n];
    let h = (1..=n)
        .map(|k| Expr::pow(Expr::var(k), -al * p.get(k)))
        .collect();
    Ok((v, WeightSystem::new(w, h, constants.to_vec())?))
}

/// `v = Π x_k^{α(p_k−1)/p_k}` with `W_k = 1`, `H_k = x_k^{−αp_k}` and
/// `L_k = (α(p_k−1)/p_k)^{p_k}`; its subsolution slack is identically zero.
pub fn sharp_corollary_39_instance(alpha: AlphaOrder, p: &ExponentVec) -> Result<(Expr, WeightSystem)> {
    let al = alpha.value();
    let betas: Vec<f64> = p.as_slice().iter().map(|pk| al * (pk - 1.0) / pk).collect();
    let consts: Vec<f64> = betas.iter().zip(p.as_slice()).map(|(b, pk)| b.powf(*pk)).collect();
    unweighted_instance(&betas, &consts, alpha, p)
}

/// Both sides of `Σ∫|D_k u|^{p_k} ≥ Σ(α(p_k−1)/p_k)^{p_k} ∫|u|^{p_k} x_k^{−αp_k}`,
/// with the boundary flux of the sharp auxiliary function.
pub fn corollary_39_bound(
    u: &Expr,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<InequalityReport> {
    let (v, ws) = sharp_corollary_39_instance(alpha, p)?;
    hardy_terms("3.9", u, &v, &ws, alpha, p, omega, spec, tol)
}

/// Both sides of `Σ∫|D_k u|^{p_k} ≥ Σ|(a−p_k)/p_k|^{p_k} ∫|u|^{p_k} x_k^{−αp_k}`,
/// with the boundary flux of `v = Π x_k^{(p_k−a)/p_k}`.
pub fn corollary_38_bound(
    u: &Expr,
    a: f64,
    alpha: AlphaOrder,
    p: &ExponentVec,
    omega: &BoxDomain,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<InequalityReport> {
    let betas: Vec<f64> = p.as_slice().iter().map(|pk| (pk - a) / pk).collect();
    let consts: Vec<f64> = betas.iter().zip(p.as_slice()).map(|(b, pk)| b.abs().powf(*pk)).collect();
    let (v, ws) = unweighted_instance(&betas, &consts, alpha, p)?;
    Ok(hardy_terms("3.8", u, &v, &ws, alpha, p, omega, spec, tol)?.with_param("a", a))
}
