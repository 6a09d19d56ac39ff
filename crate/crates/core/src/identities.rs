//! Picone identity in conformable form and residuals of the integral
//! identities (divergence, Green, Gauss mean value) on boxes.

use serde::Serialize;

use crate::conformable::{conf_deriv, conf_gradient, conf_laplacian, AlphaOrder};
use crate::error::{Error, Result};
use crate::expr::{checked_pow, Expr, Point};
use crate::quadrature::{alpha_flux, BoxDomain, QuadratureSpec, TensorGrid};

/// Per-axis exponents `p_k > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ExponentVec(Vec<f64>);

impl ExponentVec {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter("exponent vector is empty".into()));
        }
        if let Some((k, pk)) = p.iter().enumerate().find(|(_, pk)| !(**pk > 1.0 && pk.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "exponent p_{} = {pk} must exceed 1",
                k + 1
            )));
        }
        Ok(ExponentVec(p))
    }

    pub fn uniform(p: f64, n: usize) -> Result<Self> {
        ExponentVec::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `p_k` (1-based).
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    /// Conjugate exponent `q_k = p_k/(p_k − 1)`.
    pub fn conjugate(&self, k: usize) -> f64 {
        let p = self.get(k);
        p / (p - 1.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The common value if every `p_k` is equal.
    pub fn uniform_value(&self) -> Option<f64> {
        let p0 = self.0[0];
        self.0.iter().all(|&p| p == p0).then_some(p0)
    }
}

/// `u ≥ 0` and `v > 0`, checked wherever the pair is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PiconePair {
    pub u: Expr,
    pub v: Expr,
}

impl PiconePair {
    pub fn new(u: Expr, v: Expr) -> Self {
        PiconePair { u, v }
    }

    fn values_at(&self, pt: &Point) -> Result<(f64, f64)> {
        let u = self.u.eval(pt)?;
        let v = self.v.eval(pt)?;
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "v must be positive, got v = {v} at {:?}",
                pt.coords()
            )));
        }
        if u < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "u must be nonnegative, got u = {u} at {:?}",
                pt.coords()
            )));
        }
        Ok((u, v))
    }
}

fn check_dims(p: &ExponentVec, pt: &Point) -> Result<()> {
    if p.len() != pt.dim() {
        return Err(Error::InvalidParameter(format!(
            "{} exponents for a point of dimension {}",
            p.len(),
            pt.dim()
        )));
    }
    Ok(())
}

/// `R(u,v) = Σ|D_k u|^{p_k} − Σ D_k(u^{p_k}/v^{p_k−1}) |D_k v|^{p_k−2} D_k v`
/// with `D_k = D^α_{x_k}` and the inner derivative taken symbolically.
pub fn picone_r(pair: &PiconePair, alpha: AlphaOrder, p: &ExponentVec, pt: &Point) -> Result<f64> {
    check_dims(p, pt)?;
    pair.values_at(pt)?;
    let mut terms = Vec::with_capacity(2 * p.len());
    for k in 1..=p.len() {
        let pk = p.get(k);
        let du = conf_deriv(&pair.u, k, alpha).eval(pt)?;
        let dv = conf_deriv(&pair.v, k, alpha).eval(pt)?;
        let ratio = Expr::div(Expr::pow(pair.u.clone(), pk), Expr::pow(pair.v.clone(), pk - 1.0));
        let dratio = conf_deriv(&ratio, k, alpha).eval(pt)?;
        terms.push(du.abs().powf(pk));
        terms.push(-dratio * signed_power(dv, pk)?);
    }
    Ok(terms.iter().sum())
}

/// `|z|^{p−2} z`, undefined at `z = 0` when `p < 2`.
fn signed_power(z: f64, p: f64) -> Result<f64> {
    if z == 0.0 {
        return if p >= 2.0 {
            Ok(0.0)
        } else {
            Err(checked_pow(0.0, p - 2.0).unwrap_err().into())
        };
    }
    Ok(z.abs().powf(p - 2.0) * z)
}

/// `L(u,v)` together with the split `L = A_1 + A_2` from the Young and
/// Cauchy–Schwarz steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiconeSplit {
    pub l: f64,
    pub a1: f64,
    pub a2: f64,
}

/// `L(u,v) = Σ|D_k u|^{p_k} + Σ(p_k−1)(u/v)^{p_k}|D_k v|^{p_k}
///          − Σ p_k (u/v)^{p_k−1}|D_k v|^{p_k−2} D_k v D_k u`.
///
/// Evaluated as the sum of its two nonnegative parts, which keeps `L` exact
/// to rounding on proportional pairs.
pub fn picone_l(pair: &PiconePair, alpha: AlphaOrder, p: &ExponentVec, pt: &Point) -> Result<PiconeSplit> {
    check_dims(p, pt)?;
    let (u, v) = pair.values_at(pt)?;
    let r = u / v;
    let (mut l, mut a1, mut a2) = (0.0, 0.0, 0.0);
    for k in 1..=p.len() {
        let pk = p.get(k);
        let du = conf_deriv(&pair.u, k, alpha).eval(pt)?;
        let dv = conf_deriv(&pair.v, k, alpha).eval(pt)?;
        signed_power(dv, pk)?;
        let (adu, adv) = (du.abs(), dv.abs());
        let t1 = young_gap(adu, r * adv, pk);
        // |Dv|^{p−2}(|Du||Dv| − Dv Du) vanishes exactly unless the signs differ
        let t2 = if du * dv < 0.0 {
            2.0 * pk * r.powf(pk - 1.0) * adv.powf(pk - 1.0) * adu
        } else {
            0.0
        };
        a1 += t1;
        a2 += t2;
        l += t1 + t2;
    }
    Ok(PiconeSplit { l, a1, a2 })
}

/// `a^p − p b^{p−1} a + (p−1) b^p ≥ 0`, evaluated as `b^p φ(a/b − 1)` with
/// `φ(d) = (1+d)^p − 1 − p d`, so the result is exact to rounding in `d`
/// rather than in the terms, which cancel when `a ≈ b`.
fn young_gap(a: f64, b: f64, p: f64) -> f64 {
    if b == 0.0 {
        return a.powf(p);
    }
    let d = (a - b) / b;
    let phi = (p * d.ln_1p()).exp_m1() - p * d;
    b.powf(p) * phi
}

/// Volume and boundary sides of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub volume: f64,
    pub flux: f64,
    pub residual: f64,
}

impl IdentityResidual {
    fn new(volume: f64, flux: f64) -> Self {
        IdentityResidual {
            volume,
            flux,
            residual: (volume - flux).abs(),
        }
    }

    /// `residual ≤ tol·(1 + |flux|)`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * (1.0 + self.flux.abs())
    }
}

fn check_box(e: &[&Expr], omega: &BoxDomain) -> Result<()> {
    for x in e {
        if x.max_var() > omega.dim() {
            return Err(Error::InvalidParameter(format!(
                "expression uses x{} on a box of dimension {}",
                x.max_var(),
                omega.dim()
            )));
        }
    }
    Ok(())
}

/// `∫_Ω Σ_k D_k F_k d_αx` against the flux of `F`.
pub fn divergence_residual(
    f: &[Expr],
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<IdentityResidual> {
    check_box(&f.iter().collect::<Vec<_>>(), omega)?;
    let div = Expr::sum(f.iter().enumerate().map(|(i, fk)| conf_deriv(fk, i + 1, alpha)));
    let grid = TensorGrid::volume(omega, alpha, spec)?;
    let volume = grid.integrate(&div)?;
    let flux = alpha_flux(f, omega, alpha, spec)?;
    Ok(IdentityResidual::new(volume, flux))
}

fn scaled_gradient(scale: &Expr, e: &Expr, alpha: AlphaOrder, n: usize) -> Vec<Expr> {
    conf_gradient(e, alpha, n)
        .into_iter()
        .map(|g| Expr::mul(scale.clone(), g))
        .collect()
}

/// `∫_Ω (D^αu·D^αv + v Σ_k D_kD_k u) d_αx` against the flux of `v D^αu`.
pub fn green_first_residual(
    u: &Expr,
    v: &Expr,
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<IdentityResidual> {
    check_box(&[u, v], omega)?;
    let n = omega.dim();
    let du = conf_gradient(u, alpha, n);
    let dv = conf_gradient(v, alpha, n);
    let dot = Expr::sum(du.iter().zip(&dv).map(|(a, b)| Expr::mul(a.clone(), b.clone())));
    let integrand = Expr::add(dot, Expr::mul(v.clone(), conf_laplacian(u, alpha, n)));
    let volume = TensorGrid::volume(omega, alpha, spec)?.integrate(&integrand)?;
    let flux = alpha_flux(&scaled_gradient(v, u, alpha, n), omega, alpha, spec)?;
    Ok(IdentityResidual::new(volume, flux))
}

/// `∫_Ω (u Σ D_kD_k v − v Σ D_kD_k u) d_αx` against
/// `flux(u D^αv) − flux(v D^αu)`.
pub fn green_second_residual(
    u: &Expr,
    v: &Expr,
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<IdentityResidual> {
    check_box(&[u, v], omega)?;
    let n = omega.dim();
    let integrand = Expr::sub(
        Expr::mul(u.clone(), conf_laplacian(v, alpha, n)),
        Expr::mul(v.clone(), conf_laplacian(u, alpha, n)),
    );
    let volume = TensorGrid::volume(omega, alpha, spec)?.integrate(&integrand)?;
    let fu = alpha_flux(&scaled_gradient(u, v, alpha, n), omega, alpha, spec)?;
    let fv = alpha_flux(&scaled_gradient(v, u, alpha, n), omega, alpha, spec)?;
    Ok(IdentityResidual::new(volume, fu - fv))
}

/// Flux of `D^αu` through `∂Ω`; vanishes for α-harmonic `u`.
pub fn gauss_mean_value_residual(
    u: &Expr,
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_box(&[u], omega)?;
    let g = conf_gradient(u, alpha, omega.dim());
    Ok(alpha_flux(&g, omega, alpha, spec)?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn al(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn exponent_vectors() {
        assert!(ExponentVec::new(vec![1.0]).is_err());
        assert!(ExponentVec::new(vec![]).is_err());
        let p = ExponentVec::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(p.conjugate(1), 2.0);
        assert!((1.0 / p.get(2) + 1.0 / p.conjugate(2) - 1.0).abs() < 1e-15);
        assert_eq!(p.uniform_value(), None);
        assert_eq!(ExponentVec::uniform(2.5, 3).unwrap().uniform_value(), Some(2.5));
    }

    #[test]
    fn picone_equality_case() {
        let v = parse("x1^0.5 + exp(0.3*x2)", 2).unwrap();
        let p = ExponentVec::new(vec![2.0, 1.5]).unwrap();
        for c in [1.0, 2.0] {
            let pair = PiconePair::new(Expr::mul(Expr::Const(c), v.clone()), v.clone());
            let x = pt(&[1.3, 0.8]);
            assert!(picone_r(&pair, al(0.6), &p, &x).unwrap().abs() < 1e-12);
            let s = picone_l(&pair, al(0.6), &p, &x).unwrap();
            assert!(s.l.abs() < 1e-12 && s.a1.abs() < 1e-12 && s.a2.abs() < 1e-12);
        }
    }

    #[test]
    fn picone_r_equals_l_closed_case() {
        let pair = PiconePair::new(Expr::var(1), parse("x1^0.5", 1).unwrap());
        let p = ExponentVec::uniform(2.0, 1).unwrap();
        let x = pt(&[1.5]);
        let r = picone_r(&pair, al(0.5), &p, &x).unwrap();
        let s = picone_l(&pair, al(0.5), &p, &x).unwrap();
        // u = x, v = √x: D u = √x, D v = 1/2, u/v = √x, L = x − 2x/2 + x/4 = x/4
        assert!((s.l - 0.375).abs() < 1e-14);
        assert!((r - s.l).abs() <= 1e-10 * s.l.abs());
        assert!((s.a1 + s.a2 - s.l).abs() < 1e-14);
    }

    #[test]
    fn picone_rejects_bad_pairs() {
        let p = ExponentVec::uniform(2.0, 1).unwrap();
        let neg_v = PiconePair::new(Expr::var(1), parse("x1 - 2", 1).unwrap());
        assert!(picone_l(&neg_v, al(0.5), &p, &pt(&[1.0])).is_err());
        let flat_v = PiconePair::new(Expr::var(1), Expr::Const(1.0));
        let p15 = ExponentVec::uniform(1.5, 1).unwrap();
        assert!(picone_r(&flat_v, al(0.5), &p15, &pt(&[1.0])).is_err());
        assert!(picone_l(&flat_v, al(0.5), &p15, &pt(&[1.0])).is_err());
    }

    #[test]
    fn green_and_gauss() {
        let s = QuadratureSpec::default();
        let sq = BoxDomain::cube(2, 1.0, 2.0).unwrap();
        let a = 0.6;
        let harm = Expr::add(Expr::pow(Expr::var(1), a), Expr::pow(Expr::var(2), a));
        let g = green_first_residual(&harm, &Expr::Const(1.0), &sq, al(a), &s).unwrap();
        assert!(g.residual < 1e-12 && g.flux.abs() < 1e-12);
        let u = parse("x1^2*x2", 2).unwrap();
        let v = parse("sin(x2)", 2).unwrap();
        assert!(green_first_residual(&u, &v, &sq, al(a), &s).unwrap().within(1e-7));
        let w = green_first_residual(&u, &u, &sq, AlphaOrder::ONE, &s).unwrap();
        assert!(w.residual <= 1e-9);
        let same = green_second_residual(&u, &u, &sq, al(a), &s).unwrap();
        assert!(same.volume == 0.0 && same.residual == 0.0);
        let uv = green_second_residual(&u, &v, &sq, al(a), &s).unwrap();
        let vu = green_second_residual(&v, &u, &sq, al(a), &s).unwrap();
        assert!((uv.volume + vu.volume).abs() < 1e-12 && (uv.flux + vu.flux).abs() < 1e-12);
        assert!(uv.within(1e-7));
        let sep = green_second_residual(
            &Expr::pow(Expr::var(1), a),
            &Expr::pow(Expr::var(2), a),
            &sq,
            al(a),
            &s,
        )
        .unwrap();
        assert!(sep.volume == 0.0 && sep.flux.abs() <= 1e-8);
        assert!(gauss_mean_value_residual(&harm, &sq, al(a), &s).unwrap() <= 1e-9);
        assert_eq!(gauss_mean_value_residual(&Expr::Const(2.0), &sq, al(a), &s).unwrap(), 0.0);
        let classical = parse("x1^2 - x2^2", 2).unwrap();
        assert!(gauss_mean_value_residual(&classical, &sq, AlphaOrder::ONE, &s).unwrap() <= 1e-9);
    }

    #[test]
    fn divergence_identity() {
        let s = QuadratureSpec::default();
        let b = BoxDomain::new(vec![0.7, 1.1], vec![2.2, 1.9]).unwrap();
        let f = vec![parse("x1*sin(x2)", 2).unwrap(), parse("exp(x1 - x2)", 2).unwrap()];
        assert!(divergence_residual(&f, &b, al(0.45), &s).unwrap().within(1e-7));
        assert!(divergence_residual(&[parse("x3", 3).unwrap()], &BoxDomain::cube(1, 1.0, 2.0).unwrap(), al(0.5), &s).is_err());
    }
}
