//! Conformable derivatives of order `α ∈ (0, 1]`.
//!
//! For functions that are classically differentiable away from the origin the
//! conformable partial derivative is `D^α_{x_k} f = x_k^{1-α} ∂f/∂x_k`. That
//! symbolic form is what every other module builds on. The limit quotient
//! `(f(.., x_k + δ x_k^{1-α}, ..) - f(x)) / δ` is kept as
//! [`conf_deriv_numeric`] and only used to cross-check the symbolic route.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Point};
use crate::identities::ExponentVec;

/// Fractional order `α ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AlphaOrder(f64);

impl AlphaOrder {
    pub const ONE: AlphaOrder = AlphaOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(AlphaOrder(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "order alpha = {alpha} must lie in (0, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffScheme {
    Forward,
    Central,
}

/// Increment and stencil for the limit-definition quotient.
///
/// The increment actually used at `x_k` is `step · max(1, x_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericDiffConfig {
    step: f64,
    scheme: DiffScheme,
}

impl NumericDiffConfig {
    pub fn new(step: f64, scheme: DiffScheme) -> Result<Self> {
        if !(step > 0.0 && step <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "difference step {step} must lie in (0, 1e-3]"
            )));
        }
        Ok(NumericDiffConfig { step, scheme })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> DiffScheme {
        self.scheme
    }
}

impl Default for NumericDiffConfig {
    fn default() -> Self {
        NumericDiffConfig {
            step: 1e-5,
            scheme: DiffScheme::Central,
        }
    }
}

/// `D^α_{x_k} e = x_k^{1-α} ∂e/∂x_k`.
pub fn conf_deriv(e: &Expr, k: usize, alpha: AlphaOrder) -> Expr {
    let d = e.diff(k);
    Expr::mul(Expr::pow(Expr::var(k), 1.0 - alpha.value()), d)
}

/// Limit-definition quotient of `D^α_{x_k} e` at `p`.
pub fn conf_deriv_numeric(
    e: &Expr,
    k: usize,
    alpha: AlphaOrder,
    p: &Point,
    cfg: &NumericDiffConfig,
) -> Result<f64> {
    if k == 0 || k > p.dim() {
        return Err(Error::InvalidParameter(format!(
            "axis {k} outside 1..={}",
            p.dim()
        )));
    }
    let xk = p.get(k);
    let delta = cfg.step * xk.max(1.0);
    let shift = delta * xk.powf(1.0 - alpha.value());
    let mut x = p.coords().to_vec();
    let at = |x: &[f64]| -> Result<f64> { Ok(e.eval_at(x)?) };
    match cfg.scheme {
        DiffScheme::Forward => {
            let f0 = at(&x)?;
            x[k - 1] = xk + shift;
            let f1 = at(&x)?;
            Ok((f1 - f0) / delta)
        }
        DiffScheme::Central => {
            if xk - shift <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "central stencil leaves the positive orthant at x{k} = {xk}"
                )));
            }
            x[k - 1] = xk + shift;
            let fp = at(&x)?;
            x[k - 1] = xk - shift;
            let fm = at(&x)?;
            Ok((fp - fm) / (2.0 * delta))
        }
    }
}

/// Conformable gradient `(D^α_{x_1} e, ..., D^α_{x_n} e)`.
pub fn conf_gradient(e: &Expr, alpha: AlphaOrder, n: usize) -> Vec<Expr> {
    (1..=n).map(|k| conf_deriv(e, k, alpha)).collect()
}

/// `Σ_k D^α_{x_k}(|D^α_{x_k} e|^{p_k-2} D^α_{x_k} e)`.
///
/// Each term is expanded with the chain rule as
/// `(p_k - 1)|D^α_{x_k} e|^{p_k-2} D^α_{x_k} D^α_{x_k} e`, so for `p_k = 2` it
/// is exactly `D^α_{x_k} D^α_{x_k} e`. Where `p_k < 2` and the partial
/// vanishes the expression fails to evaluate.
pub fn anisotropic_op(e: &Expr, alpha: AlphaOrder, p: &ExponentVec) -> Expr {
    Expr::sum((1..=p.len()).map(|k| {
        let pk = p.get(k);
        let dk = conf_deriv(e, k, alpha);
        let ddk = conf_deriv(&dk, k, alpha);
        Expr::mul(
            Expr::Const(pk - 1.0),
            Expr::mul(Expr::pow(Expr::abs(dk), pk - 2.0), ddk),
        )
    }))
}

/// Sum of the conformable second partials, `Σ_k D^α_{x_k} D^α_{x_k} e`.
pub fn conf_laplacian(e: &Expr, alpha: AlphaOrder, n: usize) -> Expr {
    Expr::sum((1..=n).map(|k| conf_deriv(&conf_deriv(e, k, alpha), k, alpha)))
}

/// Compare `T^{α+β} e` with `T^α(T^β e)` for a function of `x1`.
///
/// Orders with `α + β > 1` are rejected, except `β = 1`, where
/// `T^{α+1} := T^α ∘ T^1` by convention and both sides agree.
pub fn compose_orders(e: &Expr, alpha: AlphaOrder, beta: AlphaOrder, p: &Point) -> Result<(f64, f64)> {
    let inner = conf_deriv(e, 1, beta);
    let rhs = conf_deriv(&inner, 1, alpha).eval(p)?;
    if beta.value() == 1.0 {
        return Ok((rhs, rhs));
    }
    let sum = alpha.value() + beta.value();
    if sum > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha + beta = {sum} exceeds 1; T^(alpha+beta) is only defined for orders in (0, 1]"
        )));
    }
    let lhs = conf_deriv(e, 1, AlphaOrder(sum)).eval(p)?;
    Ok((lhs, rhs))
}

/// `|T^α_x (f∘v) - (T^α_v f)(v) · v^{α-1} · T^α_x v|` at `p`.
///
/// `outer` is a function of `x1` standing for the inner variable `v`.
pub fn chain_rule_residual(
    outer: &Expr,
    inner: &Expr,
    k: usize,
    alpha: AlphaOrder,
    p: &Point,
) -> Result<f64> {
    let v = inner.eval(p)?;
    if v <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inner function must be positive at the point, got {v}"
        )));
    }
    let composed = outer.substitute(1, inner);
    let lhs = conf_deriv(&composed, k, alpha).eval(p)?;
    let outer_d = conf_deriv(outer, 1, alpha).eval_at(&[v])?;
    let inner_d = conf_deriv(inner, k, alpha).eval(p)?;
    let rhs = outer_d * v.powf(alpha.value() - 1.0) * inner_d;
    Ok((lhs - rhs).abs())
}

/// `|D^α_{x1}(D^β_{x2} e) - D^β_{x2}(D^α_{x1} e)|` at `p`.
pub fn mixed_partials_residual(e: &Expr, alpha: AlphaOrder, beta: AlphaOrder, p: &Point) -> Result<f64> {
    if p.dim() < 2 {
        return Err(Error::InvalidParameter(
            "mixed partials need at least two variables".into(),
        ));
    }
    let a = conf_deriv(&conf_deriv(e, 2, beta), 1, alpha).eval(p)?;
    let b = conf_deriv(&conf_deriv(e, 1, alpha), 2, beta).eval(p)?;
    Ok((a - b).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn a(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn alpha_bounds() {
        assert!(AlphaOrder::new(0.0).is_err());
        assert!(AlphaOrder::new(1.2).is_err());
        assert!(AlphaOrder::new(f64::NAN).is_err());
        assert!(AlphaOrder::new(1.0).is_ok());
        assert!(NumericDiffConfig::new(1e-2, DiffScheme::Central).is_err());
        assert!(NumericDiffConfig::new(0.0, DiffScheme::Forward).is_err());
    }

    #[test]
    fn power_rule_symbolic_form() {
        for (s, al) in [(2.0, 0.5), (3.0, 0.25), (-1.5, 0.8), (0.7, 0.3)] {
            let e = Expr::pow(Expr::var(1), s);
            let d = conf_deriv(&e, 1, a(al));
            for x in [0.4, 1.0, 2.3] {
                let expect = s * f64::powf(x, s - al);
                let got = d.eval(&pt(&[x])).unwrap();
                assert!((got - expect).abs() <= 1e-14 * expect.abs().max(1.0));
            }
        }
        let d = conf_deriv(&parse("x1^2", 1).unwrap(), 1, a(0.5));
        assert_eq!(d.to_string(), "2*x1^1.5");
        assert_eq!(d.eval(&pt(&[1.0])).unwrap(), 2.0);
    }

    #[test]
    fn constant_has_zero_derivative() {
        assert_eq!(conf_deriv(&Expr::Const(4.0), 1, a(0.3)), Expr::Const(0.0));
        let cfg = NumericDiffConfig::default();
        let v = conf_deriv_numeric(&Expr::Const(7.0), 1, a(0.5), &pt(&[1.3]), &cfg).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn numeric_quotient_matches_symbolic() {
        let e = parse("sin(x1)", 1).unwrap();
        let cfg = NumericDiffConfig::new(1e-5, DiffScheme::Central).unwrap();
        let v = conf_deriv_numeric(&e, 1, a(0.5), &pt(&[1.0]), &cfg).unwrap();
        assert!((v - 1f64.cos()).abs() < 1e-8);
        let fwd = NumericDiffConfig::new(1e-5, DiffScheme::Forward).unwrap();
        let v = conf_deriv_numeric(&Expr::var(1), 1, AlphaOrder::ONE, &pt(&[2.0]), &fwd).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gradient_of_alpha_powers_is_constant() {
        let al = 0.35;
        let e = Expr::add(Expr::pow(Expr::var(1), al), Expr::pow(Expr::var(2), al));
        let g = conf_gradient(&e, a(al), 2);
        assert_eq!(g, vec![Expr::Const(al), Expr::Const(al)]);
        let zero = conf_gradient(&Expr::Const(3.0), a(al), 3);
        assert!(zero.iter().all(|c| *c == Expr::Const(0.0)));
    }

    #[test]
    fn alpha_one_is_classical_derivative() {
        let e = parse("exp(x1)*cos(x2) + x1^3/x2", 2).unwrap();
        for k in 1..=2 {
            assert_eq!(conf_deriv(&e, k, AlphaOrder::ONE), e.diff(k));
        }
    }

    #[test]
    fn anisotropic_operator_annihilates_alpha_powers() {
        let al = 0.6;
        let one = conf_deriv(&Expr::pow(Expr::var(1), al), 1, a(al));
        assert_eq!(one, Expr::Const(al));
        let e = Expr::pow(Expr::var(1), al);
        let op = anisotropic_op(&e, a(al), &ExponentVec::uniform(2.0, 1).unwrap());
        assert_eq!(op, Expr::Const(0.0));
        let e2 = Expr::add(Expr::pow(Expr::var(1), al), Expr::pow(Expr::var(2), al));
        let op2 = anisotropic_op(&e2, a(al), &ExponentVec::uniform(2.0, 2).unwrap());
        assert_eq!(op2, Expr::Const(0.0));
    }

    #[test]
    fn anisotropic_operator_p2_is_conformable_laplacian() {
        let e = parse("x1^2*x2 + sin(x2)", 2).unwrap();
        let al = a(0.4);
        let op = anisotropic_op(&e, al, &ExponentVec::uniform(2.0, 2).unwrap());
        let lap = conf_laplacian(&e, al, 2);
        let x = pt(&[0.8, 1.9]);
        assert!((op.eval(&x).unwrap() - lap.eval(&x).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn anisotropic_operator_alpha_one_is_pseudo_p_laplacian() {
        // (|u'|^{p-2} u')' for u = x^3, p = 3: (9x^4)' = 36 x^3
        let e = parse("x1^3", 1).unwrap();
        let op = anisotropic_op(&e, AlphaOrder::ONE, &ExponentVec::uniform(3.0, 1).unwrap());
        let x = 1.3f64;
        assert!((op.eval(&pt(&[x])).unwrap() - 36.0 * x.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_operator_singular_point_errors() {
        let e = parse("(x1 - 1)^2", 1).unwrap();
        let op = anisotropic_op(&e, a(0.5), &ExponentVec::uniform(1.5, 1).unwrap());
        assert!(op.eval(&pt(&[1.0])).is_err());
        assert!(op.eval(&pt(&[1.4])).is_ok());
    }

    #[test]
    fn composition_witness() {
        let (lhs, rhs) = compose_orders(&Expr::var(1), a(0.5), a(0.5), &pt(&[1.0])).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15);
        assert!((rhs - 0.5).abs() < 1e-15);
        let (l, r) = compose_orders(&Expr::var(1), a(0.5), AlphaOrder::ONE, &pt(&[1.7])).unwrap();
        assert_eq!(l, r);
        let (l, r) = compose_orders(&Expr::Const(2.0), a(0.3), a(0.4), &pt(&[1.0])).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        assert!(compose_orders(&Expr::var(1), a(0.7), a(0.6), &pt(&[1.0])).is_err());
    }

    #[test]
    fn chain_rule_examples() {
        let sq = parse("x1^2", 1).unwrap();
        let x1 = Expr::var(1);
        assert!(chain_rule_residual(&sq, &x1, 1, a(0.4), &pt(&[1.7])).unwrap() < 1e-14);
        assert!(chain_rule_residual(&x1, &sq, 1, a(0.4), &pt(&[1.7])).unwrap() < 1e-14);
        let ex = parse("exp(x1)", 1).unwrap();
        assert!(chain_rule_residual(&ex, &sq, 1, a(0.5), &pt(&[1.3])).unwrap() <= 1e-9);
    }

    #[test]
    fn clairaut_examples() {
        let e = parse("x1*x2", 2).unwrap();
        assert_eq!(mixed_partials_residual(&e, a(0.2), a(0.9), &pt(&[1.2, 0.7])).unwrap(), 0.0);
        let f = parse("sin(x1)^2", 2).unwrap();
        assert_eq!(mixed_partials_residual(&f, a(0.2), a(0.9), &pt(&[1.2, 0.7])).unwrap(), 0.0);
        let g = parse("sin(x1*x2)", 2).unwrap();
        assert!(mixed_partials_residual(&g, a(0.3), a(0.7), &pt(&[1.1, 0.9])).unwrap() <= 1e-9);
    }
}
