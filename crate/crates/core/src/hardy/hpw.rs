use serde::Serialize;

use super::InequalityReport;
use crate::conformable::{conf_gradient, AlphaOrder};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::identities::ExponentVec;
use crate::quadrature::{BoxDomain, QuadratureSpec, TensorGrid};

/// Integrals behind the isotropic uncertainty product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpwResult {
    pub n: usize,
    /// `∫u² d_αx`
    pub mass: f64,
    /// `∫|x|^{2(α−1)}u² d_αx`
    pub weighted_mass: f64,
    /// `∫|x|^{−2(α−1)}u² d_αx`
    pub inverse_weighted_mass: f64,
    /// `∫Σ_k|D_k u|² d_αx`
    pub energy: f64,
    pub product: f64,
    /// `((n−2)/2)² (∫u² d_αx)²`
    pub bound: f64,
}

impl HpwResult {
    /// `(∫|x|^{−2(α−1)}u²)^{1/2}(∫|x|^{2(α−1)}u²)^{1/2} − ∫u²`, nonnegative by
    /// Cauchy–Schwarz.
    pub fn cauchy_schwarz_gap(&self) -> f64 {
        (self.inverse_weighted_mass * self.weighted_mass).sqrt() - self.mass
    }

    pub fn report(&self, alpha: AlphaOrder, spec: &QuadratureSpec, tol: f64) -> InequalityReport {
        InequalityReport::new(
            "hpw",
            alpha,
            &vec![2.0; self.n],
            vec![self.product],
            vec![self.bound],
            0.0,
            spec,
            tol,
        )
        .with_param("n", self.n as f64)
        .with_param("mass", self.mass)
        .with_param("energy", self.energy)
        .with_param("cauchy_schwarz_gap", self.cauchy_schwarz_gap())
    }
}

fn euclidean_sq(n: usize) -> Expr {
    Expr::sum((1..=n).map(|k| Expr::pow(Expr::var(k), 2.0)))
}

/// `(∫|x|^{2(α−1)}u²)(∫|D^α u|²)` against `((n−2)/2)²(∫u²)²`, `n > 2`.
pub fn hpw_check(u: &Expr, omega: &BoxDomain, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<HpwResult> {
    let n = omega.dim();
    if n <= 2 {
        return Err(Error::Infeasible(format!("n>2 (n = {n})")));
    }
    let al = alpha.value();
    let u2 = Expr::pow(u.clone(), 2.0);
    let r2 = euclidean_sq(n);
    let energy = Expr::sum(conf_gradient(u, alpha, n).into_iter().map(|g| Expr::pow(g, 2.0)));
    let ints = TensorGrid::volume(omega, alpha, spec)?.integrate_many(&[
        u2.clone(),
        Expr::mul(Expr::pow(r2.clone(), al - 1.0), u2.clone()),
        Expr::mul(Expr::pow(r2, 1.0 - al), u2),
        energy,
    ])?;
    let c = (n as f64 - 2.0) / 2.0;
    Ok(HpwResult {
        n,
        mass: ints[0],
        weighted_mass: ints[1],
        inverse_weighted_mass: ints[2],
        energy: ints[3],
        product: ints[1] * ints[3],
        bound: c * c * ints[0] * ints[0],
    })
}

/// `Σ_k (∫x_k^{q_k(α−1)}|u|^{p_k})^{1/q_k} (∫|D^α u|^{p_k})^{1/p_k}` against
/// `Σ_k (p_k−1)|m| ∫|u|^{p_k}`, with `|D^α u|` the Euclidean norm of the
/// conformable gradient.
pub fn hpw_anisotropic_check(
    u: &Expr,
    omega: &BoxDomain,
    alpha: AlphaOrder,
    p: &ExponentVec,
    m: f64,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<InequalityReport> {
    let n = omega.dim();
    if p.len() != n {
        return Err(Error::InvalidParameter(format!("{} exponents for dimension {n}", p.len())));
    }
    if !(m < 0.0) {
        return Err(Error::Infeasible(format!("m<0 (m = {m})")));
    }
    let al = alpha.value();
    let au = Expr::abs(u.clone());
    let grad2 = Expr::sum(conf_gradient(u, alpha, n).into_iter().map(|g| Expr::pow(g, 2.0)));
    let mut exprs = Vec::with_capacity(3 * n);
    for k in 1..=n {
        let (pk, qk) = (p.get(k), p.conjugate(k));
        let upk = Expr::pow(au.clone(), pk);
        exprs.push(Expr::mul(Expr::pow(Expr::var(k), qk * (al - 1.0)), upk.clone()));
        exprs.push(Expr::pow(grad2.clone(), pk / 2.0));
        exprs.push(upk);
    }
    let ints = TensorGrid::volume(omega, alpha, spec)?.integrate_many(&exprs)?;
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in 1..=n {
        let (pk, qk) = (p.get(k), p.conjugate(k));
        let i = &ints[3 * (k - 1)..3 * k];
        lhs.push(i[0].powf(1.0 / qk) * i[1].powf(1.0 / pk));
        rhs.push((pk - 1.0) * m.abs() * i[2]);
    }
    Ok(InequalityReport::new("hpw-aniso", alpha, p.as_slice(), lhs, rhs, 0.0, spec, tol).with_param("m", m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn hpw_requires_three_dimensions() {
        let b = BoxDomain::cube(2, 0.5, 1.5).unwrap();
        let e = hpw_check(&Expr::Const(0.0), &b, AlphaOrder::ONE, &QuadratureSpec::default());
        assert!(matches!(e, Err(Error::Infeasible(_))));
    }

    #[test]
    fn zero_function_is_trivial() {
        let b = BoxDomain::cube(3, 0.5, 1.5).unwrap();
        let spec = QuadratureSpec::new(2, 4, true).unwrap();
        let r = hpw_check(&Expr::Const(0.0), &b, AlphaOrder::new(0.7).unwrap(), &spec).unwrap();
        assert_eq!((r.product, r.bound), (0.0, 0.0));
        let b2 = BoxDomain::cube(2, 0.5, 1.5).unwrap();
        let p = ExponentVec::new(vec![2.0, 3.0]).unwrap();
        let r = hpw_anisotropic_check(&Expr::Const(0.0), &b2, AlphaOrder::ONE, &p, -0.5, &spec, 1e-7).unwrap();
        assert_eq!((r.lhs, r.rhs_interior), (0.0, 0.0));
    }

    #[test]
    fn tensor_bump_satisfies_product_bound() {
        let b = BoxDomain::cube(3, 0.5, 1.5).unwrap();
        let u = parse("(x1 - 0.5)*(1.5 - x1)*(x2 - 0.5)*(1.5 - x2)*(x3 - 0.5)*(1.5 - x3)", 3).unwrap();
        let spec = QuadratureSpec::new(3, 6, true).unwrap();
        let r = hpw_check(&u, &b, AlphaOrder::new(0.7).unwrap(), &spec).unwrap();
        assert!(r.product >= r.bound);
        assert!(r.cauchy_schwarz_gap() >= 0.0);
        assert!(r.report(AlphaOrder::new(0.7).unwrap(), &spec, 1e-7).pass);
    }
}
