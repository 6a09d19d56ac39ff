//! Integrals against the measure `d_αx = Π_k x_k^{α-1} dx` and the matching
//! boundary flux on axis-aligned boxes.
//!
//! Under `s = x^α/α` the measure becomes `ds`, so each axis uses
//! Gauss–Legendre panels that are uniform in `s`. A lower endpoint at the
//! origin is additionally graded toward `s = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::conformable::{conf_deriv, AlphaOrder};
use crate::error::{Error, Result};
use crate::expr::{EvalError, Expr};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Sum with pairwise splitting; the order of operations depends only on
/// the length, so results are reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Composite Gauss–Legendre rule per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    panels: usize,
    order: usize,
    substitution: bool,
    #[serde(skip)]
    grading_levels: usize,
}

impl QuadratureSpec {
    pub fn new(panels: usize, order: usize, substitution: bool) -> Result<Self> {
        if panels < 1 {
            return Err(Error::InvalidParameter("panel count must be at least 1".into()));
        }
        if order < 2 {
            return Err(Error::InvalidParameter("Gauss-Legendre order must be at least 2".into()));
        }
        Ok(QuadratureSpec {
            panels,
            order,
            substitution,
            grading_levels: 40,
        })
    }

    /// Number of dyadic sub-panels used toward an endpoint at the origin.
    pub fn with_grading_levels(mut self, levels: usize) -> Self {
        self.grading_levels = levels;
        self
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn substitution(&self) -> bool {
        self.substitution
    }

    pub fn grading_levels(&self) -> usize {
        self.grading_levels
    }

    /// Same rule with twice the panels.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            panels: self.panels * 2,
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: 8,
            order: 10,
            substitution: true,
            grading_levels: 40,
        }
    }
}

/// Axis-aligned box `Π_k [a_k, b_k]` with `0 < a_k < b_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidParameter(format!(
                "box needs matching nonempty bounds, got {} lower and {} upper",
                lo.len(),
                hi.len()
            )));
        }
        for (k, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(a > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "box axis {} must lie in the open positive orthant, got lower bound {a}",
                    k + 1
                )));
            }
            if !(a < b) {
                return Err(Error::InvalidParameter(format!(
                    "box axis {} has lower bound {a} not below upper bound {b}",
                    k + 1
                )));
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// `[a, b]^n`.
    pub fn cube(n: usize, a: f64, b: f64) -> Result<Self> {
        BoxDomain::new(vec![a; n], vec![b; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Lower bound of axis `k` (1-based).
    pub fn lo(&self, k: usize) -> f64 {
        self.lo[k - 1]
    }

    /// Upper bound of axis `k` (1-based).
    pub fn hi(&self, k: usize) -> f64 {
        self.hi[k - 1]
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceSide {
    Lower,
    Upper,
}

/// One face of a box, orthogonal to `e_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceFluxTerm {
    pub axis: usize,
    pub side: FaceSide,
    /// `-1` on the lower face, `+1` on the upper face.
    pub normal: f64,
}

impl FaceFluxTerm {
    pub fn all(n: usize) -> Vec<FaceFluxTerm> {
        (1..=n)
            .flat_map(|axis| {
                [
                    FaceFluxTerm {
                        axis,
                        side: FaceSide::Lower,
                        normal: -1.0,
                    },
                    FaceFluxTerm {
                        axis,
                        side: FaceSide::Upper,
                        normal: 1.0,
                    },
                ]
            })
            .collect()
    }
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// Rule for `∫_a^b f(x) x^{α-1} dx`.
    pub fn alpha(a: f64, b: f64, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<AxisRule> {
        if !(a >= 0.0 && a < b && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "integration interval [{a}, {b}] must satisfy 0 <= a < b"
            )));
        }
        let al = alpha.value();
        if a == 0.0 && al < 1.0 && !spec.substitution {
            return Err(Error::InvalidParameter(
                "a lower endpoint at 0 requires the substitution s = x^alpha/alpha".into(),
            ));
        }
        let (gx, gw) = gauss_legendre(spec.order);
        let mut rule = AxisRule {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
        if spec.substitution {
            let s0 = a.powf(al) / al;
            let s1 = b.powf(al) / al;
            let to_x = |s: f64| (al * s).powf(1.0 / al);
            let h = (s1 - s0) / spec.panels as f64;
            let mut intervals = Vec::new();
            if a == 0.0 && spec.grading_levels > 0 {
                let mut left = h / 2f64.powi(spec.grading_levels as i32);
                intervals.push((0.0, left));
                for _ in 0..spec.grading_levels {
                    intervals.push((left, 2.0 * left));
                    left *= 2.0;
                }
            } else {
                intervals.push((s0, s0 + h));
            }
            for i in 1..spec.panels {
                let lo = s0 + h * i as f64;
                let hi = if i + 1 == spec.panels { s1 } else { lo + h };
                intervals.push((lo, hi));
            }
            for (lo, hi) in intervals {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (z, w) in gx.iter().zip(&gw) {
                    rule.nodes.push(to_x(mid + half * z));
                    rule.weights.push(half * w);
                }
            }
        } else {
            let h = (b - a) / spec.panels as f64;
            for i in 0..spec.panels {
                let lo = a + h * i as f64;
                let hi = if i + 1 == spec.panels { b } else { lo + h };
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (z, w) in gx.iter().zip(&gw) {
                    let x = mid + half * z;
                    rule.nodes.push(x);
                    rule.weights.push(half * w * x.powf(al - 1.0));
                }
            }
        }
        Ok(rule)
    }

    /// Single node carrying weight `normal`.
    fn face(x: f64, normal: f64) -> AxisRule {
        AxisRule {
            nodes: vec![x],
            weights: vec![normal],
        }
    }
}

/// Flattened tensor-product rule.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl TensorGrid {
    pub fn from_rules(rules: &[AxisRule]) -> TensorGrid {
        let dim = rules.len();
        let total: usize = rules.iter().map(|r| r.nodes.len()).product();
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for (k, r) in rules.iter().enumerate() {
                points.push(r.nodes[idx[k]]);
                w *= r.weights[idx[k]];
            }
            weights.push(w);
            // last axis fastest
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < rules[k].nodes.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        TensorGrid { dim, points, weights }
    }

    /// Volume rule for `∫_Ω f d_αx`.
    pub fn volume(omega: &BoxDomain, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<TensorGrid> {
        let rules = (1..=omega.dim())
            .map(|k| AxisRule::alpha(omega.lo(k), omega.hi(k), alpha, spec))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorGrid::from_rules(&rules))
    }

    /// Rule for one face, weighted by the α-measure of the other axes and
    /// signed by the outward normal.
    pub fn face(
        omega: &BoxDomain,
        face: FaceFluxTerm,
        alpha: AlphaOrder,
        spec: &QuadratureSpec,
    ) -> Result<TensorGrid> {
        let rules = (1..=omega.dim())
            .map(|k| {
                if k == face.axis {
                    let x = match face.side {
                        FaceSide::Lower => omega.lo(k),
                        FaceSide::Upper => omega.hi(k),
                    };
                    Ok(AxisRule::face(x, face.normal))
                } else {
                    AxisRule::alpha(omega.lo(k), omega.hi(k), alpha, spec)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorGrid::from_rules(&rules))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Coordinates of node `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_i w_i f_i` for values sampled at the nodes, pairwise summed.
    pub fn weighted_sum(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let terms: Vec<f64> = self.weights.iter().zip(values).map(|(w, f)| w * f).collect();
        pairwise_sum(&terms)
    }

    /// Evaluate every expression at every node, in parallel; `out[j][i]`
    /// is expression `j` at node `i`.
    pub fn sample(&self, exprs: &[Expr]) -> Result<Vec<Vec<f64>>> {
        let compiled: Vec<_> = exprs.iter().map(Expr::compile).collect();
        let rows: Vec<std::result::Result<Vec<f64>, (usize, EvalError)>> = (0..self.len())
            .into_par_iter()
            .map_init(Vec::new, |stack, i| {
                let x = self.point(i);
                compiled
                    .iter()
                    .map(|c| c.eval_with(x, stack).map_err(|e| (i, e)))
                    .collect()
            })
            .collect();
        let mut out = vec![Vec::with_capacity(self.len()); exprs.len()];
        for row in rows {
            let row = row.map_err(|(i, source)| Error::IntegrandSample {
                point: self.point(i).to_vec(),
                source,
            })?;
            for (j, v) in row.into_iter().enumerate() {
                out[j].push(v);
            }
        }
        Ok(out)
    }

    /// `Σ_i w_i e(x_i)`.
    pub fn integrate(&self, e: &Expr) -> Result<f64> {
        let vals = self.sample(std::slice::from_ref(e))?;
        Ok(self.weighted_sum(&vals[0]))
    }

    /// Integrals of several expressions sharing one pass over the nodes.
    pub fn integrate_many(&self, exprs: &[Expr]) -> Result<Vec<f64>> {
        Ok(self
            .sample(exprs)?
            .iter()
            .map(|v| self.weighted_sum(v))
            .collect())
    }
}

/// `∫_a^b e(x) x^{α-1} dx` for an expression in `x1`.
pub fn alpha_integral_1d(e: &Expr, a: f64, b: f64, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<f64> {
    let rule = AxisRule::alpha(a, b, alpha, spec)?;
    TensorGrid::from_rules(&[rule]).integrate(e)
}

/// `∫_Ω e d_αx`.
pub fn alpha_integral_nd(e: &Expr, omega: &BoxDomain, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<f64> {
    TensorGrid::volume(omega, alpha, spec)?.integrate(e)
}

/// Signed contribution of every face to the flux of `f`.
pub fn alpha_flux_terms(
    f: &[Expr],
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<Vec<(FaceFluxTerm, f64)>> {
    if f.len() != omega.dim() {
        return Err(Error::InvalidParameter(format!(
            "vector field has {} components on a box of dimension {}",
            f.len(),
            omega.dim()
        )));
    }
    FaceFluxTerm::all(omega.dim())
        .into_iter()
        .map(|face| {
            let grid = TensorGrid::face(omega, face, alpha, spec)?;
            Ok((face, grid.integrate(&f[face.axis - 1])?))
        })
        .collect()
}

/// `Σ_k ±∫_{x_k = a_k, b_k} F_k Π_{j≠k} x_j^{α-1} dS`.
pub fn alpha_flux(f: &[Expr], omega: &BoxDomain, alpha: AlphaOrder, spec: &QuadratureSpec) -> Result<f64> {
    let terms: Vec<f64> = alpha_flux_terms(f, omega, alpha, spec)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `∫_Ω Σ_k D^α_{x_k} F_k d_αx`.
pub fn alpha_divergence_integral(
    f: &[Expr],
    omega: &BoxDomain,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let div = Expr::sum(f.iter().enumerate().map(|(i, fk)| conf_deriv(fk, i + 1, alpha)));
    alpha_integral_nd(&div, omega, alpha, spec)
}

/// `|∫(T^αf)g d_αx + ∫f(T^αg) d_αx − [fg]_a^b|` on `[a, b]`.
pub fn integration_by_parts_residual(
    f: &Expr,
    g: &Expr,
    a: f64,
    b: f64,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "integration by parts needs a > 0, got {a}"
        )));
    }
    let rule = AxisRule::alpha(a, b, alpha, spec)?;
    let grid = TensorGrid::from_rules(&[rule]);
    let lhs = grid.integrate_many(&[
        Expr::mul(conf_deriv(f, 1, alpha), g.clone()),
        Expr::mul(f.clone(), conf_deriv(g, 1, alpha)),
    ])?;
    let fg = Expr::mul(f.clone(), g.clone());
    let boundary = fg.eval_at(&[b])? - fg.eval_at(&[a])?;
    Ok((lhs[0] + lhs[1] - boundary).abs())
}

/// Residuals of both fundamental theorems at `t`.
///
/// `r1 = |T^α(I^α_a e)(t) − e(t)|` with `T^α = d/ds`, `s = x^α/α`, taken by a
/// five-point stencil in `s` on quadrature values of `I^α_a e`.
/// `r2 = |I^α_a(T^α e)(t) − (e(t) − e(a))|`.
pub fn fundamental_theorem_residuals(
    e: &Expr,
    a: f64,
    t: f64,
    alpha: AlphaOrder,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if !(a >= 0.0 && t > a && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fundamental theorem needs 0 <= a < t, got a = {a}, t = {t}"
        )));
    }
    let al = alpha.value();
    let to_s = |x: f64| x.powf(al) / al;
    let to_x = |s: f64| (al * s).powf(1.0 / al);
    // d/dt of the s-rule is its integrand at s_t times ds/dt = t^{α−1}
    let ds_dt = t.powf(al - 1.0);
    let d = t.powf(1.0 - al) * ds_dt * e.eval_at(&[to_x(to_s(t))])?;
    let et = e.eval_at(&[t])?;
    let r1 = (d - et).abs();
    let i2 = alpha_integral_1d(&conf_deriv(e, 1, alpha), a, t, alpha, spec)?;
    let r2 = (i2 - (et - e.eval_at(&[a])?)).abs();
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn al(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    #[test]
    fn gauss_legendre_matches_known_rules() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_eq!(x[1], 0.0);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        for n in [5, 10, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // exact for z^{2n-2}
            let m = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(z, w)| w * z.powi(m as i32)).sum();
            assert!((q - 2.0 / (m as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0, 10, true).is_err());
        assert!(QuadratureSpec::new(4, 1, true).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![2.0], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![1.0, 1.0], vec![2.0]).is_err());
    }

    #[test]
    fn one_dimensional_closed_forms() {
        let s = QuadratureSpec::default();
        let one = Expr::Const(1.0);
        let x = Expr::var(1);
        assert!((alpha_integral_1d(&one, 0.0, 1.0, al(0.5), &s).unwrap() - 2.0).abs() < 1e-13);
        assert!((alpha_integral_1d(&x, 0.0, 1.0, al(0.5), &s).unwrap() - 2.0 / 3.0).abs() < 1e-13);
        assert!((alpha_integral_1d(&x, 0.0, 1.0, AlphaOrder::ONE, &s).unwrap() - 0.5).abs() < 1e-15);
        assert!(alpha_integral_1d(&x, 1.0, 1.0, al(0.5), &s).is_err());
        let raw = QuadratureSpec::new(8, 10, false).unwrap();
        assert!(alpha_integral_1d(&x, 0.0, 1.0, al(0.5), &raw).is_err());
    }

    #[test]
    fn nd_closed_forms() {
        let s = QuadratureSpec::default();
        let sq = BoxDomain::cube(2, 1.0, 2.0).unwrap();
        let v = alpha_integral_nd(&Expr::Const(1.0), &sq, al(0.5), &s).unwrap();
        let c = 2.0 * (2f64.sqrt() - 1.0);
        assert!((v - c * c).abs() < 1e-13);
        assert!((v - 0.686292).abs() < 1e-6);
        let x1x2 = parse("x1*x2", 2).unwrap();
        let v = alpha_integral_nd(&x1x2, &sq, al(0.5), &s).unwrap();
        let c = 2.0 / 3.0 * (2.0 * 2f64.sqrt() - 1.0);
        assert!((v - c * c).abs() < 1e-13);
        let b = BoxDomain::new(vec![0.5, 1.0, 2.0], vec![1.0, 3.0, 2.5]).unwrap();
        let vol = alpha_integral_nd(&Expr::Const(1.0), &b, AlphaOrder::ONE, &s).unwrap();
        assert!((vol - 0.5).abs() < 1e-14);
    }

    #[test]
    fn flux_closed_forms() {
        let s = QuadratureSpec::default();
        let sq = BoxDomain::cube(2, 1.0, 2.0).unwrap();
        let f = vec![Expr::var(1), Expr::var(2)];
        let flux = alpha_flux(&f, &sq, al(0.5), &s).unwrap();
        let vol = alpha_divergence_integral(&f, &sq, al(0.5), &s).unwrap();
        let expect = 4.0 * (2f64.sqrt() - 1.0);
        assert!((flux - expect).abs() < 1e-13);
        assert!((vol - expect).abs() < 1e-13);
        let c = vec![Expr::Const(3.0), Expr::Const(-1.0)];
        assert!(alpha_flux(&c, &sq, AlphaOrder::ONE, &s).unwrap().abs() < 1e-15);
        let a = 0.3;
        let g = vec![Expr::pow(Expr::var(1), a), Expr::Const(0.0)];
        let flux = alpha_flux(&g, &sq, al(a), &s).unwrap();
        let side = (2f64.powf(a) - 1.0) / a;
        assert!((flux - (2f64.powf(a) - 1.0) * side).abs() < 1e-13);
        assert_eq!(alpha_flux_terms(&g, &sq, al(a), &s).unwrap().len(), 4);
        assert!(alpha_flux(&g[..1], &sq, al(a), &s).is_err());
    }

    #[test]
    fn substitution_rule_exact_for_polynomials_in_s() {
        let a = 0.4;
        let s = QuadratureSpec::new(1, 6, true).unwrap();
        // x^{kα} = (α s)^k; degree 11 in s is the Gauss limit for order 6
        let e = Expr::pow(Expr::var(1), 11.0 * a);
        let got = alpha_integral_1d(&e, 0.5, 2.0, al(a), &s).unwrap();
        let exact = (2f64.powf(12.0 * a) - 0.5f64.powf(12.0 * a)) / (12.0 * a);
        assert!((got - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn integration_by_parts_closed_form() {
        let s = QuadratureSpec::default();
        let x = Expr::var(1);
        let r = integration_by_parts_residual(&x, &x, 1.0, 2.0, al(0.5), &s).unwrap();
        assert!(r <= 1e-10);
        let f = parse("sin(x1)", 1).unwrap();
        let g = parse("exp(x1)", 1).unwrap();
        assert!(integration_by_parts_residual(&f, &g, 0.5, 1.5, al(0.7), &s).unwrap() <= 1e-8);
        assert!(integration_by_parts_residual(&Expr::Const(2.0), &g, 0.5, 1.5, al(0.7), &s).unwrap() <= 1e-10);
    }

    #[test]
    fn fundamental_theorems() {
        let s = QuadratureSpec::default();
        let sq = parse("x1^2", 1).unwrap();
        for a in [0.2, 0.5, 0.9] {
            let (_, r2) = fundamental_theorem_residuals(&sq, 0.0, 1.7, al(a), &s).unwrap();
            assert!(r2 <= 1e-10, "alpha {a}: r2 = {r2}");
        }
        let (r1, r2) = fundamental_theorem_residuals(&Expr::Const(3.0), 0.0, 1.0, al(0.5), &s).unwrap();
        assert!(r1 < 1e-12 && r2 == 0.0);
        let ex = parse("exp(x1)", 1).unwrap();
        let (r1, r2) = fundamental_theorem_residuals(&ex, 0.2, 1.4, al(0.6), &s).unwrap();
        assert!(r1 <= 1e-8 && r2 <= 1e-8, "{r1} {r2}");
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let xs = vec![0.1; 1000];
        assert!((pairwise_sum(&xs) - 100.0).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
