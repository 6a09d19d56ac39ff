use confcalc::conformable::{conf_deriv, conf_deriv_numeric};
use confcalc::identities::{divergence_residual, picone_l, picone_r};
use confcalc::quadrature::{alpha_integral_1d, alpha_integral_nd};
use confcalc::suite::{
    random_box, random_monotone_positive, random_picone_pair, random_point, random_smooth, rng,
};
use confcalc::{AlphaOrder, BoxDomain, ExponentVec, Expr, NumericDiffConfig, PiconePair, QuadratureSpec};
use proptest::prelude::*;
use rand::Rng;

fn alpha() -> impl Strategy<Value = AlphaOrder> {
    prop_oneof![Just(1.0), 0.1f64..1.0].prop_map(|a| AlphaOrder::new(a).unwrap())
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `T(af + bg) = aT f + bT g` up to rounding in the terms.
    #[test]
    fn linearity(seed in any::<u64>(), al in alpha(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let (f, g) = (random_smooth(n, &mut r), random_smooth(n, &mut r));
        let x = random_point(n, 0.5, 3.0, &mut r);
        for k in 1..=n {
            let t = |e: &Expr| conf_deriv(e, k, al).eval(&x).unwrap();
            let lhs = t(&Expr::add(Expr::mul(Expr::Const(a), f.clone()), Expr::mul(Expr::Const(b), g.clone())));
            let (tf, tg) = (t(&f), t(&g));
            let scale = (a * tf).abs() + (b * tg).abs();
            prop_assert!(rel(lhs, a * tf + b * tg, scale) <= 1e-12 || scale == 0.0 && lhs == 0.0);
        }
    }

    /// Product and quotient rules.
    #[test]
    fn product_and_quotient(seed in any::<u64>(), al in alpha()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let f = random_smooth(n, &mut r);
        let g = random_monotone_positive(n, &mut r);
        let x = random_point(n, 0.5, 3.0, &mut r);
        let (fv, gv) = (f.eval(&x).unwrap(), g.eval(&x).unwrap());
        for k in 1..=n {
            let t = |e: &Expr| conf_deriv(e, k, al).eval(&x).unwrap();
            let (tf, tg) = (t(&f), t(&g));
            let prod = t(&Expr::mul(f.clone(), g.clone()));
            prop_assert!(rel(prod, fv * tg + gv * tf, (fv * tg).abs() + (gv * tf).abs()) <= 1e-10);
            let quot = t(&Expr::div(f.clone(), g.clone()));
            let (q1, q2) = (tf / gv, fv * tg / (gv * gv));
            prop_assert!(rel(quot, q1 - q2, q1.abs() + q2.abs()) <= 1e-10);
        }
    }

    /// The limit quotient converges to the symbolic derivative.
    #[test]
    fn numeric_matches_symbolic(seed in any::<u64>(), al in alpha()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let f = random_smooth(n, &mut r);
        let x = random_point(n, 0.5, 3.0, &mut r);
        let cfg = NumericDiffConfig::default();
        for k in 1..=n {
            let sym = conf_deriv(&f, k, al).eval(&x).unwrap();
            let num = conf_deriv_numeric(&f, k, al, &x, &cfg).unwrap();
            prop_assert!((num - sym).abs() <= 1e-6 * sym.abs().max(1.0), "{f}: {num} vs {sym}");
        }
    }

    /// Polynomials in `s = x^α/α` of degree `2·order − 1` integrate exactly.
    #[test]
    fn gauss_exactness_in_s(al in alpha(), a in 0.0f64..1.0, w in 0.2f64..2.0, coeffs in prop::collection::vec(-2.0f64..2.0, 1..=20)) {
        let al_v = al.value();
        let s = Expr::mul(Expr::Const(1.0 / al_v), Expr::pow(Expr::var(1), al_v));
        let e = Expr::sum(coeffs.iter().enumerate().map(|(j, c)| Expr::mul(Expr::Const(*c), Expr::pow(s.clone(), j as f64))));
        let b = a + w;
        let (sa, sb) = (a.powf(al_v) / al_v, b.powf(al_v) / al_v);
        let exact: f64 = coeffs.iter().enumerate().map(|(j, c)| c * (sb.powi(j as i32 + 1) - sa.powi(j as i32 + 1)) / (j as f64 + 1.0)).sum();
        let scale: f64 = coeffs.iter().enumerate().map(|(j, c)| (c * (sb.powi(j as i32 + 1) + sa.powi(j as i32 + 1)) / (j as f64 + 1.0)).abs()).sum();
        let spec = QuadratureSpec::new(1, 10, true).unwrap();
        let got = alpha_integral_1d(&e, a, b, al, &spec).unwrap();
        prop_assert!(rel(got, exact, scale) <= 1e-12, "{got} vs {exact}");
    }

    /// Doubling the panel count moves smooth integrals by at most 1e-9 relative.
    #[test]
    fn refinement_is_stable(seed in any::<u64>(), al in alpha()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=2);
        let e = random_smooth(n, &mut r);
        let omega = random_box(n, 0.5, 3.0, &mut r);
        let spec = QuadratureSpec::default();
        let coarse = alpha_integral_nd(&e, &omega, al, &spec).unwrap();
        let fine = alpha_integral_nd(&e, &omega, al, &spec.refined()).unwrap();
        prop_assert!((coarse - fine).abs() <= 1e-9 * fine.abs().max(1.0), "{coarse} vs {fine}");
    }

    /// Divergence identity on random boxes in two dimensions.
    #[test]
    fn divergence_identity(seed in any::<u64>(), al in alpha()) {
        let mut r = rng(seed);
        let omega = random_box(2, 0.5, 3.0, &mut r);
        let f = vec![random_smooth(2, &mut r), random_smooth(2, &mut r)];
        let res = divergence_residual(&f, &omega, al, &QuadratureSpec::default()).unwrap();
        prop_assert!(res.within(1e-7), "{res:?}");
    }

    /// `R = L`, with both Young and Cauchy–Schwarz parts nonnegative.
    #[test]
    fn picone_identity(seed in any::<u64>(), al in alpha()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let pair = random_picone_pair(n, &mut r);
        let p = ExponentVec::new((0..n).map(|_| r.gen_range(1.2..4.0)).collect()).unwrap();
        let x = random_point(n, 0.5, 3.0, &mut r);
        let rv = picone_r(&pair, al, &p, &x).unwrap();
        let s = picone_l(&pair, al, &p, &x).unwrap();
        prop_assert!((rv - s.l).abs() <= 1e-9 * (1.0 + s.l.abs()), "R = {rv}, L = {}", s.l);
        prop_assert!(s.l >= -1e-12 && s.a1 >= -1e-12 && s.a2 >= -1e-12, "{s:?}");
    }

    /// Proportional pairs are the equality case; the Young part vanishes too.
    #[test]
    fn picone_equality_case(seed in any::<u64>(), al in alpha(), c in prop_oneof![Just(0.5), Just(1.0), Just(3.0), 0.1f64..5.0]) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let v = random_monotone_positive(n, &mut r);
        let p = ExponentVec::new((0..n).map(|_| r.gen_range(1.2..4.0)).collect()).unwrap();
        let x = random_point(n, 0.5, 3.0, &mut r);
        let s = picone_l(&PiconePair::new(Expr::mul(Expr::Const(c), v.clone()), v), al, &p, &x).unwrap();
        prop_assert!(s.l.abs() <= 1e-12 && s.a1.abs() <= 1e-12, "{s:?}");
    }
}

#[test]
fn alpha_one_reduces_to_classical_calculus() {
    let mut r = rng(3);
    for _ in 0..50 {
        let e = random_smooth(2, &mut r);
        for k in 1..=2 {
            assert_eq!(conf_deriv(&e, k, AlphaOrder::ONE), e.diff(k));
        }
    }
    let cube = Expr::pow(Expr::var(1), 3.0);
    let got = alpha_integral_1d(&cube, 0.0, 2.0, AlphaOrder::ONE, &QuadratureSpec::default()).unwrap();
    assert!((got - 4.0).abs() < 1e-13);
    let omega = BoxDomain::cube(2, 1.0, 2.0).unwrap();
    let xy = Expr::mul(Expr::var(1), Expr::var(2));
    let got = alpha_integral_nd(&xy, &omega, AlphaOrder::ONE, &QuadratureSpec::default()).unwrap();
    assert!((got - 2.25).abs() < 1e-13);
}
