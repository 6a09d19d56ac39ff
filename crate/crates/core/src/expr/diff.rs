use super::{Expr, Func};

pub(super) fn diff(e: &Expr, k: usize) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(j) => Expr::Const(if *j == k { 1.0 } else { 0.0 }),
        Expr::Add(a, b) => Expr::add(diff(a, k), diff(b, k)),
        Expr::Sub(a, b) => Expr::sub(diff(a, k), diff(b, k)),
        Expr::Neg(a) => Expr::neg(diff(a, k)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(diff(a, k), (**b).clone()),
            Expr::mul((**a).clone(), diff(b, k)),
        ),
        Expr::Div(a, b) => {
            let da = diff(a, k);
            let db = diff(b, k);
            if db.is_zero() {
                return Expr::div(da, (**b).clone());
            }
            Expr::div(
                Expr::sub(
                    Expr::mul(da, (**b).clone()),
                    Expr::mul((**a).clone(), db),
                ),
                Expr::pow((**b).clone(), 2.0),
            )
        }
        Expr::Pow(a, p) => {
            let da = diff(a, k);
            if da.is_zero() {
                return Expr::Const(0.0);
            }
            Expr::mul(
                Expr::mul(Expr::Const(*p), Expr::pow((**a).clone(), p - 1.0)),
                da,
            )
        }
        Expr::Func(f, a) => {
            let da = diff(a, k);
            if da.is_zero() {
                return Expr::Const(0.0);
            }
            let inner = (**a).clone();
            let outer = match f {
                // sign(a) as a/|a|; undefined where a vanishes
                Func::Abs => Expr::div(inner.clone(), Expr::abs(inner)),
                Func::Exp => Expr::exp(inner),
                Func::Log => return Expr::div(da, inner),
                Func::Sin => Expr::cos(inner),
                Func::Cos => Expr::neg(Expr::sin(inner)),
            };
            Expr::mul(outer, da)
        }
    }
}
