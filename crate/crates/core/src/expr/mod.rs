//! Expression trees for real functions of `n` variables.
//!
//! An [`Expr`] is an immutable tree over the variables `x1..xn`. Trees built by
//! the parser keep the exact shape of the input text, while the constructor
//! functions in this module ([`Expr::add`], [`Expr::mul`], ...) fold constants
//! and merge powers of the same variable so that derived expressions stay
//! small and readable.
//!
//! Evaluation is defined on the open positive orthant. Domain violations
//! (logarithm of a nonpositive number, division by zero, a fractional power of
//! a negative base, overflow) are reported as [`EvalError`] instead of leaking
//! NaN into downstream sums.

mod compile;
mod diff;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

pub use compile::CompiledExpr;
pub use parse::{parse, ParseError};

/// Unary functions available in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Abs,
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "abs" => Some(Func::Abs),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    pub(crate) fn apply(self, x: f64) -> Result<f64, EvalError> {
        match self {
            Func::Abs => Ok(x.abs()),
            Func::Exp => finite(x.exp()),
            Func::Log => {
                if x <= 0.0 {
                    Err(EvalError::LogNonPositive { arg: x })
                } else {
                    Ok(x.ln())
                }
            }
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
        }
    }
}

/// Expression tree node.
///
/// Variables are 1-based (`Var(1)` is `x1`). Power exponents are real
/// literals; there is no general `f^g`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
}

/// Evaluation failure at a point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("logarithm of nonpositive argument {arg}")]
    LogNonPositive { arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("power {base}^{exponent} is undefined")]
    PowDomain { base: f64, exponent: f64 },
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("variable x{index} is not defined at a point of dimension {dim}")]
    MissingCoordinate { index: usize, dim: usize },
}

fn finite(x: f64) -> Result<f64, EvalError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(EvalError::NonFinite)
    }
}

pub(crate) fn checked_div(a: f64, b: f64) -> Result<f64, EvalError> {
    if b == 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    finite(a / b)
}

pub(crate) fn checked_pow(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::PowDomain { base, exponent });
    }
    let r = base.powf(exponent);
    if r.is_nan() {
        return Err(EvalError::PowDomain { base, exponent });
    }
    finite(r)
}

/// A point of the open positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

/// Rejected point coordinates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointError {
    #[error("point must have at least one coordinate")]
    Empty,
    #[error("coordinate x{index} = {value} is not strictly positive and finite")]
    NotPositive { index: usize, value: f64 },
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, PointError> {
        if coords.is_empty() {
            return Err(PointError::Empty);
        }
        for (i, &c) in coords.iter().enumerate() {
            if !(c > 0.0 && c.is_finite()) {
                return Err(PointError::NotPositive {
                    index: i + 1,
                    value: c,
                });
            }
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Coordinate `x_k` (1-based).
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 1]
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(k: usize) -> Expr {
        assert!(k >= 1, "variables are 1-based");
        Expr::Var(k)
    }

    pub fn is_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    /// Base variable and exponent if `self` is `x_k` or `x_k^a`.
    fn as_var_power(&self) -> Option<(usize, f64)> {
        match self {
            Expr::Var(k) => Some((*k, 1.0)),
            Expr::Pow(b, a) => match **b {
                Expr::Var(k) => Some((k, *a)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.is_const(), b.is_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.is_const(), b.is_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::Const(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            // scalars go left
            (a, Expr::Const(c)) => Expr::mul(Expr::Const(c), a),
            (Expr::Const(c), Expr::Mul(l, r)) => match *l {
                Expr::Const(d) => Expr::mul(Expr::Const(c * d), *r),
                l => Expr::Mul(Box::new(Expr::Const(c)), Box::new(Expr::Mul(Box::new(l), r))),
            },
            (Expr::Const(c), Expr::Neg(inner)) => Expr::mul(Expr::Const(-c), *inner),
            (Expr::Mul(l, r), b) if matches!(*l, Expr::Const(_)) => {
                let c = l.is_const().unwrap();
                Expr::mul(Expr::Const(c), Expr::mul(*r, b))
            }
            (a, Expr::Mul(l, r)) if matches!(*l, Expr::Const(_)) => {
                let c = l.is_const().unwrap();
                Expr::mul(Expr::Const(c), Expr::mul(a, *r))
            }
            (a, b) => {
                if let (Some((ka, ea)), Some((kb, eb))) = (a.as_var_power(), b.as_var_power()) {
                    if ka == kb {
                        return Expr::pow(Expr::Var(ka), ea + eb);
                    }
                }
                // x^a * (x^b * rest)
                if let (Some((ka, ea)), Expr::Mul(l, r)) = (a.as_var_power(), &b) {
                    if let Some((kb, eb)) = l.as_var_power() {
                        if ka == kb {
                            return Expr::mul(Expr::pow(Expr::Var(ka), ea + eb), (**r).clone());
                        }
                    }
                }
                Expr::Mul(Box::new(a), Box::new(b))
            }
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            return a;
        }
        match (a.is_const(), b.is_const()) {
            (Some(x), _) if x == 0.0 => Expr::Const(0.0),
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (_, Some(y)) if y != 0.0 && y.is_finite() => Expr::mul(Expr::Const(1.0 / y), a),
            _ => {
                if let (Some((ka, ea)), Some((kb, eb))) = (a.as_var_power(), b.as_var_power()) {
                    if ka == kb {
                        return Expr::pow(Expr::Var(ka), ea - eb);
                    }
                }
                Expr::Div(Box::new(a), Box::new(b))
            }
        }
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        if exponent == 0.0 {
            return Expr::Const(1.0);
        }
        if exponent == 1.0 {
            return base;
        }
        match base {
            Expr::Const(c) => {
                let v = c.powf(exponent);
                if v.is_finite() {
                    Expr::Const(v)
                } else {
                    Expr::Pow(Box::new(Expr::Const(c)), exponent)
                }
            }
            // variables are positive, so (x^a)^b = x^(ab)
            Expr::Pow(inner, a) if matches!(*inner, Expr::Var(_)) => Expr::pow(*inner, a * exponent),
            other => Expr::Pow(Box::new(other), exponent),
        }
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        match arg {
            Expr::Const(c) => match f.apply(c) {
                Ok(v) => Expr::Const(v),
                Err(_) => Expr::Func(f, Box::new(Expr::Const(c))),
            },
            other => Expr::Func(f, Box::new(other)),
        }
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::func(Func::Abs, a)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }

    pub fn log(a: Expr) -> Expr {
        Expr::func(Func::Log, a)
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::func(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::func(Func::Cos, a)
    }

    /// `|z|^(q-1) z`, the odd power used by p-Laplacian type fluxes.
    pub fn signed_pow(z: Expr, q: f64) -> Expr {
        Expr::mul(Expr::pow(Expr::abs(z.clone()), q - 1.0), z)
    }

    /// Sum of a sequence of expressions (`0` when empty).
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::Const(0.0), Expr::add)
    }

    /// Product of a sequence of expressions (`1` when empty).
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        factors.into_iter().fold(Expr::Const(1.0), Expr::mul)
    }

    /// Largest variable index that occurs, or 0 for a constant expression.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(k) => *k,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Func(_, a) => a.max_var(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Func(_, a) => 1 + a.node_count(),
        }
    }

    /// Replace every occurrence of `x_k` by `with`.
    pub fn substitute(&self, k: usize, with: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(j) if *j == k => with.clone(),
            Expr::Var(j) => Expr::Var(*j),
            Expr::Add(a, b) => Expr::add(a.substitute(k, with), b.substitute(k, with)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(k, with), b.substitute(k, with)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(k, with), b.substitute(k, with)),
            Expr::Div(a, b) => Expr::div(a.substitute(k, with), b.substitute(k, with)),
            Expr::Pow(a, e) => Expr::pow(a.substitute(k, with), *e),
            Expr::Neg(a) => Expr::neg(a.substitute(k, with)),
            Expr::Func(f, a) => Expr::func(*f, a.substitute(k, with)),
        }
    }

    /// Evaluate at a point of the positive orthant.
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        self.eval_at(p.coords())
    }

    /// Evaluate at raw coordinates without the positivity check on the point.
    pub fn eval_at(&self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(k) => x.get(k - 1).copied().ok_or(EvalError::MissingCoordinate {
                index: *k,
                dim: x.len(),
            }),
            Expr::Add(a, b) => finite(a.eval_at(x)? + b.eval_at(x)?),
            Expr::Sub(a, b) => finite(a.eval_at(x)? - b.eval_at(x)?),
            Expr::Mul(a, b) => finite(a.eval_at(x)? * b.eval_at(x)?),
            Expr::Div(a, b) => checked_div(a.eval_at(x)?, b.eval_at(x)?),
            Expr::Pow(a, e) => checked_pow(a.eval_at(x)?, *e),
            Expr::Neg(a) => Ok(-a.eval_at(x)?),
            Expr::Func(f, a) => f.apply(a.eval_at(x)?),
        }
    }

    /// Classical partial derivative with respect to `x_k`.
    pub fn diff(&self, k: usize) -> Expr {
        diff::diff(self, k)
    }

    pub fn compile(&self) -> CompiledExpr {
        CompiledExpr::new(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn eval_basic_examples() {
        let e = Expr::Pow(Box::new(Expr::Var(1)), 2.0);
        assert_eq!(e.eval(&pt(&[3.0])).unwrap(), 9.0);
        assert_eq!(Expr::Const(5.0).eval(&pt(&[0.1, 7.0])).unwrap(), 5.0);
        let prod = Expr::Mul(Box::new(Expr::Var(1)), Box::new(Expr::Var(2)));
        assert_eq!(prod.eval(&pt(&[2.0, 3.0])).unwrap(), 6.0);
    }

    #[test]
    fn domain_errors_are_reported() {
        let p = pt(&[1.0]);
        let log0 = Expr::Func(Func::Log, Box::new(Expr::Const(0.0)));
        assert!(matches!(log0.eval(&p), Err(EvalError::LogNonPositive { .. })));
        let inv = Expr::Div(
            Box::new(Expr::Const(1.0)),
            Box::new(Expr::Sub(Box::new(Expr::Var(1)), Box::new(Expr::Const(1.0)))),
        );
        assert_eq!(inv.eval(&p), Err(EvalError::DivisionByZero));
        let root_neg = Expr::Pow(Box::new(Expr::Const(-2.0)), 0.5);
        assert!(matches!(root_neg.eval(&p), Err(EvalError::PowDomain { .. })));
        let zero_neg = Expr::Pow(Box::new(Expr::Const(0.0)), -0.5);
        assert!(matches!(zero_neg.eval(&p), Err(EvalError::PowDomain { .. })));
        assert!(matches!(
            Expr::Var(2).eval(&p),
            Err(EvalError::MissingCoordinate { index: 2, dim: 1 })
        ));
    }

    #[test]
    fn points_must_be_positive() {
        assert!(Point::new(vec![1.0, 0.0]).is_err());
        assert!(Point::new(vec![-1.0]).is_err());
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn constructors_fold_and_merge() {
        let x = Expr::var(1);
        assert_eq!(Expr::mul(Expr::Const(2.0), Expr::Const(3.0)), Expr::Const(6.0));
        assert_eq!(Expr::mul(x.clone(), Expr::Const(0.0)), Expr::Const(0.0));
        assert_eq!(Expr::mul(x.clone(), x.clone()), Expr::pow(x.clone(), 2.0));
        assert_eq!(
            Expr::mul(Expr::pow(x.clone(), 0.5), Expr::mul(Expr::Const(2.0), x.clone())),
            Expr::mul(Expr::Const(2.0), Expr::pow(x.clone(), 1.5))
        );
        assert_eq!(Expr::pow(Expr::pow(x.clone(), 2.0), 0.5), x);
        assert_eq!(Expr::neg(Expr::neg(x.clone())), x);
        assert_eq!(Expr::div(x.clone(), x.clone()), Expr::Const(1.0));
    }

    #[test]
    fn substitute_composes() {
        let f = Expr::pow(Expr::var(1), 2.0);
        let v = Expr::add(Expr::var(1), Expr::var(2));
        let g = f.substitute(1, &v);
        assert_eq!(g.eval(&pt(&[1.0, 2.0])).unwrap(), 9.0);
    }
}
