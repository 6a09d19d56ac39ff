use std::fmt;

use super::Expr;

// Binding strength of the production an expression prints as.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const FACTOR: u8 = 3;
const ATOM: u8 = 4;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) | Expr::Pow(..) => FACTOR,
        Expr::Const(c) if c.is_sign_negative() => FACTOR,
        Expr::Const(_) | Expr::Var(_) | Expr::Func(..) => ATOM,
    }
}

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_at(e, SUM, f)
}

fn write_at(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(e) < min {
        f.write_str("(")?;
        write_bare(e, f)?;
        f.write_str(")")
    } else {
        write_bare(e, f)
    }
}

fn write_bare(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Var(k) => write!(f, "x{k}"),
        Expr::Add(a, b) => {
            write_at(a, SUM, f)?;
            f.write_str(" + ")?;
            write_at(b, PRODUCT, f)
        }
        Expr::Sub(a, b) => {
            write_at(a, SUM, f)?;
            f.write_str(" - ")?;
            write_at(b, PRODUCT, f)
        }
        Expr::Mul(a, b) => {
            write_at(a, PRODUCT, f)?;
            f.write_str("*")?;
            write_at(b, FACTOR, f)
        }
        Expr::Div(a, b) => {
            write_at(a, PRODUCT, f)?;
            f.write_str("/")?;
            write_at(b, FACTOR, f)
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            match **a {
                // "-2" would read back as a negative literal
                Expr::Const(c) if !c.is_sign_negative() => write!(f, "({c})"),
                _ => write_at(a, FACTOR, f),
            }
        }
        Expr::Pow(b, p) => {
            write_at(b, ATOM, f)?;
            write!(f, "^{p}")
        }
        Expr::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_at(a, SUM, f)?;
            f.write_str(")")
        }
    }
}
