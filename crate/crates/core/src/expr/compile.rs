use super::{checked_div, checked_pow, finite, EvalError, Expr, Func};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var(usize),
    Add,
    Sub,
    Mul,
    Div,
    Pow(f64),
    Neg,
    Func(Func),
}

/// Postfix form of an [`Expr`] for repeated evaluation inside quadrature
/// loops. Produces exactly the same values and errors as [`Expr::eval_at`].
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    max_depth: usize,
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> Self {
        let mut ops = Vec::with_capacity(e.node_count());
        emit(e, &mut ops);
        let mut depth = 0usize;
        let mut max_depth = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Var(_) => depth += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div => depth -= 1,
                Op::Pow(_) | Op::Neg | Op::Func(_) => {}
            }
            max_depth = max_depth.max(depth);
        }
        CompiledExpr { ops, max_depth }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let mut stack = Vec::with_capacity(self.max_depth);
        self.eval_with(x, &mut stack)
    }

    /// Evaluate reusing `stack` as scratch space.
    pub fn eval_with(&self, x: &[f64], stack: &mut Vec<f64>) -> Result<f64, EvalError> {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Var(k) => stack.push(*x.get(k - 1).ok_or(EvalError::MissingCoordinate {
                    index: k,
                    dim: x.len(),
                })?),
                Op::Neg => {
                    let a = stack.last_mut().unwrap();
                    *a = -*a;
                }
                Op::Pow(p) => {
                    let a = stack.last_mut().unwrap();
                    *a = checked_pow(*a, p)?;
                }
                Op::Func(f) => {
                    let a = stack.last_mut().unwrap();
                    *a = f.apply(*a)?;
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div => {
                    let b = stack.pop().unwrap();
                    let a = stack.last_mut().unwrap();
                    *a = match *op {
                        Op::Add => finite(*a + b)?,
                        Op::Sub => finite(*a - b)?,
                        Op::Mul => finite(*a * b)?,
                        _ => checked_div(*a, b)?,
                    };
                }
            }
        }
        Ok(stack[0])
    }
}

fn emit(e: &Expr, ops: &mut Vec<Op>) {
    match e {
        Expr::Const(c) => ops.push(Op::Const(*c)),
        Expr::Var(k) => ops.push(Op::Var(*k)),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            emit(a, ops);
            emit(b, ops);
            ops.push(match e {
                Expr::Add(..) => Op::Add,
                Expr::Sub(..) => Op::Sub,
                Expr::Mul(..) => Op::Mul,
                _ => Op::Div,
            });
        }
        Expr::Pow(a, p) => {
            emit(a, ops);
            ops.push(Op::Pow(*p));
        }
        Expr::Neg(a) => {
            emit(a, ops);
            ops.push(Op::Neg);
        }
        Expr::Func(f, a) => {
            emit(a, ops);
            ops.push(Op::Func(*f));
        }
    }
}
