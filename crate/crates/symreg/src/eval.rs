//! Stack-machine evaluation of postfix genomes.

use crate::expr::Expression;
use crate::token::{BinOp, Func, Token};
use serde::{Deserialize, Serialize};

/// Any intermediate above this magnitude counts as an overflow.
pub const OVERFLOW_LIMIT: f64 = 1e100;

/// Exponents within this distance of an integer are treated as integral, so
/// negative bases with exact integer powers succeed.
const INT_EXPONENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalFailure {
    DivByZero,
    DomainError,
    Overflow,
    NonFinite,
}

/// A finite value or a tagged failure; evaluation never panics.
pub type EvalOutcome = Result<f64, EvalFailure>;

fn check(v: f64) -> EvalOutcome {
    if v.is_nan() {
        Err(EvalFailure::NonFinite)
    } else if v.abs() > OVERFLOW_LIMIT {
        Err(EvalFailure::Overflow)
    } else {
        Ok(v)
    }
}

fn apply_func(f: Func, a: f64) -> EvalOutcome {
    match f {
        Func::Sin => check(a.sin()),
        Func::Cos => check(a.cos()),
        Func::Exp => check(a.exp()),
        Func::Ln => {
            if a <= 0.0 {
                Err(EvalFailure::DomainError)
            } else {
                check(a.ln())
            }
        }
    }
}

fn apply_op(op: BinOp, a: f64, b: f64) -> EvalOutcome {
    match op {
        BinOp::Add => check(a + b),
        BinOp::Sub => check(a - b),
        BinOp::Mul => check(a * b),
        BinOp::Div => {
            if b == 0.0 {
                Err(EvalFailure::DivByZero)
            } else {
                check(a / b)
            }
        }
        BinOp::Pow => {
            if a < 0.0 {
                let rounded = b.round();
                if (b - rounded).abs() > INT_EXPONENT_TOL {
                    return Err(EvalFailure::DomainError);
                }
                check(a.powf(rounded))
            } else if a == 0.0 && b < 0.0 {
                Err(EvalFailure::DivByZero)
            } else {
                check(a.powf(b))
            }
        }
    }
}

/// Evaluate at one point. `vars` holds the assignment by dimension index;
/// `scalars` has one entry per distinct free-scalar index.
pub fn evaluate(expr: &Expression, vars: &[f64], scalars: &[f64]) -> EvalOutcome {
    let mut stack: Vec<f64> = Vec::with_capacity(expr.len() / 2 + 1);
    for tok in expr.tokens() {
        match tok {
            Token::Var(v) => {
                let val = *vars.get(v.index()).ok_or(EvalFailure::DomainError)?;
                stack.push(check(val)?);
            }
            Token::Int(n) => stack.push(*n as f64),
            Token::Free(i) => {
                let val = *scalars.get(*i).ok_or(EvalFailure::DomainError)?;
                stack.push(check(val)?);
            }
            Token::Func(f) => {
                let a = stack.pop().expect("valid postfix");
                stack.push(apply_func(*f, a)?);
            }
            Token::Op(op) => {
                let b = stack.pop().expect("valid postfix");
                let a = stack.pop().expect("valid postfix");
                stack.push(apply_op(*op, a, b)?);
            }
            Token::Zero | Token::Infinity => {
                unreachable!("Expression construction rejects simplifier intermediates")
            }
        }
    }
    Ok(stack.pop().expect("valid postfix"))
}
