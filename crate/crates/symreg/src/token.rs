//! Primitive set: the token vocabulary expressions are built from.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Input variable. At most three dimensions are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    /// Dimension index (x -> 0, y -> 1, z -> 2).
    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }
}

/// Non-algebraic unary function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub const ALL: [Func; 4] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }
}

/// Binary operator. `Pow` is real exponentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub const ALL: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow];

    pub fn name(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Mul)
    }
}

/// One symbol of the primitive set.
///
/// `Zero` and `Infinity` are simplifier intermediates only; they never appear
/// in genomes submitted to fitness (an `Infinity` forces discard).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Token {
    Var(Var),
    Func(Func),
    Op(BinOp),
    /// Integer scalar, restricted to 1 and 2.
    Int(u8),
    /// Free scalar placeholder `A{index}`, fitted downstream.
    Free(usize),
    Zero,
    Infinity,
}

impl Token {
    /// Arity is a total function of the token kind.
    pub fn arity(self) -> usize {
        match self {
            Token::Func(_) => 1,
            Token::Op(_) => 2,
            _ => 0,
        }
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, Token::Int(_) | Token::Free(_))
    }

    pub fn is_variable(self) -> bool {
        matches!(self, Token::Var(_))
    }

    /// Token name as used in the canonical postfix text form.
    pub fn text(self) -> String {
        match self {
            Token::Var(v) => v.name().to_string(),
            Token::Func(f) => f.name().to_string(),
            Token::Op(o) => o.name().to_string(),
            Token::Int(n) => n.to_string(),
            Token::Free(i) => format!("A{i}"),
            Token::Zero => "0".to_string(),
            Token::Infinity => "inf".to_string(),
        }
    }

    /// Parse one token of the canonical text form.
    pub fn parse(s: &str) -> Option<Token> {
        Some(match s {
            "x" => Token::Var(Var::X),
            "y" => Token::Var(Var::Y),
            "z" => Token::Var(Var::Z),
            "sin" => Token::Func(Func::Sin),
            "cos" => Token::Func(Func::Cos),
            "exp" => Token::Func(Func::Exp),
            "ln" => Token::Func(Func::Ln),
            "+" => Token::Op(BinOp::Add),
            "-" => Token::Op(BinOp::Sub),
            "*" => Token::Op(BinOp::Mul),
            "/" => Token::Op(BinOp::Div),
            "^" => Token::Op(BinOp::Pow),
            "1" => Token::Int(1),
            "2" => Token::Int(2),
            "0" => Token::Zero,
            "inf" => Token::Infinity,
            _ => {
                let idx = s.strip_prefix('A')?.parse().ok()?;
                Token::Free(idx)
            }
        })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
