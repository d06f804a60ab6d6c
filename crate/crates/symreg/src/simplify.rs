//! Hard-coded on-the-fly simplification rules and skeleton conversion.
//!
//! The rule set is deliberately shallow: constant folding of integer-scalar
//! subtrees, identities with 0 and 1, `x-x`, `x/x`, `exp(ln(u))`/`ln(exp(u))`,
//! and infinity propagation. There is no expand-refactor engine.

use crate::eval::OVERFLOW_LIMIT;
use crate::expr::{Expression, ScalarMode};
use crate::token::{BinOp, Func, Token};
use crate::tree::{tokens_to_tree, Tree};

/// Result of `simplify`: a pointwise-equal expression no longer than the
/// input, or a degenerate genome the caller must discard.
#[derive(Debug, Clone, PartialEq)]
pub enum Simplified {
    Expr(Expression),
    /// Contains infinity, reduced to a variable-free constant, or got stuck
    /// on an unabsorbable zero. Discard prior to evaluation.
    Degenerate,
}

fn is_const_int(t: &Tree) -> bool {
    match t {
        Tree::Leaf(Token::Int(_)) => true,
        Tree::Leaf(_) => false,
        Tree::Unary(_, c) => is_const_int(c),
        Tree::Binary(_, l, r) => is_const_int(l) && is_const_int(r),
    }
}

fn eval_const(t: &Tree) -> Option<f64> {
    match t {
        Tree::Leaf(Token::Int(n)) => Some(*n as f64),
        Tree::Leaf(_) => None,
        Tree::Unary(f, c) => {
            let a = eval_const(c)?;
            let v = match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= 0.0 {
                        return Some(f64::INFINITY);
                    }
                    a.ln()
                }
            };
            Some(v)
        }
        Tree::Binary(op, l, r) => {
            let a = eval_const(l)?;
            let b = eval_const(r)?;
            let v = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Some(f64::INFINITY);
                    }
                    a / b
                }
                BinOp::Pow => a.powf(b),
            };
            Some(v)
        }
    }
}

const FOLD_TOL: f64 = 1e-12;

fn is_inf(t: &Tree) -> bool {
    matches!(t, Tree::Leaf(Token::Infinity))
}

fn is_zero(t: &Tree) -> bool {
    matches!(t, Tree::Leaf(Token::Zero))
}

fn is_one(t: &Tree) -> bool {
    matches!(t, Tree::Leaf(Token::Int(1)))
}

/// One bottom-up rewrite pass; children are simplified before node rules.
fn pass(t: &Tree) -> Tree {
    let node = match t {
        Tree::Leaf(tok) => Tree::Leaf(*tok),
        Tree::Unary(f, c) => Tree::unary(*f, pass(c)),
        Tree::Binary(op, l, r) => Tree::binary(*op, pass(l), pass(r)),
    };

    // Infinity propagates through every operation.
    match &node {
        Tree::Unary(_, c) if is_inf(c) => return Tree::leaf(Token::Infinity),
        Tree::Binary(_, l, r) if is_inf(l) || is_inf(r) => {
            return Tree::leaf(Token::Infinity)
        }
        _ => {}
    }

    // Constant folding of integer-only subtrees, kept when representable.
    if node.size() > 1 && is_const_int(&node) {
        if let Some(v) = eval_const(&node) {
            if !v.is_finite() || v.abs() > OVERFLOW_LIMIT {
                return Tree::leaf(Token::Infinity);
            }
            if v.abs() <= FOLD_TOL {
                return Tree::leaf(Token::Zero);
            }
            if (v - 1.0).abs() <= FOLD_TOL {
                return Tree::leaf(Token::Int(1));
            }
            if (v - 2.0).abs() <= FOLD_TOL {
                return Tree::leaf(Token::Int(2));
            }
        }
    }

    match &node {
        Tree::Unary(f, c) => match (f, c.as_ref()) {
            (Func::Exp, Tree::Unary(Func::Ln, u)) => (**u).clone(),
            (Func::Ln, Tree::Unary(Func::Exp, u)) => (**u).clone(),
            (Func::Sin, z) if is_zero(z) => Tree::leaf(Token::Zero),
            (Func::Cos, z) if is_zero(z) => Tree::leaf(Token::Int(1)),
            (Func::Exp, z) if is_zero(z) => Tree::leaf(Token::Int(1)),
            (Func::Ln, z) if is_zero(z) => Tree::leaf(Token::Infinity),
            _ => node.clone(),
        },
        Tree::Binary(op, l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            match op {
                BinOp::Add => {
                    if is_zero(l) {
                        return r.clone();
                    }
                    if is_zero(r) {
                        return l.clone();
                    }
                    node.clone()
                }
                BinOp::Sub => {
                    if is_zero(r) {
                        return l.clone();
                    }
                    if l == r {
                        return Tree::leaf(Token::Zero);
                    }
                    node.clone()
                }
                BinOp::Mul => {
                    if is_zero(l) || is_zero(r) {
                        return Tree::leaf(Token::Zero);
                    }
                    if is_one(l) {
                        return r.clone();
                    }
                    if is_one(r) {
                        return l.clone();
                    }
                    node.clone()
                }
                BinOp::Div => {
                    if is_zero(r) {
                        return Tree::leaf(Token::Infinity);
                    }
                    if l == r {
                        return Tree::leaf(Token::Int(1));
                    }
                    if is_zero(l) {
                        return Tree::leaf(Token::Zero);
                    }
                    if is_one(r) {
                        return l.clone();
                    }
                    node.clone()
                }
                BinOp::Pow => {
                    if is_zero(r) {
                        return Tree::leaf(Token::Int(1));
                    }
                    if is_zero(l) {
                        return Tree::leaf(Token::Zero);
                    }
                    if is_one(r) {
                        return l.clone();
                    }
                    if is_one(l) {
                        return Tree::leaf(Token::Int(1));
                    }
                    node.clone()
                }
            }
        }
        _ => node.clone(),
    }
}

fn fixpoint(mut t: Tree) -> Tree {
    // Every rule shrinks or preserves size, so size+1 passes suffice.
    for _ in 0..=t.size() {
        let next = pass(&t);
        if next == t {
            break;
        }
        t = next;
    }
    t
}

/// Apply the rule set bottom-up until fixpoint.
pub fn simplify(expr: &Expression) -> Simplified {
    let t = fixpoint(tokens_to_tree(expr));
    if t.contains(&|tok| matches!(tok, Token::Infinity | Token::Zero))
        || !t.contains(&|tok| tok.is_variable())
    {
        return Simplified::Degenerate;
    }
    Simplified::Expr(Expression::from_valid(t.to_postfix(), expr.mode()))
}

fn is_free(t: &Tree) -> bool {
    matches!(t, Tree::Leaf(Token::Free(_)))
}

/// One bottom-up scalar-absorption pass.
fn skeleton_pass(t: &Tree) -> Tree {
    let node = match t {
        Tree::Leaf(Token::Int(_)) => Tree::leaf(Token::Free(usize::MAX)),
        Tree::Leaf(tok) => Tree::Leaf(*tok),
        Tree::Unary(f, c) => Tree::unary(*f, skeleton_pass(c)),
        Tree::Binary(op, l, r) => Tree::binary(*op, skeleton_pass(l), skeleton_pass(r)),
    };
    match &node {
        // f(A) -> A
        Tree::Unary(_, c) if is_free(c) => (**c).clone(),
        Tree::Binary(op, l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            // A o A -> A for any operator
            if is_free(l) && is_free(r) {
                return l.clone();
            }
            // A * (u +/- A) and commuted forms distribute so the scalars merge
            // further up: A*(u+A) -> A*u + A.
            if *op == BinOp::Mul {
                let (scalar, other) = if is_free(l) {
                    (Some(l), r)
                } else if is_free(r) {
                    (Some(r), l)
                } else {
                    (None, l)
                };
                if let Some(a) = scalar {
                    if let Tree::Binary(inner @ (BinOp::Add | BinOp::Sub), il, ir) = other {
                        if is_free(ir.as_ref()) {
                            return Tree::binary(
                                *inner,
                                Tree::binary(BinOp::Mul, a.clone(), (**il).clone()),
                                (**ir).clone(),
                            );
                        }
                        if is_free(il.as_ref()) && *inner == BinOp::Add {
                            return Tree::binary(
                                BinOp::Add,
                                Tree::binary(BinOp::Mul, a.clone(), (**ir).clone()),
                                (**il).clone(),
                            );
                        }
                    }
                }
            }
            node.clone()
        }
        _ => node.clone(),
    }
}

/// Convert integer scalars to free scalars and merge algebraically redundant
/// ones; indices are renumbered consecutively in first-occurrence order.
pub fn to_skeleton(expr: &Expression) -> Expression {
    let mut t = tokens_to_tree(expr);
    for _ in 0..=t.size() {
        let next = skeleton_pass(&t);
        if next == t {
            break;
        }
        t = next;
    }
    // All merged placeholders share one sentinel index; assign fresh distinct
    // indices in postfix order (renumbered() would collapse them into one).
    let mut tokens = t.to_postfix();
    let mut next = 0;
    for tok in tokens.iter_mut() {
        if matches!(tok, Token::Free(_)) {
            *tok = Token::Free(next);
            next += 1;
        }
    }
    Expression::from_valid(tokens, ScalarMode::FreeScalars)
}

fn key_of(t: &Tree, out: &mut String) {
    match t {
        Tree::Leaf(Token::Free(_)) => out.push('A'),
        Tree::Leaf(tok) => out.push_str(&tok.text()),
        Tree::Unary(f, c) => {
            out.push('(');
            out.push_str(f.name());
            out.push(' ');
            key_of(c, out);
            out.push(')');
        }
        Tree::Binary(op, l, r) => {
            let mut lk = String::new();
            let mut rk = String::new();
            key_of(l, &mut lk);
            key_of(r, &mut rk);
            if op.is_commutative() && rk < lk {
                std::mem::swap(&mut lk, &mut rk);
            }
            out.push('(');
            out.push_str(op.name());
            out.push(' ');
            out.push_str(&lk);
            out.push(' ');
            out.push_str(&rk);
            out.push(')');
        }
    }
}

/// Deduplication key: invariant under free-scalar renaming and under
/// commutative argument ordering of `+` and `*`.
pub fn canonical_key(expr: &Expression) -> String {
    let mut out = String::new();
    key_of(&tokens_to_tree(expr), &mut out);
    out
}
