//! AST form of expressions, used by the simplifier and genetic operators.

use crate::expr::{ExprError, Expression, ScalarMode};
use crate::token::{BinOp, Func, Token};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf(Token),
    Unary(Func, Box<Tree>),
    Binary(BinOp, Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn leaf(tok: Token) -> Tree {
        debug_assert_eq!(tok.arity(), 0);
        Tree::Leaf(tok)
    }

    pub fn unary(f: Func, child: Tree) -> Tree {
        Tree::Unary(f, Box::new(child))
    }

    pub fn binary(op: BinOp, left: Tree, right: Tree) -> Tree {
        Tree::Binary(op, Box::new(left), Box::new(right))
    }

    /// Node count == postfix token count.
    pub fn size(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Unary(_, c) => 1 + c.size(),
            Tree::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Maximum function count along any root-to-leaf path.
    pub fn nesting_depth(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Unary(_, c) => 1 + c.nesting_depth(),
            Tree::Binary(_, l, r) => l.nesting_depth().max(r.nesting_depth()),
        }
    }

    pub fn contains(&self, pred: &dyn Fn(&Token) -> bool) -> bool {
        match self {
            Tree::Leaf(t) => pred(t),
            Tree::Unary(_, c) => c.contains(pred),
            Tree::Binary(_, l, r) => l.contains(pred) || r.contains(pred),
        }
    }

    fn push_postfix(&self, out: &mut Vec<Token>) {
        match self {
            Tree::Leaf(t) => out.push(*t),
            Tree::Unary(f, c) => {
                c.push_postfix(out);
                out.push(Token::Func(*f));
            }
            Tree::Binary(op, l, r) => {
                l.push_postfix(out);
                r.push_postfix(out);
                out.push(Token::Op(*op));
            }
        }
    }

    pub fn to_postfix(&self) -> Vec<Token> {
        let mut out = Vec::with_capacity(self.size());
        self.push_postfix(&mut out);
        out
    }

    /// Immutable reference to the node at `index` in postfix order.
    pub fn node_at(&self, index: usize) -> Option<&Tree> {
        fn walk<'a>(t: &'a Tree, index: usize, next: &mut usize) -> Option<&'a Tree> {
            match t {
                Tree::Leaf(_) => {}
                Tree::Unary(_, c) => {
                    if let Some(hit) = walk(c, index, next) {
                        return Some(hit);
                    }
                }
                Tree::Binary(_, l, r) => {
                    if let Some(hit) = walk(l, index, next) {
                        return Some(hit);
                    }
                    if let Some(hit) = walk(r, index, next) {
                        return Some(hit);
                    }
                }
            }
            let my = *next;
            *next += 1;
            if my == index {
                Some(t)
            } else {
                None
            }
        }
        let mut next = 0;
        walk(self, index, &mut next)
    }

    /// Replace the node at postfix index `index` by `subtree`.
    pub fn with_replaced(&self, index: usize, subtree: &Tree) -> Tree {
        fn walk(t: &Tree, index: usize, next: &mut usize, sub: &Tree) -> Tree {
            let rebuilt = match t {
                Tree::Leaf(tok) => Tree::Leaf(*tok),
                Tree::Unary(f, c) => {
                    let c2 = walk(c, index, next, sub);
                    Tree::unary(*f, c2)
                }
                Tree::Binary(op, l, r) => {
                    let l2 = walk(l, index, next, sub);
                    let r2 = walk(r, index, next, sub);
                    Tree::binary(*op, l2, r2)
                }
            };
            let my = *next;
            *next += 1;
            if my == index {
                sub.clone()
            } else {
                rebuilt
            }
        }
        let mut next = 0;
        walk(self, index, &mut next, subtree)
    }
}

/// Parse a postfix expression into its unique AST.
pub fn tokens_to_tree(expr: &Expression) -> Tree {
    tokens_slice_to_tree(expr.tokens()).expect("Expression invariant guarantees valid postfix")
}

/// Parse a raw postfix token slice; fails on a stack-invariant violation.
pub fn tokens_slice_to_tree(tokens: &[Token]) -> Result<Tree, ExprError> {
    let mut stack: Vec<Tree> = Vec::new();
    for tok in tokens {
        match tok {
            Token::Func(f) => {
                let c = stack.pop().ok_or(ExprError::MalformedPostfix)?;
                stack.push(Tree::unary(*f, c));
            }
            Token::Op(op) => {
                let r = stack.pop().ok_or(ExprError::MalformedPostfix)?;
                let l = stack.pop().ok_or(ExprError::MalformedPostfix)?;
                stack.push(Tree::binary(*op, l, r));
            }
            leaf => stack.push(Tree::leaf(*leaf)),
        }
    }
    if stack.len() == 1 {
        Ok(stack.pop().unwrap())
    } else {
        Err(ExprError::MalformedPostfix)
    }
}

/// Postfix traversal of a tree back into an Expression.
pub fn tree_to_tokens(tree: &Tree, mode: ScalarMode) -> Result<Expression, ExprError> {
    Expression::new(tree.to_postfix(), mode)
}

/// Fully parenthesized infix rendering. With `scalars` supplied, free-scalar
/// tokens become decimal literals with six or more significant digits.
pub fn render_infix(expr: &Expression, scalars: Option<&[f64]>) -> String {
    fn walk(t: &Tree, scalars: Option<&[f64]>, out: &mut String) {
        match t {
            Tree::Leaf(tok) => match (tok, scalars) {
                (Token::Free(i), Some(vals)) if *i < vals.len() => {
                    out.push_str(&format!("{:.6}", vals[*i]))
                }
                _ => out.push_str(&tok.text()),
            },
            Tree::Unary(f, c) => {
                out.push_str(f.name());
                out.push('(');
                walk(c, scalars, out);
                out.push(')');
            }
            Tree::Binary(op, l, r) => {
                out.push('(');
                walk(l, scalars, out);
                out.push_str(op.name());
                walk(r, scalars, out);
                out.push(')');
            }
        }
    }
    let tree = tokens_to_tree(expr);
    if let Tree::Leaf(tok) = &tree {
        return match (tok, scalars) {
            (Token::Free(i), Some(vals)) if *i < vals.len() => format!("{:.6}", vals[*i]),
            _ => tok.text(),
        };
    }
    let mut out = String::new();
    walk(&tree, scalars, &mut out);
    out
}
