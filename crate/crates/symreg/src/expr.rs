//! Postfix expression genomes and their structural invariants.

use crate::token::{BinOp, Func, Token, Var};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Whether scalars in a genome are drawn from the integer set {1, 2} or are
/// free placeholders `A_i` fitted by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarMode {
    IntegerScalars,
    FreeScalars,
}

/// Behavior coordinates used to index the MAP-Elites grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    /// Token count excluding the halt terminator.
    pub length: usize,
    /// Scalar token occurrences (integer or free).
    pub n_scalars: usize,
    /// Non-algebraic function token occurrences.
    pub n_functions: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("malformed postfix sequence")]
    MalformedPostfix,
    #[error("empty expression")]
    Empty,
    #[error("token {0} is a simplifier intermediate, not a genome symbol")]
    ForbiddenToken(String),
    #[error("scalar token inconsistent with {0:?} mode")]
    ModeMismatch(ScalarMode),
}

/// A candidate equation: a valid postfix token program.
///
/// Tokens are stored without the trailing halt symbol; the canonical text
/// form appends it (`"x y + x * halt"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expression {
    tokens: Vec<Token>,
    mode: ScalarMode,
}

/// Running-stack check: depth never drops below the arity requirement and
/// ends at exactly one.
fn valid_postfix(tokens: &[Token]) -> bool {
    let mut depth: usize = 0;
    for tok in tokens {
        let arity = tok.arity();
        if depth < arity {
            return false;
        }
        depth = depth - arity + 1;
    }
    depth == 1
}

impl Expression {
    pub fn new(tokens: Vec<Token>, mode: ScalarMode) -> Result<Self, ExprError> {
        if tokens.is_empty() {
            return Err(ExprError::Empty);
        }
        for tok in &tokens {
            match tok {
                Token::Zero | Token::Infinity => {
                    return Err(ExprError::ForbiddenToken(tok.text()))
                }
                Token::Free(_) if mode == ScalarMode::IntegerScalars => {
                    return Err(ExprError::ModeMismatch(mode))
                }
                _ => {}
            }
        }
        if !valid_postfix(&tokens) {
            return Err(ExprError::MalformedPostfix);
        }
        Ok(Expression { tokens, mode })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    /// Token count excluding the halt terminator.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains_variable(&self) -> bool {
        self.tokens.iter().any(|t| t.is_variable())
    }

    /// Number of distinct free scalars (assumes consecutive indexing).
    pub fn n_free_scalars(&self) -> usize {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Token::Free(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Grid features: length, scalar count, function count.
    pub fn describe(&self) -> FeatureDescriptor {
        FeatureDescriptor {
            length: self.tokens.len(),
            n_scalars: self.tokens.iter().filter(|t| t.is_scalar()).count(),
            n_functions: self
                .tokens
                .iter()
                .filter(|t| matches!(t, Token::Func(_)))
                .count(),
        }
    }

    /// Maximum number of function tokens along any root-to-leaf path.
    ///
    /// `K = 0` forbids functions entirely; `K = 1` allows single functions but
    /// no nesting such as `sin(cos(x))`.
    pub fn nesting_depth(&self) -> usize {
        let mut stack: Vec<usize> = Vec::new();
        for tok in &self.tokens {
            match tok {
                Token::Func(_) => {
                    let d = stack.pop().expect("valid postfix");
                    stack.push(d + 1);
                }
                Token::Op(_) => {
                    let r = stack.pop().expect("valid postfix");
                    let l = stack.pop().expect("valid postfix");
                    stack.push(l.max(r));
                }
                _ => stack.push(0),
            }
        }
        stack.pop().unwrap_or(0)
    }

    /// Re-index free scalars consecutively in first-occurrence order.
    pub fn renumbered(&self) -> Expression {
        let mut map: Vec<usize> = Vec::new();
        let tokens = self
            .tokens
            .iter()
            .map(|t| match t {
                Token::Free(i) => {
                    let new = match map.iter().position(|old| old == i) {
                        Some(p) => p,
                        None => {
                            map.push(*i);
                            map.len() - 1
                        }
                    };
                    Token::Free(new)
                }
                other => *other,
            })
            .collect();
        Expression {
            tokens,
            mode: self.mode,
        }
    }

    /// Construct from already-validated tokens. Panics on invalid input; for
    /// internal producers that maintain the invariant by construction.
    pub(crate) fn from_valid(tokens: Vec<Token>, mode: ScalarMode) -> Expression {
        debug_assert!(valid_postfix(&tokens));
        Expression { tokens, mode }
    }
}

impl fmt::Display for Expression {
    /// Canonical text serialization: whitespace-separated postfix token names
    /// followed by `halt`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for tok in &self.tokens {
            write!(f, "{} ", tok)?;
        }
        f.write_str("halt")
    }
}

impl FromStr for Expression {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = Vec::new();
        let mut halted = false;
        for word in s.split_whitespace() {
            if halted {
                return Err(ExprError::MalformedPostfix);
            }
            if word == "halt" {
                halted = true;
                continue;
            }
            let tok = Token::parse(word).ok_or(ExprError::MalformedPostfix)?;
            tokens.push(tok);
        }
        let mode = if tokens.iter().any(|t| matches!(t, Token::Free(_))) {
            ScalarMode::FreeScalars
        } else {
            ScalarMode::IntegerScalars
        };
        Expression::new(tokens, mode)
    }
}

/// Constraints for random genome generation.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_len: usize,
    pub max_nested: usize,
    /// Problem dimensionality, 1 to 3.
    pub n_vars: usize,
    pub mode: ScalarMode,
}

fn random_leaf<R: Rng + ?Sized>(cfg: &GenConfig, next_free: &mut usize, rng: &mut R) -> Token {
    // Favor variables over scalars.
    if rng.random::<f64>() < 0.6 {
        Token::Var(Var::ALL[rng.random_range(0..cfg.n_vars)])
    } else {
        match cfg.mode {
            ScalarMode::IntegerScalars => Token::Int(rng.random_range(1..=2)),
            ScalarMode::FreeScalars => {
                let t = Token::Free(*next_free);
                *next_free += 1;
                t
            }
        }
    }
}

/// Grow-style generation: emits a postfix program of at most `budget` tokens.
fn grow<R: Rng + ?Sized>(
    cfg: &GenConfig,
    budget: usize,
    nested_left: usize,
    next_free: &mut usize,
    out: &mut Vec<Token>,
    rng: &mut R,
) {
    debug_assert!(budget >= 1);
    let can_unary = budget >= 2 && nested_left >= 1;
    let can_binary = budget >= 3;
    // Halt probability rises as the budget shrinks.
    let p_leaf = if !can_unary && !can_binary {
        1.0
    } else {
        (0.25 + 1.0 / budget as f64).min(1.0)
    };
    let r: f64 = rng.random();
    if r < p_leaf {
        out.push(random_leaf(cfg, next_free, rng));
    } else if can_binary && (!can_unary || rng.random::<f64>() < 0.75) {
        let inner = budget - 1;
        let left = rng.random_range(1..inner);
        grow(cfg, left, nested_left, next_free, out, rng);
        grow(cfg, inner - left, nested_left, next_free, out, rng);
        out.push(Token::Op(BinOp::ALL[rng.random_range(0..BinOp::ALL.len())]));
    } else {
        grow(cfg, budget - 1, nested_left - 1, next_free, out, rng);
        out.push(Token::Func(Func::ALL[rng.random_range(0..Func::ALL.len())]));
    }
}

/// Draw a random valid expression containing at least one variable.
pub fn random_expression<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Expression {
    assert!(cfg.max_len >= 1);
    assert!((1..=3).contains(&cfg.n_vars));
    const MAX_TRIES: usize = 100;
    for _ in 0..MAX_TRIES {
        let mut tokens = Vec::new();
        let mut next_free = 0;
        grow(cfg, cfg.max_len, cfg.max_nested, &mut next_free, &mut tokens, rng);
        if tokens.iter().any(|t| t.is_variable()) {
            let expr = Expression::from_valid(tokens, cfg.mode);
            debug_assert!(expr.nesting_depth() <= cfg.max_nested);
            return expr.renumbered();
        }
    }
    // Bounded retries exhausted: fall back to a single-variable leaf.
    Expression::from_valid(vec![Token::Var(Var::X)], cfg.mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(s: &str) -> Expression {
        s.parse().unwrap()
    }

    #[test]
    fn postfix_validity() {
        assert!(Expression::new(
            vec![Token::Var(Var::X), Token::Var(Var::Y), Token::Op(BinOp::Add)],
            ScalarMode::IntegerScalars
        )
        .is_ok());
        assert_eq!(
            Expression::new(
                vec![Token::Var(Var::X), Token::Op(BinOp::Add)],
                ScalarMode::IntegerScalars
            ),
            Err(ExprError::MalformedPostfix)
        );
        assert_eq!(
            Expression::new(
                vec![Token::Var(Var::X), Token::Var(Var::Y)],
                ScalarMode::IntegerScalars
            ),
            Err(ExprError::MalformedPostfix)
        );
        assert_eq!(
            Expression::new(vec![], ScalarMode::IntegerScalars),
            Err(ExprError::Empty)
        );
        assert_eq!(
            Expression::new(vec![Token::Zero], ScalarMode::IntegerScalars),
            Err(ExprError::ForbiddenToken("0".into()))
        );
    }

    #[test]
    fn describe_counts() {
        assert_eq!(
            parse("x y + x * halt").describe(),
            FeatureDescriptor {
                length: 5,
                n_scalars: 0,
                n_functions: 0
            }
        );
        // A0 * sin(A1 * x) in postfix: A0 A1 x * sin *
        assert_eq!(
            parse("A0 A1 x * sin * halt").describe(),
            FeatureDescriptor {
                length: 6,
                n_scalars: 2,
                n_functions: 1
            }
        );
        assert_eq!(
            parse("2 halt").describe(),
            FeatureDescriptor {
                length: 1,
                n_scalars: 1,
                n_functions: 0
            }
        );
    }

    #[test]
    fn describe_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = GenConfig {
            max_len: 15,
            max_nested: 2,
            n_vars: 3,
            mode: ScalarMode::IntegerScalars,
        };
        for _ in 0..2000 {
            let e = random_expression(&cfg, &mut rng);
            let d = e.describe();
            let vars = e.tokens().iter().filter(|t| t.is_variable()).count();
            let ops = e
                .tokens()
                .iter()
                .filter(|t| matches!(t, Token::Op(_)))
                .count();
            assert_eq!(d.n_scalars + d.n_functions + vars + ops, d.length);
            // Binary trees: leaves = internal binary nodes + 1.
            assert!(d.n_scalars + vars == ops + 1);
        }
    }

    #[test]
    fn nesting_depth_counts_functions_per_path() {
        assert_eq!(parse("x halt").nesting_depth(), 0);
        assert_eq!(parse("x sin halt").nesting_depth(), 1);
        assert_eq!(parse("x cos sin halt").nesting_depth(), 2);
        assert_eq!(parse("x sin y sin + halt").nesting_depth(), 1);
        assert_eq!(parse("x sin y cos * exp halt").nesting_depth(), 2);
    }

    #[test]
    fn random_single_token_is_variable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = GenConfig {
            max_len: 1,
            max_nested: 1,
            n_vars: 1,
            mode: ScalarMode::IntegerScalars,
        };
        for _ in 0..100 {
            let e = random_expression(&cfg, &mut rng);
            assert_eq!(e.tokens(), &[Token::Var(Var::X)]);
        }
    }

    #[test]
    fn random_expressions_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = GenConfig {
            max_len: 15,
            max_nested: 1,
            n_vars: 2,
            mode: ScalarMode::IntegerScalars,
        };
        for _ in 0..10_000 {
            let e = random_expression(&cfg, &mut rng);
            assert!(valid_postfix(e.tokens()));
            assert!((1..=15).contains(&e.len()));
            assert!(e.nesting_depth() <= 1);
            assert!(e.contains_variable());
        }
    }

    #[test]
    fn k_zero_forbids_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GenConfig {
            max_len: 5,
            max_nested: 0,
            n_vars: 1,
            mode: ScalarMode::IntegerScalars,
        };
        for _ in 0..10_000 {
            let e = random_expression(&cfg, &mut rng);
            assert!(!e.tokens().iter().any(|t| matches!(t, Token::Func(_))));
        }
    }

    #[test]
    fn renumbering_is_first_occurrence_order() {
        let e = Expression::new(
            vec![
                Token::Free(5),
                Token::Var(Var::X),
                Token::Op(BinOp::Mul),
                Token::Free(2),
                Token::Op(BinOp::Add),
                Token::Free(5),
                Token::Op(BinOp::Sub),
            ],
            ScalarMode::FreeScalars,
        )
        .unwrap()
        .renumbered();
        assert_eq!(e.to_string(), "A0 x * A1 + A0 - halt");
    }

    #[test]
    fn text_round_trip() {
        for s in ["x y + x * halt", "x A0 ^ halt", "1 x x - / halt"] {
            assert_eq!(parse(s).to_string(), s);
        }
    }
}
