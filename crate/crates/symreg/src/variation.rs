//! Genetic operators: equal-arity point mutation, subtree crossover, and the
//! 40/40/20 offspring policy.

use crate::expr::{Expression, ScalarMode};
use crate::token::{BinOp, Func, Token, Var};
use crate::tree::{tokens_to_tree, Tree};
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct VariationConfig {
    pub max_len: usize,
    pub max_nested: usize,
    pub n_vars: usize,
    pub mode: ScalarMode,
    pub p_mutation_only: f64,
    pub p_crossover_only: f64,
    pub p_both: f64,
    /// Probability to drop a function symbol instead of replacing it.
    pub p_function_drop: f64,
    /// Crossover attempts per requested offspring pair before skipping.
    pub crossover_retries: usize,
}

impl VariationConfig {
    pub fn new(max_len: usize, max_nested: usize, n_vars: usize, mode: ScalarMode) -> Self {
        VariationConfig {
            max_len,
            max_nested,
            n_vars,
            mode,
            p_mutation_only: 0.4,
            p_crossover_only: 0.4,
            p_both: 0.2,
            p_function_drop: 0.3,
            crossover_retries: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    MutationOnly,
    CrossoverOnly,
    Both,
}

pub fn sample_operator<R: Rng + ?Sized>(cfg: &VariationConfig, rng: &mut R) -> OperatorChoice {
    let r: f64 = rng.random();
    if r < cfg.p_mutation_only {
        OperatorChoice::MutationOnly
    } else if r < cfg.p_mutation_only + cfg.p_crossover_only {
        OperatorChoice::CrossoverOnly
    } else {
        OperatorChoice::Both
    }
}

/// Arity-0 replacement candidates differing from `current`.
fn leaf_alternatives(cfg: &VariationConfig, current: Token, fresh_free: usize) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::new();
    for v in &Var::ALL[..cfg.n_vars] {
        let t = Token::Var(*v);
        if t != current {
            out.push(t);
        }
    }
    match cfg.mode {
        ScalarMode::IntegerScalars => {
            for n in [1u8, 2] {
                let t = Token::Int(n);
                if t != current {
                    out.push(t);
                }
            }
        }
        ScalarMode::FreeScalars => {
            // A fresh scalar; any free scalar is family-equivalent to any other.
            if !current.is_scalar() {
                out.push(Token::Free(fresh_free));
            }
        }
    }
    out
}

/// Replace one uniformly chosen token by a different token of equal arity.
/// A selected function symbol is dropped (child spliced in) with probability
/// `p_function_drop`.
pub fn point_mutation<R: Rng + ?Sized>(
    expr: &Expression,
    cfg: &VariationConfig,
    rng: &mut R,
) -> Expression {
    let tokens = expr.tokens();
    let pos = rng.random_range(0..tokens.len());
    let fresh = expr.n_free_scalars();
    let mut out: Vec<Token> = tokens.to_vec();
    match tokens[pos] {
        Token::Func(f) => {
            if rng.random::<f64>() < cfg.p_function_drop {
                out.remove(pos);
            } else {
                let alts: Vec<Func> = Func::ALL.iter().copied().filter(|g| *g != f).collect();
                out[pos] = Token::Func(alts[rng.random_range(0..alts.len())]);
            }
        }
        Token::Op(op) => {
            let alts: Vec<BinOp> = BinOp::ALL.iter().copied().filter(|o| *o != op).collect();
            out[pos] = Token::Op(alts[rng.random_range(0..alts.len())]);
        }
        leaf => {
            let alts = leaf_alternatives(cfg, leaf, fresh);
            if !alts.is_empty() {
                out[pos] = alts[rng.random_range(0..alts.len())];
            }
        }
    }
    Expression::from_valid(out, expr.mode()).renumbered()
}

/// Shift free-scalar indices so a donor subtree cannot alias the indices of
/// the receiving parent.
fn shift_free(t: &Tree, offset: usize) -> Tree {
    match t {
        Tree::Leaf(Token::Free(i)) => Tree::leaf(Token::Free(i + offset)),
        Tree::Leaf(tok) => Tree::Leaf(*tok),
        Tree::Unary(f, c) => Tree::unary(*f, shift_free(c, offset)),
        Tree::Binary(op, l, r) => {
            Tree::binary(*op, shift_free(l, offset), shift_free(r, offset))
        }
    }
}

fn admit(tree: Tree, cfg: &VariationConfig, mode: ScalarMode) -> Option<Expression> {
    if tree.size() > cfg.max_len || tree.nesting_depth() > cfg.max_nested {
        return None;
    }
    Some(Expression::from_valid(tree.to_postfix(), mode).renumbered())
}

/// Swap uniformly chosen subtrees between two parents. Each offspring is
/// `None` when it violates the length or nesting limit.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &Expression,
    b: &Expression,
    cfg: &VariationConfig,
    rng: &mut R,
) -> (Option<Expression>, Option<Expression>) {
    let ta = tokens_to_tree(a);
    let tb = tokens_to_tree(b);
    let ia = rng.random_range(0..ta.size());
    let ib = rng.random_range(0..tb.size());
    let sub_a = ta.node_at(ia).expect("index in range");
    let sub_b = tb.node_at(ib).expect("index in range");
    let (donor_to_a, donor_to_b) = if cfg.mode == ScalarMode::FreeScalars {
        (
            shift_free(sub_b, a.n_free_scalars()),
            shift_free(sub_a, b.n_free_scalars()),
        )
    } else {
        (sub_b.clone(), sub_a.clone())
    };
    let child_a = admit(ta.with_replaced(ia, &donor_to_a), cfg, a.mode());
    let child_b = admit(tb.with_replaced(ib, &donor_to_b), cfg, b.mode());
    (child_a, child_b)
}

/// Crossover with the configured retry budget; returns the accepted children
/// of the first attempt that produced any.
pub fn crossover_with_retries<R: Rng + ?Sized>(
    a: &Expression,
    b: &Expression,
    cfg: &VariationConfig,
    rng: &mut R,
) -> Vec<Expression> {
    for _ in 0..cfg.crossover_retries {
        let (ca, cb) = subtree_crossover(a, b, cfg, rng);
        let kids: Vec<Expression> = [ca, cb].into_iter().flatten().collect();
        if !kids.is_empty() {
            return kids;
        }
    }
    Vec::new()
}

/// 40/40/20 offspring policy over a uniformly drawn parent pool; returns
/// exactly `n_wanted` accepted children.
pub fn propose_offspring<R: Rng + ?Sized>(
    pool: &[Expression],
    n_wanted: usize,
    cfg: &VariationConfig,
    rng: &mut R,
) -> Vec<Expression> {
    assert!(!pool.is_empty());
    let mut out = Vec::with_capacity(n_wanted);
    while out.len() < n_wanted {
        match sample_operator(cfg, rng) {
            OperatorChoice::MutationOnly => {
                let p = &pool[rng.random_range(0..pool.len())];
                out.push(point_mutation(p, cfg, rng));
            }
            OperatorChoice::CrossoverOnly => {
                let a = &pool[rng.random_range(0..pool.len())];
                let b = &pool[rng.random_range(0..pool.len())];
                out.extend(crossover_with_retries(a, b, cfg, rng));
            }
            OperatorChoice::Both => {
                let a = &pool[rng.random_range(0..pool.len())];
                let b = &pool[rng.random_range(0..pool.len())];
                for child in crossover_with_retries(a, b, cfg, rng) {
                    out.push(point_mutation(&child, cfg, rng));
                }
            }
        }
    }
    out.truncate(n_wanted);
    out
}
