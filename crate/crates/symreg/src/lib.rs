//! Symbolic regression by quality-diversity search.
//!
//! Expressions are postfix token strings over up to three variables, four
//! unary functions, and five binary operators. Search proceeds in three
//! steps: a MAP-Elites grid over integer-scalar expressions, conversion of
//! the elites into scalar skeletons whose free constants are fit by CMA-ES
//! plus least-squares refinement, and a second MAP-Elites grid over
//! free-scalar expressions where every offspring is fit before scoring.
//! A plain generational-GP baseline shares the genome and operators for
//! side-by-side comparisons.

pub mod cmaes;
pub mod eval;
pub mod expr;
pub mod fitness;
pub mod gp;
pub mod grid;
pub mod lsq;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod scalar_fit;
pub mod simplify;
pub mod targets;
pub mod token;
pub mod tree;
pub mod variation;

pub use expr::{Expression, FeatureDescriptor, ScalarMode};
pub use eval::{evaluate, EvalFailure};
pub use fitness::{cost, nrmse, reward, Dataset, NRMSE_HIT};
pub use grid::{Archive, GridKey, Individual};
pub use pipeline::{run, HitStage, RunConfig, RunMode, RunOutcome};
pub use targets::{find_target, target_catalog, TargetSpec};
pub use token::{BinOp, Func, Token, Var};
