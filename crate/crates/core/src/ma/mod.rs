//! Monad algebra: syntax, typing, evaluation, desugaring and size bounds.

pub mod ast;
pub mod desugar;
pub mod eval;
pub mod parse;
pub mod size;
pub mod typing;

pub use ast::{path, print_ma, Cond, Expr, Operand, Path};
pub use desugar::{desugar, expand_mon_eq};
pub use eval::{eval_ma, Evaluator};
pub use parse::{parse_cond, parse_ma};
pub use size::size_bound;
pub use typing::infer_type;
