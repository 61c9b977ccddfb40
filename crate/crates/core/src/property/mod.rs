//! Temporal property language: syntax tree, parser, binding and evaluation.

mod ast;
mod bind;
mod eval;
mod oracle;
mod parser;

pub use ast::{format_seconds, CmpOp, Direction, Formula, Predicate, PropertySpec, Status, Trigger, Verdict};
pub use bind::{bind, BindError};
pub use eval::{evaluate, EvalError, Evaluator};
pub use oracle::evaluate_oracle;
pub use parser::{parse, parse_formula, parse_formula_with, parse_predicate, parse_properties, ParseError, Params};
