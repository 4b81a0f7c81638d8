//! The internal language: formulas over the objects of a topos.

pub mod oracle;
pub mod semantics;
pub mod syntax;

use thiserror::Error;

use crate::error::ToposError;
pub use semantics::{
    comprehension_roundtrip, connective_tables_check, dummy_invariance_check, eval_closed, interpret, interpret_in,
    interpret_str, typecheck, ContextVar, Denotation, DummyReport, Env, Ty, Typed, Value,
};
pub use syntax::{parse, parse_type, Connective, Expr, ExprKind, Pos, Quantifier, TypeExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },

    #[error("type error at {pos}: {message}")]
    Type { pos: Pos, message: String },

    #[error("term is not closed; free variables: {}", .0.join(", "))]
    NotClosed(Vec<String>),

    #[error(transparent)]
    Topos(#[from] ToposError),
}
