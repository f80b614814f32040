//! Specification language: syntax tree, parser, checks and normalizing rewrites.

pub mod ast;
pub mod check;
pub mod error;
pub mod flatten;
pub mod fragment;
pub mod ite;
pub mod parser;

pub use ast::{BinOp, Sort, Specification, StreamDecl, StreamExpr, StreamKind, UnOp, Value};
pub use check::{check_well_formed, sort_map, sort_of};
pub use error::SpecError;
pub use flatten::flatten;
pub use fragment::{classify_fragment, Fragment};
pub use ite::rewrite_ite;
pub use parser::parse_spec;

/// Flattens offsets and removes ites.
pub fn normalize(spec: &Specification) -> Result<Specification, SpecError> {
    Ok(rewrite_ite(&flatten(spec)?))
}
