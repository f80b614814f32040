//! Instant variables, symbolic expressions and the concrete reference semantics.

pub mod concrete;
pub mod expr;
pub mod instantiate;
pub mod lin;
pub mod var;

pub use concrete::{eval_concrete, ConcreteTrace, EvalError};
pub use expr::{ConstraintSet, Subst, SymExpr, Term};
pub use instantiate::{
    encode_reading, instantiate_assumptions, instantiate_step, Instantiator, Reading, SymError,
};
pub use lin::{CmpOp, LinAtom, LinExpr};
pub use var::{FreshGen, Names, Origin, Var};
