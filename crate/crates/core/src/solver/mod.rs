//! Decision procedures for quantifier-free Boolean and linear real arithmetic constraints.

pub mod linalg;
pub mod linear;
pub mod models;
pub mod search;
pub mod smtlib;

pub use linalg::{gaussian_solve, rref, GaussResult, LinearSystem};
pub use linear::{Bounds, Constraint, Endpoint, Rel};
pub use models::enumerate_bool_models;
pub use search::{bounds_of, conjunctive_part, is_sat};

use crate::symbolic::{expr::mk_not, SymExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver resource limit exceeded: {0}")]
    ResourceExceeded(String),
}

/// Effort limits for a single query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Search nodes per query.
    pub nodes: usize,
    /// Constraints alive during one elimination step.
    pub fm_constraints: usize,
    /// Feasible leaves merged by `bounds_of` before it weakens.
    pub leaves: usize,
    /// Variables `enumerate_bool_models` may enumerate.
    pub bool_vars: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            nodes: 200_000,
            fm_constraints: 20_000,
            leaves: 512,
            bool_vars: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    /// Holds in every model.
    Valid,
    /// Holds in no model.
    Unsat,
    Contingent,
}

/// Classifies `p` relative to `cs`. An unsatisfiable `cs` makes every predicate valid.
pub fn check_predicate(cs: &[SymExpr], p: &SymExpr, caps: &Caps) -> Result<Validity, SolverError> {
    let mut q = cs.to_vec();
    q.push(mk_not(p.simplify()));
    if !is_sat(&q, caps)? {
        return Ok(Validity::Valid);
    }
    q.pop();
    q.push(p.clone());
    if !is_sat(&q, caps)? {
        return Ok(Validity::Unsat);
    }
    Ok(Validity::Contingent)
}
