use super::ast::{BinOp, Sort, Specification, StreamExpr, UnOp};
use super::check::sort_map;
use std::collections::HashMap;
use std::fmt;

/// Syntactic fragment a specification falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    B,
    LA,
    BLa,
    BLaIte,
    Unsupported,
}

impl Fragment {
    pub fn join(self, other: Fragment) -> Fragment {
        match (self, other) {
            (Fragment::B, Fragment::LA) | (Fragment::LA, Fragment::B) => Fragment::BLa,
            (a, b) => a.max(b),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::B => "B",
            Fragment::LA => "LA",
            Fragment::BLa => "B_LA",
            Fragment::BLaIte => "B_LA_ite",
            Fragment::Unsupported => "Unsupported",
        })
    }
}

#[derive(Default)]
struct Flags {
    bool_: bool,
    real: bool,
    real_ite: bool,
    nonlinear: bool,
}

fn walk(e: &StreamExpr, sorts: &HashMap<String, Sort>, fl: &mut Flags) -> Sort {
    let s = match e {
        StreamExpr::Const(v) => v.sort(),
        StreamExpr::Offset { stream, .. } => sorts[stream],
        StreamExpr::Unary(UnOp::Not, a) => {
            walk(a, sorts, fl);
            Sort::Bool
        }
        StreamExpr::Unary(UnOp::Neg, a) => {
            walk(a, sorts, fl);
            Sort::Real
        }
        StreamExpr::Binary(op, a, b) => {
            walk(a, sorts, fl);
            walk(b, sorts, fl);
            if *op == BinOp::Mul && a.references_streams() && b.references_streams() {
                fl.nonlinear = true;
            }
            match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul => Sort::Real,
                _ => Sort::Bool,
            }
        }
        StreamExpr::Ite(c, t, f) => {
            walk(c, sorts, fl);
            let s = walk(t, sorts, fl);
            walk(f, sorts, fl);
            if s == Sort::Real {
                fl.real_ite = true;
            }
            s
        }
    };
    match s {
        Sort::Bool => fl.bool_ = true,
        Sort::Real => fl.real = true,
    }
    s
}

/// Fragment of a single definition.
pub fn classify_expr(e: &StreamExpr, sorts: &HashMap<String, Sort>) -> Fragment {
    let mut fl = Flags::default();
    walk(e, sorts, &mut fl);
    if fl.nonlinear {
        Fragment::Unsupported
    } else if fl.real_ite {
        Fragment::BLaIte
    } else if fl.bool_ && fl.real {
        Fragment::BLa
    } else if fl.real {
        Fragment::LA
    } else {
        Fragment::B
    }
}

/// Join of the fragments of all output definitions. Assumptions are not considered.
pub fn classify_fragment(spec: &Specification) -> Fragment {
    let sorts = sort_map(spec);
    spec.outputs
        .iter()
        .filter_map(|d| d.expr.as_ref())
        .map(|e| classify_expr(e, &sorts))
        .reduce(Fragment::join)
        .unwrap_or(Fragment::B)
}
