use super::ast::{BinOp, Sort, Specification, StreamDecl, StreamExpr, UnOp};
use super::check::{sort_map, sort_of};
use std::collections::{HashMap, HashSet};

struct Rewriter<'a> {
    sorts: &'a HashMap<String, Sort>,
    taken: HashSet<String>,
    helpers: Vec<String>,
    assumptions: Vec<StreamExpr>,
}

impl Rewriter<'_> {
    fn fresh(&mut self) -> String {
        let mut i = self.helpers.len();
        loop {
            let name = format!("ite_{i}");
            if self.taken.insert(name.clone()) {
                self.helpers.push(name.clone());
                return name;
            }
            i += 1;
        }
    }

    fn go(&mut self, e: &StreamExpr) -> StreamExpr {
        match e {
            StreamExpr::Const(_) | StreamExpr::Offset { .. } => e.clone(),
            StreamExpr::Unary(op, a) => StreamExpr::Unary(*op, Box::new(self.go(a))),
            StreamExpr::Binary(op, a, b) => StreamExpr::bin(*op, self.go(a), self.go(b)),
            StreamExpr::Ite(c, t, f) => {
                let sort = sort_of(t, self.sorts).expect("checked specification");
                let (c, t, f) = (self.go(c), self.go(t), self.go(f));
                let nc = StreamExpr::Unary(UnOp::Not, Box::new(c.clone()));
                match sort {
                    Sort::Bool => StreamExpr::bin(
                        BinOp::Or,
                        StreamExpr::bin(BinOp::And, c, t),
                        StreamExpr::bin(BinOp::And, nc, f),
                    ),
                    Sort::Real => {
                        let h = self.fresh();
                        let hv = StreamExpr::now(h);
                        self.assumptions.push(StreamExpr::bin(
                            BinOp::Or,
                            StreamExpr::bin(
                                BinOp::And,
                                c,
                                StreamExpr::bin(BinOp::Eq, hv.clone(), t),
                            ),
                            StreamExpr::bin(
                                BinOp::And,
                                nc,
                                StreamExpr::bin(BinOp::Eq, hv.clone(), f),
                            ),
                        ));
                        hv
                    }
                }
            }
        }
    }
}

/// Removes every `ite`. Bool ites become `(c && t) || (!c && e)`; each Real ite
/// becomes a fresh helper input `h` constrained by `(c && h = t) || (!c && h = e)`.
pub fn rewrite_ite(spec: &Specification) -> Specification {
    let mut sorts = sort_map(spec);
    let mut rw = Rewriter {
        sorts: &sorts,
        taken: spec.stream_names().into_iter().collect(),
        helpers: spec.helpers.clone(),
        assumptions: Vec::new(),
    };
    let outputs: Vec<StreamDecl> = spec
        .outputs
        .iter()
        .map(|d| StreamDecl {
            expr: d.expr.as_ref().map(|e| rw.go(e)),
            ..d.clone()
        })
        .collect();
    let mut assumptions: Vec<StreamExpr> = spec.assumptions.iter().map(|a| rw.go(a)).collect();
    assumptions.append(&mut rw.assumptions);
    let helpers = rw.helpers;
    let mut inputs = spec.inputs.clone();
    for h in helpers.iter().skip(spec.helpers.len()) {
        inputs.push(StreamDecl::input(h.clone(), Sort::Real));
        sorts.insert(h.clone(), Sort::Real);
    }
    Specification {
        inputs,
        outputs,
        lookback: Specification::compute_lookback(&assumptions),
        assumptions,
        helpers,
    }
}
