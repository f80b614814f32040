use super::ast::{BinOp, Sort, Specification, StreamDecl, StreamExpr, StreamKind, UnOp};
use super::error::SpecError;
use std::collections::{BTreeSet, HashMap, HashSet};

type Env = HashMap<String, Option<Sort>>;

fn infer(e: &StreamExpr, env: &Env) -> Option<Sort> {
    match e {
        StreamExpr::Const(v) => Some(v.sort()),
        StreamExpr::Offset {
            stream, default, ..
        } => env
            .get(stream)
            .copied()
            .flatten()
            .or_else(|| default.as_ref().map(|d| d.sort())),
        StreamExpr::Unary(UnOp::Not, _) => Some(Sort::Bool),
        StreamExpr::Unary(UnOp::Neg, _) => Some(Sort::Real),
        StreamExpr::Binary(op, _, _) => Some(match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul => Sort::Real,
            _ => Sort::Bool,
        }),
        StreamExpr::Ite(_, t, e) => infer(t, env).or_else(|| infer(e, env)),
    }
}

fn expect(e: &StreamExpr, want: Sort, sorts: &HashMap<String, Sort>) -> Result<(), SpecError> {
    let found = sort_of(e, sorts)?;
    if found != want {
        return Err(SpecError::SortMismatch {
            context: e.to_string(),
            expected: want,
            found,
        });
    }
    Ok(())
}

/// Sort of a resolved expression, checking every subexpression.
pub fn sort_of(e: &StreamExpr, sorts: &HashMap<String, Sort>) -> Result<Sort, SpecError> {
    match e {
        StreamExpr::Const(v) => Ok(v.sort()),
        StreamExpr::Offset {
            stream, default, ..
        } => {
            let s = *sorts
                .get(stream)
                .ok_or_else(|| SpecError::UnknownIdentifier(stream.clone()))?;
            if let Some(d) = default {
                if d.sort() != s {
                    return Err(SpecError::SortMismatch {
                        context: e.to_string(),
                        expected: s,
                        found: d.sort(),
                    });
                }
            }
            Ok(s)
        }
        StreamExpr::Unary(UnOp::Not, a) => expect(a, Sort::Bool, sorts).map(|_| Sort::Bool),
        StreamExpr::Unary(UnOp::Neg, a) => expect(a, Sort::Real, sorts).map(|_| Sort::Real),
        StreamExpr::Binary(op, a, b) => match op {
            BinOp::And | BinOp::Or | BinOp::Xor | BinOp::Implies => {
                expect(a, Sort::Bool, sorts)?;
                expect(b, Sort::Bool, sorts)?;
                Ok(Sort::Bool)
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul => {
                expect(a, Sort::Real, sorts)?;
                expect(b, Sort::Real, sorts)?;
                Ok(Sort::Real)
            }
            BinOp::Lt | BinOp::Le => {
                expect(a, Sort::Real, sorts)?;
                expect(b, Sort::Real, sorts)?;
                Ok(Sort::Bool)
            }
            BinOp::Eq => {
                let s = sort_of(a, sorts)?;
                expect(b, s, sorts)?;
                Ok(Sort::Bool)
            }
        },
        StreamExpr::Ite(c, t, f) => {
            expect(c, Sort::Bool, sorts)?;
            let s = sort_of(t, sorts)?;
            expect(f, s, sorts)?;
            Ok(s)
        }
    }
}

fn check_offsets(e: &StreamExpr) -> Result<(), SpecError> {
    let mut err = None;
    e.for_each_offset(&mut |stream, offset, default| {
        if err.is_some() {
            return;
        }
        if offset > 0 {
            err = Some(SpecError::FutureOffset {
                stream: stream.to_string(),
                offset,
            });
        } else if offset < 0 && default.is_none() {
            err = Some(SpecError::InvalidOffset {
                stream: stream.to_string(),
                message: format!("offset {offset} needs a default value"),
            });
        } else if offset == 0 && default.is_some() {
            err = Some(SpecError::InvalidOffset {
                stream: stream.to_string(),
                message: "offset 0 takes no default".into(),
            });
        }
    });
    err.map_or(Ok(()), Err)
}

/// Turns parsed declarations into a checked specification.
pub(crate) fn resolve(
    inputs: Vec<StreamDecl>,
    outputs: Vec<(String, Option<Sort>, StreamExpr)>,
    assumptions: Vec<StreamExpr>,
) -> Result<Specification, SpecError> {
    let mut seen = HashSet::new();
    let names = inputs
        .iter()
        .map(|d| d.name.clone())
        .chain(outputs.iter().map(|o| o.0.clone()));
    for n in names {
        if !seen.insert(n.clone()) {
            return Err(SpecError::DuplicateStream(n));
        }
    }

    for e in outputs.iter().map(|o| &o.2).chain(assumptions.iter()) {
        let mut unknown = None;
        e.for_each_offset(&mut |s, _, _| {
            if unknown.is_none() && !seen.contains(s) {
                unknown = Some(s.to_string());
            }
        });
        if let Some(u) = unknown {
            return Err(SpecError::UnknownIdentifier(u));
        }
        check_offsets(e)?;
    }

    let mut env: Env = inputs
        .iter()
        .map(|d| (d.name.clone(), Some(d.sort)))
        .collect();
    for (n, s, _) in &outputs {
        env.insert(n.clone(), *s);
    }
    loop {
        let mut progress = false;
        for (n, _, e) in &outputs {
            if env[n].is_none() {
                if let Some(s) = infer(e, &env) {
                    env.insert(n.clone(), Some(s));
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }

    let provisional = Specification {
        inputs: inputs.clone(),
        outputs: outputs
            .iter()
            .map(|(n, s, e)| StreamDecl::output(n.clone(), s.unwrap_or(Sort::Real), e.clone()))
            .collect(),
        assumptions: assumptions.clone(),
        lookback: 0,
        helpers: Vec::new(),
    };
    if env.values().any(|s| s.is_none()) {
        check_well_formed(&provisional)?;
        let n = outputs.iter().find(|o| env[&o.0].is_none()).unwrap();
        return Err(SpecError::Unsupported(format!(
            "cannot infer the sort of `{}`",
            n.0
        )));
    }

    let sorts: HashMap<String, Sort> = env.into_iter().map(|(k, v)| (k, v.unwrap())).collect();
    let outputs: Vec<StreamDecl> = outputs
        .into_iter()
        .map(|(n, _, e)| {
            let s = sorts[&n];
            StreamDecl::output(n, s, e)
        })
        .collect();
    for d in &outputs {
        expect(d.expr.as_ref().unwrap(), d.sort, &sorts)?;
    }
    for a in &assumptions {
        expect(a, Sort::Bool, &sorts)?;
    }
    let lookback = Specification::compute_lookback(&assumptions);
    let spec = Specification {
        inputs,
        outputs,
        assumptions,
        lookback,
        helpers: Vec::new(),
    };
    check_well_formed(&spec)?;
    Ok(spec)
}

/// Stream sorts keyed by name.
pub fn sort_map(spec: &Specification) -> HashMap<String, Sort> {
    spec.streams().map(|d| (d.name.clone(), d.sort)).collect()
}

/// Outputs referenced at offset 0 by `e`.
fn now_deps(e: &StreamExpr, outputs: &HashSet<&str>) -> BTreeSet<String> {
    let mut deps = BTreeSet::new();
    e.for_each_offset(&mut |s, o, _| {
        if o == 0 && outputs.contains(s) {
            deps.insert(s.to_string());
        }
    });
    deps
}

/// Returns an evaluation order of the outputs, or the first zero-offset cycle found.
/// Ties are broken by declaration order.
pub fn check_well_formed(spec: &Specification) -> Result<Vec<String>, SpecError> {
    let out_names: HashSet<&str> = spec.outputs.iter().map(|d| d.name.as_str()).collect();
    let deps: Vec<BTreeSet<String>> = spec
        .outputs
        .iter()
        .map(|d| {
            now_deps(
                d.expr.as_ref().expect("output without definition"),
                &out_names,
            )
        })
        .collect();
    let idx: HashMap<&str, usize> = spec
        .outputs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.as_str(), i))
        .collect();

    let n = spec.outputs.len();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&i| !done[i] && deps[i].iter().all(|d| done[idx[d.as_str()]]));
        match next {
            Some(i) => {
                done[i] = true;
                order.push(spec.outputs[i].name.clone());
            }
            None => {
                // Every remaining node has a remaining dependency: walk until a repeat.
                let mut path = vec![(0..n).find(|&i| !done[i]).unwrap()];
                loop {
                    let cur = *path.last().unwrap();
                    let succ = deps[cur]
                        .iter()
                        .map(|d| idx[d.as_str()])
                        .find(|&j| !done[j])
                        .unwrap();
                    if let Some(p) = path.iter().position(|&x| x == succ) {
                        let mut cycle: Vec<String> = path[p..]
                            .iter()
                            .map(|&i| spec.outputs[i].name.clone())
                            .collect();
                        cycle.push(spec.outputs[succ].name.clone());
                        return Err(SpecError::Cycle(cycle));
                    }
                    path.push(succ);
                }
            }
        }
    }
    Ok(order)
}

pub fn is_input(spec: &Specification, name: &str) -> bool {
    spec.stream(name)
        .is_some_and(|d| d.kind == StreamKind::Input)
}
