use crate::rational::Rational;
use crate::spec::{check_well_formed, BinOp, SpecError, Specification, StreamExpr, UnOp, Value};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("missing value for input `{stream}` at instant {t}")]
    MissingInput { stream: String, t: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// One row per instant, keyed by stream name.
pub type ConcreteTrace = Vec<HashMap<String, Value>>;

fn eval(e: &StreamExpr, t: usize, rows: &ConcreteTrace) -> Value {
    let real = |v: Value| match v {
        Value::Real(r) => r,
        Value::Bool(_) => panic!("sort error in checked specification"),
    };
    let boolean = |v: Value| match v {
        Value::Bool(b) => b,
        Value::Real(_) => panic!("sort error in checked specification"),
    };
    match e {
        StreamExpr::Const(v) => v.clone(),
        StreamExpr::Offset {
            stream,
            offset,
            default,
        } => {
            let at = t as i64 + offset;
            if at < 0 {
                default.clone().expect("offset without default")
            } else {
                rows[at as usize][stream].clone()
            }
        }
        StreamExpr::Unary(UnOp::Not, a) => Value::Bool(!boolean(eval(a, t, rows))),
        StreamExpr::Unary(UnOp::Neg, a) => Value::Real(-real(eval(a, t, rows))),
        StreamExpr::Binary(op, a, b) => {
            let x = eval(a, t, rows);
            let y = eval(b, t, rows);
            match op {
                BinOp::And => Value::Bool(boolean(x) && boolean(y)),
                BinOp::Or => Value::Bool(boolean(x) || boolean(y)),
                BinOp::Xor => Value::Bool(boolean(x) ^ boolean(y)),
                BinOp::Implies => Value::Bool(!boolean(x) || boolean(y)),
                BinOp::Add => Value::Real(real(x) + real(y)),
                BinOp::Sub => Value::Real(real(x) - real(y)),
                BinOp::Mul => Value::Real(real(x) * real(y)),
                BinOp::Lt => Value::Bool(real(x) < real(y)),
                BinOp::Le => Value::Bool(real(x) <= real(y)),
                BinOp::Eq => Value::Bool(x == y),
            }
        }
        StreamExpr::Ite(c, a, b) => {
            if boolean(eval(c, t, rows)) {
                eval(a, t, rows)
            } else {
                eval(b, t, rows)
            }
        }
    }
}

/// Definitional interpreter: computes every output stream from fully known inputs.
/// Each returned row holds inputs and outputs.
pub fn eval_concrete(
    spec: &Specification,
    inputs: &[HashMap<String, Value>],
) -> Result<ConcreteTrace, EvalError> {
    let order = check_well_formed(spec)?;
    let mut rows: ConcreteTrace = Vec::with_capacity(inputs.len());
    for (t, row) in inputs.iter().enumerate() {
        let mut cur = HashMap::new();
        for d in &spec.inputs {
            let v = row.get(&d.name).ok_or_else(|| EvalError::MissingInput {
                stream: d.name.clone(),
                t,
            })?;
            cur.insert(d.name.clone(), v.clone());
        }
        rows.push(cur);
        for name in &order {
            let d = spec.output(name).expect("ordered output");
            let v = eval(
                d.expr.as_ref().expect("output without definition"),
                t,
                &rows,
            );
            rows[t].insert(name.clone(), v);
        }
    }
    Ok(rows)
}

/// Convenience for single-input Real traces.
pub fn real_rows(stream: &str, values: &[Rational]) -> Vec<HashMap<String, Value>> {
    values
        .iter()
        .map(|v| HashMap::from([(stream.to_string(), Value::Real(v.clone()))]))
        .collect()
}
