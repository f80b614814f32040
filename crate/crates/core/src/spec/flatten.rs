use super::ast::{Specification, StreamDecl, StreamExpr, Value};
use super::error::SpecError;
use std::collections::{HashMap, HashSet};

fn collect_classes(
    e: &StreamExpr,
    classes: &mut Vec<(String, Value, i64)>,
) -> Result<(), SpecError> {
    let mut err = None;
    e.for_each_offset(&mut |stream, offset, default| {
        if offset > 0 && err.is_none() {
            err = Some(SpecError::FutureOffset {
                stream: stream.to_string(),
                offset,
            });
        }
        if offset < -1 {
            let d = default.cloned().expect("checked specification");
            match classes.iter_mut().find(|c| c.0 == stream && c.1 == d) {
                Some(c) => c.2 = c.2.max(-offset - 1),
                None => classes.push((stream.to_string(), d, -offset - 1)),
            }
        }
    });
    err.map_or(Ok(()), Err)
}

fn rewrite(e: &StreamExpr, names: &HashMap<(String, Value), Vec<String>>) -> StreamExpr {
    match e {
        StreamExpr::Offset {
            stream,
            offset,
            default: Some(d),
        } if *offset < -1 => {
            let chain = &names[&(stream.clone(), d.clone())];
            StreamExpr::offset(chain[(-offset - 2) as usize].clone(), -1, d.clone())
        }
        StreamExpr::Const(_) | StreamExpr::Offset { .. } => e.clone(),
        StreamExpr::Unary(op, a) => StreamExpr::Unary(*op, Box::new(rewrite(a, names))),
        StreamExpr::Binary(op, a, b) => StreamExpr::bin(*op, rewrite(a, names), rewrite(b, names)),
        StreamExpr::Ite(c, t, f) => {
            StreamExpr::ite(rewrite(c, names), rewrite(t, names), rewrite(f, names))
        }
    }
}

/// Rewrites every `s[-k|d]` with `k >= 2` through a chain of delay outputs
/// `s_d1 := s[-1|d]`, `s_d2 := s_d1[-1|d]`, ... so that only offsets 0 and -1 remain.
/// Delay outputs are appended after the original outputs.
pub fn flatten(spec: &Specification) -> Result<Specification, SpecError> {
    let mut classes = Vec::new();
    for d in &spec.outputs {
        collect_classes(
            d.expr.as_ref().expect("output without definition"),
            &mut classes,
        )?;
    }
    for a in &spec.assumptions {
        collect_classes(a, &mut classes)?;
    }

    let mut taken: HashSet<String> = spec.stream_names().into_iter().collect();
    let mut class_no: HashMap<String, usize> = HashMap::new();
    let mut names: HashMap<(String, Value), Vec<String>> = HashMap::new();
    let mut aux = Vec::new();
    for (stream, default, depth) in &classes {
        let n = class_no.entry(stream.clone()).or_insert(0);
        let sort = spec.stream(stream).expect("checked specification").sort;
        let mut chain: Vec<String> = Vec::new();
        for k in 1..=*depth {
            let mut name = if *n == 0 {
                format!("{stream}_d{k}")
            } else {
                format!("{stream}_{n}_d{k}")
            };
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            let prev = if k == 1 {
                stream.clone()
            } else {
                chain[k as usize - 2].clone()
            };
            aux.push(StreamDecl::output(
                name.clone(),
                sort,
                StreamExpr::offset(prev, -1, default.clone()),
            ));
            chain.push(name);
        }
        *n += 1;
        names.insert((stream.clone(), default.clone()), chain);
    }

    let mut outputs: Vec<StreamDecl> = spec
        .outputs
        .iter()
        .map(|d| StreamDecl {
            expr: d.expr.as_ref().map(|e| rewrite(e, &names)),
            ..d.clone()
        })
        .collect();
    outputs.extend(aux);
    let assumptions: Vec<StreamExpr> = spec
        .assumptions
        .iter()
        .map(|a| rewrite(a, &names))
        .collect();
    Ok(Specification {
        inputs: spec.inputs.clone(),
        outputs,
        lookback: Specification::compute_lookback(&assumptions),
        assumptions,
        helpers: spec.helpers.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    #[test]
    fn sliding_window_gets_delay_chain() {
        let spec =
            parse_spec("input ld: Real\noutput acc := acc[-1|0] + ld[now] - ld[-3|0]").unwrap();
        let flat = flatten(&spec).unwrap();
        let names: Vec<_> = flat.outputs.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, vec!["acc", "ld_d1", "ld_d2"]);
        assert_eq!(
            flat.outputs[0].expr.as_ref().unwrap().to_string(),
            "((acc[-1|0] + ld[now]) - ld_d2[-1|0])"
        );
        assert_eq!(
            flat.outputs[2].expr.as_ref().unwrap().to_string(),
            "ld_d1[-1|0]"
        );
        for d in &flat.outputs {
            assert!(d.expr.as_ref().unwrap().min_offset() >= -1);
        }
    }

    #[test]
    fn distinct_defaults_get_distinct_chains() {
        let spec = parse_spec(
            "input x: Real\ninput x_d1: Real\noutput y := x[-2|0] + x[-2|1] + x_d1[now]",
        )
        .unwrap();
        let flat = flatten(&spec).unwrap();
        let names: Vec<_> = flat.outputs.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, vec!["y", "x_d1_", "x_1_d1"]);
    }

    #[test]
    fn assumption_lookback_shrinks() {
        let spec = parse_spec("input x: Real\nassumption x[-4|0] <= x[now]").unwrap();
        assert_eq!(spec.lookback, 4);
        assert_eq!(flatten(&spec).unwrap().lookback, 1);
    }
}
