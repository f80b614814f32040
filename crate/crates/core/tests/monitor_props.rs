mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use std::collections::HashMap;
use symon::monitor::{run, MonitorConfig, Verdict};
use symon::spec::Value;
use symon::symbolic::{eval_concrete, Reading};

fn kind_strategy() -> impl Strategy<Value = Kind> {
    prop::sample::select(KINDS.to_vec())
}

fn perfect_kind() -> impl Strategy<Value = Kind> {
    prop::sample::select(vec![Kind::B, Kind::LA])
}

type Trace = Vec<HashMap<String, Reading>>;

fn case(
    kind: Kind,
    seed: u64,
    len: usize,
    unknown: f64,
) -> (Generated, Trace, Vec<HashMap<String, Value>>) {
    let mut r = rng(seed);
    let g = random_spec(kind, &mut r);
    let (trace, values) = random_trace(
        &g,
        len,
        unknown,
        kind == Kind::Mixed && unknown > 0.0,
        &mut r,
    );
    (g, trace, values)
}

fn final_verdicts(g: &Generated, trace: &Trace, config: MonitorConfig) -> Vec<Verdict> {
    run(&g.spec, trace, config)
        .unwrap_or_else(|e| panic!("{e}\n{}{}", g.text, render_trace(&g.spec, trace)))
        .verdicts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_traces_reproduce_the_run(kind in kind_strategy(), seed in any::<u64>(), prune in any::<bool>()) {
        let (g, trace, values) = case(kind, seed, 10, 0.0);
        let truth = eval_concrete(&g.spec, &values).unwrap();
        let config = if prune { MonitorConfig::default() } else { MonitorConfig::reference() };
        let res = run(&g.spec, &trace, config).unwrap();
        for (t, row) in truth.iter().enumerate() {
            for (name, expected) in row {
                if g.spec.inputs.iter().any(|d| &d.name == name) {
                    continue;
                }
                let v = res.verdict(name, t as u64);
                prop_assert!(
                    v.is_some_and(|v| value_matches(v, expected)),
                    "{}^{}: {:?} against {}\n{}", name, t, v, expected, g.text
                );
            }
        }
    }

    #[test]
    fn determined_verdicts_are_true(kind in kind_strategy(), seed in any::<u64>()) {
        let (g, trace, values) = case(kind, seed, 10, 0.4);
        let truth = eval_concrete(&g.spec, &values).unwrap();
        let pruned = final_verdicts(&g, &trace, MonitorConfig::default());
        let reference = final_verdicts(&g, &trace, MonitorConfig::reference());
        prop_assert!(agrees_with_run(&pruned, &truth).is_ok(), "{:?}\n{}", agrees_with_run(&pruned, &truth), g.text);
        prop_assert!(agrees_with_run(&reference, &truth).is_ok(), "{:?}\n{}", agrees_with_run(&reference, &truth), g.text);
        prop_assert!(consistent(&pruned, &reference).is_ok());
    }

    #[test]
    fn pruning_loses_nothing_on_perfect_fragments(kind in perfect_kind(), seed in any::<u64>()) {
        let (g, trace, _) = case(kind, seed, 10, 0.4);
        let (pruned, _) = step_all(&g.spec, &trace, MonitorConfig::default()).unwrap();
        let (reference, _) = step_all(&g.spec, &trace, MonitorConfig::reference()).unwrap();
        prop_assert_eq!(determined(&pruned), determined(&reference), "{}", g.text);
    }

    #[test]
    fn revealing_readings_never_flips_a_verdict(kind in perfect_kind(), seed in any::<u64>()) {
        let (g, trace, values) = case(kind, seed, 10, 0.5);
        let mut r = rng(seed ^ 0x5eed);
        let revealed: Trace = trace
            .iter()
            .zip(&values)
            .map(|(row, vals)| {
                row.iter()
                    .map(|(k, reading)| {
                        let reading = match reading {
                            Reading::Unknown if r.gen_bool(0.5) => Reading::Exact(vals[k].clone()),
                            other => other.clone(),
                        };
                        (k.clone(), reading)
                    })
                    .collect()
            })
            .collect();
        let before = determined(&final_verdicts(&g, &trace, MonitorConfig::default()));
        let after = determined(&final_verdicts(&g, &revealed, MonitorConfig::default()));
        prop_assert!(before.is_subset(&after), "{:?} lost\n{}", before.difference(&after).collect::<Vec<_>>(), g.text);
    }
}
