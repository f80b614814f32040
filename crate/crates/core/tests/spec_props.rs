mod common;

use common::batteries::rewrite_case;
use common::*;
use proptest::prelude::*;
use symon::spec::{classify_fragment, parse_spec, Specification};

/// Outputs that no other output refers to.
fn unreferenced(spec: &Specification) -> Vec<String> {
    spec.outputs
        .iter()
        .filter(|d| {
            !spec.outputs.iter().any(|o| {
                let mut used = false;
                if let Some(e) = &o.expr {
                    e.for_each_offset(&mut |s, _, _| used |= o.name != d.name && s == d.name);
                }
                used
            })
        })
        .map(|d| d.name.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), k in 0..4usize) {
        let g = random_spec(KINDS[k], &mut rng(seed));
        let printed = g.spec.to_string();
        let again = parse_spec(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(again, g.spec);
    }

    #[test]
    fn flatten_and_ite_rewrite_keep_semantics(seed in any::<u64>()) {
        rewrite_case(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn dropping_outputs_never_widens_the_fragment(seed in any::<u64>(), k in 0..4usize) {
        let g = random_spec(KINDS[k], &mut rng(seed));
        let full = classify_fragment(&g.spec);
        let mut spec = g.spec.clone();
        while let Some(name) = unreferenced(&spec).pop() {
            spec.outputs.retain(|d| d.name != name);
            prop_assert!(classify_fragment(&spec) <= full, "{}", g.text);
        }
    }
}
