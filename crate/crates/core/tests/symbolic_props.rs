mod common;

use common::batteries::simplify_case;
use common::*;
use proptest::prelude::*;
use rand::Rng;
use symon::rational::{int, Rational};
use symon::symbolic::{CmpOp, ConstraintSet, LinExpr, SymExpr};

/// The same affine function written differently: terms in reverse order, each split in
/// two halves, and both sides shifted by `d`.
fn rewritten(e: &LinExpr, vars: usize, d: &Rational) -> LinExpr {
    let mut out = LinExpr::constant(int(0));
    for i in (0..vars).rev() {
        let c = e.coeff(&rvar(i));
        let half = &c / int(2);
        out.add_term(rvar(i), &half);
        out.add_term(rvar(i), &(c - &half));
    }
    out.plus(&LinExpr::constant(e.eval(&|_| Some(int(0))).unwrap() + d))
}

/// `a` and `b` differ by a nonzero factor.
fn proportional(a: &LinExpr, b: &LinExpr, vars: usize) -> bool {
    let pick = |e: &LinExpr| {
        (0..vars)
            .map(|i| e.coeff(&rvar(i)))
            .chain([e.eval(&|_| Some(int(0))).unwrap()])
            .collect::<Vec<_>>()
    };
    let (x, y) = (pick(a), pick(b));
    let Some(k) = x
        .iter()
        .zip(&y)
        .find(|(p, _)| **p != int(0))
        .map(|(p, q)| q / p)
    else {
        return y.iter().all(|q| *q == int(0));
    };
    k != int(0) && x.iter().zip(&y).all(|(p, q)| p * &k == *q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn simplify_preserves_meaning(seed in any::<u64>()) {
        simplify_case(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn simplify_is_idempotent(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 4, 3, 4);
        let once = e.simplify();
        prop_assert_eq!(once.simplify(), once);
    }

    #[test]
    fn equal_affine_comparisons_share_a_form(seed in any::<u64>(), k in 1i64..5, op in 0..5usize) {
        let mut r = rng(seed);
        let (a, b) = (random_lin(&mut r, 3), random_lin(&mut r, 3));
        let op = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt][op];
        let d = int(r.gen_range(-5..=5));
        let base = SymExpr::cmp(&a, op, &b);
        prop_assert_eq!(&SymExpr::cmp(&rewritten(&a, 3, &d), op, &rewritten(&b, 3, &d)), &base);
        let (ka, kb) = (a.scale(&int(k)), b.scale(&int(k)));
        prop_assert_eq!(&SymExpr::cmp(&ka, op, &kb), &base);
        prop_assert_eq!(&SymExpr::cmp(&kb, op.mirrored(), &ka), &base);
    }

    #[test]
    fn equal_equation_forms_are_proportional(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_lin(&mut r, 2), random_lin(&mut r, 2));
        let (c, d) = (random_lin(&mut r, 2), random_lin(&mut r, 2));
        let x = SymExpr::cmp(&a, CmpOp::Eq, &b);
        let y = SymExpr::cmp(&c, CmpOp::Eq, &d);
        if x == y && x.as_const().is_none() {
            prop_assert!(proportional(&a.minus(&b), &c.minus(&d), 2));
        }
        if proportional(&a.minus(&b), &c.minus(&d), 2) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn measure_grows_with_union_and_ignores_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let xs: Vec<SymExpr> = (0..4).map(|_| random_expr(&mut r, 3, 2, 3)).collect();
        let ys: Vec<SymExpr> = (0..3).map(|_| random_expr(&mut r, 3, 2, 3)).collect();
        let a: ConstraintSet = xs.iter().cloned().collect();
        let union: ConstraintSet = xs.iter().chain(&ys).cloned().collect();
        let reversed: ConstraintSet = ys.iter().chain(&xs).rev().cloned().collect();
        prop_assert!(union.measure() >= a.measure());
        prop_assert_eq!(union.measure(), reversed.measure());
    }
}
