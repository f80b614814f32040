//! Randomized oracle checks, one instance per seed. Each returns a description of the
//! first mismatch.

use super::*;
use symon::monitor::Pruning;
use symon::rational::ratio;
use symon::solver::linear::bounds;
use symon::solver::{bounds_of, gaussian_solve, linalg::mat_mul, Caps, GaussResult, LinearSystem};
use symon::spec::flatten;
use symon::symbolic::eval_concrete;

/// `simplify` preserves truth under every Bool assignment and a grid of Real points.
pub fn simplify_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let e = random_expr(&mut r, 3, 2, 4);
    let s = e.simplify();
    let grid = [
        ratio(-2, 1),
        ratio(-1, 1),
        ratio(-1, 2),
        ratio(0, 1),
        ratio(1, 2),
        ratio(1, 1),
        ratio(2, 1),
    ];
    for bools in bool_assignments(3) {
        for x in &grid {
            for y in &grid {
                let reals = [x.clone(), y.clone()];
                let a = eval_with(&e, &bools, &reals);
                let b = eval_with(&s, &bools, &reals);
                if a != b {
                    return Err(format!(
                        "{e:?} simplified to {s:?} differs at {bools:?} {reals:?}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Fourier–Motzkin bounds equal the vertex-enumeration range on random bounded polytopes,
/// and the case-splitting search agrees on the same constraints.
pub fn fm_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let vars: Vec<Var> = (0..n).map(rvar).collect();
    let mut atoms = Vec::new();
    for v in &vars {
        atoms.push(SymExpr::cmp(
            &LinExpr::var(*v),
            CmpOp::Le,
            &LinExpr::constant(int(r.gen_range(0..=5))),
        ));
        atoms.push(SymExpr::cmp(
            &LinExpr::var(*v),
            CmpOp::Ge,
            &LinExpr::constant(int(r.gen_range(-5..=0))),
        ));
    }
    for _ in 0..r.gen_range(1..=4) {
        let mut lhs = LinExpr::constant(int(0));
        while lhs.is_constant() {
            for v in &vars {
                let c = r.gen_range(-3..=3);
                if c != 0 && r.gen_bool(0.7) {
                    lhs.add_term(*v, &int(c));
                }
            }
        }
        let op = if r.gen_bool(0.15) {
            CmpOp::Eq
        } else if r.gen() {
            CmpOp::Le
        } else {
            CmpOp::Ge
        };
        atoms.push(SymExpr::cmp(
            &lhs,
            op,
            &LinExpr::constant(int(r.gen_range(-4..=4))),
        ));
    }
    let cs: Vec<Constraint> = atoms
        .iter()
        .map(|a| match a {
            SymExpr::Atom(a) => Ok(Constraint::from_atom(a)),
            other => Err(format!("atom folded to {other:?}")),
        })
        .collect::<Result<_, _>>()?;
    let target = r.gen_range(0..n);
    let fm = bounds(cs.clone(), vars[target], 100_000).map_err(|e| e.to_string())?;
    let search = bounds_of(&atoms, vars[target], &Caps::default()).map_err(|e| e.to_string())?;
    let expected = match vertex_range(&cs, &vars, target) {
        None => Bounds::Empty,
        Some((lo, hi)) => Bounds::closed(lo, hi),
    };
    if fm != expected || search != expected {
        return Err(format!(
            "{cs:?}: fm {fm}, search {search}, vertices {expected}"
        ));
    }
    Ok(())
}

/// `gaussian_solve` returns the rank given by minors and a basis of columns of `N` with
/// `N = basis · change_of_basis`.
pub fn gauss_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (m, n) = (r.gen_range(1..=4), r.gen_range(1..=5));
    let matrix = random_matrix(&mut r, m, n);
    let sys = LinearSystem {
        matrix: matrix.clone(),
        offsets: vec![Rational::zero(); m],
        side_conditions: vec![],
    };
    let GaussResult::Solved {
        rank,
        basis,
        change_of_basis,
    } = gaussian_solve(&sys)
    else {
        return Err("system without side conditions reported inconsistent".into());
    };
    let expected = rank_by_minors(&matrix);
    if rank != expected {
        return Err(format!("{matrix:?}: rank {rank}, minors give {expected}"));
    }
    if rank == 0 {
        return if matrix.iter().flatten().all(Zero::is_zero) {
            Ok(())
        } else {
            Err("rank 0 for a nonzero matrix".into())
        };
    }
    for j in 0..rank {
        let col: Vec<&Rational> = basis.iter().map(|row| &row[j]).collect();
        let found = (0..n).any(|c| matrix.iter().zip(&col).all(|(row, x)| row[c] == **x));
        if !found {
            return Err(format!("basis column {j} is not a column of N"));
        }
    }
    if mat_mul(&basis, &change_of_basis) != matrix {
        return Err(format!("{matrix:?} != basis · change"));
    }
    Ok(())
}

/// Flattening keeps the concrete semantics, and the fully rewritten specification
/// reproduces every concrete output through the symbolic monitor.
pub fn rewrite_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_spec(Kind::Deep, &mut r);
    let (readings, values) = random_trace(&g, 8, 0.0, false, &mut r);
    let orig = eval_concrete(&g.spec, &values).map_err(|e| e.to_string())?;
    let flat_spec = flatten(&g.spec).map_err(|e| e.to_string())?;
    if flat_spec
        .outputs
        .iter()
        .chain(&flat_spec.inputs)
        .any(|d| d.expr.as_ref().is_some_and(|e| e.min_offset() < -1))
    {
        return Err(format!("flatten left a deep offset\n{flat_spec}"));
    }
    let flat = eval_concrete(&flat_spec, &values).map_err(|e| e.to_string())?;
    for (t, (a, b)) in orig.iter().zip(&flat).enumerate() {
        for d in &g.spec.outputs {
            if a[&d.name] != b[&d.name] {
                return Err(format!("flatten changes {}^{t}\n{}", d.name, g.text));
            }
        }
    }
    let config = MonitorConfig {
        pruning: Pruning::Off,
        ..Default::default()
    };
    let (vs, _) = step_all(&g.spec, &readings, config).map_err(|e| format!("{e}\n{}", g.text))?;
    for v in &vs {
        let expected = &orig[v.t as usize][&v.stream];
        if !value_matches(&v.value, expected) {
            return Err(format!(
                "{}^{} is {} but evaluates to {expected}\n{}",
                v.stream, v.t, v.value, g.text
            ));
        }
    }
    Ok(())
}
