use super::search::is_sat;
use super::{Caps, SolverError};
use crate::symbolic::{Subst, SymExpr, Var};

/// All assignments to `vars` (lexicographic, `ff` before `tt`) that extend to a model of
/// `cs`. Variables of `cs` outside `vars` are existentially quantified, so the result is
/// the projection of the models onto `vars`.
pub fn enumerate_bool_models(
    cs: &[SymExpr],
    vars: &[Var],
    caps: &Caps,
) -> Result<Vec<Vec<bool>>, SolverError> {
    if vars.len() > caps.bool_vars {
        return Err(SolverError::ResourceExceeded(format!(
            "{} Boolean variables to enumerate, limit is {}",
            vars.len(),
            caps.bool_vars
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(vars.len());
    let cs: Vec<SymExpr> = cs.iter().map(SymExpr::simplify).collect();
    walk(&cs, vars, caps, &mut prefix, &mut out)?;
    Ok(out)
}

fn walk(
    cs: &[SymExpr],
    vars: &[Var],
    caps: &Caps,
    prefix: &mut Vec<bool>,
    out: &mut Vec<Vec<bool>>,
) -> Result<(), SolverError> {
    if cs.iter().any(|c| c.as_const() == Some(false)) {
        return Ok(());
    }
    let ground = cs.iter().all(|c| c.as_const().is_some());
    if !ground && !is_sat(cs, caps)? {
        return Ok(());
    }
    let Some((v, rest)) = vars.split_first() else {
        out.push(prefix.clone());
        return Ok(());
    };
    for val in [false, true] {
        let mut s = Subst::new();
        s.bools.insert(*v, SymExpr::Const(val));
        let next: Vec<SymExpr> = cs
            .iter()
            .map(|c| c.apply(&s))
            .filter(|c| c.as_const() != Some(true))
            .collect();
        prefix.push(val);
        walk(&next, rest, caps, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}
