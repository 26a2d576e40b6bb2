//! Exhaustive reference implementation. Slow on purpose; every compiled
//! query is checked against it in the test suites.

use super::{Assignment, CostSpec, CspModel, ModelError, Result, ValidDomains};

/// Largest search space the oracle will walk by default.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Every solution of `model`, as tuples indexed by variable, in
/// lexicographic order. Fails if the search space exceeds `cap`.
pub fn brute_force_solutions(model: &CspModel, cap: u128) -> Result<Vec<Vec<usize>>> {
    let sizes = model.domain_sizes();
    let space: u128 = sizes.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128)).unwrap_or(u128::MAX);
    if space > cap {
        return Err(ModelError::CapExceeded(space));
    }
    // check each constraint once the last variable of its scope is set
    let n = sizes.len();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut always = Vec::new();
    for (c, constraint) in model.constraints().iter().enumerate() {
        match constraint.scope().iter().max() {
            Some(&last) => due[last].push(c),
            None => always.push(c),
        }
    }
    if always.iter().any(|&c| !model.constraints()[c].eval_with(|_| 0)) {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    let mut tuple = vec![0usize; n];
    search(model, &sizes, &due, 0, &mut tuple, &mut out);
    Ok(out)
}

fn search(
    model: &CspModel,
    sizes: &[usize],
    due: &[Vec<usize>],
    depth: usize,
    tuple: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if depth == sizes.len() {
        out.push(tuple.clone());
        return;
    }
    for a in 0..sizes[depth] {
        tuple[depth] = a;
        let ok = due[depth]
            .iter()
            .all(|&c| model.constraints()[c].eval_with(|v| tuple[v]));
        if ok {
            search(model, sizes, due, depth + 1, tuple, out);
        }
    }
}

/// Valid domains by enumeration: the values taken by solutions that extend
/// `rho` and whose cost under each `(cost, bound)` pair is within the bound.
pub fn brute_force_vd(model: &CspModel, rho: &Assignment, bounds: &[(&CostSpec, f64)]) -> Result<ValidDomains> {
    let solutions = brute_force_solutions(model, DEFAULT_ENUMERATION_CAP)?;
    let mut vd = ValidDomains::empty(model.num_vars());
    for sol in solutions {
        if !rho.is_extended_by(&sol) {
            continue;
        }
        if bounds.iter().all(|(cost, bound)| within(cost.evaluate(&sol), *bound)) {
            for (i, &a) in sol.iter().enumerate() {
                vd.insert(i, a);
            }
        }
    }
    Ok(vd)
}

fn within(cost: f64, bound: f64) -> bool {
    cost <= bound + 1e-9 * bound.abs().max(1.0)
}
