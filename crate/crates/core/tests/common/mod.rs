#![allow(dead_code)]

use mddconf::model::{brute_force_solutions, CspModel, ValidDomains, DEFAULT_ENUMERATION_CAP};

pub fn solutions(model: &CspModel) -> Vec<Vec<usize>> {
    brute_force_solutions(model, DEFAULT_ENUMERATION_CAP).expect("small model")
}

/// Valid domains of the given solutions.
pub fn domains_of<'a>(n: usize, sols: impl IntoIterator<Item = &'a Vec<usize>>) -> ValidDomains {
    let mut vd = ValidDomains::empty(n);
    for s in sols {
        for (i, &a) in s.iter().enumerate() {
            vd.insert(i, a);
        }
    }
    vd
}

pub fn unary_cost(table: &[Vec<i64>], sol: &[usize]) -> i64 {
    sol.iter().enumerate().map(|(i, &a)| table[i][a]).sum()
}

/// Pareto-minimal cost pairs among the given pairs, sorted by first cost.
pub fn pareto(mut pairs: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pairs.sort();
    let mut out: Vec<(i64, i64)> = Vec::new();
    for p in pairs {
        if out.last().is_none_or(|l| p.1 < l.1) {
            out.push(p);
        }
    }
    out
}
