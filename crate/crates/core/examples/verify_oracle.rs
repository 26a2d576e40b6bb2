//! Cross-check every session mode against enumeration, then show that an
//! off-by-one bound comparison is caught.

use mddconf::generate::{random_unary_cost, random_model, rng, ModelShape};
use mddconf::model::brute_force_solutions;
use mddconf::verify::{verify_model, VerifyOptions};

fn main() {
    // first random model with at least a few solutions
    let (mut r, mut model) = (0..)
        .map(|seed| {
            let mut r = rng(seed);
            let m = random_model(&mut r, ModelShape::default());
            (r, m)
        })
        .find(|(_, m)| brute_force_solutions(m, 1 << 20).is_ok_and(|s| s.len() >= 5))
        .unwrap();
    let sizes = model.domain_sizes();
    model.add_cost(random_unary_cost(&mut r, "a", &sizes, 9)).unwrap();
    model.add_cost(random_unary_cost(&mut r, "b", &sizes, 9)).unwrap();

    let report = verify_model(&model, &VerifyOptions::default()).unwrap();
    println!("exact: {} checks, {} mismatches", report.checks, report.mismatches.len());
    let broken = VerifyOptions {
        tolerance: -1.0,
        ..VerifyOptions::default()
    };
    let report = verify_model(&model, &broken).unwrap();
    println!("off by one: {} checks, {} mismatches", report.checks, report.mismatches.len());
    if let Some(m) = report.mismatches.first() {
        println!("  {m}");
    }
}
