//! The reduced diagram drops nodes whose children are identical for every
//! value. Cost-bounded domains computed on it match the merged diagram.

use mddconf::generate::{random_table, rng};
use mddconf::mdd::Mdd;
use mddconf::wcvd::{label_long, label_scalar, valid_domains_long, valid_domains_scalar, EdgeCosts};

fn main() {
    // x0 and x2 are free, x1 < x3
    let sizes = [3, 3, 2, 3];
    let mut rows = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                for d in (b + 1)..3 {
                    rows.push(vec![a, b, c, d]);
                }
            }
        }
    }
    let merged = Mdd::from_rows(&sizes, &rows).unwrap();
    let reduced = merged.reduce();
    println!("merged: {} nodes {} edges", merged.num_nodes(), merged.num_edges());
    println!("reduced: {} nodes {} edges", reduced.num_nodes(), reduced.num_edges());

    let table: Vec<Vec<f64>> = random_table(&mut rng(4), &sizes, 9)
        .into_iter()
        .map(|r| r.into_iter().map(|c| c as f64).collect())
        .collect();
    let costs = EdgeCosts::from_unary(&merged, &table);
    let labels = label_scalar(&merged, &costs).unwrap();
    let (long_costs, long_labels, skip) = label_long(&reduced, &table).unwrap();
    for k in [0.0, 5.0, 10.0, 15.0] {
        let a = valid_domains_scalar(&merged, &costs, &labels, k, 0.0);
        let b = valid_domains_long(&reduced, &table, &long_costs, &long_labels, &skip, k, 0.0);
        println!("K={k:>4}: {a}  same on reduced: {}", a == b);
    }
}
