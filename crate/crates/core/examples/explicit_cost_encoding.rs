//! Adding the total cost as an extra variable multiplies the diagram: ten
//! free Booleans weighted 1, 2, 4, ... need one edge per reachable sum.

use mddconf::generate::{random_table, rng};
use mddconf::mdd::Mdd;
use mddconf::wcvd::encode_cost_variable;

fn main() {
    let sizes = [2; 10];
    let free = Mdd::from_rows(&sizes, &all_rows(&sizes)).unwrap();
    let powers: Vec<Vec<i64>> = (0..10).map(|j| vec![0, 1 << j]).collect();
    report("powers of two", &free, &powers);
    let small = random_table(&mut rng(2), &sizes, 3);
    report("costs 0..3", &free, &small);
}

fn report(name: &str, m: &Mdd, table: &[Vec<i64>]) {
    let enc = encode_cost_variable(m, table, m.num_vars(), 1 << 20, 10_000_000).unwrap();
    let mut per_layer = vec![0; enc.mdd.num_vars()];
    for e in 0..enc.mdd.num_edges() {
        per_layer[enc.mdd.edge_layer(e)] += 1;
    }
    println!(
        "{name}: {} nodes {} edges before, {} nodes {} edges after, {} cost values",
        m.num_nodes(),
        m.num_edges(),
        enc.mdd.num_nodes(),
        enc.mdd.num_edges(),
        enc.values.len()
    );
    println!("  edges per layer: {per_layer:?}");
}

fn all_rows(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![vec![]], |acc, &d| {
        acc.into_iter()
            .flat_map(|row| (0..d).map(move |a| [row.clone(), vec![a]].concat()))
            .collect()
    })
}
