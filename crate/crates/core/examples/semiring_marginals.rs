//! One labeling pass per semiring: solution counts, weighted sums and
//! cheapest completions for every value.

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::tshirt_with_costs;
use mddconf::wcvd::{edge_weights, semiring_label, Counting, MinPlus, SumProduct};

fn main() {
    let model = tshirt_with_costs();
    let artifact = Artifact::compile(&model, CompileOptions::default()).unwrap();
    let m = artifact.mdd();
    let vars = artifact.variables();

    let ones: Vec<Vec<u128>> = m.domains().sizes().iter().map(|&d| vec![1; d]).collect();
    let count = semiring_label::<Counting>(m, &edge_weights(m, &ones)).unwrap();
    println!("solutions: {}", count.total);

    // value preferences as unnormalized probabilities
    let prefs: Vec<Vec<f64>> = vec![vec![0.4, 0.3, 0.2, 0.1], vec![0.2, 0.5, 0.3], vec![0.5, 0.5]];
    let weighted = semiring_label::<SumProduct>(m, &edge_weights(m, &prefs)).unwrap();

    let price = model.cost("price").unwrap().unary_table().to_vec();
    let cheapest = semiring_label::<MinPlus>(m, &edge_weights(m, &price)).unwrap();

    for (i, var) in vars.iter().enumerate() {
        for (a, label) in var.labels.iter().enumerate() {
            println!(
                "{}={label:<6} count {:>2}  probability {:.3}  cheapest {}",
                var.name,
                count.marginals[i][a],
                weighted.marginals[i][a] / weighted.total,
                cheapest.marginals[i][a]
            );
        }
    }
}
