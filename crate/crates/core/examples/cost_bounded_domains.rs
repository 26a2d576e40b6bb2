//! Valid domains under a price bound, swept from 0 to the most expensive
//! solution.

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::tshirt_with_costs;
use mddconf::wcvd::{label_scalar, valid_domains_scalar, EdgeCosts};

fn main() {
    let model = tshirt_with_costs();
    let artifact = Artifact::compile(&model, CompileOptions::default()).expect("compiles");
    let m = artifact.mdd();
    let price = model.cost("price").unwrap();
    let costs = EdgeCosts::from_unary(m, price.unary_table());
    let labels = label_scalar(m, &costs).expect("has solutions");
    println!("cheapest T-shirt costs {}", labels.min_cost());
    for k in 0..=6 {
        println!("price <= {k}: {}", valid_domains_scalar(m, &costs, &labels, k as f64, 0.0));
    }
}
