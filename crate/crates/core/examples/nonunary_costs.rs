//! A cost that depends on a pair of variables: a surcharge for white with
//! the STW print. The diagram is unfolded so every edge has a fixed cost.

use std::collections::HashMap;

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::{tshirt, CostComponent, CostSpec};
use mddconf::wcvd::{expand_nonunary, label_scalar, valid_domains_scalar};

fn main() {
    let model = tshirt();
    let artifact = Artifact::compile(&model, CompileOptions::default()).unwrap();
    let base = CostSpec::unary_int("price", &[vec![0, 1, 2, 3], vec![0, 1, 2], vec![0, 1]]);
    let surcharge = CostComponent {
        scope: vec![0, 2],
        table: HashMap::from([(vec![1, 1], 4.0)]),
        default: 0.0,
    };
    let cost = base.with_component(surcharge);

    let (expanded, costs) = expand_nonunary(artifact.mdd(), &cost, 1_000_000).unwrap();
    println!(
        "merged {} edges, unfolded {} edges",
        artifact.mdd().num_edges(),
        expanded.num_edges()
    );
    let labels = label_scalar(&expanded, &costs).unwrap();
    for k in [3.0, 4.0, 6.0, 7.0] {
        println!("price <= {k}: {}", valid_domains_scalar(&expanded, &costs, &labels, k, 0.0));
    }
}
