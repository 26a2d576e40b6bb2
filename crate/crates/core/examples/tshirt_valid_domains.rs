//! Compile the T-shirt model from its JSON document and print valid
//! domains before and after choosing a size.

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::{parse_model, Assignment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/models/tshirt.json"))?;
    let model = parse_model(&text)?;
    let artifact = Artifact::compile(&model, CompileOptions::default())?;
    let stats = artifact.stats();
    println!(
        "BDD {} nodes, MDD {} nodes / {} edges, {} solutions",
        stats.bdd_nodes, stats.mdd_nodes, stats.mdd_edges, stats.solutions
    );

    let show = |rho: &Assignment| {
        let vd = artifact.mdd().restrict(rho).valid_domains();
        for (i, var) in artifact.variables().iter().enumerate() {
            let labels: Vec<&str> = vd.var(i).iter().map(|&a| var.labels[a].as_str()).collect();
            println!("  {}: {{{}}}", var.name, labels.join(", "));
        }
    };
    println!("no choices:");
    show(&Assignment::new());

    let x2 = artifact.var_index("x2").unwrap();
    let small = artifact.variables()[x2].value_of("small").unwrap();
    println!("x2 = small:");
    show(&Assignment::from_pairs([(x2, small)]));
    Ok(())
}
