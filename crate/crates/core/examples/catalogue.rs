//! A product list with prices compiles directly into a diagram.

use std::sync::Arc;

use mddconf::artifact::Artifact;
use mddconf::model::Catalogue;
use mddconf::session::{Mode, Session, SessionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/models/tshirt.csv"))?;
    let catalogue = Catalogue::parse(&text)?;
    let artifact = Arc::new(Artifact::from_catalogue(&catalogue)?);
    println!("{} rows, {} products, {} edges", catalogue.len(), artifact.stats().solutions, artifact.mdd().num_edges());

    let mut session = Session::new(artifact.clone(), SessionConfig::with_costs(Mode::Single, &["price"], &[4.0]))?;
    println!("price <= 4: {}", session.snapshot().domains);
    let x2 = artifact.var_index("x2").unwrap();
    session.assign(x2, 2)?;
    println!("large, price <= 4: {}", session.snapshot().domains);
    Ok(())
}
