//! Price and quality penalty together: the efficient frontier and how bound
//! changes reuse labels until a bound is relaxed past them.

use std::sync::Arc;

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::tshirt_with_costs;
use mddconf::session::{Mode, Session, SessionConfig};

fn main() {
    let artifact = Arc::new(Artifact::compile(&tshirt_with_costs(), CompileOptions::default()).unwrap());
    let config = SessionConfig::with_costs(Mode::Bicost, &["price", "quality"], &[6.0, 5.0]);
    let mut session = Session::new(artifact, config).unwrap();
    println!("frontier (price, quality):");
    for t in session.snapshot().frontier.as_ref().unwrap() {
        println!("  ({}, {})", t[0], t[1]);
    }
    for bounds in [[2.0, 3.0], [1.0, 4.0], [6.0, 5.0]] {
        let relabeled = session.set_bounds(&bounds).unwrap();
        println!("bounds {bounds:?}: {} relabeled={relabeled}", session.snapshot().domains);
    }
    session.assign(1, 0).unwrap();
    println!("after x2=small: {} relabels so far {}", session.snapshot().domains, session.relabel_count());
}
