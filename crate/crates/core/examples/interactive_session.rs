//! A scripted configuration: choices, a budget change, an undo. Each step
//! prints what is still selectable.

use std::sync::Arc;

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::model::tshirt_with_costs;
use mddconf::session::{Mode, Session, SessionConfig, Snapshot};

fn show(artifact: &Artifact, step: &str, snap: &Snapshot) {
    let parts: Vec<String> = artifact
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| match snap.assignment.get(i) {
            Some(a) => format!("{}={}", v.name, v.labels[a]),
            None => {
                let labels: Vec<&str> = snap.domains.var(i).iter().map(|&a| v.labels[a].as_str()).collect();
                format!("{}:{{{}}}", v.name, labels.join(","))
            }
        })
        .collect();
    let min = snap.min_costs.as_ref().map(|m| m[0]);
    println!("{step:<22} {}  cheapest {min:?}{}", parts.join(" "), if snap.dead_end { "  DEAD END" } else { "" });
}

fn main() {
    let artifact = Arc::new(Artifact::compile(&tshirt_with_costs(), CompileOptions::default()).unwrap());
    let mut s = Session::new(artifact.clone(), SessionConfig::with_costs(Mode::Single, &["price"], &[3.0])).unwrap();
    show(&artifact, "budget 3", s.snapshot());
    s.assign(0, 1).unwrap();
    show(&artifact, "white", s.snapshot());
    s.set_bounds(&[5.0]).unwrap();
    show(&artifact, "budget 5", s.snapshot());
    s.assign(2, 1).unwrap();
    show(&artifact, "STW", s.snapshot());
    s.unassign(0).unwrap();
    show(&artifact, "undo white", s.snapshot());
    s.assign(0, 3).unwrap();
    s.set_bounds(&[3.0]).unwrap();
    show(&artifact, "blue, budget 3", s.snapshot());
}
