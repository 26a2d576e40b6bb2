//! JSON shapes shared by the HTTP API and the CLI.

use serde::{Deserialize, Serialize};

use mddconf::artifact::{Artifact, CompileStats};
use mddconf::session::{Mode, Snapshot};

pub const WIRE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireVariable {
    pub name: String,
    pub labels: Vec<String>,
    pub valid: Vec<bool>,
    pub assigned: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireSnapshot {
    pub v: u32,
    pub variables: Vec<WireVariable>,
    /// `null` means unbounded.
    pub bounds: Vec<Option<f64>>,
    pub min_costs: Option<Vec<f64>>,
    pub frontier: Option<Vec<Vec<i64>>>,
    pub dead_end: bool,
    pub elapsed_ms: f64,
}

impl WireSnapshot {
    pub fn new(artifact: &Artifact, snapshot: &Snapshot, elapsed_ms: f64) -> WireSnapshot {
        let variables = artifact
            .variables()
            .iter()
            .enumerate()
            .map(|(i, var)| WireVariable {
                name: var.name.clone(),
                labels: var.labels.clone(),
                valid: (0..var.domain_size()).map(|a| snapshot.domains.contains(i, a)).collect(),
                assigned: snapshot.assignment.get(i).map(|a| var.labels[a].clone()),
            })
            .collect();
        WireSnapshot {
            v: WIRE_VERSION,
            variables,
            bounds: snapshot.bounds.iter().map(|&b| b.is_finite().then_some(b)).collect(),
            min_costs: snapshot.min_costs.clone(),
            frontier: snapshot.frontier.clone(),
            dead_end: snapshot.dead_end,
            elapsed_ms,
        }
    }

    /// `x1:{black} x3:{MIB}` over the unassigned variables.
    pub fn domains_line(&self) -> String {
        self.variables
            .iter()
            .filter(|v| v.assigned.is_none())
            .map(|v| {
                let labels: Vec<&str> = v
                    .labels
                    .iter()
                    .zip(&v.valid)
                    .filter(|(_, &ok)| ok)
                    .map(|(l, _)| l.as_str())
                    .collect();
                format!("{}:{{{}}}", v.name, labels.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One frontier tuple per line, `(c1, c2)`.
pub fn frontier_lines(frontier: &[Vec<i64>]) -> String {
    frontier
        .iter()
        .map(|t| format!("({})\n", t.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireStats {
    pub v: u32,
    pub bdd_nodes: usize,
    pub bdd_edges: usize,
    pub mdd_nodes: usize,
    pub mdd_edges: usize,
    pub reduced_nodes: usize,
    pub reduced_edges: usize,
    pub encoded_nodes: Option<usize>,
    pub encoded_edges: Option<usize>,
    /// Decimal string; counts can exceed what JSON numbers hold exactly.
    pub solutions: String,
    pub compile_ms: f64,
}

impl From<&CompileStats> for WireStats {
    fn from(s: &CompileStats) -> Self {
        WireStats {
            v: WIRE_VERSION,
            bdd_nodes: s.bdd_nodes,
            bdd_edges: s.bdd_edges,
            mdd_nodes: s.mdd_nodes,
            mdd_edges: s.mdd_edges,
            reduced_nodes: s.reduced_nodes,
            reduced_edges: s.reduced_edges,
            encoded_nodes: s.encoded_nodes,
            encoded_edges: s.encoded_edges,
            solutions: s.solutions.to_string(),
            compile_ms: s.compile_ms,
        }
    }
}

/// Session mode names on the wire.
pub fn parse_mode(name: &str, epsilon: Option<f64>) -> Option<Mode> {
    Some(match name {
        "plain" => Mode::Plain,
        "single" | "single-cost" => Mode::Single,
        "single_reduced" | "reduced" => Mode::SingleReduced,
        "bicost" => Mode::Bicost,
        "kcost" => Mode::Kcost,
        "bicost_approx" | "bicost-approx" => Mode::BicostApprox { epsilon: epsilon? },
        _ => return None,
    })
}

/// Stats as printed by `compile --stats`.
pub fn stats_lines(s: &CompileStats) -> String {
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    format!(
        "|V_B| {}\n|E_B| {}\n|V_M| {}\n|E_M| {}\n|V_M'| {}\n|E_M'| {}\nsolutions {}\n",
        s.bdd_nodes,
        s.bdd_edges,
        s.mdd_nodes,
        s.mdd_edges,
        opt(s.encoded_nodes),
        opt(s.encoded_edges),
        s.solutions
    )
}
