//! Timing of the interactive phases on synthetic diagrams.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::generate::{random_table, rng, synthetic_mdd};
use crate::mdd::Mdd;
use crate::model::Assignment;
use crate::multicost::{label_pareto, valid_domains_pareto, CostMatrix};
use crate::wcvd::{label_scalar, valid_domains_scalar, EdgeCosts};

pub const LAYERS: usize = 20;
pub const DOMAIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Label,
    Domain,
    Restrict,
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub phase: Phase,
    pub size: usize,
    pub avg_ms: f64,
    pub max_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Approximate edge counts of the synthetic diagrams.
    pub sizes: Vec<usize>,
    /// 1 for a single cost, 2 for two costs.
    pub costs: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            sizes: vec![10_000, 100_000],
            costs: 1,
            repeats: 5,
            seed: 1,
        }
    }
}

/// A synthetic diagram with about `edges` edges.
pub fn diagram_of_size(seed: u64, edges: usize) -> Mdd {
    // nodes keep three quarters of the values on average
    let width = (edges * 4 / (3 * DOMAIN * LAYERS)).max(1);
    synthetic_mdd(&mut rng(seed), LAYERS, width, DOMAIN)
}

/// Costs in `0..=100` per value; two-cost bounds are set near the middle
/// of the solution cost range so frontiers are long.
pub fn run(options: &BenchOptions) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &size in &options.sizes {
        let m = diagram_of_size(options.seed, size);
        let mut rng = rng(options.seed ^ size as u64);
        let sizes = m.domains().sizes().to_vec();
        let tables: Vec<Vec<Vec<i64>>> = (0..options.costs.max(1)).map(|_| random_table(&mut rng, &sizes, 100)).collect();
        let bound = 50 * LAYERS as i64;
        let mut times = [Vec::new(), Vec::new(), Vec::new()];
        for _ in 0..options.repeats.max(1) {
            let var = rng.random_range(0..m.num_vars());
            let rho = Assignment::from_pairs([(var, rng.random_range(0..DOMAIN))]);
            let t = Instant::now();
            let (restricted, _) = m.restrict_tracked(&rho);
            times[2].push(ms(t));
            std::hint::black_box(&restricted);
            if options.costs <= 1 {
                let float: Vec<Vec<f64>> = tables[0].iter().map(|r| r.iter().map(|&c| c as f64).collect()).collect();
                let costs = EdgeCosts::from_unary(&m, &float);
                let t = Instant::now();
                let labels = label_scalar(&m, &costs).expect("nonempty");
                times[0].push(ms(t));
                let t = Instant::now();
                std::hint::black_box(valid_domains_scalar(&m, &costs, &labels, bound as f64, 0.0));
                times[1].push(ms(t));
            } else {
                let costs = CostMatrix::from_tables(&m, &tables).expect("valid tables");
                let bounds = vec![bound; tables.len()];
                let t = Instant::now();
                let labels = label_pareto(&m, &costs, &bounds).expect("nonempty");
                times[0].push(ms(t));
                let t = Instant::now();
                std::hint::black_box(valid_domains_pareto(&m, &costs, &labels, &bounds).expect("covered"));
                times[1].push(ms(t));
            }
        }
        let edges = m.num_edges();
        for (phase, samples) in [Phase::Label, Phase::Domain, Phase::Restrict].into_iter().zip(times) {
            rows.push(BenchRow {
                phase,
                size: edges,
                avg_ms: samples.iter().sum::<f64>() / samples.len() as f64,
                max_ms: samples.iter().cloned().fold(0.0, f64::max),
            });
        }
    }
    rows
}

/// Write rows with the header `phase,size,avg_ms,max_ms`.
pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema() {
        let rows = run(&BenchOptions {
            sizes: vec![2000],
            costs: 2,
            repeats: 1,
            seed: 3,
        });
        assert_eq!(rows.len(), 3);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("phase,size,avg_ms,max_ms\nlabel,"), "{text}");
        assert_eq!(text.lines().count(), 4);
    }
}
