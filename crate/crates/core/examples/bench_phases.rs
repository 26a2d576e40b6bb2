//! Label, domain and restrict timings on synthetic diagrams, as CSV.

use mddconf::bench::{run, write_csv, BenchOptions};

fn main() {
    for costs in [1, 2] {
        let rows = run(&BenchOptions {
            sizes: vec![10_000, 50_000],
            costs,
            repeats: 2,
            seed: 1,
        });
        println!("{costs} cost(s):");
        write_csv(&rows, std::io::stdout()).unwrap();
    }
}
