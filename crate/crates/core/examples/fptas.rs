//! Scaling the first cost trades exactness for shorter Pareto lists: the
//! approximate domains contain the exact ones and may admit values whose
//! cheapest witness exceeds the first bound by at most a factor 1 + eps.

use std::time::Instant;

use mddconf::generate::{random_table, rng, synthetic_mdd};
use mddconf::multicost::{approx_bicost_valid_domains, kcost_valid_domains, scale_costs};

fn main() {
    let mut r = rng(5);
    let m = synthetic_mdd(&mut r, 12, 60, 6);
    let sizes = m.domains().sizes().to_vec();
    let c1 = random_table(&mut r, &sizes, 400);
    let c2 = random_table(&mut r, &sizes, 20);
    let bounds = [1500, 90];

    let t = Instant::now();
    let exact = kcost_valid_domains(&m, &[c1.clone(), c2.clone()], &bounds).unwrap();
    println!("exact in {:?}: {exact}", t.elapsed());
    for eps in [0.05, 0.2, 0.5] {
        let scaled = scale_costs(&c1, bounds[0], eps, m.num_vars()).unwrap();
        let t = Instant::now();
        let approx = approx_bicost_valid_domains(&m, &c1, &c2, bounds, eps).unwrap();
        println!(
            "eps {eps}: factor {:.1}, scaled bound {}, superset of exact: {}, in {:?}",
            scaled.factor,
            scaled.bound,
            exact.is_subset(&approx),
            t.elapsed()
        );
    }
}
