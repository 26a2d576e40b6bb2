//! Three cost functions bounded at once.

use mddconf::generate::{random_table, rng};
use mddconf::mdd::Mdd;
use mddconf::multicost::kcost_valid_domains;

fn main() {
    let sizes = [4, 4, 4, 4];
    let m = Mdd::from_rows(&sizes, &all_rows(&sizes)).unwrap();
    let mut r = rng(11);
    let tables: Vec<_> = (0..3).map(|_| random_table(&mut r, &sizes, 5)).collect();
    // tighten all three bounds until nothing is left
    for k in (0..=9).rev() {
        let bounds = [k, k, k + 1];
        let vd = kcost_valid_domains(&m, &tables, &bounds).unwrap();
        println!("bounds {bounds:?}: {vd}");
        if vd.has_empty() {
            break;
        }
    }
}

fn all_rows(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![vec![]], |acc, &d| {
        acc.into_iter()
            .flat_map(|row| (0..d).map(move |a| [row.clone(), vec![a]].concat()))
            .collect()
    })
}
