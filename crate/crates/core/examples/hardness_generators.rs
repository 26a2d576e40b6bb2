//! Bounded multi-cost queries encode partition and bin packing: the
//! generated instance has a valid configuration exactly when the items
//! can be split or packed.

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::multicost::{bpp_instance, kcost_valid_domains, tpp_instance, HardInstance};

fn nonempty(inst: &HardInstance) -> bool {
    let artifact = Artifact::compile(&inst.model, CompileOptions::default()).unwrap();
    let tables: Vec<_> = inst.model.costs().iter().map(|c| c.integer_table().unwrap()).collect();
    !kcost_valid_domains(artifact.mdd(), &tables, &inst.bounds).unwrap().has_empty()
}

fn main() {
    for items in [vec![3, 5, 8], vec![1, 1, 3], vec![4, 7, 2, 9, 6, 2]] {
        println!("partition {items:?}: {}", nonempty(&tpp_instance(&items)));
    }
    for (items, bins, cap) in [(vec![2, 2, 2], 2, 3), (vec![2, 2], 2, 3), (vec![2, 2, 2], 3, 2), (vec![5, 4, 3, 3, 1], 2, 8)] {
        println!("pack {items:?} into {bins} bins of {cap}: {}", nonempty(&bpp_instance(&items, bins, cap)));
    }
}
