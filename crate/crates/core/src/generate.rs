//! Seeded random instances for tests, verification and benchmarks.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mdd::{LayerDomains, Mdd};
use crate::model::{CostComponent, CostSpec, CspModel, Variable};

/// Shape limits for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub max_vars: usize,
    pub max_domain: usize,
    pub max_constraints: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_vars: 6,
            max_domain: 5,
            max_constraints: 6,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random model mixing table constraints and rule expressions. It may
/// have no solutions.
pub fn random_model(rng: &mut impl Rng, shape: ModelShape) -> CspModel {
    let n = rng.random_range(1..=shape.max_vars);
    let vars: Vec<Variable> = (0..n)
        .map(|i| {
            let d = rng.random_range(1..=shape.max_domain);
            Variable::new(format!("x{i}"), (0..d).map(|a| format!("v{a}")))
        })
        .collect();
    let sizes: Vec<usize> = vars.iter().map(Variable::domain_size).collect();
    let mut model = CspModel::new(vars).expect("valid variables");
    let k = rng.random_range(0..=shape.max_constraints);
    for _ in 0..k {
        if n >= 2 && rng.random_bool(0.5) {
            let text = random_rule(rng, &sizes);
            model.add_expr(&text).expect("generated rule parses");
        } else {
            let arity = rng.random_range(1..=n.min(3));
            let mut scope: Vec<usize> = (0..n).collect();
            scope.sort_by_key(|_| rng.random::<u32>());
            scope.truncate(arity);
            let density = rng.random_range(0.3..0.9);
            let mut tuples = Vec::new();
            let mut tuple = vec![0; arity];
            loop {
                if rng.random_bool(density) {
                    tuples.push(tuple.clone());
                }
                let mut i = 0;
                while i < arity {
                    tuple[i] += 1;
                    if tuple[i] < sizes[scope[i]] {
                        break;
                    }
                    tuple[i] = 0;
                    i += 1;
                }
                if i == arity {
                    break;
                }
            }
            model.add_table(scope, tuples).expect("generated table is valid");
        }
    }
    model
}

fn random_rule(rng: &mut impl Rng, sizes: &[usize]) -> String {
    let n = sizes.len();
    let x = rng.random_range(0..n);
    let mut y = rng.random_range(0..n - 1);
    if y >= x {
        y += 1;
    }
    let ops = ["=", "!=", "<", "<=", ">", ">="];
    match rng.random_range(0..3) {
        0 => format!("x{x} {} x{y}", ops.choose(rng).unwrap()),
        1 => {
            let a = rng.random_range(0..sizes[x]);
            let b = rng.random_range(0..sizes[y]);
            format!("x{x} = v{a} -> x{y} != v{b}")
        }
        _ => {
            let c = rng.random_range(0..(sizes[x] + sizes[y]) as i64);
            format!("x{x} + x{y} {} {c}", ops.choose(rng).unwrap())
        }
    }
}

/// A unary cost with integer entries drawn from `0..=max`.
pub fn random_unary_cost(rng: &mut impl Rng, name: &str, sizes: &[usize], max: i64) -> CostSpec {
    let table: Vec<Vec<i64>> = sizes
        .iter()
        .map(|&d| (0..d).map(|_| rng.random_range(0..=max)).collect())
        .collect();
    CostSpec::unary_int(name, &table)
}

/// A cost with a unary part and one binary component, entries in `0..=max`.
pub fn random_binary_cost(rng: &mut impl Rng, name: &str, sizes: &[usize], max: i64) -> CostSpec {
    let cost = random_unary_cost(rng, name, sizes, max);
    if sizes.len() < 2 {
        return cost;
    }
    let x = rng.random_range(0..sizes.len());
    let mut y = rng.random_range(0..sizes.len() - 1);
    if y >= x {
        y += 1;
    }
    let mut table = std::collections::HashMap::new();
    for a in 0..sizes[x] {
        for b in 0..sizes[y] {
            if rng.random_bool(0.5) {
                table.insert(vec![a, b], rng.random_range(0..=max) as f64);
            }
        }
    }
    cost.with_component(CostComponent {
        scope: vec![x, y],
        table,
        default: rng.random_range(0..=max) as f64,
    })
}

/// A layered diagram with `layers` variables of domain
/// `domain` and up to `width` nodes per layer. Every node carries a random
/// subset of at least half the values, so nodes rarely merge; edge targets
/// are random but every node keeps an incoming edge.
pub fn synthetic_mdd(rng: &mut impl Rng, layers: usize, width: usize, domain: usize) -> Mdd {
    assert!(layers >= 1 && width >= 1 && domain >= 1);
    let mut layer_of = vec![0usize];
    let mut edges = Vec::new();
    let mut current: Vec<usize> = vec![0];
    for j in 0..layers {
        let mut slots = Vec::new();
        for &s in &current {
            let keep = rng.random_range(domain.div_ceil(2)..=domain);
            let mut values: Vec<usize> = (0..domain).collect();
            values.shuffle(rng);
            slots.extend(values[..keep].iter().map(|&a| (s, a)));
        }
        slots.shuffle(rng);
        let next_width = if j + 1 == layers { 1 } else { width.min(slots.len()) };
        let next: Vec<usize> = (0..next_width).map(|k| layer_of.len() + k).collect();
        layer_of.extend(std::iter::repeat_n(j + 1, next_width));
        for (k, (s, a)) in slots.into_iter().enumerate() {
            // every next-layer node gets at least one incoming edge
            let d = if k < next_width { next[k] } else { next[rng.random_range(0..next_width)] };
            edges.push((s, d, a));
        }
        current = next;
    }
    Mdd::from_parts(LayerDomains::full(&vec![domain; layers]), &layer_of, &edges).expect("well formed")
}

/// Integer unary table with entries in `0..=max`.
pub fn random_table(rng: &mut impl Rng, sizes: &[usize], max: i64) -> Vec<Vec<i64>> {
    sizes
        .iter()
        .map(|&d| (0..d).map(|_| rng.random_range(0..=max)).collect())
        .collect()
}
