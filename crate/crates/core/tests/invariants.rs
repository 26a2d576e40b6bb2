mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::bdd::{build_bdd, DEFAULT_NODE_LIMIT};
use mddconf::generate::{random_binary_cost, random_model, random_table, rng, ModelShape};
use mddconf::mdd::Mdd;
use mddconf::model::{brute_force_vd, parse_model, serialize_model, Assignment, CspModel};
use mddconf::multicost::{edge_valid, label_pareto, CostMatrix, ParetoList};
use mddconf::session::{Mode, Session, SessionConfig};
use mddconf::wcvd::encode_cost_variable;

use common::{domains_of, pareto, solutions, unary_cost};

const CAP: u128 = 1_000_000;

fn model(seed: u64) -> CspModel {
    random_model(&mut rng(seed), ModelShape::default())
}

fn compiled(model: &CspModel) -> Mdd {
    Artifact::compile(model, CompileOptions::default()).unwrap().mdd().clone()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bdd_mdd_and_reduced_agree_with_enumeration(seed in any::<u64>()) {
        let model = model(seed);
        let expected = solutions(&model);
        let (bdd, root, enc) = build_bdd(&model, DEFAULT_NODE_LIMIT).unwrap();
        prop_assert_eq!(&bdd.decoded_solutions(&enc, root, CAP).unwrap(), &expected);
        let raw = Mdd::from_bdd(&bdd, root, &enc);
        prop_assert_eq!(&raw.solutions(CAP).unwrap(), &expected);
        let merged = raw.expand().merge();
        prop_assert!(!merged.has_long_edges());
        prop_assert_eq!(&merged.solutions(CAP).unwrap(), &expected);
        let reduced = merged.reduce();
        prop_assert_eq!(&reduced.solutions(CAP).unwrap(), &expected);
        prop_assert!(reduced.num_edges() <= merged.num_edges());
        prop_assert_eq!(merged.count(), expected.len() as u128);
    }

    #[test]
    fn merge_is_idempotent(seed in any::<u64>()) {
        let m = compiled(&model(seed));
        prop_assert!(m.merge().same_structure(&m));
        prop_assert!(m.reduce().expand().merge().same_structure(&m));
    }

    #[test]
    fn restriction_matches_filtered_solutions_and_shrinks(seed in any::<u64>(), extra in any::<u64>()) {
        let model = model(seed);
        let m = compiled(&model);
        let n = model.num_vars();
        let mut r = rng(extra);
        let mut rho = Assignment::new();
        let mut previous = m.valid_domains();
        for v in 0..n {
            if !r.random_bool(0.5) {
                continue;
            }
            rho.insert(v, r.random_range(0..model.domain_sizes()[v]));
            let vd = m.restrict(&rho).valid_domains();
            let expected = brute_force_vd(&model, &rho, &[]).unwrap();
            prop_assert_eq!(&vd, &expected);
            prop_assert!(vd.is_subset(&previous));
            previous = vd;
        }
    }

    #[test]
    fn session_state_is_path_independent(seed in any::<u64>(), order_seed in any::<u64>()) {
        let mut model = model(seed);
        let sizes = model.domain_sizes();
        let mut r = rng(order_seed);
        model.add_cost(mddconf::model::CostSpec::unary_int("p", &random_table(&mut r, &sizes, 9))).unwrap();
        let artifact = Arc::new(Artifact::compile(&model, CompileOptions::default()).unwrap());
        prop_assume!(!artifact.mdd().is_empty());
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (v, &d) in sizes.iter().enumerate() {
            if r.random_bool(0.6) {
                pairs.push((v, r.random_range(0..d)));
            }
        }
        let config = SessionConfig::with_costs(Mode::Single, &["p"], &[r.random_range(0..30) as f64]);
        let mut forward = Session::new(artifact.clone(), config.clone()).unwrap();
        for &(v, a) in &pairs {
            forward.assign(v, a).unwrap();
        }
        // reverse order with a detour through an extra assign/unassign
        let mut backward = Session::new(artifact, config).unwrap();
        for &(v, a) in pairs.iter().rev() {
            backward.assign(v, a).unwrap();
        }
        if let Some(free) = (0..sizes.len()).find(|v| !pairs.iter().any(|p| p.0 == *v)) {
            let before = serde_json::to_string(backward.snapshot()).unwrap();
            backward.assign(free, 0).unwrap();
            backward.unassign(free).unwrap();
            prop_assert_eq!(serde_json::to_string(backward.snapshot()).unwrap(), before);
        }
        prop_assert_eq!(forward.snapshot(), backward.snapshot());
    }

    #[test]
    fn nonunary_costs_match_enumeration(seed in any::<u64>(), cost_seed in any::<u64>()) {
        let mut model = model(seed);
        let sizes = model.domain_sizes();
        let mut r = rng(cost_seed);
        model.add_cost(random_binary_cost(&mut r, "b", &sizes, 20)).unwrap();
        let sols = solutions(&model);
        prop_assume!(!sols.is_empty());
        let cost = model.cost("b").unwrap().clone();
        let k = cost.evaluate(&sols[r.random_range(0..sols.len())]);
        let artifact = Arc::new(Artifact::compile(&model, CompileOptions::default()).unwrap());
        let s = Session::new(artifact, SessionConfig::with_costs(Mode::Single, &["b"], &[k])).unwrap();
        let expected = brute_force_vd(&model, &Assignment::new(), &[(&cost, k)]).unwrap();
        prop_assert_eq!(&s.snapshot().domains, &expected);
        let min = sols.iter().map(|s| cost.evaluate(s)).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(s.snapshot().min_costs.as_ref().unwrap()[0], min);
    }

    #[test]
    fn cost_encoding_pairs_solutions_with_costs(seed in any::<u64>(), cost_seed in any::<u64>(), pos in 0usize..7) {
        let model = model(seed);
        let m = compiled(&model);
        prop_assume!(!m.is_empty());
        let table = random_table(&mut rng(cost_seed), &model.domain_sizes(), 6);
        let position = pos.min(m.num_vars());
        let enc = encode_cost_variable(&m, &table, position, 10_000, 1_000_000).unwrap();
        let mut expected: Vec<Vec<usize>> = Vec::new();
        for s in solutions(&model) {
            let c = unary_cost(&table, &s);
            let y = enc.values.binary_search(&c).unwrap();
            let mut t = s.clone();
            t.insert(position, y);
            expected.push(t);
        }
        expected.sort();
        prop_assert_eq!(enc.mdd.solutions(CAP).unwrap(), expected);
        prop_assert!(enc.mdd.merge().same_structure(&enc.mdd));
    }

    #[test]
    fn pareto_labels_give_the_frontier(seed in any::<u64>(), cost_seed in any::<u64>()) {
        let model = model(seed);
        let m = compiled(&model);
        prop_assume!(!m.is_empty());
        let mut r = rng(cost_seed);
        let sizes = model.domain_sizes();
        let c1 = random_table(&mut r, &sizes, 15);
        let c2 = random_table(&mut r, &sizes, 15);
        let costs = CostMatrix::from_tables(&m, &[c1.clone(), c2.clone()]).unwrap();
        let bounds = [r.random_range(0..60), r.random_range(0..60)];
        let labels = label_pareto(&m, &costs, &bounds).unwrap();
        for list in labels.up.iter().chain(&labels.down) {
            prop_assert!(list.is_valid());
            prop_assert!(list.len() as i64 <= bounds[0].min(bounds[1]) + 1);
        }
        let sols = solutions(&model);
        let within: Vec<(i64, i64)> = sols
            .iter()
            .map(|s| (unary_cost(&c1, s), unary_cost(&c2, s)))
            .filter(|&(a, b)| a <= bounds[0] && b <= bounds[1])
            .collect();
        let got: Vec<(i64, i64)> = labels.frontier().iter().map(|t| (t[0], t[1])).collect();
        prop_assert_eq!(got, pareto(within));
        let vd = mddconf::multicost::valid_domains_pareto(&m, &costs, &labels, &bounds).unwrap();
        let expected = domains_of(
            model.num_vars(),
            sols.iter().filter(|s| unary_cost(&c1, s) <= bounds[0] && unary_cost(&c2, s) <= bounds[1]),
        );
        prop_assert_eq!(vd, expected);
    }

    #[test]
    fn edge_valid_matches_exhaustive_check(
        k in 2usize..4,
        up in prop::collection::vec(prop::collection::vec(0i64..20, 3), 0..8),
        down in prop::collection::vec(prop::collection::vec(0i64..20, 3), 0..8),
        c in prop::collection::vec(0i64..10, 3),
        bounds in prop::collection::vec(0i64..40, 3),
    ) {
        let cut = |v: &Vec<Vec<i64>>| v.iter().map(|t| t[..k].to_vec()).collect::<Vec<_>>();
        let (up, down) = (cut(&up), cut(&down));
        let (c, bounds) = (&c[..k], &bounds[..k]);
        let exhaustive = up.iter().any(|a| {
            down.iter().any(|b| (0..k).all(|j| a[j] + b[j] + c[j] <= bounds[j]))
        });
        let up = ParetoList::from_tuples(k, up);
        let down = ParetoList::from_tuples(k, down);
        prop_assert_eq!(edge_valid(&up, &down, c, bounds), exhaustive);
    }

    #[test]
    fn pareto_merge_is_the_frontier_of_the_union(
        a in prop::collection::vec(prop::collection::vec(0i64..12, 2), 0..10),
        b in prop::collection::vec(prop::collection::vec(0i64..12, 2), 0..10),
    ) {
        let la = ParetoList::from_tuples(2, a.clone());
        let lb = ParetoList::from_tuples(2, b.clone());
        let merged: Vec<(i64, i64)> = la.merge(&lb).iter().map(|t| (t[0], t[1])).collect();
        let union: Vec<(i64, i64)> = a.iter().chain(&b).map(|t| (t[0], t[1])).collect();
        prop_assert_eq!(merged, pareto(union));
    }

    #[test]
    fn model_documents_round_trip(seed in any::<u64>()) {
        let model = model(seed);
        let text = serialize_model(&model);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(solutions(&back), solutions(&model));
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn artifact_files_round_trip(seed in any::<u64>()) {
        let model = model(seed);
        let artifact = Artifact::compile(&model, CompileOptions::default()).unwrap();
        let back = Artifact::from_json(&artifact.to_json()).unwrap();
        prop_assert!(back.mdd().same_structure(artifact.mdd()));
        prop_assert_eq!(back.stats(), artifact.stats());
    }
}

#[test]
fn valid_domains_are_sets_of_solution_values() {
    // spot check of the oracle helpers against a hand-computed case
    let model = mddconf::model::tshirt();
    let sols = solutions(&model);
    assert_eq!(sols.len(), 11);
    let vd = domains_of(3, &sols);
    assert_eq!(vd.var(0), &BTreeSet::from([0, 1, 2, 3]));
}
