mod common;

use std::collections::BTreeSet;

use catsd::hierarchy::{
    Action, Category, CriteriaHierarchy, CriterionTree, LikenessThresholds, NodeId, Problem, Scale, SimDisFunction,
};
use catsd::likeness::{assign, compare, likeness_to_set, partial_likeness, ParameterSet};
use catsd::lp::{solve_lp, LpOutcome, Relation, Row};
use catsd::robust::{LossProblem, DEFAULT_MAX_SOLUTIONS};
use catsd::sampler::{compile_polytope, hit_and_run, HarConfig};
use catsd::srf::{
    build_constraints, feasibility_check, srf_deterministic, BlankCards, Card, CardDeck, CategoryDecks, Constraint,
    ConstraintSystem, Variable,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn soldier_like_parameters(cat: &str, w: &[f64], pairs: (f64, f64), ant: f64) -> ParameterSet {
    ParameterSet::new(cat, w.to_vec()).with_pair(ARMK, PR, pairs.0).with_pair(PF, TS, pairs.1).with_antagonistic(PS, PF, ant)
}

fn flat(n: usize) -> CriteriaHierarchy {
    let f = SimDisFunction::asymmetric([1.0, 2.0, 4.0, 5.0], [1.0, 3.0, 4.0, 6.0]);
    let leaves = (0..n).map(|i| CriterionTree::leaf(format!("x{i}"), Scale::ratio(0.0, 10.0), f)).collect();
    CriteriaHierarchy::build(CriterionTree::node("root", leaves)).unwrap()
}

fn flat_single_category(n: usize) -> Problem {
    let b = Action { name: "b".into(), performance: vec![5.0; n] };
    Problem::new(
        flat(n),
        vec![],
        vec![Category { name: "C1".into(), reference_actions: vec![b] }],
        "C2",
        LikenessThresholds::uniform(vec![0.6]),
        vec![],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_matches_vertex_enumeration(seed in any::<u64>()) {
        let lp = random_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        match (solve_lp(&lp).unwrap(), vertex_optimum(&lp)) {
            (LpOutcome::Optimal(s), Some(v)) => {
                prop_assert!((s.value - v).abs() < 1e-6, "{} vs {v}", s.value);
                prop_assert!(lp.max_violation(&s.point) < 1e-7);
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => prop_assert!(false, "{got:?} vs {want:?}"),
        }
    }

    #[test]
    fn ilp_enumeration_matches_brute_force(seed in any::<u64>()) {
        let inst = random_loss_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let q = inst.marginals[0].len() - 1;
        let lp = LossProblem {
            categories: (1..=q).map(|h| format!("C{h}")).collect(),
            dummy: format!("C{}", q + 1),
            marginals: inst.marginals.clone(),
        };
        match (brute_force_optima(&inst), lp.enumerate(&inst.req, DEFAULT_MAX_SOLUTIONS)) {
            (None, Err(_)) => {}
            (Some((l, set)), Ok(sols)) => {
                let found: BTreeSet<_> = sols.iter().map(|s| s.y.clone()).collect();
                prop_assert_eq!(found.len(), sols.len());
                prop_assert_eq!(found, set);
                prop_assert!((sols[0].loss - l).abs() < 1e-6);
            }
            (b, g) => prop_assert!(false, "oracle {:?} vs {:?}", b.map(|x| x.0), g.map(|s| s.len())),
        }
    }

    #[test]
    fn assignments_ignore_common_scaling(
        w in prop::collection::vec(1.0f64..30.0, 9),
        kap in 0.0f64..2.0,
        kpt in -1.0f64..0.0,
        ant in -1.0f64..0.0,
        factor in 1e-3f64..1e3,
        a in 0usize..7,
    ) {
        let m = soldiers();
        let p = &m.problem;
        let params: Vec<_> = (0..4).map(|h| soldier_like_parameters(&p.categories[h].name, &w, (kap, kpt), ant)).collect();
        let scaled: Vec<_> = params.iter().map(|s| s.scaled(factor)).collect();
        for r in p.hierarchy.internal_nodes() {
            let x = assign(p, &p.actions[a].performance, &r, &params).unwrap();
            let y = assign(p, &p.actions[a].performance, &r, &scaled).unwrap();
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn duplicate_references_do_not_change_likeness(
        w in prop::collection::vec(1.0f64..30.0, 9),
        a in 0usize..7,
        h in 0usize..4,
    ) {
        let m = soldiers();
        let p = &m.problem;
        let params = soldier_like_parameters("C", &w, (0.5, -0.5), -0.5);
        let b: Vec<&[f64]> = p.categories[h].reference_actions.iter().map(|b| b.performance.as_slice()).collect();
        let twice: Vec<&[f64]> = b.iter().chain(b.iter()).copied().collect();
        for r in p.hierarchy.internal_nodes() {
            let x = likeness_to_set(&p.hierarchy, &p.actions[a].performance, &b, &r, &params).unwrap();
            let y = likeness_to_set(&p.hierarchy, &p.actions[a].performance, &twice, &r, &params).unwrap();
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn no_interactions_reduce_to_weighted_mean(
        w in prop::collection::vec(0.1f64..10.0, 4),
        a in prop::collection::vec(0.0f64..10.0, 4),
        b in prop::collection::vec(0.0f64..10.0, 4),
    ) {
        let h = flat(4);
        let p = ParameterSet::new("C1", w.clone());
        let f = compare(&h, &a, &b);
        let got = partial_likeness(&h, &a, &b, &NodeId::root(), &p).unwrap();
        let total: f64 = w.iter().sum();
        let s: f64 = w.iter().zip(&f).map(|(k, v)| k * v.max(0.0)).sum::<f64>() / total;
        let d: f64 = f.iter().map(|v| 1.0 + v.min(0.0)).product::<f64>() - 1.0;
        prop_assert!((got.similarity - s).abs() < 1e-12);
        prop_assert!((got.dissimilarity - d).abs() < 1e-12);
        prop_assert!((got.likeness - s * (1.0 + d)).abs() < 1e-12);
    }

    #[test]
    fn deterministic_deck_satisfies_its_constraints(
        order in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
        blanks in prop::collection::vec(0u32..4, 4),
        z in 1.5f64..30.0,
    ) {
        let p = flat_single_category(5);
        let h = &p.hierarchy;
        let deck = CardDeck {
            node: NodeId::root(),
            levels: order.iter().map(|&i| vec![Card::parse(h, &format!("x{i}")).unwrap()]).collect(),
            blank_cards: blanks.iter().map(|&n| BlankCards::exactly(n)).collect(),
            z: (z, z),
        };
        let r = srf_deterministic(&p, &deck).unwrap();
        let total: f64 = r.weights.iter().map(|w| w.1).sum();
        prop_assert!((total - 100.0).abs() < 1e-9);
        let weight = |i: usize| r.weight(&h.elementary_criteria()[i]).unwrap();
        for pair in order.windows(2) {
            prop_assert!(weight(pair[0]) < weight(pair[1]));
        }
        prop_assert!((weight(order[4]) / weight(order[0]) - z).abs() < 1e-9);

        let sys = build_constraints(&p, 0, &CategoryDecks::from([(NodeId::root(), deck)])).unwrap();
        let mut x = vec![0.0; sys.num_vars()];
        for i in 0..5 {
            x[i] = weight(i);
        }
        x[5] = r.unit * weight(order[0]);
        prop_assert!(sys.max_violation(&x) < 1e-9);
        prop_assert!(sys.strict_margin(&x) > 0.0);
        prop_assert!(feasibility_check(&sys).unwrap().is_feasible());
    }

    #[test]
    fn samples_keep_strict_margin(
        caps in prop::collection::vec(0.5f64..5.0, 2..5),
        total in 1.0f64..8.0,
        seed in any::<u64>(),
    ) {
        let n = caps.len();
        let mut rows: Vec<Constraint> = (0..n)
            .map(|j| Constraint { row: Row::new(vec![(j, 1.0)], Relation::Ge, 0.0), strict: true, label: String::new() })
            .collect();
        rows.push(Constraint {
            row: Row::new((0..n).map(|j| (j, 1.0)).collect(), Relation::Le, total),
            strict: true,
            label: String::new(),
        });
        let sys = ConstraintSystem {
            category: "T".into(),
            variables: (0..n).map(|t| Variable::Weight { criterion: t }).collect(),
            bounds: caps.iter().map(|&c| (f64::NEG_INFINITY, c)).collect(),
            constraints: rows,
        };
        let eps = feasibility_check(&sys).unwrap().epsilon().unwrap();
        let poly = compile_polytope(&sys, eps).unwrap();
        let config = HarConfig { seed, burn_in: 50, thinning: 2 };
        let batch = hit_and_run(&poly, &poly.center, 300, config, 0).unwrap();
        for x in &batch.points {
            prop_assert!(sys.strict_margin(x) >= poly.tau / 2.0);
            prop_assert!(sys.max_violation(x) <= 1e-9);
        }
    }
}
