#![allow(dead_code)]

use std::collections::BTreeSet;

use catsd::document::{Model, ProblemDocument};
use catsd::hierarchy::{
    Action, Category, CriteriaHierarchy, CriterionTree, Interaction, LikenessThresholds, MutualEffect, Problem, Scale,
    SimDisFunction,
};
use catsd::likeness::ParameterSet;
use catsd::lp::{LpProblem, Relation, Sense};
use catsd::robust::{loss, Requirements};
use rand::Rng;

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> Model {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture");
    ProblemDocument::from_json(&text).expect("parse").compile().expect("compile")
}

pub fn soldiers() -> Model {
    load("soldiers.json")
}

/// Sampled weights of the soldier example, one row per category, elementary
/// criteria in hierarchy order.
pub const SOLDIER_WEIGHTS: [[f64; 9]; 4] = [
    [8.925, 16.269, 26.777, 7.537, 11.537, 14.347, 5.312, 2.361, 8.133],
    [4.809, 12.621, 16.140, 13.301, 16.621, 22.599, 2.615, 4.508, 7.274],
    [5.033, 2.304, 5.033, 12.239, 7.082, 12.239, 23.561, 23.561, 9.320],
    [5.557, 5.557, 22.231, 15.011, 18.649, 22.708, 1.838, 4.083, 4.083],
];

/// (k_{ArMk,PR}, k_{PF,TS}) per category. C2 and C4 are solved from the
/// published likeness of a3 and the normalization; for C1 and C3 only the sum
/// is determined and the split is arbitrary.
pub const SOLDIER_PAIRS: [(f64, f64); 4] = [(0.3, -1.498), (0.330687, -0.818687), (0.3, -0.672), (0.397775, -0.114775)];

pub const ANTAGONISTIC: f64 = -1.0;

/// Indices in the soldier hierarchy.
pub const ARMK: usize = 2;
pub const PS: usize = 3;
pub const PR: usize = 4;
pub const PF: usize = 6;
pub const TS: usize = 8;

pub fn soldier_parameters(problem: &Problem) -> Vec<ParameterSet> {
    (0..4)
        .map(|h| {
            ParameterSet::new(problem.categories[h].name.clone(), SOLDIER_WEIGHTS[h].to_vec())
                .with_pair(ARMK, PR, SOLDIER_PAIRS[h].0)
                .with_pair(PF, TS, SOLDIER_PAIRS[h].1)
                .with_antagonistic(PS, PF, ANTAGONISTIC)
        })
        .collect()
}

/// Per-criterion similarity-dissimilarity of a3 against b11, b21, b31, b41.
pub const A3_PER_CRITERION: [[f64; 9]; 4] = [
    [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.6, 0.0, -1.0],
    [0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, -1.0, 0.0, 1.0, -0.6, 0.0, -1.0],
    [1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.6, 1.0, 1.0],
];

/// (s, d, δ) of a3 against b_h1 at MS, MR, PoF and the root, as printed
/// (three decimals).
pub const A3_PARTIAL: [[[f64; 3]; 4]; 4] = [
    [[0.313, 0.0, 0.313], [0.225, 0.0, 0.225], [0.201, -1.0, 0.0], [0.266, -1.0, 0.0]],
    [[0.856, 0.0, 0.856], [0.746, 0.0, 0.543], [0.668, 0.0, 0.668], [0.773, 0.0, 0.773]],
    [[0.0, 0.0, 0.0], [0.387, -1.0, 0.0], [0.0, -1.0, 0.0], [0.0, -1.0, 0.0]],
    [[1.0, 0.0, 1.0], [0.733, 0.0, 0.733], [0.926, 0.0, 0.926], [0.842, 0.0, 0.842]],
];

/// Node paths matching the columns of [`A3_PARTIAL`].
pub const PARTIAL_NODES: [&str; 4] = ["g1", "g2", "g3", "g0"];

/// Flat four-criterion problem with {g3,g4} strengthening, {g2,g4}
/// weakening and g3 antagonistic on g4.
pub fn flat_problem() -> Problem {
    let f = SimDisFunction::symmetric([1.0, 2.0, 3.0, 4.0]);
    let leaves = (1..=4).map(|i| CriterionTree::leaf(format!("g{i}"), Scale::ratio(0.0, 10.0), f)).collect();
    let h = CriteriaHierarchy::build(CriterionTree::node("root", leaves)).unwrap();
    let b = Action { name: "b".into(), performance: vec![5.0; 4] };
    Problem::new(
        h,
        vec![],
        vec![Category { name: "C1".into(), reference_actions: vec![b] }],
        "C2",
        LikenessThresholds::uniform(vec![0.6]),
        vec![
            Interaction::Mutual { effect: MutualEffect::Strengthening, first: 2, second: 3 },
            Interaction::Mutual { effect: MutualEffect::Weakening, first: 1, second: 3 },
            Interaction::Antagonistic { criterion: 3, opponent: 2 },
        ],
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// LP oracle

/// Random bounded LP over 2 or 3 variables in a box.
pub fn random_lp(rng: &mut impl Rng) -> LpProblem {
    let n = rng.random_range(2..=3);
    let sense = if rng.random_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let obj = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let mut p = LpProblem::new(sense, obj);
    for j in 0..n {
        let lo = rng.random_range(-3..=0) as f64;
        let hi = lo + rng.random_range(1..=8) as f64;
        p.set_bounds(j, lo, hi);
    }
    for _ in 0..rng.random_range(1..=4) {
        let coeffs = (0..n).map(|j| (j, rng.random_range(-4..=4) as f64)).filter(|c| c.1 != 0.0).collect::<Vec<_>>();
        if coeffs.is_empty() {
            continue;
        }
        let rel = match rng.random_range(0..7) {
            0 => Relation::Eq,
            1..=3 => Relation::Le,
            _ => Relation::Ge,
        };
        p.add_row(coeffs, rel, rng.random_range(-6..=10) as f64);
    }
    p
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimal value by enumerating every vertex of a bounded LP; None when the
/// feasible set is empty.
pub fn vertex_optimum(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in &p.rows {
        let mut a = vec![0.0; n];
        r.coeffs.iter().for_each(|&(j, v)| a[j] += v);
        planes.push((a, r.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), p.bounds[j].0));
        planes.push((e, p.bounds[j].1));
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    combinations(planes.len(), n, 0, &mut pick, &mut |idx| {
        let rows: Vec<&(Vec<f64>, f64)> = idx.iter().map(|&i| &planes[i]).collect();
        let a = rows.iter().map(|r| r.0.clone()).collect();
        let b = rows.iter().map(|r| r.1).collect();
        if let Some(x) = solve_square(a, b) {
            if p.max_violation(&x) <= 1e-7 {
                let v = p.objective_value(&x);
                best = Some(match (best, p.sense) {
                    (None, _) => v,
                    (Some(b), Sense::Maximize) => b.max(v),
                    (Some(b), Sense::Minimize) => b.min(v),
                });
            }
        }
    });
    best
}

fn combinations(n: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..n {
        pick.push(i);
        combinations(n, k, i + 1, pick, f);
        pick.pop();
    }
}

// ---------------------------------------------------------------------------
// Classification oracle

pub struct LossInstance {
    pub marginals: Vec<Vec<f64>>,
    pub req: Requirements,
}

pub fn random_loss_instance(rng: &mut impl Rng) -> LossInstance {
    let na = rng.random_range(1..=4);
    let q = rng.random_range(1..=3);
    let marginals = (0..na).map(|_| (0..=q).map(|_| 10.0 * rng.random_range(0..=10) as f64).collect()).collect();
    let bound = |rng: &mut dyn rand::RngCore| if rng.random_bool(0.5) { None } else { Some(rng.random_range(0..=na)) };
    let req = Requirements {
        exactly_one: rng.random_bool(0.8),
        min_per_category: (0..q).map(|_| rng.random_range(0..=1)).collect(),
        max_per_category: (0..q).map(|_| bound(rng)).collect(),
        max_dummy: bound(rng),
    };
    LossInstance { marginals, req }
}

/// Every optimal assignment by exhaustive search, or None when no assignment
/// meets the requirements.
pub fn brute_force_optima(inst: &LossInstance) -> Option<(f64, BTreeSet<Vec<Vec<bool>>>)> {
    let na = inst.marginals.len();
    let w = inst.marginals[0].len();
    let q = w - 1;
    let rows: Vec<Vec<bool>> = (1u32..(1 << w))
        .filter(|m| !inst.req.exactly_one || m.count_ones() == 1)
        .map(|m| (0..w).map(|h| m & (1 << h) != 0).collect())
        .collect();
    let mut best: Option<(f64, BTreeSet<Vec<Vec<bool>>>)> = None;
    let mut idx = vec![0usize; na];
    loop {
        let y: Vec<Vec<bool>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let count = |h: usize| y.iter().filter(|r| r[h]).count();
        let ok = (0..q).all(|h| {
            count(h) >= inst.req.min_per_category.get(h).copied().unwrap_or(0)
                && inst.req.max_per_category.get(h).copied().flatten().is_none_or(|m| count(h) <= m)
        }) && inst.req.max_dummy.is_none_or(|m| count(q) <= m);
        if ok {
            let l = loss(&inst.marginals, &y);
            match &mut best {
                Some((b, set)) if (l - *b).abs() < 1e-9 => {
                    set.insert(y);
                }
                Some((b, _)) if l > *b => {}
                _ => best = Some((l, BTreeSet::from([y]))),
            }
        }
        let mut k = 0;
        loop {
            if k == na {
                return best;
            }
            idx[k] += 1;
            if idx[k] < rows.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
