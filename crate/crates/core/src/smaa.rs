//! Monte Carlo acceptability of assignments over sampled parameters.

use std::collections::BTreeMap;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hierarchy::{NodeId, Problem};
use crate::likeness::{compare, CategorySet, NodeScope, ParameterSet};
use crate::sampler::SampleBatch;
use crate::srf::ConstraintSystem;

/// Exact-set counts per node and action.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentDistribution {
    pub categories: Vec<String>,
    pub dummy: String,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    pub samples: u64,
    /// `counts[node][action]`: occurrences of each assignment set.
    pub counts: Vec<Vec<BTreeMap<CategorySet, u64>>>,
}

impl AssignmentDistribution {
    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn node_index(&self, node: &NodeId) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == node)
            .ok_or_else(|| Error::UnknownNode(node.to_string()))
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Parse(format!("unknown action `{name}`")))
    }

    pub fn category_set(&self, names: &[&str]) -> Result<CategorySet> {
        let mut s = CategorySet::default();
        for n in names {
            let h = self
                .categories
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::UnknownCategory(n.to_string()))?;
            s.insert(h);
        }
        Ok(s)
    }

    pub fn set_labels(&self, set: CategorySet) -> Vec<String> {
        if set.is_dummy() {
            vec![self.dummy.clone()]
        } else {
            set.iter().map(|h| self.categories[h].clone()).collect()
        }
    }

    fn percent(&self, count: u64) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.samples as f64
        }
    }

    /// Exact-set frequencies in percent, most frequent first.
    pub fn exact_sets(&self, node: usize, action: usize) -> Vec<(CategorySet, f64)> {
        let mut v: Vec<(CategorySet, u64)> = self.counts[node][action].iter().map(|(s, c)| (*s, *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(s, c)| (s, self.percent(c))).collect()
    }

    pub fn exact(&self, node: usize, action: usize, set: CategorySet) -> f64 {
        self.percent(self.counts[node][action].get(&set).copied().unwrap_or(0))
    }

    /// b^h for h in 0..=q, where index q is the dummy.
    pub fn marginals(&self, node: usize, action: usize) -> Vec<f64> {
        let q = self.num_categories();
        let mut m = vec![0u64; q + 1];
        for (set, &c) in &self.counts[node][action] {
            if set.is_dummy() {
                m[q] += c;
            } else {
                set.iter().for_each(|h| m[h] += c);
            }
        }
        m.into_iter().map(|c| self.percent(c)).collect()
    }

    /// Marginal matrix `[action][h]` at a node.
    pub fn marginal_matrix(&self, node: usize) -> Vec<Vec<f64>> {
        (0..self.actions.len()).map(|a| self.marginals(node, a)).collect()
    }

    /// Percentage of samples whose assignment set contains `set`.
    pub fn containment_probability(&self, node: usize, action: usize, set: CategorySet) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::UnknownCategory("empty category set".into()));
        }
        if set.iter().any(|h| h >= self.num_categories()) {
            return Err(Error::UnknownCategory(format!("{set:?}")));
        }
        let c = self.counts[node][action]
            .iter()
            .filter(|(s, _)| s.0 & set.0 == set.0)
            .map(|(_, c)| c)
            .sum();
        Ok(self.percent(c))
    }
}

/// Reads every point of a batch as a parameter set.
pub fn decode_batch(problem: &Problem, sys: &ConstraintSystem, batch: &SampleBatch) -> Vec<ParameterSet> {
    batch.points.iter().map(|x| sys.to_parameters(problem, x)).collect()
}

/// Evaluates the assignment at each node for every sample. `params[h][i]` is
/// the i-th sampled parameter set of category h.
pub fn run_smaa(problem: &Problem, params: &[Vec<ParameterSet>], nodes: &[NodeId]) -> Result<AssignmentDistribution> {
    let q = problem.num_categories();
    if params.len() != q {
        return Err(Error::BatchMismatch(format!("{} batches for {q} categories", params.len())));
    }
    let samples = params[0].len();
    if let Some(b) = params.iter().find(|b| b.len() != samples) {
        return Err(Error::BatchMismatch(format!("batch sizes {samples} and {}", b.len())));
    }
    let h = &problem.hierarchy;
    for batch in params {
        for p in batch {
            p.validate(h, &problem.interactions)?;
        }
    }
    let scopes: Vec<NodeScope> = nodes.iter().map(|r| NodeScope::new(h, r)).collect::<Result<_>>()?;
    let thresholds: Vec<Vec<f64>> =
        nodes.iter().map(|r| (0..q).map(|c| problem.thresholds.get(r, c)).collect()).collect();
    // profiles[a][h][ℓ]: per-criterion values of action a against b_hℓ.
    let profiles: Vec<Vec<Vec<Vec<f64>>>> = problem
        .actions
        .iter()
        .map(|a| {
            problem
                .categories
                .iter()
                .map(|c| c.reference_actions.iter().map(|b| compare(h, &a.performance, &b.performance)).collect())
                .collect()
        })
        .collect();
    let na = problem.actions.len();
    let cells = nodes.len() * na;

    let evaluate = |i: usize, acc: &mut Vec<HashMap<CategorySet, u64>>| -> Result<()> {
        for (ri, scope) in scopes.iter().enumerate() {
            for (ai, prof) in profiles.iter().enumerate() {
                let mut set = CategorySet::default();
                for hc in 0..q {
                    let p = &params[hc][i];
                    let mut best = f64::NEG_INFINITY;
                    for f in &prof[hc] {
                        best = best.max(scope.likeness(f, p)?.likeness);
                    }
                    if best >= thresholds[ri][hc] {
                        set.insert(hc);
                    }
                }
                *acc[ri * na + ai].entry(set).or_insert(0) += 1;
            }
        }
        Ok(())
    };

    let merged = (0..samples)
        .into_par_iter()
        .try_fold(
            || vec![HashMap::new(); cells],
            |mut acc, i| {
                evaluate(i, &mut acc)?;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![HashMap::new(); cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for (k, v) in y {
                        *x.entry(k).or_insert(0) += v;
                    }
                }
                Ok(a)
            },
        )?;

    let mut counts = vec![vec![BTreeMap::new(); na]; nodes.len()];
    for (cell, m) in merged.into_iter().enumerate() {
        counts[cell / na][cell % na] = m.into_iter().collect();
    }
    Ok(AssignmentDistribution {
        categories: problem.categories.iter().map(|c| c.name.clone()).collect(),
        dummy: problem.dummy_category.clone(),
        actions: problem.actions.iter().map(|a| a.name.clone()).collect(),
        nodes: nodes.to_vec(),
        samples: samples as u64,
        counts,
    })
}
