//! Per-criterion similarity-dissimilarity, partial likeness with interaction
//! effects, and the threshold-based assignment rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{
    CriteriaHierarchy, Interaction, MutualEffect, NodeId, Problem, SimDisFunction,
};

/// Tolerance for the normalization constraint Σk + Σk_pair = 100.
pub const NORM_TOL: f64 = 1e-6;
/// Slack allowed on the net flow condition for sampled parameters.
pub const NET_FLOW_TOL: f64 = 1e-9;
pub const NORMALIZATION: f64 = 100.0;

/// Evaluates a similarity-dissimilarity function at the signed difference `delta`.
pub fn eval_simdis(f: &SimDisFunction, delta: f64) -> f64 {
    let t = if delta < 0.0 { f.negative.0 } else { f.positive.0 };
    let x = delta.abs();
    if x <= t[0] {
        1.0
    } else if x <= t[1] {
        (t[1] - x) / (t[1] - t[0])
    } else if x <= t[2] {
        0.0
    } else if x <= t[3] {
        -(x - t[2]) / (t[3] - t[2])
    } else {
        -1.0
    }
}

/// Splits a per-criterion value into its similarity and dissimilarity parts.
pub fn split_sd(v: f64) -> (f64, f64) {
    (v.max(0.0), v.min(0.0))
}

/// Per-criterion values f_t(a, b) over all elementary criteria.
pub fn compare(h: &CriteriaHierarchy, a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..h.num_elementary())
        .map(|t| eval_simdis(&h.criterion(t).function, a[t] - b[t]))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCoefficient {
    pub first: usize,
    pub second: usize,
    pub value: f64,
}

/// k_{criterion|opponent}: effect of `opponent` on `criterion`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntagonisticCoefficient {
    pub criterion: usize,
    pub opponent: usize,
    pub value: f64,
}

/// Weights and interaction coefficients of one category. Criteria are
/// referred to by their index in the elementary ordering of the hierarchy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub category: String,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub pairs: Vec<PairCoefficient>,
    #[serde(default)]
    pub antagonistic: Vec<AntagonisticCoefficient>,
}

impl ParameterSet {
    pub fn new(category: impl Into<String>, weights: Vec<f64>) -> Self {
        ParameterSet { category: category.into(), weights, pairs: Vec::new(), antagonistic: Vec::new() }
    }

    pub fn with_pair(mut self, first: usize, second: usize, value: f64) -> Self {
        self.pairs.push(PairCoefficient { first, second, value });
        self
    }

    pub fn with_antagonistic(mut self, criterion: usize, opponent: usize, value: f64) -> Self {
        self.antagonistic.push(AntagonisticCoefficient { criterion, opponent, value });
        self
    }

    pub fn pair(&self, a: usize, b: usize) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| (p.first, p.second) == (a, b) || (p.first, p.second) == (b, a))
            .map(|p| p.value)
    }

    pub fn antagonistic_effect(&self, criterion: usize, opponent: usize) -> Option<f64> {
        self.antagonistic
            .iter()
            .find(|c| c.criterion == criterion && c.opponent == opponent)
            .map(|c| c.value)
    }

    /// Σ k_t + Σ k_{t1 t2}.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.pairs.iter().map(|p| p.value).sum::<f64>()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - NORMALIZATION).abs() <= NORM_TOL
    }

    /// Multiplies every weight and coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = self.clone();
        p.weights.iter_mut().for_each(|w| *w *= factor);
        p.pairs.iter_mut().for_each(|c| c.value *= factor);
        p.antagonistic.iter_mut().for_each(|c| c.value *= factor);
        p
    }

    /// Net flow margin per elementary criterion:
    /// k_t − Σ|negative k_{t,·}| − Σ|k_{t|·}|.
    pub fn net_flow_margins(&self) -> Vec<f64> {
        let mut m = self.weights.clone();
        for p in &self.pairs {
            if p.value < 0.0 {
                m[p.first] -= p.value.abs();
                m[p.second] -= p.value.abs();
            }
        }
        for a in &self.antagonistic {
            m[a.criterion] -= a.value.abs();
        }
        m
    }

    /// Checks shape, signs against the declared interactions, and the net flow
    /// condition. Normalization is checked separately by [`Self::is_normalized`].
    pub fn validate(&self, h: &CriteriaHierarchy, declared: &[Interaction]) -> Result<()> {
        let bad = |reason: String| Error::Parameters { category: self.category.clone(), reason };
        let n = h.num_elementary();
        if self.weights.len() != n {
            return Err(bad(format!("expected {n} weights, got {}", self.weights.len())));
        }
        if let Some(w) = self.weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(bad(format!("weight {w} is negative or not finite")));
        }
        for p in &self.pairs {
            let effect = declared.iter().find_map(|d| match *d {
                Interaction::Mutual { effect, first, second }
                    if (first, second) == (p.first, p.second)
                        || (first, second) == (p.second, p.first) =>
                {
                    Some(effect)
                }
                _ => None,
            });
            let names = format!("{}, {}", h.elementary_name(p.first), h.elementary_name(p.second));
            match effect {
                None => return Err(bad(format!("coefficient for undeclared pair ({names})"))),
                Some(MutualEffect::Strengthening) if !(p.value > 0.0) => {
                    return Err(bad(format!("strengthening coefficient ({names}) must be positive")))
                }
                Some(MutualEffect::Weakening) if !(p.value < 0.0) => {
                    return Err(bad(format!("weakening coefficient ({names}) must be negative")))
                }
                _ => {}
            }
        }
        for a in &self.antagonistic {
            let known = declared.iter().any(|d| {
                matches!(*d, Interaction::Antagonistic { criterion, opponent }
                    if criterion == a.criterion && opponent == a.opponent)
            });
            let names =
                format!("{}|{}", h.elementary_name(a.criterion), h.elementary_name(a.opponent));
            if !known {
                return Err(bad(format!("coefficient for undeclared antagonistic effect {names}")));
            }
            if !(a.value < 0.0) {
                return Err(bad(format!("antagonistic coefficient {names} must be negative")));
            }
        }
        for d in declared {
            let present = match *d {
                Interaction::Mutual { first, second, .. } => self.pair(first, second).is_some(),
                Interaction::Antagonistic { criterion, opponent } => {
                    self.antagonistic_effect(criterion, opponent).is_some()
                }
            };
            if !present {
                return Err(bad(format!("missing coefficient for declared interaction {d:?}")));
            }
        }
        for (t, m) in self.net_flow_margins().into_iter().enumerate() {
            if m < -NET_FLOW_TOL {
                return Err(Error::NetFlow { criterion: h.elementary_name(t).into(), margin: m });
            }
        }
        Ok(())
    }
}

/// Elementary criteria under a node, with a membership mask for scoping
/// interaction terms.
#[derive(Clone, Debug)]
pub struct NodeScope {
    pub indices: Vec<usize>,
    member: Vec<bool>,
}

impl NodeScope {
    pub fn new(h: &CriteriaHierarchy, r: &NodeId) -> Result<Self> {
        let indices = h.elementary_indices(r)?.to_vec();
        let mut member = vec![false; h.num_elementary()];
        indices.iter().for_each(|&i| member[i] = true);
        Ok(NodeScope { indices, member })
    }

    pub fn contains(&self, t: usize) -> bool {
        self.member[t]
    }

    /// s_r from per-criterion values `f` (indexed over all elementary criteria).
    pub fn similarity(&self, f: &[f64], p: &ParameterSet) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for &t in &self.indices {
            num += p.weights[t] * f[t].max(0.0);
            den += p.weights[t];
        }
        for c in &p.pairs {
            if self.member[c.first] && self.member[c.second] {
                let z = f[c.first].max(0.0) * f[c.second].max(0.0) * c.value;
                num += z;
                den += z;
            }
        }
        for c in &p.antagonistic {
            if self.member[c.criterion] && self.member[c.opponent] {
                let z = f[c.criterion].max(0.0) * f[c.opponent].min(0.0).abs() * c.value;
                num += z;
                den += z;
            }
        }
        if !(den > 0.0) {
            return Err(Error::Internal(format!(
                "non-positive normalizer {den} for category `{}`",
                p.category
            )));
        }
        Ok((num / den).clamp(0.0, 1.0))
    }

    /// d_r = Π(1 + d_t) − 1.
    pub fn dissimilarity(&self, f: &[f64]) -> f64 {
        self.indices.iter().map(|&t| 1.0 + f[t].min(0.0)).product::<f64>() - 1.0
    }

    pub fn likeness(&self, f: &[f64], p: &ParameterSet) -> Result<PairwiseLikeness> {
        let d = self.dissimilarity(f);
        let s = self.similarity(f, p)?;
        Ok(PairwiseLikeness { similarity: s, dissimilarity: d, likeness: s * (1.0 + d) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseLikeness {
    pub similarity: f64,
    pub dissimilarity: f64,
    pub likeness: f64,
}

pub fn partial_similarity(
    h: &CriteriaHierarchy,
    a: &[f64],
    b: &[f64],
    r: &NodeId,
    p: &ParameterSet,
) -> Result<f64> {
    NodeScope::new(h, r)?.similarity(&compare(h, a, b), p)
}

pub fn partial_dissimilarity(h: &CriteriaHierarchy, a: &[f64], b: &[f64], r: &NodeId) -> Result<f64> {
    Ok(NodeScope::new(h, r)?.dissimilarity(&compare(h, a, b)))
}

pub fn partial_likeness(
    h: &CriteriaHierarchy,
    a: &[f64],
    b: &[f64],
    r: &NodeId,
    p: &ParameterSet,
) -> Result<PairwiseLikeness> {
    NodeScope::new(h, r)?.likeness(&compare(h, a, b), p)
}

/// Likeness of `a` to a reference set: the maximum over its members.
pub fn likeness_to_set(
    h: &CriteriaHierarchy,
    a: &[f64],
    refs: &[&[f64]],
    r: &NodeId,
    p: &ParameterSet,
) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::EmptyReferenceSet(p.category.clone()));
    }
    let scope = NodeScope::new(h, r)?;
    let mut best = f64::NEG_INFINITY;
    for b in refs {
        best = best.max(scope.likeness(&compare(h, a, b), p)?.likeness);
    }
    Ok(best)
}

/// Set of real categories as a bitmask over category indices. The empty set
/// stands for the dummy category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CategorySet(pub u32);

impl CategorySet {
    pub fn insert(&mut self, h: usize) {
        self.0 |= 1 << h;
    }

    pub fn contains(&self, h: usize) -> bool {
        self.0 & (1 << h) != 0
    }

    pub fn is_dummy(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(move |&h| self.contains(h))
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = CategorySet::default();
        indices.into_iter().for_each(|h| s.insert(h));
        s
    }

    /// Category names, or the dummy's name for the empty set.
    pub fn labels(&self, problem: &Problem) -> Vec<String> {
        if self.is_dummy() {
            vec![problem.dummy_category.clone()]
        } else {
            self.iter().map(|h| problem.categories[h].name.clone()).collect()
        }
    }
}

/// Likeness of `a` to every category's reference set at node `r`.
pub fn likeness_degrees(
    problem: &Problem,
    a: &[f64],
    r: &NodeId,
    params: &[ParameterSet],
) -> Result<Vec<f64>> {
    if params.len() != problem.num_categories() {
        return Err(Error::Parameters {
            category: "*".into(),
            reason: format!("expected {} parameter sets", problem.num_categories()),
        });
    }
    let h = &problem.hierarchy;
    problem
        .categories
        .iter()
        .zip(params)
        .map(|(c, p)| {
            let refs: Vec<&[f64]> = c.reference_actions.iter().map(|b| b.performance.as_slice()).collect();
            likeness_to_set(h, a, &refs, r, p)
        })
        .collect()
}

/// Assigns `a` at node `r` to every category whose likeness reaches its
/// threshold, or to the dummy when none does.
pub fn assign(problem: &Problem, a: &[f64], r: &NodeId, params: &[ParameterSet]) -> Result<CategorySet> {
    let deg = likeness_degrees(problem, a, r, params)?;
    Ok(CategorySet::from_indices(
        deg.iter()
            .enumerate()
            .filter(|(h, &v)| v >= problem.thresholds.get(r, *h))
            .map(|(h, _)| h),
    ))
}
