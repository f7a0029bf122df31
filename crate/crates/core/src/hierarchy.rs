//! Criteria tree, scales, actions, categories and reference sets.
//!
//! Everything here is immutable once built and validated; the evaluation
//! modules only read from it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a criterion in the hierarchy, as the path of 1-based child
/// indices from the root. The empty path is the root `g0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct NodeId(Vec<u32>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn from_path(path: Vec<u32>) -> Result<Self> {
        if path.contains(&0) {
            return Err(Error::Parse(format!("node path {path:?} contains a zero index")));
        }
        Ok(NodeId(path))
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn parent(&self) -> Option<NodeId> {
        if self.is_root() {
            None
        } else {
            Some(NodeId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The `index`-th child (1-based).
    pub fn child(&self, index: u32) -> NodeId {
        let mut p = self.0.clone();
        p.push(index);
        NodeId(p)
    }

    pub fn is_ancestor_of(&self, other: &NodeId) -> bool {
        other.0.len() > self.0.len() && other.0.starts_with(&self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [] => f.write_str("g0"),
            [i] => write!(f, "g{i}"),
            path => {
                let parts: Vec<String> = path.iter().map(u32::to_string).collect();
                write!(f, "g({})", parts.join(","))
            }
        }
    }
}

impl FromStr for NodeId {
    type Err = Error;

    /// Accepts `g0`, `0`, `g2`, `2`, `g(3,1)`, `(3,1)` and `3.1`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('g').unwrap_or(t);
        let t = t.trim_start_matches('(').trim_end_matches(')');
        if t == "0" || t.is_empty() {
            return Ok(NodeId::root());
        }
        let path = t
            .split([',', '.'])
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(format!("`{s}` is not a node path")))?;
        NodeId::from_path(path)
    }
}

impl From<NodeId> for String {
    fn from(n: NodeId) -> String {
        n.to_string()
    }
}

impl TryFrom<String> for NodeId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleKind {
    Ratio,
    Interval,
    Ordinal,
}

/// Measurement scale of an elementary criterion. Criteria are maximized.
///
/// Performances are stored encoded: the value itself on ratio and interval
/// scales, the 0-based level index on ordinal scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub kind: ScaleKind,
    pub min: f64,
    pub max: f64,
    pub levels: Vec<String>,
}

impl Scale {
    pub fn ratio(min: f64, max: f64) -> Self {
        Scale { kind: ScaleKind::Ratio, min, max, levels: Vec::new() }
    }

    pub fn interval(min: f64, max: f64) -> Self {
        Scale { kind: ScaleKind::Interval, min, max, levels: Vec::new() }
    }

    pub fn ordinal<S: Into<String>>(levels: impl IntoIterator<Item = S>) -> Self {
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        let max = levels.len().saturating_sub(1) as f64;
        Scale { kind: ScaleKind::Ordinal, min: 0.0, max, levels }
    }

    pub fn validate(&self, criterion: &str) -> Result<()> {
        let bad = |reason: &str| Error::Scale { criterion: criterion.into(), reason: reason.into() };
        match self.kind {
            ScaleKind::Ratio | ScaleKind::Interval => {
                if !(self.min.is_finite() && self.max.is_finite()) {
                    return Err(bad("bounds must be finite"));
                }
                if self.min >= self.max {
                    return Err(bad("min must be strictly below max"));
                }
            }
            ScaleKind::Ordinal => {
                if self.levels.is_empty() {
                    return Err(bad("ordinal scale needs at least one level"));
                }
                let mut seen = std::collections::HashSet::new();
                if !self.levels.iter().all(|l| seen.insert(l)) {
                    return Err(bad("ordinal levels must be distinct"));
                }
            }
        }
        Ok(())
    }

    /// diff(g^max, g^min): the largest possible absolute difference.
    pub fn span(&self) -> f64 {
        match self.kind {
            ScaleKind::Ordinal => self.levels.len().saturating_sub(1) as f64,
            _ => self.max - self.min,
        }
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }

    pub fn contains(&self, encoded: f64) -> bool {
        match self.kind {
            ScaleKind::Ordinal => {
                encoded.fract() == 0.0 && encoded >= 0.0 && (encoded as usize) < self.levels.len()
            }
            _ => encoded >= self.min && encoded <= self.max,
        }
    }

    /// Encodes a numeric performance. On ordinal scales the number is matched
    /// against the level labels by its textual form (`4` matches level "4").
    pub fn encode_number(&self, v: f64) -> Option<f64> {
        match self.kind {
            ScaleKind::Ordinal => {
                let label = format_number(v);
                self.level_index(&label).map(|i| i as f64)
            }
            _ => (v.is_finite() && v >= self.min && v <= self.max).then_some(v),
        }
    }

    pub fn encode_label(&self, label: &str) -> Option<f64> {
        match self.kind {
            ScaleKind::Ordinal => self.level_index(label).map(|i| i as f64),
            _ => label.trim().parse::<f64>().ok().and_then(|v| self.encode_number(v)),
        }
    }

    /// Inverse of the encoding, for display.
    pub fn decode(&self, encoded: f64) -> String {
        match self.kind {
            ScaleKind::Ordinal => self
                .levels
                .get(encoded as usize)
                .cloned()
                .unwrap_or_else(|| format_number(encoded)),
            _ => format_number(encoded),
        }
    }
}

pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Signed performance difference Δ(x, y) on `scale`, for encoded values.
///
/// On ordinal scales this is the signed number of levels from `y` to `x`.
pub fn performance_diff(scale: &Scale, x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if !scale.contains(v) {
            return Err(Error::Scale {
                criterion: String::new(),
                reason: format!("value {} is off the scale", format_number(v)),
            });
        }
    }
    Ok(x - y)
}

/// Threshold quadruple (δ1, δ2, δ3, δ4) for one side of a similarity-dissimilarity function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds(pub [f64; 4]);

impl Thresholds {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let t = self.0;
        if t.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err("thresholds must be finite and nonnegative".into());
        }
        if !(t[0] <= t[1] && t[1] <= t[2] && t[2] <= t[3]) {
            return Err(format!("thresholds {t:?} are not ordered δ1 ≤ δ2 ≤ δ3 ≤ δ4"));
        }
        Ok(())
    }
}

/// Piecewise-linear per-criterion similarity-dissimilarity function, with
/// independent thresholds for negative and positive differences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimDisFunction {
    pub negative: Thresholds,
    pub positive: Thresholds,
}

impl SimDisFunction {
    pub fn symmetric(t: [f64; 4]) -> Self {
        SimDisFunction { negative: Thresholds(t), positive: Thresholds(t) }
    }

    pub fn asymmetric(negative: [f64; 4], positive: [f64; 4]) -> Self {
        SimDisFunction { negative: Thresholds(negative), positive: Thresholds(positive) }
    }

    pub fn is_symmetric(&self) -> bool {
        self.negative == self.positive
    }

    pub fn validate(&self, criterion: &str, scale: &Scale) -> Result<()> {
        let bad = |reason: String| Error::SimDis { criterion: criterion.into(), reason };
        for side in [&self.negative, &self.positive] {
            side.validate().map_err(bad)?;
            if side.0[3] > scale.span() + 1e-12 {
                return Err(bad(format!(
                    "δ4 = {} exceeds the scale span {}",
                    side.0[3],
                    scale.span()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryCriterion {
    pub scale: Scale,
    pub function: SimDisFunction,
}

/// Input tree used to build a [`CriteriaHierarchy`].
#[derive(Clone, Debug)]
pub enum CriterionTree {
    Leaf { name: String, scale: Scale, function: SimDisFunction },
    Node { name: String, children: Vec<CriterionTree> },
}

impl CriterionTree {
    pub fn leaf(name: impl Into<String>, scale: Scale, function: SimDisFunction) -> Self {
        CriterionTree::Leaf { name: name.into(), scale, function }
    }

    pub fn node(name: impl Into<String>, children: Vec<CriterionTree>) -> Self {
        CriterionTree::Node { name: name.into(), children }
    }
}

#[derive(Clone, Debug)]
pub struct NodeInfo {
    pub name: String,
    pub children: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct CriteriaHierarchy {
    nodes: BTreeMap<NodeId, NodeInfo>,
    elementary: BTreeMap<NodeId, ElementaryCriterion>,
    leaves: Vec<NodeId>,
    leaf_index: HashMap<NodeId, usize>,
    by_name: HashMap<String, NodeId>,
    /// Elementary indices (into `leaves`) under each node.
    descendants: BTreeMap<NodeId, Vec<usize>>,
}

impl CriteriaHierarchy {
    /// Builds and validates a hierarchy. The root must be an internal node.
    pub fn build(root: CriterionTree) -> Result<Self> {
        let mut h = CriteriaHierarchy {
            nodes: BTreeMap::new(),
            elementary: BTreeMap::new(),
            leaves: Vec::new(),
            leaf_index: HashMap::new(),
            by_name: HashMap::new(),
            descendants: BTreeMap::new(),
        };
        if matches!(root, CriterionTree::Leaf { .. }) {
            return Err(Error::Hierarchy("the root must have at least two children".into()));
        }
        h.insert(NodeId::root(), root)?;
        let nodes: Vec<NodeId> = h.nodes.keys().cloned().collect();
        for id in nodes {
            let idx: Vec<usize> = h
                .leaves
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == &id || id.is_ancestor_of(l))
                .map(|(i, _)| i)
                .collect();
            h.descendants.insert(id, idx);
        }
        Ok(h)
    }

    fn insert(&mut self, id: NodeId, tree: CriterionTree) -> Result<()> {
        let name = match &tree {
            CriterionTree::Leaf { name, .. } | CriterionTree::Node { name, .. } => name.clone(),
        };
        if name.trim().is_empty() {
            return Err(Error::Hierarchy(format!("node {id} has an empty name")));
        }
        if self.by_name.insert(name.clone(), id.clone()).is_some() {
            return Err(Error::Hierarchy(format!("duplicate criterion name `{name}`")));
        }
        match tree {
            CriterionTree::Leaf { name, scale, function } => {
                scale.validate(&name)?;
                function.validate(&name, &scale)?;
                self.leaf_index.insert(id.clone(), self.leaves.len());
                self.leaves.push(id.clone());
                self.elementary.insert(id.clone(), ElementaryCriterion { scale, function });
                self.nodes.insert(id, NodeInfo { name, children: Vec::new() });
            }
            CriterionTree::Node { name, children } => {
                if children.len() < 2 {
                    return Err(Error::Hierarchy(format!(
                        "internal node `{name}` has {} child(ren); at least two are required",
                        children.len()
                    )));
                }
                let ids: Vec<NodeId> = (1..=children.len() as u32).map(|i| id.child(i)).collect();
                self.nodes.insert(id, NodeInfo { name, children: ids.clone() });
                for (cid, child) in ids.into_iter().zip(children) {
                    self.insert(cid, child)?;
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &NodeId) -> Result<&NodeInfo> {
        self.nodes.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn name(&self, id: &NodeId) -> &str {
        self.nodes.get(id).map(|n| n.name.as_str()).unwrap_or("?")
    }

    pub fn children(&self, id: &NodeId) -> Result<&[NodeId]> {
        Ok(&self.node(id)?.children)
    }

    pub fn is_elementary(&self, id: &NodeId) -> bool {
        self.elementary.contains_key(id)
    }

    /// Resolves a criterion by name or by path notation.
    pub fn resolve(&self, key: &str) -> Result<NodeId> {
        if let Some(id) = self.by_name.get(key) {
            return Ok(id.clone());
        }
        match key.parse::<NodeId>() {
            Ok(id) if self.contains(&id) => Ok(id),
            _ => Err(Error::UnknownNode(key.to_string())),
        }
    }

    /// Elementary criteria in depth-first order; this order indexes
    /// performance vectors and weight vectors throughout the crate.
    pub fn elementary_criteria(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn num_elementary(&self) -> usize {
        self.leaves.len()
    }

    pub fn elementary_index(&self, id: &NodeId) -> Option<usize> {
        self.leaf_index.get(id).copied()
    }

    pub fn criterion(&self, index: usize) -> &ElementaryCriterion {
        &self.elementary[&self.leaves[index]]
    }

    pub fn elementary_name(&self, index: usize) -> &str {
        self.name(&self.leaves[index])
    }

    /// Non-elementary criteria, root first, in depth-first order.
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        self.nodes.keys().filter(|id| !self.is_elementary(id)).cloned().collect()
    }

    /// E(g_r): elementary criteria descending from `r` (a leaf yields itself).
    pub fn elementary_descendants(&self, r: &NodeId) -> Result<Vec<NodeId>> {
        Ok(self.elementary_indices(r)?.iter().map(|&i| self.leaves[i].clone()).collect())
    }

    /// Indices of E(g_r) into [`Self::elementary_criteria`].
    pub fn elementary_indices(&self, r: &NodeId) -> Result<&[usize]> {
        self.descendants
            .get(r)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownNode(r.to_string()))
    }

    /// Deepest node having both `a` and `b` among its descendants (or equal to them).
    pub fn common_ancestor(&self, a: &NodeId, b: &NodeId) -> NodeId {
        let n = a.path().iter().zip(b.path()).take_while(|(x, y)| x == y).count();
        NodeId(a.path()[..n].to_vec())
    }

    /// The child of `ancestor` on the way down to `node`.
    pub fn child_towards(&self, ancestor: &NodeId, node: &NodeId) -> Option<NodeId> {
        if !ancestor.is_ancestor_of(node) {
            return None;
        }
        Some(NodeId(node.path()[..ancestor.depth() + 1].to_vec()))
    }
}

/// A named performance vector over the elementary criteria (encoded values).
#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub name: String,
    pub performance: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Category {
    pub name: String,
    pub reference_actions: Vec<Action>,
}

/// Likeness thresholds per category with optional per-node overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct LikenessThresholds {
    pub default: Vec<f64>,
    pub overrides: BTreeMap<(NodeId, usize), f64>,
}

impl LikenessThresholds {
    pub fn uniform(per_category: Vec<f64>) -> Self {
        LikenessThresholds { default: per_category, overrides: BTreeMap::new() }
    }

    pub fn get(&self, node: &NodeId, category: usize) -> f64 {
        self.overrides
            .get(&(node.clone(), category))
            .copied()
            .unwrap_or(self.default[category])
    }

    pub fn set(&mut self, node: NodeId, category: usize, value: f64) {
        self.overrides.insert((node, category), value);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutualEffect {
    Strengthening,
    Weakening,
}

/// Declared interaction between elementary criteria (indices into the
/// elementary ordering).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interaction {
    Mutual { effect: MutualEffect, first: usize, second: usize },
    /// `opponent` exercises an antagonistic effect over `criterion`.
    Antagonistic { criterion: usize, opponent: usize },
}

/// A validated classification problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub hierarchy: CriteriaHierarchy,
    pub actions: Vec<Action>,
    pub categories: Vec<Category>,
    pub dummy_category: String,
    pub thresholds: LikenessThresholds,
    pub interactions: Vec<Interaction>,
}

impl Problem {
    pub fn new(
        hierarchy: CriteriaHierarchy,
        actions: Vec<Action>,
        categories: Vec<Category>,
        dummy_category: impl Into<String>,
        thresholds: LikenessThresholds,
        interactions: Vec<Interaction>,
    ) -> Result<Self> {
        let p = Problem {
            hierarchy,
            actions,
            categories,
            dummy_category: dummy_category.into(),
            thresholds,
            interactions,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let h = &self.hierarchy;
        let n = h.num_elementary();
        if self.categories.is_empty() {
            return Err(Error::Parse("at least one category is required".into()));
        }
        if self.categories.len() > 31 {
            return Err(Error::Parse("at most 31 categories are supported".into()));
        }
        let check = |a: &Action| -> Result<()> {
            if a.performance.len() != n {
                return Err(Error::ScaleViolation {
                    action: a.name.clone(),
                    criterion: "*".into(),
                    reason: format!("expected {n} performances, got {}", a.performance.len()),
                });
            }
            for (i, &v) in a.performance.iter().enumerate() {
                let c = h.criterion(i);
                if !c.scale.contains(v) {
                    return Err(Error::ScaleViolation {
                        action: a.name.clone(),
                        criterion: h.elementary_name(i).into(),
                        reason: format!("value {} lies outside the scale", c.scale.decode(v)),
                    });
                }
            }
            Ok(())
        };
        let mut names = std::collections::HashSet::new();
        for a in &self.actions {
            if !names.insert(a.name.as_str()) {
                return Err(Error::Parse(format!("duplicate action name `{}`", a.name)));
            }
            check(a)?;
        }
        let mut cat_names = std::collections::HashSet::new();
        for c in &self.categories {
            if !cat_names.insert(c.name.as_str()) || c.name == self.dummy_category {
                return Err(Error::Parse(format!("duplicate category name `{}`", c.name)));
            }
            if c.reference_actions.is_empty() {
                return Err(Error::EmptyReferenceSet(c.name.clone()));
            }
            c.reference_actions.iter().try_for_each(check)?;
        }
        if self.thresholds.default.len() != self.categories.len() {
            return Err(Error::Parse("one likeness threshold per category is required".into()));
        }
        let in_range = |v: f64| (0.5..=1.0).contains(&v);
        for (hcat, &v) in self.thresholds.default.iter().enumerate() {
            if !in_range(v) {
                return Err(Error::ThresholdOutOfRange {
                    category: self.categories[hcat].name.clone(),
                    node: "*".into(),
                    value: v,
                });
            }
        }
        for ((node, hcat), &v) in &self.thresholds.overrides {
            if !h.contains(node) || h.is_elementary(node) {
                return Err(Error::UnknownNode(node.to_string()));
            }
            let cat = self
                .categories
                .get(*hcat)
                .ok_or_else(|| Error::UnknownCategory(hcat.to_string()))?;
            if !in_range(v) {
                return Err(Error::ThresholdOutOfRange {
                    category: cat.name.clone(),
                    node: h.name(node).into(),
                    value: v,
                });
            }
        }
        for inter in &self.interactions {
            let (a, b) = match *inter {
                Interaction::Mutual { first, second, .. } => (first, second),
                Interaction::Antagonistic { criterion, opponent } => (criterion, opponent),
            };
            if a >= n || b >= n || a == b {
                return Err(Error::Interaction(format!(
                    "interaction between elementary criteria {a} and {b} is invalid"
                )));
            }
        }
        Ok(())
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn category_index(&self, name: &str) -> Result<usize> {
        self.categories
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()))
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    /// Category label for column `h` in 0..=q, where `q` is the dummy.
    pub fn category_label(&self, h: usize) -> &str {
        if h < self.categories.len() {
            &self.categories[h].name
        } else {
            &self.dummy_category
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> CriteriaHierarchy {
        let f = SimDisFunction::symmetric([1.0, 2.0, 3.0, 4.0]);
        CriteriaHierarchy::build(CriterionTree::node(
            "root",
            vec![
                CriterionTree::node(
                    "A",
                    vec![
                        CriterionTree::leaf("a1", Scale::ratio(0.0, 10.0), f),
                        CriterionTree::leaf("a2", Scale::ratio(0.0, 10.0), f),
                    ],
                ),
                CriterionTree::leaf("b", Scale::ordinal(["1", "2", "3", "4", "5", "6"]), f),
            ],
        ))
        .unwrap()
    }

    #[test]
    fn node_id_notation() {
        let id: NodeId = "g(3,1)".parse().unwrap();
        assert_eq!(id.path(), &[3, 1]);
        assert_eq!(id.to_string(), "g(3,1)");
        assert_eq!("0".parse::<NodeId>().unwrap(), NodeId::root());
        assert_eq!("g2".parse::<NodeId>().unwrap().path(), &[2]);
        assert_eq!(id.parent().unwrap().to_string(), "g3");
        assert!("g(1,0)".parse::<NodeId>().is_err());
    }

    #[test]
    fn descendants_of_root_node_and_leaf() {
        let h = tiny();
        assert_eq!(h.elementary_descendants(&NodeId::root()).unwrap().len(), 3);
        let a = h.resolve("A").unwrap();
        let names: Vec<_> = h
            .elementary_descendants(&a)
            .unwrap()
            .iter()
            .map(|n| h.name(n).to_string())
            .collect();
        assert_eq!(names, ["a1", "a2"]);
        let b = h.resolve("b").unwrap();
        assert_eq!(h.elementary_descendants(&b).unwrap(), vec![b.clone()]);
        assert!(h.elementary_descendants(&"g(9)".parse().unwrap()).is_err());
    }

    #[test]
    fn single_child_nodes_rejected() {
        let f = SimDisFunction::symmetric([0.0, 0.0, 1.0, 2.0]);
        let err = CriteriaHierarchy::build(CriterionTree::node(
            "root",
            vec![CriterionTree::leaf("x", Scale::ratio(0.0, 5.0), f)],
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Hierarchy(_)));
    }

    #[test]
    fn thresholds_must_fit_scale() {
        let f = SimDisFunction::symmetric([0.0, 0.0, 1.0, 9.0]);
        let err = CriteriaHierarchy::build(CriterionTree::node(
            "root",
            vec![
                CriterionTree::leaf("x", Scale::ordinal(["1", "2", "3"]), f),
                CriterionTree::leaf("y", Scale::ordinal(["1", "2", "3"]), f),
            ],
        ))
        .unwrap_err();
        assert!(matches!(err, Error::SimDis { .. }));
    }

    #[test]
    fn ordinal_diff_counts_levels() {
        let s = Scale::ordinal(["1", "2", "3", "4", "5", "6"]);
        let x = s.encode_number(4.0).unwrap();
        let y = s.encode_number(2.0).unwrap();
        assert_eq!(performance_diff(&s, x, y).unwrap(), 2.0);
        assert_eq!(performance_diff(&s, y, x).unwrap(), -2.0);
        assert!(s.encode_number(7.0).is_none());
    }

    #[test]
    fn ratio_diff() {
        let s = Scale::ratio(500.0, 1000.0);
        assert_eq!(performance_diff(&s, 770.0, 700.0).unwrap(), 70.0);
        assert_eq!(performance_diff(&s, 700.0, 700.0).unwrap(), 0.0);
        assert!(performance_diff(&s, 1700.0, 700.0).is_err());
    }

    #[test]
    fn thresholds_out_of_range_rejected() {
        let h = tiny();
        let act = Action { name: "x".into(), performance: vec![1.0, 1.0, 0.0] };
        let cat = Category { name: "C1".into(), reference_actions: vec![act.clone()] };
        let err = Problem::new(
            h,
            vec![act],
            vec![cat],
            "C2",
            LikenessThresholds::uniform(vec![0.4]),
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("threshold out of range"));
    }
}
