//! JSON problem document and its compilation into a validated model.
//!
//! Criteria are referred to by name everywhere in the document. Card decks
//! list levels from the least to the most important.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hierarchy::{
    format_number, Action, Category, CriteriaHierarchy, CriterionTree, Interaction, LikenessThresholds,
    MutualEffect, NodeId, Problem, Scale, ScaleKind, SimDisFunction,
};
use crate::robust::Requirements;
use crate::sampler::{DEFAULT_BURN_IN, DEFAULT_THINNING};
use crate::srf::{BlankCards, Card, CardDeck, CategoryDecks};

pub const DEFAULT_SAMPLES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub hierarchy: NodeDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scales: BTreeMap<String, ScaleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub simdis_functions: BTreeMap<String, SimDisDoc>,
    #[serde(default)]
    pub actions: Vec<ActionDoc>,
    pub categories: Vec<CategoryDoc>,
    pub dummy_category: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interactions: Vec<InteractionDoc>,
    /// category → node → deck.
    #[serde(default)]
    pub srf: BTreeMap<String, BTreeMap<String, DeckDoc>>,
    #[serde(default)]
    pub smaa: SmaaSettings,
    #[serde(default)]
    pub requirements: RequirementsSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Named<ScaleDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Named<SimDisDoc>>,
}

/// Either the name of an entry in a top-level table or an inline definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Named<T> {
    Name(String),
    Inline(T),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleDoc {
    pub kind: ScaleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SimDisDoc {
    Symmetric { symmetric: [f64; 4] },
    Asymmetric { negative: [f64; 4], positive: [f64; 4] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub name: String,
    /// Elementary criterion name → number, or level label on ordinal scales.
    pub performance: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub name: String,
    pub reference_actions: Vec<ActionDoc>,
    pub likeness_threshold: f64,
    /// Per-node overrides of the likeness threshold.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub node_thresholds: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InteractionDoc {
    Strengthening { criteria: [String; 2] },
    Weakening { criteria: [String; 2] },
    Antagonistic { criterion: String, opponent: String },
}

/// A count or an inclusive range `[low, upp]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Interval<T> {
    Exact(T),
    Range([T; 2]),
}

impl<T: Copy> Interval<T> {
    pub fn bounds(&self) -> (T, T) {
        match *self {
            Interval::Exact(v) => (v, v),
            Interval::Range([a, b]) => (a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckDoc {
    /// Least important level first.
    pub levels: Vec<Vec<String>>,
    pub blank_cards: Vec<Interval<u32>>,
    pub z: Interval<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmaaSettings {
    pub samples: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
}

impl Default for SmaaSettings {
    fn default() -> Self {
        SmaaSettings { samples: DEFAULT_SAMPLES, seed: 0, burn_in: DEFAULT_BURN_IN, thinning: DEFAULT_THINNING }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequirementsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<RequirementsDoc>,
    /// Node name → requirements replacing the default at that node.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub nodes: BTreeMap<String, RequirementsDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequirementsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exactly_one: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_per_category: Option<PerCategory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_per_category: Option<PerCategory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dummy: Option<usize>,
}

/// One bound for all categories or a map by category name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerCategory {
    All(usize),
    Each(BTreeMap<String, usize>),
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn compile(&self) -> Result<Model> {
        compile(self)
    }
}

/// A compiled document: the validated problem plus elicitation data.
#[derive(Clone, Debug)]
pub struct Model {
    pub problem: Problem,
    /// Decks per category index; empty for categories without decks.
    pub decks: Vec<CategoryDecks>,
    pub smaa: SmaaSettings,
    pub requirements: Requirements,
    pub node_requirements: BTreeMap<NodeId, Requirements>,
}

impl Model {
    pub fn requirements_at(&self, node: &NodeId) -> &Requirements {
        self.node_requirements.get(node).unwrap_or(&self.requirements)
    }
}

fn scale_from_doc(name: &str, d: &ScaleDoc) -> Result<Scale> {
    let missing = |what: &str| Error::Scale { criterion: name.into(), reason: format!("`{what}` is required") };
    Ok(match d.kind {
        ScaleKind::Ratio => Scale::ratio(d.min.ok_or_else(|| missing("min"))?, d.max.ok_or_else(|| missing("max"))?),
        ScaleKind::Interval => {
            Scale::interval(d.min.ok_or_else(|| missing("min"))?, d.max.ok_or_else(|| missing("max"))?)
        }
        ScaleKind::Ordinal => {
            let levels = d.levels.as_ref().ok_or_else(|| missing("levels"))?;
            let labels: Vec<String> = levels
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(format_number(n.as_f64().unwrap_or(f64::NAN))),
                    other => Err(Error::Scale {
                        criterion: name.into(),
                        reason: format!("level {other} is neither a string nor a number"),
                    }),
                })
                .collect::<Result<_>>()?;
            Scale::ordinal(labels)
        }
    })
}

fn simdis_from_doc(d: &SimDisDoc) -> SimDisFunction {
    match d {
        SimDisDoc::Symmetric { symmetric } => SimDisFunction::symmetric(*symmetric),
        SimDisDoc::Asymmetric { negative, positive } => SimDisFunction::asymmetric(*negative, *positive),
    }
}

fn tree_from_doc(doc: &ProblemDocument, node: &NodeDoc, path: &str) -> Result<CriterionTree> {
    let here = format!("{path}/{}", node.name);
    if node.children.is_empty() {
        let scale = match &node.scale {
            None => return Err(Error::Parse(format!("hierarchy{here}: elementary criterion needs a `scale`"))),
            Some(Named::Inline(s)) => scale_from_doc(&node.name, s)?,
            Some(Named::Name(n)) => scale_from_doc(
                &node.name,
                doc.scales
                    .get(n)
                    .ok_or_else(|| Error::Parse(format!("hierarchy{here}: unknown scale `{n}`")))?,
            )?,
        };
        let function = match &node.function {
            None => return Err(Error::Parse(format!("hierarchy{here}: elementary criterion needs a `function`"))),
            Some(Named::Inline(f)) => simdis_from_doc(f),
            Some(Named::Name(n)) => simdis_from_doc(
                doc.simdis_functions
                    .get(n)
                    .ok_or_else(|| Error::Parse(format!("hierarchy{here}: unknown function `{n}`")))?,
            ),
        };
        Ok(CriterionTree::leaf(node.name.clone(), scale, function))
    } else {
        if node.scale.is_some() || node.function.is_some() {
            return Err(Error::Parse(format!(
                "hierarchy{here}: only elementary criteria carry a scale and a function"
            )));
        }
        let children = node.children.iter().map(|c| tree_from_doc(doc, c, &here)).collect::<Result<_>>()?;
        Ok(CriterionTree::node(node.name.clone(), children))
    }
}

fn action_from_doc(h: &CriteriaHierarchy, a: &ActionDoc, at: &str) -> Result<Action> {
    let n = h.num_elementary();
    let mut perf = vec![f64::NAN; n];
    for (crit, v) in &a.performance {
        let id = h.resolve(crit).map_err(|_| Error::Parse(format!("{at}: unknown criterion `{crit}`")))?;
        let t = h
            .elementary_index(&id)
            .ok_or_else(|| Error::Parse(format!("{at}: `{crit}` is not an elementary criterion")))?;
        let scale = &h.criterion(t).scale;
        let encoded = match v {
            Value::Number(x) => scale.encode_number(x.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => scale.encode_label(s),
            _ => None,
        };
        perf[t] = encoded.ok_or_else(|| Error::ScaleViolation {
            action: a.name.clone(),
            criterion: crit.clone(),
            reason: format!("{v} is not on the scale"),
        })?;
    }
    if let Some(t) = perf.iter().position(|v| v.is_nan()) {
        return Err(Error::ScaleViolation {
            action: a.name.clone(),
            criterion: h.elementary_name(t).into(),
            reason: "missing performance".into(),
        });
    }
    Ok(Action { name: a.name.clone(), performance: perf })
}

fn elementary(h: &CriteriaHierarchy, name: &str) -> Result<usize> {
    let id = h.resolve(name)?;
    h.elementary_index(&id)
        .ok_or_else(|| Error::Interaction(format!("`{name}` is not an elementary criterion")))
}

pub fn requirements_from_doc(d: &RequirementsDoc, cats: &[String]) -> Result<Requirements> {
    let per = |p: &Option<PerCategory>| -> Result<Vec<Option<usize>>> {
        Ok(match p {
            None => vec![None; cats.len()],
            Some(PerCategory::All(v)) => vec![Some(*v); cats.len()],
            Some(PerCategory::Each(m)) => {
                if let Some(k) = m.keys().find(|k| !cats.contains(k)) {
                    return Err(Error::UnknownCategory(k.clone()));
                }
                cats.iter().map(|c| m.get(c).copied()).collect()
            }
        })
    };
    Ok(Requirements {
        exactly_one: d.exactly_one.unwrap_or(true),
        min_per_category: per(&d.min_per_category)?.into_iter().map(|v| v.unwrap_or(0)).collect(),
        max_per_category: per(&d.max_per_category)?,
        max_dummy: d.max_dummy,
    })
}

/// Reads a deck for `node`; cards are parsed but the deck's shape is checked
/// only when it is used.
pub fn deck_from_doc(h: &CriteriaHierarchy, node: NodeId, d: &DeckDoc) -> Result<CardDeck> {
    let levels = d
        .levels
        .iter()
        .map(|l| l.iter().map(|card| Card::parse(h, card)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let blank_cards = d
        .blank_cards
        .iter()
        .map(|b| {
            let (lo, hi) = b.bounds();
            BlankCards::between(lo, hi)
        })
        .collect();
    Ok(CardDeck { node, levels, blank_cards, z: d.z.bounds() })
}

fn compile(doc: &ProblemDocument) -> Result<Model> {
    let h = CriteriaHierarchy::build(tree_from_doc(doc, &doc.hierarchy, "")?)?;
    let actions = doc
        .actions
        .iter()
        .enumerate()
        .map(|(i, a)| action_from_doc(&h, a, &format!("actions[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut categories = Vec::new();
    let mut thresholds = LikenessThresholds::uniform(Vec::new());
    for (ci, c) in doc.categories.iter().enumerate() {
        let refs = c
            .reference_actions
            .iter()
            .enumerate()
            .map(|(i, a)| action_from_doc(&h, a, &format!("categories[{ci}].reference_actions[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        categories.push(Category { name: c.name.clone(), reference_actions: refs });
        thresholds.default.push(c.likeness_threshold);
        for (node, &v) in &c.node_thresholds {
            thresholds.set(h.resolve(node)?, ci, v);
        }
    }
    let interactions = doc
        .interactions
        .iter()
        .map(|i| {
            Ok(match i {
                InteractionDoc::Strengthening { criteria: [a, b] } => Interaction::Mutual {
                    effect: MutualEffect::Strengthening,
                    first: elementary(&h, a)?,
                    second: elementary(&h, b)?,
                },
                InteractionDoc::Weakening { criteria: [a, b] } => Interaction::Mutual {
                    effect: MutualEffect::Weakening,
                    first: elementary(&h, a)?,
                    second: elementary(&h, b)?,
                },
                InteractionDoc::Antagonistic { criterion, opponent } => Interaction::Antagonistic {
                    criterion: elementary(&h, criterion)?,
                    opponent: elementary(&h, opponent)?,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem::new(h, actions, categories, doc.dummy_category.clone(), thresholds, interactions)?;
    let h = &problem.hierarchy;

    if let Some(k) = doc.srf.keys().find(|k| problem.category_index(k).is_err()) {
        return Err(Error::UnknownCategory(k.clone()));
    }
    let mut decks = Vec::new();
    for c in &problem.categories {
        let mut cat_decks = CategoryDecks::new();
        if let Some(nodes) = doc.srf.get(&c.name) {
            for (node_key, d) in nodes {
                let node = h.resolve(node_key)?;
                cat_decks.insert(node.clone(), deck_from_doc(h, node, d)?);
            }
        }
        decks.push(cat_decks);
    }

    let cats: Vec<String> = problem.categories.iter().map(|c| c.name.clone()).collect();
    let requirements = match &doc.requirements.default {
        Some(r) => requirements_from_doc(r, &cats)?,
        None => Requirements::default(),
    };
    let mut node_requirements = BTreeMap::new();
    for (node, r) in &doc.requirements.nodes {
        node_requirements.insert(h.resolve(node)?, requirements_from_doc(r, &cats)?);
    }
    Ok(Model { problem, decks, smaa: doc.smaa, requirements, node_requirements })
}
