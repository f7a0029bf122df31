//! Result files: structured distribution document, per-node CSV tables and
//! the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::document::SmaaSettings;
use crate::engine::Classification;
use crate::error::{Error, Result};
use crate::hierarchy::{CriteriaHierarchy, NodeId};
use crate::likeness::CategorySet;
use crate::smaa::AssignmentDistribution;

pub const DISTRIBUTION_FILE: &str = "distribution.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Rounds a percentage to the three decimals used in every output.
pub fn round3(x: f64) -> f64 {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactEntry {
    pub set: Vec<String>,
    pub count: u64,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    pub action: String,
    /// Most frequent first.
    pub exact: Vec<ExactEntry>,
    /// One entry per column of [`DistributionDocument::columns`].
    pub marginals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeResult {
    pub node: NodeId,
    pub name: String,
    pub actions: Vec<ActionResult>,
}

/// Serialized form of an [`AssignmentDistribution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionDocument {
    pub categories: Vec<String>,
    pub dummy: String,
    /// Marginal columns: the categories followed by the dummy.
    pub columns: Vec<String>,
    pub samples: u64,
    pub nodes: Vec<NodeResult>,
}

fn node_name(h: Option<&CriteriaHierarchy>, node: &NodeId) -> String {
    match h {
        Some(h) if h.contains(node) => h.name(node).to_string(),
        _ => node.to_string(),
    }
}

impl DistributionDocument {
    pub fn new(dist: &AssignmentDistribution, h: Option<&CriteriaHierarchy>) -> Self {
        let nodes = dist
            .nodes
            .iter()
            .enumerate()
            .map(|(ni, node)| NodeResult {
                node: node.clone(),
                name: node_name(h, node),
                actions: dist
                    .actions
                    .iter()
                    .enumerate()
                    .map(|(a, name)| {
                        let mut exact: Vec<(CategorySet, u64)> =
                            dist.counts[ni][a].iter().map(|(s, c)| (*s, *c)).collect();
                        exact.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
                        ActionResult {
                            action: name.clone(),
                            exact: exact
                                .into_iter()
                                .map(|(s, c)| ExactEntry {
                                    set: dist.set_labels(s),
                                    count: c,
                                    percent: round3(dist.exact(ni, a, s)),
                                })
                                .collect(),
                            marginals: dist.marginals(ni, a).into_iter().map(round3).collect(),
                        }
                    })
                    .collect(),
            })
            .collect();
        let mut columns = dist.categories.clone();
        columns.push(dist.dummy.clone());
        DistributionDocument {
            categories: dist.categories.clone(),
            dummy: dist.dummy.clone(),
            columns,
            samples: dist.samples,
            nodes,
        }
    }

    /// Rebuilds the counts.
    pub fn to_distribution(&self) -> Result<AssignmentDistribution> {
        let actions: Vec<String> = match self.nodes.first() {
            Some(n) => n.actions.iter().map(|a| a.action.clone()).collect(),
            None => Vec::new(),
        };
        let mut counts = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let names: Vec<&String> = n.actions.iter().map(|a| &a.action).collect();
            if names.len() != actions.len() || names.iter().zip(&actions).any(|(a, b)| *a != b) {
                return Err(Error::Parse(format!("node {}: action list differs from the first node", n.node)));
            }
            let mut per_action = Vec::with_capacity(actions.len());
            for a in &n.actions {
                let mut m = BTreeMap::new();
                let mut total = 0;
                for e in &a.exact {
                    let set = self.parse_set(&e.set)?;
                    *m.entry(set).or_insert(0) += e.count;
                    total += e.count;
                }
                if total != self.samples {
                    return Err(Error::Parse(format!(
                        "node {} action {}: counts add up to {total}, expected {}",
                        n.node, a.action, self.samples
                    )));
                }
                per_action.push(m);
            }
            counts.push(per_action);
        }
        Ok(AssignmentDistribution {
            categories: self.categories.clone(),
            dummy: self.dummy.clone(),
            actions,
            nodes: self.nodes.iter().map(|n| n.node.clone()).collect(),
            samples: self.samples,
            counts,
        })
    }

    fn parse_set(&self, labels: &[String]) -> Result<CategorySet> {
        if labels.len() == 1 && labels[0] == self.dummy {
            return Ok(CategorySet::default());
        }
        let mut s = CategorySet::default();
        for l in labels {
            let h = self
                .categories
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| Error::UnknownCategory(l.clone()))?;
            s.insert(h);
        }
        Ok(s)
    }
}

/// Header label of an exact set: `C1`, `{C2,C4}` or the dummy's name.
pub fn set_label(dist: &AssignmentDistribution, set: CategorySet) -> String {
    let labels = dist.set_labels(set);
    if set.len() > 1 {
        format!("{{{}}}", labels.join(","))
    } else {
        labels[0].clone()
    }
}

/// Exact sets observed at a node: singletons, then larger sets by size, then
/// the dummy.
pub fn observed_sets(dist: &AssignmentDistribution, node: usize) -> Vec<CategorySet> {
    let mut sets: Vec<CategorySet> = dist.counts[node].iter().flat_map(|m| m.keys().copied()).collect();
    sets.sort_by_key(|s| (s.is_dummy(), s.len(), s.iter().collect::<Vec<_>>()));
    sets.dedup();
    sets
}

/// One row per action: exact-set percentages, then marginals.
pub fn node_csv(dist: &AssignmentDistribution, node: usize) -> Result<String> {
    let sets = observed_sets(dist, node);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["action".to_string()];
    header.extend(sets.iter().map(|s| set_label(dist, *s)));
    header.extend(dist.categories.iter().chain([&dist.dummy]).map(|c| format!("marginal {c}")));
    w.write_record(&header).map_err(csv_error)?;
    for (a, name) in dist.actions.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(sets.iter().map(|s| format!("{:.3}", round3(dist.exact(node, a, *s)))));
        row.extend(dist.marginals(node, a).into_iter().map(|v| format!("{:.3}", round3(v))));
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}

/// `node_g0.csv`, `node_g3.1.csv`.
pub fn node_file_name(node: &NodeId) -> String {
    let path: Vec<String> = if node.is_root() { vec!["0".into()] } else { node.path().iter().map(|i| i.to_string()).collect() };
    format!("node_g{}.csv", path.join("."))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub input_sha256: String,
    pub samples: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub files: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the distribution document, one CSV per node and the manifest.
/// The output depends only on its arguments.
pub fn write_run(
    dir: &Path,
    input: &[u8],
    settings: &SmaaSettings,
    h: &CriteriaHierarchy,
    dist: &AssignmentDistribution,
) -> Result<RunManifest> {
    fs::create_dir_all(dir)?;
    let doc = DistributionDocument::new(dist, Some(h));
    fs::write(dir.join(DISTRIBUTION_FILE), serde_json::to_string_pretty(&doc)? + "\n")?;
    let mut files = vec![DISTRIBUTION_FILE.to_string()];
    for (ni, node) in dist.nodes.iter().enumerate() {
        let name = node_file_name(node);
        fs::write(dir.join(&name), node_csv(dist, ni)?)?;
        files.push(name);
    }
    let manifest = RunManifest {
        input_sha256: sha256_hex(input),
        samples: settings.samples,
        seed: settings.seed,
        burn_in: settings.burn_in,
        thinning: settings.thinning,
        files,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn read_distribution(dir: &Path) -> Result<AssignmentDistribution> {
    let path = dir.join(DISTRIBUTION_FILE);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let doc: DistributionDocument =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    doc.to_distribution()
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Structured classification output, with category labels per action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationDocument {
    pub node: NodeId,
    pub name: String,
    pub loss: f64,
    pub solutions: Vec<BTreeMap<String, Vec<String>>>,
}

impl ClassificationDocument {
    pub fn new(c: &Classification, dist: &AssignmentDistribution) -> Self {
        let label = |h: usize| if h < dist.categories.len() { dist.categories[h].clone() } else { dist.dummy.clone() };
        ClassificationDocument {
            node: c.node.clone(),
            name: c.node_name.clone(),
            loss: round3(c.loss),
            solutions: c
                .solutions
                .iter()
                .map(|s| {
                    dist.actions
                        .iter()
                        .enumerate()
                        .map(|(a, name)| (name.clone(), s.assigned(a).into_iter().map(label).collect()))
                        .collect()
                })
                .collect(),
        }
    }
}
