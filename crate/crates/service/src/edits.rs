//! Partial edits of a problem document.

use catsd::document::{DeckDoc, ProblemDocument, RequirementsSection, SmaaSettings};
use catsd::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Edits {
    pub thresholds: Vec<ThresholdEdit>,
    pub decks: Vec<DeckEdit>,
    pub requirements: Option<RequirementsSection>,
    pub smaa: Option<SmaaSettings>,
}

/// Sets a likeness threshold; without `node` it replaces the category default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdEdit {
    pub category: String,
    #[serde(default)]
    pub node: Option<String>,
    pub value: f64,
}

/// Replaces a deck, or removes it when `deck` is null.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckEdit {
    pub category: String,
    pub node: String,
    pub deck: Option<DeckDoc>,
}

impl Edits {
    pub fn is_empty(&self) -> bool {
        self == &Edits::default()
    }

    /// Applies the edits to a copy of `doc`. The result is not validated.
    pub fn apply(&self, doc: &ProblemDocument) -> Result<ProblemDocument> {
        let mut out = doc.clone();
        for t in &self.thresholds {
            let c = out
                .categories
                .iter_mut()
                .find(|c| c.name == t.category)
                .ok_or_else(|| Error::UnknownCategory(t.category.clone()))?;
            match &t.node {
                None => c.likeness_threshold = t.value,
                Some(n) => {
                    c.node_thresholds.insert(n.clone(), t.value);
                }
            }
        }
        for d in &self.decks {
            if !out.categories.iter().any(|c| c.name == d.category) {
                return Err(Error::UnknownCategory(d.category.clone()));
            }
            let decks = out.srf.entry(d.category.clone()).or_default();
            match &d.deck {
                Some(deck) => {
                    decks.insert(d.node.clone(), deck.clone());
                }
                None => {
                    decks.remove(&d.node);
                }
            }
        }
        if let Some(r) = &self.requirements {
            out.requirements = r.clone();
        }
        if let Some(s) = self.smaa {
            out.smaa = s;
        }
        Ok(out)
    }
}
