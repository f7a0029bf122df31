//! Deck-of-cards elicitation of weights and interaction coefficients.
//!
//! A deck ranks the cards of one non-elementary node from least to most
//! important, with an interval of blank cards between consecutive levels and
//! an interval for the ratio between the top and bottom levels. Besides one
//! card per child criterion, a deck may hold pair cards `{a,b}` (the two
//! criteria taken together, carrying their mutual interaction) and shadow
//! cards `a'` (criterion `a` while an antagonistic criterion acts on it).
//!
//! A deck with point intervals determines values directly
//! ([`srf_deterministic`]); otherwise [`build_constraints`] turns every deck
//! of a category into a linear system over elementary weights and
//! coefficients, whose nonemptiness [`feasibility_check`] decides.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{CriteriaHierarchy, Interaction, MutualEffect, NodeId, Problem};
use crate::likeness::{AntagonisticCoefficient, PairCoefficient, ParameterSet, NORMALIZATION};
use crate::lp::{self, LpOutcome, LpProblem, Relation, Row, Sense};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Card {
    Criterion(NodeId),
    Pair(NodeId, NodeId),
    Shadow(NodeId),
}

impl Card {
    /// Parses `MS`, `{MS,MR}` or `PS'` against the criterion names of `h`.
    pub fn parse(h: &CriteriaHierarchy, text: &str) -> Result<Card> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("pair card `{text}` must name two criteria")));
            }
            return Ok(Card::Pair(h.resolve(parts[0])?, h.resolve(parts[1])?));
        }
        if let Some(base) = t.strip_suffix('\'').or_else(|| t.strip_suffix('′')) {
            return Ok(Card::Shadow(h.resolve(base.trim())?));
        }
        Ok(Card::Criterion(h.resolve(t)?))
    }

    pub fn label(&self, h: &CriteriaHierarchy) -> String {
        match self {
            Card::Criterion(n) => h.name(n).to_string(),
            Card::Pair(a, b) => format!("{{{},{}}}", h.name(a), h.name(b)),
            Card::Shadow(n) => format!("{}'", h.name(n)),
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Criterion(n) => write!(f, "{n}"),
            Card::Pair(a, b) => write!(f, "{{{a},{b}}}"),
            Card::Shadow(n) => write!(f, "{n}'"),
        }
    }
}

/// Closed interval of nonnegative integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlankCards {
    pub low: u32,
    pub upp: u32,
}

impl BlankCards {
    pub fn exactly(n: u32) -> Self {
        BlankCards { low: n, upp: n }
    }

    pub fn between(low: u32, upp: u32) -> Self {
        BlankCards { low, upp }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CardDeck {
    pub node: NodeId,
    /// Levels from least to most important; cards within a level are tied.
    pub levels: Vec<Vec<Card>>,
    /// `blank_cards[s]` sits between `levels[s]` and `levels[s + 1]`.
    pub blank_cards: Vec<BlankCards>,
    /// Bounds on the ratio between the top and bottom level values.
    pub z: (f64, f64),
}

impl CardDeck {
    pub fn is_deterministic(&self) -> bool {
        self.z.0 == self.z.1 && self.blank_cards.iter().all(|b| b.low == b.upp)
    }

    fn level_of(&self, card: &Card) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(card))
    }
}

/// What a card stands for, once resolved against the hierarchy and the
/// declared interactions.
#[derive(Clone, Debug)]
enum CardMeaning {
    Criterion(NodeId),
    /// Member children of the deck node and the declared interaction.
    Pair(NodeId, NodeId, usize),
    /// Base child of the deck node and the declared antagonistic effect.
    Shadow(NodeId, usize),
}

fn as_child(h: &CriteriaHierarchy, deck: &NodeId, n: &NodeId) -> Option<NodeId> {
    if n.parent().as_ref() == Some(deck) {
        Some(n.clone())
    } else {
        h.child_towards(deck, n)
    }
}

fn resolve_card(problem: &Problem, deck: &CardDeck, card: &Card) -> Result<CardMeaning> {
    let h = &problem.hierarchy;
    let bad = |reason: String| Error::Deck { node: h.name(&deck.node).to_string(), reason };
    let within = |n: &NodeId, t: usize| -> bool {
        h.elementary_indices(n).map(|ix| ix.contains(&t)).unwrap_or(false)
    };
    match card {
        Card::Criterion(n) => {
            if n.parent().as_ref() != Some(&deck.node) {
                return Err(bad(format!("`{}` is not a child of this node", h.name(n))));
            }
            Ok(CardMeaning::Criterion(n.clone()))
        }
        Card::Pair(a, b) => {
            let label = card.label(h);
            let (ca, cb) = match (as_child(h, &deck.node, a), as_child(h, &deck.node, b)) {
                (Some(x), Some(y)) if x != y => (x, y),
                _ => {
                    return Err(bad(format!(
                        "pair card {label} must join criteria under two different children"
                    )))
                }
            };
            let found: Vec<usize> = problem
                .interactions
                .iter()
                .enumerate()
                .filter(|(_, i)| match **i {
                    Interaction::Mutual { first, second, .. } => {
                        (within(a, first) && within(b, second)) || (within(a, second) && within(b, first))
                    }
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect();
            match found.as_slice() {
                [i] => Ok(CardMeaning::Pair(ca, cb, *i)),
                [] => Err(bad(format!("pair card {label} matches no declared interaction"))),
                _ => Err(bad(format!(
                    "pair card {label} is ambiguous; name the elementary criteria instead"
                ))),
            }
        }
        Card::Shadow(n) => {
            let label = card.label(h);
            let base = as_child(h, &deck.node, n)
                .ok_or_else(|| bad(format!("shadow card {label} lies outside this node")))?;
            let found: Vec<usize> = problem
                .interactions
                .iter()
                .enumerate()
                .filter(|(_, i)| matches!(**i, Interaction::Antagonistic { criterion, .. } if within(n, criterion)))
                .map(|(i, _)| i)
                .collect();
            match found.as_slice() {
                [i] => Ok(CardMeaning::Shadow(base, *i)),
                [] => Err(bad(format!("shadow card {label} matches no declared antagonistic effect"))),
                _ => Err(bad(format!("shadow card {label} is ambiguous"))),
            }
        }
    }
}

/// Structural checks on one deck; returns the resolved meaning of every card
/// in level order.
fn check_deck(problem: &Problem, deck: &CardDeck) -> Result<Vec<Vec<CardMeaning>>> {
    let h = &problem.hierarchy;
    let bad = |reason: String| Error::Deck { node: h.name(&deck.node).to_string(), reason };
    if !h.contains(&deck.node) || h.is_elementary(&deck.node) {
        return Err(Error::UnknownNode(deck.node.to_string()));
    }
    if deck.levels.len() < 2 {
        return Err(bad("a deck needs at least two levels".into()));
    }
    if deck.levels.iter().any(Vec::is_empty) {
        return Err(bad("empty level".into()));
    }
    if deck.blank_cards.len() != deck.levels.len() - 1 {
        return Err(bad(format!(
            "{} levels need {} blank-card intervals, got {}",
            deck.levels.len(),
            deck.levels.len() - 1,
            deck.blank_cards.len()
        )));
    }
    if let Some(b) = deck.blank_cards.iter().find(|b| b.low > b.upp) {
        return Err(bad(format!("blank-card interval [{}, {}] is reversed", b.low, b.upp)));
    }
    let (zl, zu) = deck.z;
    if !(zl.is_finite() && zu.is_finite() && zl >= 1.0 && zl <= zu) {
        return Err(bad(format!("ratio interval [{zl}, {zu}] must satisfy 1 ≤ low ≤ upp")));
    }
    let mut seen = BTreeSet::new();
    for c in deck.levels.iter().flatten() {
        if !seen.insert(c.clone()) {
            return Err(bad(format!("card {} appears twice", c.label(h))));
        }
    }
    for child in h.children(&deck.node)? {
        if !seen.contains(&Card::Criterion(child.clone())) {
            return Err(bad(format!("missing card for `{}`", h.name(child))));
        }
    }
    let meanings: Vec<Vec<CardMeaning>> = deck
        .levels
        .iter()
        .map(|l| l.iter().map(|c| resolve_card(problem, deck, c)).collect())
        .collect::<Result<_>>()?;
    for (lvl, level) in meanings.iter().enumerate() {
        for m in level {
            match m {
                CardMeaning::Shadow(base, _) => {
                    let base_lvl = deck.level_of(&Card::Criterion(base.clone())).unwrap_or(0);
                    if lvl >= base_lvl {
                        return Err(bad(format!(
                            "shadow card of `{}` must rank strictly below it",
                            h.name(base)
                        )));
                    }
                }
                CardMeaning::Pair(a, b, i) => {
                    let strengthening = matches!(
                        problem.interactions[*i],
                        Interaction::Mutual { effect: MutualEffect::Strengthening, .. }
                    );
                    for m in [a, b] {
                        let ml = deck.level_of(&Card::Criterion(m.clone())).unwrap_or(usize::MAX);
                        if strengthening && lvl <= ml {
                            return Err(bad(format!(
                                "strengthening pair card must rank strictly above `{}`",
                                h.name(m)
                            )));
                        }
                    }
                }
                CardMeaning::Criterion(_) => {}
            }
        }
    }
    Ok(meanings)
}

/// Result of the deterministic procedure on one deck. Values are normalized
/// so that criterion cards plus pair coefficients sum to 100.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeterministicSrf {
    /// Value of one blank-card step before normalization (bottom level = 1).
    pub unit: f64,
    /// Normalized value of every card, bottom level first.
    pub card_values: Vec<(String, f64)>,
    /// Normalized value of every criterion card, by child node.
    pub weights: Vec<(NodeId, f64)>,
    /// Derived interaction coefficients, by index into the declared interactions.
    pub coefficients: Vec<(usize, f64)>,
}

impl DeterministicSrf {
    pub fn card(&self, label: &str) -> Option<f64> {
        self.card_values.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn weight(&self, node: &NodeId) -> Option<f64> {
        self.weights.iter().find(|(n, _)| n == node).map(|(_, v)| *v)
    }

    pub fn coefficient(&self, interaction: usize) -> Option<f64> {
        self.coefficients.iter().find(|(i, _)| *i == interaction).map(|(_, v)| *v)
    }
}

/// Values a deck with point intervals by the unit method and derives the
/// interaction coefficients from the card identities. Fails when the derived
/// coefficients break the net flow condition.
pub fn srf_deterministic(problem: &Problem, deck: &CardDeck) -> Result<DeterministicSrf> {
    let h = &problem.hierarchy;
    let meanings = check_deck(problem, deck)?;
    if !deck.is_deterministic() {
        return Err(Error::Deck {
            node: h.name(&deck.node).into(),
            reason: "deterministic valuation needs point intervals".into(),
        });
    }
    let steps: u32 = deck.blank_cards.iter().map(|b| b.low + 1).sum();
    let unit = (deck.z.0 - 1.0) / steps as f64;
    let mut level_value = Vec::with_capacity(deck.levels.len());
    let mut below = 0u32;
    for s in 0..deck.levels.len() {
        level_value.push(1.0 + below as f64 * unit);
        if s < deck.blank_cards.len() {
            below += deck.blank_cards[s].low + 1;
        }
    }
    let mut raw_weights: BTreeMap<NodeId, f64> = BTreeMap::new();
    for (lvl, level) in meanings.iter().enumerate() {
        for m in level {
            if let CardMeaning::Criterion(n) = m {
                raw_weights.insert(n.clone(), level_value[lvl]);
            }
        }
    }
    let mut raw_coef: Vec<(usize, f64, bool)> = Vec::new();
    for (lvl, level) in meanings.iter().enumerate() {
        for m in level {
            match m {
                CardMeaning::Pair(a, b, i) => {
                    raw_coef.push((*i, level_value[lvl] - raw_weights[a] - raw_weights[b], true))
                }
                CardMeaning::Shadow(base, i) => {
                    raw_coef.push((*i, level_value[lvl] - raw_weights[base], false))
                }
                CardMeaning::Criterion(_) => {}
            }
        }
    }
    let total: f64 = raw_weights.values().sum::<f64>()
        + raw_coef.iter().filter(|c| c.2).map(|c| c.1).sum::<f64>();
    if !(total > 0.0) {
        return Err(Error::Deck {
            node: h.name(&deck.node).into(),
            reason: "cards cannot be normalized (non-positive total)".into(),
        });
    }
    let scale = NORMALIZATION / total;
    let card_values = deck
        .levels
        .iter()
        .enumerate()
        .flat_map(|(lvl, l)| l.iter().map(move |c| (lvl, c)))
        .map(|(lvl, c)| (c.label(h), level_value[lvl] * scale))
        .collect();
    let weights: Vec<(NodeId, f64)> = raw_weights.iter().map(|(n, v)| (n.clone(), v * scale)).collect();
    let coefficients: Vec<(usize, f64)> = raw_coef.iter().map(|&(i, v, _)| (i, v * scale)).collect();

    for &(i, v) in &coefficients {
        let inter = &problem.interactions[i];
        let positive = matches!(inter, Interaction::Mutual { effect: MutualEffect::Strengthening, .. });
        if (positive && v <= 0.0) || (!positive && v >= 0.0) {
            return Err(Error::Interaction(format!(
                "{} gets coefficient {v:.6} at `{}`, which has the wrong sign",
                interaction_label(h, inter),
                h.name(&deck.node)
            )));
        }
    }

    for (node, w) in &weights {
        let mut margin = *w;
        for &(i, v) in &coefficients {
            let hit = match (&problem.interactions[i], v < 0.0) {
                (Interaction::Mutual { .. }, true) => meanings.iter().flatten().any(|m| {
                    matches!(m, CardMeaning::Pair(a, b, j) if *j == i && (a == node || b == node))
                }),
                (Interaction::Antagonistic { .. }, _) => meanings
                    .iter()
                    .flatten()
                    .any(|m| matches!(m, CardMeaning::Shadow(base, j) if *j == i && base == node)),
                _ => false,
            };
            if hit {
                margin -= v.abs();
            }
        }
        if margin < 0.0 {
            return Err(Error::NetFlow { criterion: h.name(node).into(), margin });
        }
    }
    Ok(DeterministicSrf { unit, card_values, weights, coefficients })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variable {
    Weight { criterion: usize },
    Interaction { index: usize },
    Unit { node: NodeId },
}

/// One linear constraint. Strict rows are recorded as non-strict with a
/// flag; the feasibility check and the sampler decide how to tighten them.
#[derive(Clone, Debug, Serialize)]
pub struct Constraint {
    pub row: Row,
    pub strict: bool,
    pub label: String,
}

/// Linear system over the parameters of one category.
#[derive(Clone, Debug, Serialize)]
pub struct ConstraintSystem {
    pub category: String,
    pub variables: Vec<Variable>,
    pub bounds: Vec<(f64, f64)>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Largest violation at `x` of any row or bound, strict rows read as non-strict.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.row.violation(x));
        let bounds = self.bounds.iter().zip(x).map(|(&(lo, hi), &v)| (lo - v).max(v - hi));
        rows.chain(bounds).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest slack at `x` over strict rows (infinite if there are none).
    pub fn strict_margin(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.strict)
            .map(|c| -c.row.violation(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Reads a point of the system as a parameter set.
    pub fn to_parameters(&self, problem: &Problem, x: &[f64]) -> ParameterSet {
        let mut p = ParameterSet::new(self.category.clone(), vec![0.0; problem.hierarchy.num_elementary()]);
        for (v, &val) in self.variables.iter().zip(x) {
            match *v {
                Variable::Weight { criterion } => p.weights[criterion] = val.max(0.0),
                Variable::Interaction { index } => match problem.interactions[index] {
                    Interaction::Mutual { first, second, .. } => {
                        p.pairs.push(PairCoefficient { first, second, value: val })
                    }
                    Interaction::Antagonistic { criterion, opponent } => {
                        p.antagonistic.push(AntagonisticCoefficient { criterion, opponent, value: val })
                    }
                },
                Variable::Unit { .. } => {}
            }
        }
        p
    }
}

type Form = BTreeMap<usize, f64>;

fn add(form: &mut Form, other: &Form, factor: f64) {
    for (&j, &a) in other {
        *form.entry(j).or_insert(0.0) += factor * a;
    }
}

fn to_row(form: Form, relation: Relation, rhs: f64) -> Row {
    Row::new(form.into_iter().filter(|(_, a)| *a != 0.0).collect(), relation, rhs)
}

/// Decks for one category, keyed by node.
pub type CategoryDecks = BTreeMap<NodeId, CardDeck>;

/// Translates the decks of category `category` into its constraint system.
pub fn build_constraints(problem: &Problem, category: usize, decks: &CategoryDecks) -> Result<ConstraintSystem> {
    let h = &problem.hierarchy;
    let cat = problem
        .categories
        .get(category)
        .ok_or_else(|| Error::UnknownCategory(category.to_string()))?
        .name
        .clone();
    let n = h.num_elementary();
    let m = problem.interactions.len();
    let internal = h.internal_nodes();
    for node in &internal {
        if !decks.contains_key(node) {
            return Err(Error::Deck { node: h.name(node).into(), reason: format!("no deck for category `{cat}`") });
        }
    }
    if let Some(extra) = decks.keys().find(|k| !internal.contains(k)) {
        return Err(Error::UnknownNode(extra.to_string()));
    }

    let mut variables: Vec<Variable> = (0..n).map(|t| Variable::Weight { criterion: t }).collect();
    variables.extend((0..m).map(|i| Variable::Interaction { index: i }));
    let unit_of: BTreeMap<NodeId, usize> =
        internal.iter().enumerate().map(|(k, node)| (node.clone(), n + m + k)).collect();
    variables.extend(internal.iter().map(|node| Variable::Unit { node: node.clone() }));
    let mut bounds = vec![(0.0, f64::INFINITY); n];
    bounds.extend(std::iter::repeat_n((f64::NEG_INFINITY, f64::INFINITY), m));
    bounds.extend(std::iter::repeat_n((0.0, f64::INFINITY), internal.len()));

    let mut constraints = Vec::new();
    let node_form = |node: &NodeId| -> Result<Form> {
        Ok(h.elementary_indices(node)?.iter().map(|&t| (t, 1.0)).collect())
    };
    let mut placed = vec![0usize; m];

    for (node, deck) in decks {
        let meanings = check_deck(problem, deck)?;
        let name = h.name(node).to_string();
        let mut level_forms = Vec::new();
        for (lvl, level) in meanings.iter().enumerate() {
            let mut forms = Vec::new();
            for (c, meaning) in deck.levels[lvl].iter().zip(level) {
                let form = match meaning {
                    CardMeaning::Criterion(n) => node_form(n)?,
                    CardMeaning::Pair(a, b, i) => {
                        placed[*i] += 1;
                        let mut f = node_form(a)?;
                        add(&mut f, &node_form(b)?, 1.0);
                        f.insert(n + i, 1.0);
                        f
                    }
                    CardMeaning::Shadow(base, i) => {
                        placed[*i] += 1;
                        let mut f = node_form(base)?;
                        f.insert(n + i, 1.0);
                        f
                    }
                };
                forms.push((c.label(h), form));
            }
            for (label, f) in &forms[1..] {
                let mut diff = f.clone();
                add(&mut diff, &forms[0].1, -1.0);
                constraints.push(Constraint {
                    row: to_row(diff, Relation::Eq, 0.0),
                    strict: false,
                    label: format!("{name}: {label} tied with {}", forms[0].0),
                });
            }
            level_forms.push(forms.swap_remove(0));
        }
        let unit = unit_of[node];
        for (s, gap) in deck.blank_cards.iter().enumerate() {
            let mut diff = level_forms[s + 1].1.clone();
            add(&mut diff, &level_forms[s].1, -1.0);
            let (lo_label, hi_label) = (&level_forms[s].0, &level_forms[s + 1].0);
            let mut with_unit = |count: u32, rel: Relation, what: &str| {
                let mut f = diff.clone();
                f.insert(unit, -(count as f64 + 1.0));
                constraints.push(Constraint {
                    row: to_row(f, rel, 0.0),
                    strict: false,
                    label: format!("{name}: {hi_label} vs {lo_label} {what}"),
                });
            };
            if gap.low == gap.upp {
                with_unit(gap.low, Relation::Eq, &format!("with {} blank cards", gap.low));
            } else {
                with_unit(gap.low, Relation::Ge, &format!("at least {} blank cards", gap.low));
                with_unit(gap.upp, Relation::Le, &format!("at most {} blank cards", gap.upp));
            }
        }
        let (bottom_label, bottom) = &level_forms[0];
        let (top_label, top) = &level_forms[level_forms.len() - 1];
        let mut ratio = |z: f64, rel: Relation| {
            let mut f = top.clone();
            add(&mut f, bottom, -z);
            constraints.push(Constraint {
                row: to_row(f, rel, 0.0),
                strict: false,
                label: format!("{name}: {top_label} {rel} {z} x {bottom_label}"),
            });
        };
        if deck.z.0 == deck.z.1 {
            ratio(deck.z.0, Relation::Eq);
        } else {
            ratio(deck.z.0, Relation::Ge);
            ratio(deck.z.1, Relation::Le);
        }
        constraints.push(Constraint {
            row: to_row(bottom.clone(), Relation::Ge, 0.0),
            strict: true,
            label: format!("{name}: {bottom_label} > 0"),
        });
        constraints.push(Constraint {
            row: Row::new(vec![(unit, 1.0)], Relation::Ge, 0.0),
            strict: true,
            label: format!("{name}: unit > 0"),
        });
    }

    for (i, inter) in problem.interactions.iter().enumerate() {
        let label = interaction_label(h, inter);
        if placed[i] != 1 {
            return Err(Error::Interaction(format!(
                "{label} must be placed on exactly one card for `{cat}` (found {})",
                placed[i]
            )));
        }
        let rel = match inter {
            Interaction::Mutual { effect: MutualEffect::Strengthening, .. } => Relation::Ge,
            _ => Relation::Le,
        };
        constraints.push(Constraint {
            row: Row::new(vec![(n + i, 1.0)], rel, 0.0),
            strict: true,
            label: format!("sign of {label}"),
        });
    }

    let mut norm: Form = (0..n).map(|t| (t, 1.0)).collect();
    for (i, inter) in problem.interactions.iter().enumerate() {
        if matches!(inter, Interaction::Mutual { .. }) {
            norm.insert(n + i, 1.0);
        }
    }
    constraints.push(Constraint {
        row: to_row(norm, Relation::Eq, NORMALIZATION),
        strict: false,
        label: "normalization".into(),
    });

    for t in 0..n {
        let mut f: Form = BTreeMap::from([(t, 1.0)]);
        for (i, inter) in problem.interactions.iter().enumerate() {
            let involved = match *inter {
                Interaction::Mutual { effect: MutualEffect::Weakening, first, second } => first == t || second == t,
                Interaction::Antagonistic { criterion, .. } => criterion == t,
                _ => false,
            };
            if involved {
                f.insert(n + i, 1.0);
            }
        }
        if f.len() > 1 {
            constraints.push(Constraint {
                row: to_row(f, Relation::Ge, 0.0),
                strict: false,
                label: format!("net flow of {}", h.elementary_name(t)),
            });
        }
    }

    Ok(ConstraintSystem { category: cat, variables, bounds, constraints })
}

pub fn interaction_label(h: &CriteriaHierarchy, inter: &Interaction) -> String {
    match *inter {
        Interaction::Mutual { effect, first, second } => format!(
            "{} {{{},{}}}",
            match effect {
                MutualEffect::Strengthening => "strengthening",
                MutualEffect::Weakening => "weakening",
            },
            h.elementary_name(first),
            h.elementary_name(second)
        ),
        Interaction::Antagonistic { criterion, opponent } => {
            format!("antagonistic {}|{}", h.elementary_name(criterion), h.elementary_name(opponent))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible { epsilon: f64, witness: Vec<f64> },
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            Feasibility::Feasible { epsilon, .. } => Some(*epsilon),
            Feasibility::Infeasible => None,
        }
    }
}

/// Smallest ε* accepted as strictly positive.
pub const EPS_MIN: f64 = 1e-9;

/// Maximizes ε subject to the system with every strict row tightened by ε,
/// and ε ≤ 1.
pub fn feasibility_check(sys: &ConstraintSystem) -> Result<Feasibility> {
    let nv = sys.num_vars();
    let eps = nv;
    let mut obj = vec![0.0; nv + 1];
    obj[eps] = 1.0;
    let mut lp = LpProblem::new(Sense::Maximize, obj);
    for (j, &(lo, hi)) in sys.bounds.iter().enumerate() {
        lp.set_bounds(j, lo, hi);
    }
    lp.set_bounds(eps, 0.0, 1.0);
    for c in &sys.constraints {
        let mut coeffs = c.row.coeffs.clone();
        if c.strict {
            match c.row.relation {
                Relation::Ge => coeffs.push((eps, -1.0)),
                Relation::Le => coeffs.push((eps, 1.0)),
                Relation::Eq => {
                    return Err(Error::Internal(format!("strict equality `{}`", c.label)))
                }
            }
        }
        lp.add_row(coeffs, c.row.relation, c.row.rhs);
    }
    match lp::solve_lp(&lp)? {
        LpOutcome::Optimal(sol) if sol.value > EPS_MIN => {
            let mut witness = sol.point;
            witness.truncate(nv);
            Ok(Feasibility::Feasible { epsilon: sol.value, witness })
        }
        LpOutcome::Optimal(_) | LpOutcome::Infeasible => Ok(Feasibility::Infeasible),
        LpOutcome::Unbounded => Err(Error::Internal("ε-program reported unbounded".into())),
    }
}
