//! End-to-end operations on a compiled model.

use rayon::prelude::*;
use serde::Serialize;

use crate::document::{Model, SmaaSettings};
use crate::error::{Error, Result};
use crate::hierarchy::NodeId;
use crate::likeness::ParameterSet;
use crate::robust::{ClassificationSolution, LossProblem, Requirements, DEFAULT_MAX_SOLUTIONS};
use crate::sampler::{compile_polytope, hit_and_run, HarConfig};
use crate::smaa::{decode_batch, run_smaa, AssignmentDistribution};
use crate::srf::{build_constraints, feasibility_check, ConstraintSystem, Feasibility};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryFeasibility {
    pub category: String,
    pub feasible: bool,
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub categories: Vec<CategoryFeasibility>,
}

impl FeasibilityReport {
    pub fn all_feasible(&self) -> bool {
        self.categories.iter().all(|c| c.feasible)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.categories {
            let line = match (&c.error, c.epsilon) {
                (Some(e), _) => format!("{}: invalid ({e})\n", c.category),
                (None, Some(eps)) => format!("{}: feasible, ε* = {eps:.6}\n", c.category),
                (None, None) => format!("{}: infeasible, no compatible parameters\n", c.category),
            };
            out.push_str(&line);
        }
        out
    }
}

/// Constraint system of every category, in category order.
pub fn constraint_systems(model: &Model) -> Result<Vec<ConstraintSystem>> {
    (0..model.problem.num_categories())
        .map(|h| build_constraints(&model.problem, h, &model.decks[h]))
        .collect()
}

pub fn feasibility(model: &Model) -> FeasibilityReport {
    let categories = (0..model.problem.num_categories())
        .into_par_iter()
        .map(|h| {
            let category = model.problem.categories[h].name.clone();
            let res = build_constraints(&model.problem, h, &model.decks[h]).and_then(|s| feasibility_check(&s));
            match res {
                Ok(Feasibility::Feasible { epsilon, .. }) => {
                    CategoryFeasibility { category, feasible: true, epsilon: Some(epsilon), error: None }
                }
                Ok(Feasibility::Infeasible) => {
                    CategoryFeasibility { category, feasible: false, epsilon: None, error: None }
                }
                Err(e) => CategoryFeasibility { category, feasible: false, epsilon: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    FeasibilityReport { categories }
}

/// Samples `settings.samples` parameter sets per category. Category h runs
/// on stream h of the seeded generator, so categories sample concurrently
/// and reproducibly.
pub fn sample_parameters(model: &Model, settings: &SmaaSettings) -> Result<Vec<Vec<ParameterSet>>> {
    let systems = constraint_systems(model)?;
    let config = HarConfig { seed: settings.seed, burn_in: settings.burn_in, thinning: settings.thinning };
    systems
        .par_iter()
        .enumerate()
        .map(|(h, sys)| {
            let eps = match feasibility_check(sys)? {
                Feasibility::Feasible { epsilon, .. } => epsilon,
                Feasibility::Infeasible => {
                    return Err(Error::Infeasible(format!("category `{}` has no compatible parameters", sys.category)))
                }
            };
            let poly = compile_polytope(sys, eps)?;
            let batch = hit_and_run(&poly, &poly.center, settings.samples, config, h as u64)?;
            Ok(decode_batch(&model.problem, sys, &batch))
        })
        .collect()
}

/// Runs SMAA at every non-elementary node.
pub fn smaa(model: &Model, settings: &SmaaSettings) -> Result<AssignmentDistribution> {
    let report = feasibility(model);
    if !report.all_feasible() {
        return Err(Error::Infeasible(report.render().trim_end().replace('\n', "; ")));
    }
    let params = sample_parameters(model, settings)?;
    run_smaa(&model.problem, &params, &model.problem.hierarchy.internal_nodes())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub node: NodeId,
    pub node_name: String,
    pub requirements: Requirements,
    pub loss: f64,
    pub solutions: Vec<ClassificationSolution>,
}

/// All optimal classifications at `node` under `req`.
pub fn classify(dist: &AssignmentDistribution, node: &NodeId, node_name: &str, req: &Requirements) -> Result<Classification> {
    let ni = dist.node_index(node)?;
    let solutions = LossProblem::from_distribution(dist, ni).enumerate(req, DEFAULT_MAX_SOLUTIONS)?;
    Ok(Classification {
        node: node.clone(),
        node_name: node_name.to_string(),
        requirements: req.clone(),
        loss: solutions[0].loss,
        solutions,
    })
}

impl Classification {
    /// Table with one row per action and one column per optimum.
    pub fn render(&self, dist: &AssignmentDistribution) -> String {
        let label = |h: usize| -> String {
            if h < dist.categories.len() {
                dist.categories[h].clone()
            } else {
                dist.dummy.clone()
            }
        };
        let mut out = format!(
            "node {} ({}): L* = {:.3}, {} optimal classification(s)\n",
            self.node,
            self.node_name,
            self.loss,
            self.solutions.len()
        );
        let width = dist.actions.iter().map(|a| a.len()).max().unwrap_or(0).max(6);
        out.push_str(&format!("{:<width$}", "action"));
        for k in 1..=self.solutions.len() {
            out.push_str(&format!("  #{k:<6}"));
        }
        out.push('\n');
        for (a, name) in dist.actions.iter().enumerate() {
            out.push_str(&format!("{name:<width$}"));
            for s in &self.solutions {
                let cell: Vec<String> = s.assigned(a).into_iter().map(label).collect();
                out.push_str(&format!("  {:<7}", cell.join("+")));
            }
            out.push('\n');
        }
        out
    }
}
