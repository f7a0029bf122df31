//! Deterministic classifications minimizing the expected misclassification
//! loss against SMAA marginals, under count requirements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, LpProblem, Relation, Sense};
use crate::smaa::AssignmentDistribution;

/// Tolerance of the loss equality used while enumerating optima.
pub const LOSS_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_SOLUTIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Requirements {
    /// Each action goes to exactly one of the q + 1 categories; when false,
    /// to at least one.
    #[serde(default = "yes")]
    pub exactly_one: bool,
    /// Per real category; missing entries mean 0.
    #[serde(default)]
    pub min_per_category: Vec<usize>,
    /// Per real category; missing entries mean unbounded.
    #[serde(default)]
    pub max_per_category: Vec<Option<usize>>,
    #[serde(default)]
    pub max_dummy: Option<usize>,
}

fn yes() -> bool {
    true
}

impl Default for Requirements {
    fn default() -> Self {
        Requirements { exactly_one: true, min_per_category: Vec::new(), max_per_category: Vec::new(), max_dummy: None }
    }
}

impl Requirements {
    /// Same bounds for every real category.
    pub fn uniform(q: usize, min: usize, max: Option<usize>, max_dummy: Option<usize>) -> Self {
        Requirements { exactly_one: true, min_per_category: vec![min; q], max_per_category: vec![max; q], max_dummy }
    }

    fn min(&self, h: usize) -> usize {
        self.min_per_category.get(h).copied().unwrap_or(0)
    }

    fn max(&self, h: usize) -> Option<usize> {
        self.max_per_category.get(h).copied().flatten()
    }

    /// Aggregate checks that fail before any solving.
    pub fn check(&self, categories: &[String], dummy: &str, actions: usize) -> Result<()> {
        let q = categories.len();
        if self.min_per_category.len() > q || self.max_per_category.len() > q {
            return Err(Error::InfeasibleRequirements(format!("bounds given for more than {q} categories")));
        }
        for (h, name) in categories.iter().enumerate() {
            if let Some(max) = self.max(h) {
                if self.min(h) > max {
                    return Err(Error::InfeasibleRequirements(format!(
                        "`{name}` needs at least {} but at most {max} actions",
                        self.min(h)
                    )));
                }
            }
            if self.min(h) > actions {
                return Err(Error::InfeasibleRequirements(format!(
                    "`{name}` needs at least {} actions but only {actions} exist",
                    self.min(h)
                )));
            }
        }
        if self.exactly_one {
            let need: usize = (0..q).map(|h| self.min(h)).sum();
            if need > actions {
                return Err(Error::InfeasibleRequirements(format!(
                    "the category minimums add up to {need} but there are {actions} actions"
                )));
            }
            let caps: Option<usize> = (0..q).map(|h| self.max(h)).chain([self.max_dummy]).sum();
            if let Some(cap) = caps {
                if cap < actions {
                    return Err(Error::InfeasibleRequirements(format!(
                        "the category maximums (including `{dummy}`) add up to {cap} but there are {actions} actions"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSolution {
    /// `y[a][h]` for h in 0..=q; column q is the dummy.
    pub y: Vec<Vec<bool>>,
    pub loss: f64,
}

impl ClassificationSolution {
    /// Categories (0..=q) receiving action `a`.
    pub fn assigned(&self, a: usize) -> Vec<usize> {
        self.y[a].iter().enumerate().filter(|(_, v)| **v).map(|(h, _)| h).collect()
    }
}

/// Loss of `y` against marginals `b[a][h]` (percent): Σ_a Σ_h y_ah Σ_{k≠h} b_k(a).
pub fn loss(b: &[Vec<f64>], y: &[Vec<bool>]) -> f64 {
    b.iter()
        .zip(y)
        .map(|(row, ya)| {
            let total: f64 = row.iter().sum();
            row.iter().zip(ya).filter(|(_, v)| **v).map(|(bh, _)| total - bh).sum::<f64>()
        })
        .sum()
}

/// Classification problem over explicit marginals.
#[derive(Clone, Debug)]
pub struct LossProblem {
    pub categories: Vec<String>,
    pub dummy: String,
    /// `marginals[a][h]`, h in 0..=q, in percent.
    pub marginals: Vec<Vec<f64>>,
}

impl LossProblem {
    pub fn from_distribution(dist: &AssignmentDistribution, node: usize) -> Self {
        LossProblem {
            categories: dist.categories.clone(),
            dummy: dist.dummy.clone(),
            marginals: dist.marginal_matrix(node),
        }
    }

    fn width(&self) -> usize {
        self.categories.len() + 1
    }

    fn base_lp(&self, req: &Requirements) -> LpProblem {
        let w = self.width();
        let na = self.marginals.len();
        let obj: Vec<f64> = self
            .marginals
            .iter()
            .flat_map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(move |bh| total - bh)
            })
            .collect();
        let mut p = LpProblem::new(Sense::Minimize, obj);
        for j in 0..na * w {
            p.set_binary(j);
        }
        for a in 0..na {
            let coeffs = (0..w).map(|h| (a * w + h, 1.0)).collect();
            let rel = if req.exactly_one { Relation::Eq } else { Relation::Ge };
            p.add_row(coeffs, rel, 1.0);
        }
        for h in 0..w {
            let column: Vec<(usize, f64)> = (0..na).map(|a| (a * w + h, 1.0)).collect();
            let (min, max) = if h + 1 < w { (req.min(h), req.max(h)) } else { (0, req.max_dummy) };
            if min > 0 {
                p.add_row(column.clone(), Relation::Ge, min as f64);
            }
            if let Some(max) = max {
                p.add_row(column, Relation::Le, max as f64);
            }
        }
        p
    }

    fn decode(&self, point: &[f64]) -> ClassificationSolution {
        let w = self.width();
        let y: Vec<Vec<bool>> = point.chunks(w).map(|c| c.iter().map(|v| *v > 0.5).collect()).collect();
        let l = loss(&self.marginals, &y);
        ClassificationSolution { y, loss: l }
    }

    pub fn solve(&self, req: &Requirements) -> Result<ClassificationSolution> {
        req.check(&self.categories, &self.dummy, self.marginals.len())?;
        match lp::solve_binary_ilp(&self.base_lp(req))? {
            LpOutcome::Optimal(s) => Ok(self.decode(&s.point)),
            _ => Err(Error::InfeasibleRequirements(
                "no classification satisfies the requirements together".into(),
            )),
        }
    }

    /// All optimal classifications, in solver order, up to `limit`.
    pub fn enumerate(&self, req: &Requirements, limit: usize) -> Result<Vec<ClassificationSolution>> {
        let first = self.solve(req)?;
        let best = first.loss;
        let mut p = self.base_lp(req);
        let obj: Vec<(usize, f64)> = p.objective.iter().copied().enumerate().filter(|(_, c)| *c != 0.0).collect();
        p.add_row(obj.clone(), Relation::Le, best + LOSS_TOL);
        p.add_row(obj, Relation::Ge, best - LOSS_TOL);
        let mut found = vec![first];
        while found.len() < limit {
            let last = found.last().expect("nonempty");
            // Σ_{y*=1} (1 − y) + Σ_{y*=0} y ≥ 1
            let mut coeffs = Vec::new();
            let mut ones = 0.0;
            for (j, v) in last.y.iter().flatten().enumerate() {
                if *v {
                    coeffs.push((j, -1.0));
                    ones += 1.0;
                } else {
                    coeffs.push((j, 1.0));
                }
            }
            p.add_row(coeffs, Relation::Ge, 1.0 - ones);
            match lp::solve_binary_ilp(&p)? {
                LpOutcome::Optimal(s) => found.push(self.decode(&s.point)),
                _ => break,
            }
        }
        Ok(found)
    }
}

pub fn solve_classification(
    dist: &AssignmentDistribution,
    node: usize,
    req: &Requirements,
) -> Result<ClassificationSolution> {
    LossProblem::from_distribution(dist, node).solve(req)
}

pub fn enumerate_optima(
    dist: &AssignmentDistribution,
    node: usize,
    req: &Requirements,
) -> Result<Vec<ClassificationSolution>> {
    LossProblem::from_distribution(dist, node).enumerate(req, DEFAULT_MAX_SOLUTIONS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(marginals: Vec<Vec<f64>>) -> LossProblem {
        let q = marginals[0].len() - 1;
        LossProblem {
            categories: (1..=q).map(|h| format!("C{h}")).collect(),
            dummy: format!("C{}", q + 1),
            marginals,
        }
    }

    #[test]
    fn modal_assignment_has_zero_loss() {
        let p = lp(vec![vec![100.0, 0.0, 0.0], vec![0.0, 100.0, 0.0], vec![0.0, 0.0, 100.0]]);
        let all = p.enumerate(&Requirements::default(), 10).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].loss, 0.0);
        assert_eq!((0..3).map(|a| all[0].assigned(a)).collect::<Vec<_>>(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn joint_mass_splits_under_caps() {
        // Three actions alike to both C1 and C2, at most two per category.
        let row = vec![100.0, 100.0, 0.0];
        let p = lp(vec![row.clone(), row.clone(), row]);
        let req = Requirements::uniform(2, 1, Some(2), Some(0));
        let all = p.enumerate(&req, 100).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|s| (s.loss - 300.0).abs() < 1e-9));
        // Leading ones first: a1 → C1, a2 → C1, a3 → C2.
        assert_eq!(all[0].assigned(0), vec![0]);
        assert_eq!(all[0].assigned(1), vec![0]);
        assert_eq!(all[0].assigned(2), vec![1]);
    }

    #[test]
    fn aggregate_infeasibility_is_explained() {
        let p = lp(vec![vec![100.0, 0.0, 0.0]; 3]);
        let err = p.solve(&Requirements::uniform(2, 2, Some(2), Some(0))).unwrap_err();
        assert!(err.to_string().contains("minimums add up to 4"), "{err}");
        let err = p.solve(&Requirements::uniform(2, 0, Some(1), Some(0))).unwrap_err();
        assert!(err.to_string().contains("maximums"), "{err}");
        let err = p.solve(&Requirements::uniform(2, 3, Some(2), None)).unwrap_err();
        assert!(err.to_string().contains("at least 3 but at most 2"), "{err}");
    }

    #[test]
    fn at_least_one_mode() {
        let p = lp(vec![vec![60.0, 60.0, 0.0]]);
        let req = Requirements { exactly_one: false, min_per_category: vec![1, 1], ..Requirements::default() };
        let s = p.solve(&req).unwrap();
        assert_eq!(s.assigned(0), vec![0, 1]);
        assert!((s.loss - 120.0).abs() < 1e-9);
    }
}
