//! Dense linear and 0-1 integer programming.
//!
//! The solver is a two-phase tableau simplex. Pricing is Dantzig's rule and
//! switches to Bland's rule once a run of degenerate pivots is observed, which
//! rules out cycling. Instances in this crate are small (tens of variables,
//! around a hundred rows), so a dense tableau is the right tool.
//!
//! Binary programs are solved by depth-first branch and bound over the LP
//! relaxation. Variables are branched in declaration order with the `1`
//! branch first, so among several optimal 0-1 points the one returned is the
//! first in that order (the lexicographically greatest vector).

use crate::error::{Error, Result};

/// Absolute feasibility tolerance on constraint rows.
pub const FEAS_TOL: f64 = 1e-8;
/// Tolerance used to decide that a relaxation value is integral.
pub const INT_TOL: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One sparse constraint row.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Row { coeffs, relation, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Signed violation of the row at `x` (positive means violated).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable `(lower, upper)`; either side may be infinite.
    pub bounds: Vec<(f64, f64)>,
    /// Integrality flags; a flagged variable is restricted to {0, 1}.
    pub binary: Vec<bool>,
}

impl LpProblem {
    /// A problem over `n` nonnegative continuous variables.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
            binary: vec![false; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row::new(coeffs, relation, rhs));
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = (f64::NEG_INFINITY, f64::INFINITY);
    }

    pub fn set_binary(&mut self, var: usize) {
        self.binary[var] = true;
        self.bounds[var] = (0.0, 1.0);
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x));
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidLp("problem has no variables".into()));
        }
        if self.bounds.len() != n || self.binary.len() != n {
            return Err(Error::InvalidLp("bounds/integrality length mismatch".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidLp("non-finite objective coefficient".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidLp(format!("row {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(Error::InvalidLp(format!("row {i} has an invalid coefficient")));
                }
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidLp(format!("variable {j} has invalid bounds")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

/// How an original variable is expressed over the nonnegative columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    Fixed(f64),
    /// x = offset + col
    Shifted { col: usize, offset: f64 },
    /// x = offset - col
    Mirrored { col: usize, offset: f64 },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

/// Solves the continuous relaxation (integrality flags are ignored).
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    for &(lo, hi) in &p.bounds {
        if lo > hi + FEAS_TOL {
            return Ok(LpOutcome::Infeasible);
        }
    }

    let mut maps = Vec::with_capacity(p.num_vars());
    let mut ncols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &p.bounds {
        let m = if lo.is_finite() && hi.is_finite() && (hi - lo).abs() <= FEAS_TOL {
            VarMap::Fixed(lo)
        } else if lo.is_finite() {
            let col = ncols;
            ncols += 1;
            if hi.is_finite() {
                upper_rows.push((col, hi - lo));
            }
            VarMap::Shifted { col, offset: lo }
        } else if hi.is_finite() {
            let col = ncols;
            ncols += 1;
            VarMap::Mirrored { col, offset: hi }
        } else {
            let pos = ncols;
            let neg = ncols + 1;
            ncols += 2;
            VarMap::Split { pos, neg }
        };
        maps.push(m);
    }

    // Objective is always minimized internally.
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for (j, &c) in p.objective.iter().enumerate() {
        let c = sign * c;
        match maps[j] {
            VarMap::Fixed(_) => {}
            VarMap::Shifted { col, .. } => cost[col] += c,
            VarMap::Mirrored { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut std_rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for row in &p.rows {
        let mut dense = vec![0.0; ncols];
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            match maps[j] {
                VarMap::Fixed(v) => rhs -= a * v,
                VarMap::Shifted { col, offset } => {
                    dense[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    dense[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    dense[pos] += a;
                    dense[neg] -= a;
                }
            }
        }
        if dense.iter().all(|a| a.abs() < 1e-14) {
            let ok = match row.relation {
                Relation::Le => 0.0 <= rhs + FEAS_TOL,
                Relation::Ge => 0.0 >= rhs - FEAS_TOL,
                Relation::Eq => rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        std_rows.push((dense, row.relation, rhs));
    }
    for (col, ub) in upper_rows {
        let mut dense = vec![0.0; ncols];
        dense[col] = 1.0;
        std_rows.push((dense, Relation::Le, ub));
    }

    let outcome = if ncols == 0 {
        Tableau::trivial_outcome()
    } else {
        Tableau::build(&cost, std_rows).solve()?
    };

    Ok(match outcome {
        StdOutcome::Infeasible => LpOutcome::Infeasible,
        StdOutcome::Unbounded => LpOutcome::Unbounded,
        StdOutcome::Optimal(cols) => {
            let point: Vec<f64> = maps
                .iter()
                .map(|m| match *m {
                    VarMap::Fixed(v) => v,
                    VarMap::Shifted { col, offset } => offset + cols[col],
                    VarMap::Mirrored { col, offset } => offset - cols[col],
                    VarMap::Split { pos, neg } => cols[pos] - cols[neg],
                })
                .collect();
            let value = p.objective_value(&point);
            if p.max_violation(&point) > 1e-6 {
                return Err(Error::NumericalBreakdown(format!(
                    "simplex point violates its constraints by {:.3e}",
                    p.max_violation(&point)
                )));
            }
            LpOutcome::Optimal(LpSolution { value, point })
        }
    })
}

enum StdOutcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

/// Tableau for `min c x, A x (rel) b, x >= 0` with `b >= 0` after row flips.
struct Tableau {
    /// m rows, each of width `width + 1` (last entry is the rhs).
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    n_total: usize,
    artificial_start: usize,
    cost: Vec<f64>,
}

impl Tableau {
    fn trivial_outcome() -> StdOutcome {
        StdOutcome::Optimal(Vec::new())
    }

    fn build(cost: &[f64], rows: Vec<(Vec<f64>, Relation, f64)>) -> Self {
        let n_struct = cost.len();
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = rows
            .into_iter()
            .map(|(mut a, rel, b)| {
                if b < 0.0 {
                    a.iter_mut().for_each(|v| *v = -*v);
                    let rel = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a, rel, -b)
                } else {
                    (a, rel, b)
                }
            })
            .collect();

        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = n_struct + n_slack;
        let n_total = artificial_start + n_art;

        let mut a = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let mut slack = n_struct;
        let mut art = artificial_start;
        for (coeffs, rel, b) in rows.drain(..) {
            let mut line = vec![0.0; n_total + 1];
            line[..n_struct].copy_from_slice(&coeffs);
            line[n_total] = b;
            match rel {
                Relation::Le => {
                    line[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    line[slack] = -1.0;
                    slack += 1;
                    line[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    line[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            a.push(line);
        }

        Tableau { a, basis, n_struct, n_total, artificial_start, cost: cost.to_vec() }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i][self.n_total]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.n_total + 1;
        let pv = self.a[r][c];
        for k in 0..width {
            self.a[r][k] /= pv;
        }
        let prow = self.a[r].clone();
        for (i, line) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = line[c];
            if f != 0.0 {
                for k in 0..width {
                    line[k] -= f * prow[k];
                }
                line[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex loop minimizing `obj` over columns `allowed`.
    /// Returns false if unbounded.
    fn optimize(&mut self, obj: &[f64], allowed: usize) -> Result<bool> {
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_PIVOTS {
            let use_bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            // reduced costs d_j = c_j - c_B B^-1 A_j
            let mut entering = None;
            let mut best = -COST_TOL;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = obj[j];
                for (i, &bi) in self.basis.iter().enumerate() {
                    let cb = if bi < obj.len() { obj[bi] } else { 0.0 };
                    if cb != 0.0 {
                        d -= cb * self.a[i][j];
                    }
                }
                if d < best {
                    entering = Some(j);
                    if use_bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let aic = self.a[i][c];
                if aic > PIVOT_TOL {
                    let ratio = self.rhs(i) / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.abs() < 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::NumericalBreakdown("simplex pivot limit reached".into()))
    }

    fn solve(mut self) -> Result<StdOutcome> {
        let m = self.a.len();
        // Phase 1: minimize the sum of artificials.
        if self.artificial_start < self.n_total {
            let mut phase1 = vec![0.0; self.n_total];
            for v in phase1.iter_mut().skip(self.artificial_start) {
                *v = 1.0;
            }
            self.optimize(&phase1, self.n_total)?;
            let infeas: f64 = (0..m)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.rhs(i))
                .sum();
            let scale = 1.0 + (0..m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max);
            if infeas > 1e-9 * scale {
                return Ok(StdOutcome::Infeasible);
            }
            // Drive remaining artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.a.len() {
                if self.basis[i] >= self.artificial_start {
                    let col = (0..self.artificial_start)
                        .filter(|j| !self.basis.contains(j))
                        .max_by(|&x, &y| {
                            self.a[i][x].abs().partial_cmp(&self.a[i][y].abs()).unwrap()
                        })
                        .filter(|&j| self.a[i][j].abs() > 1e-9);
                    match col {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.a.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        // Phase 2 over structural and slack columns only.
        let mut phase2 = vec![0.0; self.artificial_start];
        phase2[..self.n_struct].copy_from_slice(&self.cost);
        if !self.optimize(&phase2, self.artificial_start)? {
            return Ok(StdOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        Ok(StdOutcome::Optimal(x))
    }
}

/// Solves a problem whose flagged variables must be 0 or 1.
///
/// Unflagged variables stay continuous. The search is exact: a subtree is
/// pruned only when its relaxation bound cannot beat the incumbent by more
/// than [`INT_TOL`].
pub fn solve_binary_ilp(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    let order: Vec<usize> = (0..p.num_vars()).filter(|&j| p.binary[j]).collect();
    let mut work = p.clone();
    for &j in &order {
        work.bounds[j] = (0.0, 1.0);
    }
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut search = BranchAndBound { order: &order, sign, best: None };
    search.dive(&mut work, 0)?;
    Ok(match search.best {
        Some((_, point)) => {
            let value = p.objective_value(&point);
            LpOutcome::Optimal(LpSolution { value, point })
        }
        None => LpOutcome::Infeasible,
    })
}

struct BranchAndBound<'a> {
    order: &'a [usize],
    sign: f64,
    /// Incumbent as (internal minimization value, point).
    best: Option<(f64, Vec<f64>)>,
}

impl BranchAndBound<'_> {
    fn dive(&mut self, p: &mut LpProblem, depth: usize) -> Result<()> {
        let relaxed = match solve_lp(p)? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => return Ok(()),
            LpOutcome::Unbounded => {
                return Err(Error::InvalidLp("binary program has an unbounded relaxation".into()))
            }
        };
        let bound = self.sign * relaxed.value;
        if let Some((best, _)) = &self.best {
            if bound >= best - INT_TOL {
                return Ok(());
            }
        }
        if depth == self.order.len() {
            let mut point = relaxed.point;
            for &j in self.order {
                point[j] = point[j].round();
            }
            let value = self.sign * p.objective_value(&point);
            let better = self.best.as_ref().is_none_or(|(b, _)| value < b - INT_TOL);
            if better {
                self.best = Some((value, point));
            }
            return Ok(());
        }
        let var = self.order[depth];
        let saved = p.bounds[var];
        for v in [1.0, 0.0] {
            p.bounds[var] = (v, v);
            self.dive(p, depth + 1)?;
        }
        p.bounds[var] = saved;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_maximum() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        p.add_row(vec![(1, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap().optimal().unwrap();
        assert!((s.value - 2.0).abs() < 1e-9);
        assert!((s.point[0] - 1.0).abs() < 1e-9 && (s.point[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn epsilon_capped_at_one() {
        // max eps s.t. x >= eps, x <= 1, eps <= 1, both free
        let mut p = LpProblem::new(Sense::Maximize, vec![0.0, 1.0]);
        p.set_free(0);
        p.set_free(1);
        p.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Ge, 0.0);
        p.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        p.add_row(vec![(1, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap().optimal().unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0]);
        p.add_row(vec![(0, 1.0)], Relation::Ge, 2.0);
        p.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        assert!(solve_lp(&p).unwrap().is_infeasible());

        let mut q = LpProblem::new(Sense::Maximize, vec![1.0, 0.0]);
        q.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&q).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + 2y s.t. x + y = 3, x - y >= -1, x <= 1.5
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 2.0]);
        p.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 3.0);
        p.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Ge, -1.0);
        p.set_bounds(0, 0.0, 1.5);
        let s = solve_lp(&p).unwrap().optimal().unwrap();
        assert!((s.value - 4.5).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        p.add_row(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 2.0);
        let s = solve_lp(&p).unwrap().optimal().unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mirrored_and_fixed_variables() {
        // max x with x <= -2 and lower unbounded; y fixed at 3
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.set_bounds(0, f64::NEG_INFINITY, -2.0);
        p.set_bounds(1, 3.0, 3.0);
        let s = solve_lp(&p).unwrap().optimal().unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn binary_tie_break_prefers_leading_ones() {
        let mut p = LpProblem::new(Sense::Minimize, vec![0.0; 3]);
        for j in 0..3 {
            p.set_binary(j);
        }
        p.add_row((0..3).map(|j| (j, 1.0)).collect(), Relation::Eq, 1.0);
        let s = solve_binary_ilp(&p).unwrap().optimal().unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.point, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn binary_knapsack() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 4
        let mut p = LpProblem::new(Sense::Maximize, vec![5.0, 4.0, 3.0]);
        for j in 0..3 {
            p.set_binary(j);
        }
        p.add_row(vec![(0, 2.0), (1, 3.0), (2, 1.0)], Relation::Le, 4.0);
        let s = solve_binary_ilp(&p).unwrap().optimal().unwrap();
        assert_eq!(s.point, vec![1.0, 0.0, 1.0]);
        assert!((s.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn binary_infeasible() {
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 1.0]);
        p.set_binary(0);
        p.set_binary(1);
        p.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.5);
        assert!(solve_binary_ilp(&p).unwrap().is_infeasible());
    }

    #[test]
    fn rejects_non_finite_input() {
        let p = LpProblem::new(Sense::Minimize, vec![f64::NAN]);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidLp(_))));
    }
}
