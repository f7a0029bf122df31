//! Hit-and-run sampling of the parameter polytope.
//!
//! Equalities are eliminated by writing x = x0 + N·y with N an orthonormal
//! basis of their null space; the walk then runs in y. Strict rows are
//! closed by a margin τ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, LpProblem, Relation, Sense};
use crate::srf::{feasibility_check, ConstraintSystem, Feasibility};

pub const DEFAULT_BURN_IN: usize = 1000;
pub const DEFAULT_THINNING: usize = 5;
const DEP_TOL: f64 = 1e-9;

/// Inequalities a·y ≤ b over the free coordinates y, with x = offset + basis·y.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub offset: Vec<f64>,
    /// Orthonormal null-space vectors, each of full dimension.
    pub basis: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub tau: f64,
    /// Chebyshev center in y coordinates.
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Polytope {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.offset.len()
    }

    pub fn to_full(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.offset.clone();
        for (v, &c) in self.basis.iter().zip(y) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
        x
    }

    /// Smallest slack b − a·y over all inequalities.
    pub fn margin(&self, y: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &b)| b - dot(row, y))
            .fold(f64::INFINITY, f64::min)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes the rows of `rows` (modified Gram-Schmidt, two passes).
/// Returns the orthonormal rows and, for each, the combination of input rows
/// producing it; dependent rows are reported separately with their residual
/// combination.
struct RowSpace {
    q: Vec<Vec<f64>>,
    t: Vec<Vec<f64>>,
    dependent: Vec<Vec<f64>>,
}

fn row_space(rows: &[Vec<f64>]) -> RowSpace {
    let m = rows.len();
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut t: Vec<Vec<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let scale = norm(row).max(1.0);
        let mut v = row.clone();
        let mut c = vec![0.0; m];
        c[i] = 1.0;
        for _ in 0..2 {
            for (qj, tj) in q.iter().zip(&t) {
                let p = dot(&v, qj);
                v.iter_mut().zip(qj).for_each(|(x, y)| *x -= p * y);
                c.iter_mut().zip(tj).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nv = norm(&v);
        if nv <= DEP_TOL * scale {
            dependent.push(c);
        } else {
            v.iter_mut().for_each(|x| *x /= nv);
            c.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
            t.push(c);
        }
    }
    RowSpace { q, t, dependent }
}

/// Orthonormal basis of the complement of the span of `q` (orthonormal rows) in R^n.
fn null_space(q: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        if basis.len() + q.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        for _ in 0..2 {
            for u in q.iter().chain(basis.iter()) {
                let p = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    basis
}

/// Builds the polytope of a constraint system whose feasibility check
/// returned `eps_star`.
pub fn compile_polytope(sys: &ConstraintSystem, eps_star: f64) -> Result<Polytope> {
    if !(eps_star > 0.0) {
        return Err(Error::Polytope(format!("ε* = {eps_star} is not positive")));
    }
    let n = sys.num_vars();
    let tau = (1e-6f64).min(eps_star / 2.0);
    let dense = |coeffs: &[(usize, f64)]| {
        let mut v = vec![0.0; n];
        coeffs.iter().for_each(|&(j, a)| v[j] += a);
        v
    };
    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for c in &sys.constraints {
        let row = dense(&c.row.coeffs);
        let shift = if c.strict { tau } else { 0.0 };
        match c.row.relation {
            Relation::Eq => {
                eq_rows.push(row);
                eq_rhs.push(c.row.rhs);
            }
            Relation::Le => {
                g.push(row);
                h.push(c.row.rhs - shift);
            }
            Relation::Ge => {
                g.push(row.iter().map(|v| -v).collect());
                h.push(-c.row.rhs - shift);
            }
        }
    }
    for (j, &(lo, hi)) in sys.bounds.iter().enumerate() {
        if lo.is_finite() {
            let mut r = vec![0.0; n];
            r[j] = -1.0;
            g.push(r);
            h.push(-lo);
        }
        if hi.is_finite() {
            let mut r = vec![0.0; n];
            r[j] = 1.0;
            g.push(r);
            h.push(hi);
        }
    }

    let rs = row_space(&eq_rows);
    for c in &rs.dependent {
        let resid = dot(c, &eq_rhs);
        if resid.abs() > 1e-7 * eq_rhs.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
            return Err(Error::Polytope("equalities are inconsistent".into()));
        }
    }
    // Least-norm solution of the equalities: x0 = Σ q_i (t_i · e).
    let mut offset = vec![0.0; n];
    for (qi, ti) in rs.q.iter().zip(&rs.t) {
        let c = dot(ti, &eq_rhs);
        offset.iter_mut().zip(qi).for_each(|(x, y)| *x += c * y);
    }
    for (row, &e) in eq_rows.iter().zip(&eq_rhs) {
        if (dot(row, &offset) - e).abs() > 1e-10 * e.abs().max(1.0) {
            return Err(Error::NumericalBreakdown("equality offset residual too large".into()));
        }
    }
    let basis = null_space(&rs.q, n);
    let k = basis.len();

    let mut a = Vec::with_capacity(g.len());
    let mut b = Vec::with_capacity(g.len());
    for (row, &rhs) in g.iter().zip(&h) {
        let ay: Vec<f64> = basis.iter().map(|v| dot(row, v)).collect();
        let slack = rhs - dot(row, &offset);
        let scale = norm(row).max(1.0);
        if norm(&ay) <= 1e-12 * scale {
            if slack < -1e-9 * scale {
                return Err(Error::Polytope("a constant inequality is violated".into()));
            }
            continue;
        }
        a.push(ay);
        b.push(slack);
    }

    if k == 0 {
        return Ok(Polytope { offset, basis, a, b, tau, center: Vec::new(), radius: 0.0 });
    }
    let r = k;
    let mut lp = LpProblem::new(Sense::Maximize, {
        let mut o = vec![0.0; k + 1];
        o[r] = 1.0;
        o
    });
    for j in 0..k {
        lp.set_free(j);
    }
    for (row, &rhs) in a.iter().zip(&b) {
        let mut coeffs: Vec<(usize, f64)> = row.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        coeffs.push((r, norm(row)));
        lp.add_row(coeffs, Relation::Le, rhs);
    }
    let sol = match lp::solve_lp(&lp)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::Polytope("empty polytope".into())),
        LpOutcome::Unbounded => return Err(Error::Polytope("unbounded polytope".into())),
    };
    if sol.value <= 0.0 {
        return Err(Error::Polytope("the polytope has an empty interior".into()));
    }
    let center = sol.point[..k].to_vec();
    Ok(Polytope { offset, basis, a, b, tau, center, radius: sol.value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
}

impl HarConfig {
    pub fn new(seed: u64) -> Self {
        HarConfig { seed, burn_in: DEFAULT_BURN_IN, thinning: DEFAULT_THINNING }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub stream: u64,
    pub burn_in: usize,
    pub thinning: usize,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Runs a hit-and-run chain from `start` (y coordinates). The generator is
/// ChaCha8 seeded from `config.seed` on stream `stream`.
pub fn hit_and_run(p: &Polytope, start: &[f64], n: usize, config: HarConfig, stream: u64) -> Result<SampleBatch> {
    let mut batch = SampleBatch {
        points: Vec::with_capacity(n),
        seed: config.seed,
        stream,
        burn_in: config.burn_in,
        thinning: config.thinning,
    };
    let k = p.dimension();
    if k == 0 {
        batch.points = vec![p.offset.clone(); n];
        return Ok(batch);
    }
    if start.len() != k {
        return Err(Error::Sampler(format!("start has {} coordinates, expected {k}", start.len())));
    }
    if !(p.margin(start) > 0.0) {
        return Err(Error::Sampler("start point is not interior".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let thin = config.thinning.max(1);
    let mut y = start.to_vec();
    let mut d = vec![0.0; k];
    let steps = config.burn_in + n * thin;
    for step in 1..=steps {
        loop {
            d.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let nd = norm(&d);
            if nd > 1e-12 {
                d.iter_mut().for_each(|v| *v /= nd);
                break;
            }
        }
        let (lo, hi) = chord(p, &y, &d)?;
        let t = rng.random_range(lo..=hi);
        y.iter_mut().zip(&d).for_each(|(yi, di)| *yi += t * di);
        if step > config.burn_in && (step - config.burn_in).is_multiple_of(thin) {
            batch.points.push(p.to_full(&y));
        }
    }
    Ok(batch)
}

/// Interval of t keeping y + t·d inside the polytope.
pub fn chord(p: &Polytope, y: &[f64], d: &[f64]) -> Result<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (row, &b) in p.a.iter().zip(&p.b) {
        let c = dot(row, d);
        let slack = (b - dot(row, y)).max(0.0);
        if c > 1e-14 {
            hi = hi.min(slack / c);
        } else if c < -1e-14 {
            lo = lo.max(slack / c);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Sampler("unbounded chord".into()));
    }
    if hi < lo {
        return Err(Error::Sampler("empty chord".into()));
    }
    Ok((lo, hi))
}

/// Feasibility check, compilation and sampling of one category's system.
pub fn sample_system(sys: &ConstraintSystem, n: usize, config: HarConfig, stream: u64) -> Result<SampleBatch> {
    let eps = match feasibility_check(sys)? {
        Feasibility::Feasible { epsilon, .. } => epsilon,
        Feasibility::Infeasible => {
            return Err(Error::Polytope(format!(
                "no parameters of `{}` are compatible with the decks",
                sys.category
            )))
        }
    };
    let poly = compile_polytope(sys, eps)?;
    hit_and_run(&poly, &poly.center.clone(), n, config, stream)
}
