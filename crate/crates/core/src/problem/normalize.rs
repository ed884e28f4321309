//! Min-max normalization of raw objectives over the feasible region.
//!
//! Affine objectives get their extremes from two LP solves. Convex quadratic
//! objectives take their minimum from a QP solve; their maximum is attained at
//! a vertex, found by enumerating candidate active sets when the count is
//! tractable and otherwise estimated from a Latin-hypercube feasible sample
//! (flagged approximate).

use nalgebra::{DMatrix, DVector};

use super::{
    AffineForm, MultiObjectiveProblem, ObjectiveForm, ProblemKind, QuadraticForm, RankOneTerm,
    ScalarizedProblem,
};
use crate::error::{Error, Result};
use crate::rng::{Purpose, Stream};
use crate::solver::{solve_lp, solve_qp, SolverConfig, SolverStatus};

/// Candidate active-set cap for exact vertex enumeration.
const MAX_CANDIDATE_BASES: u128 = 1 << 20;
/// Sample size of the approximate fallback.
const LHS_FALLBACK_SAMPLES: usize = 8192;
/// Fixed probe stream so normalization is reproducible without a caller seed.
const FALLBACK_SEED: u64 = 0x6d6d78_6e6f726d;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxEstimate {
    /// Exact, from an LP solve.
    Lp,
    /// Exact, from enumerating basic feasible points.
    VertexEnumeration,
    /// Approximate, from a feasible Latin-hypercube sample.
    LhsApproximate,
}

#[derive(Debug, Clone)]
pub struct NormalizationNote {
    pub objective: String,
    pub f_min: f64,
    pub f_max: f64,
    pub max_method: MaxEstimate,
}

#[derive(Debug, Clone)]
pub struct NormalizedProblem {
    pub problem: MultiObjectiveProblem,
    pub notes: Vec<NormalizationNote>,
}

/// Rescale every objective to `(f - f_min) / (f_max - f_min)` over the
/// feasible region.
pub fn minmax_normalize(problem_raw: &MultiObjectiveProblem) -> Result<NormalizedProblem> {
    problem_raw.validate()?;
    let cfg = SolverConfig::default();
    let mut problem = problem_raw.clone();
    let mut notes = Vec::new();

    for objective in &mut problem.objectives {
        let name = objective.name.clone();
        let (f_min, f_max, max_method) = match &objective.form {
            ObjectiveForm::Affine(a) => {
                let lo = affine_extreme(problem_raw, a, 1.0, &cfg, &name)?;
                let hi = affine_extreme(problem_raw, a, -1.0, &cfg, &name)?;
                (lo, hi, MaxEstimate::Lp)
            }
            ObjectiveForm::Quadratic(q) => {
                let lo = quadratic_minimum(problem_raw, q, &cfg, &name)?;
                let (hi, method) = quadratic_maximum(problem_raw, q, &name)?;
                (lo, hi, method)
            }
        };
        let range = f_max - f_min;
        if !(range > 1e-12) {
            return Err(Error::InvalidProblem(format!(
                "objective `{name}` has zero range over the feasible region"
            )));
        }
        match &mut objective.form {
            ObjectiveForm::Affine(a) => {
                for c in a.coefficients.values_mut() {
                    *c /= range;
                }
                a.constant = (a.constant - f_min) / range;
            }
            ObjectiveForm::Quadratic(q) => {
                q.scale /= range;
                for c in q.linear.coefficients.values_mut() {
                    *c /= range;
                }
                q.linear.constant /= range;
                q.offset = (q.offset - f_min) / range;
            }
        }
        notes.push(NormalizationNote {
            objective: name,
            f_min,
            f_max,
            max_method,
        });
    }
    Ok(NormalizedProblem { problem, notes })
}

/// Single-objective LP instance over the problem's feasible region.
fn single_cost_instance(p: &MultiObjectiveProblem, cost: &[f64]) -> ScalarizedProblem {
    // Build via a unit scalarization, then replace the cost.
    let index = p.variable_index();
    let n = p.n_vars();
    let rows = p
        .constraints
        .iter()
        .map(|c| super::Row {
            coeffs: c.lhs.dense(&index, n),
            relation: c.relation,
            rhs: c.rhs - c.lhs.constant,
        })
        .collect();
    ScalarizedProblem {
        kind: ProblemKind::Lp,
        linear_cost: cost.to_vec(),
        cost_constant: 0.0,
        quad_terms: vec![],
        rows,
        lower: p.variables.iter().map(|v| v.lower).collect(),
        upper: p.variables.iter().map(|v| v.upper).collect(),
        var_names: p.variables.iter().map(|v| v.name.clone()).collect(),
    }
}

fn affine_extreme(
    p: &MultiObjectiveProblem,
    form: &AffineForm,
    sign: f64,
    cfg: &SolverConfig,
    name: &str,
) -> Result<f64> {
    let index = p.variable_index();
    let cost: Vec<f64> = form
        .dense(&index, p.n_vars())
        .iter()
        .map(|c| sign * c)
        .collect();
    let sp = single_cost_instance(p, &cost);
    let sol = solve_lp(&sp, cfg);
    match sol.status {
        SolverStatus::Optimal => Ok(sign * sol.objective_value + form.constant),
        SolverStatus::Unbounded => Err(Error::UnboundedObjective(name.to_string())),
        s => Err(Error::SolveFailed(s)),
    }
}

fn quadratic_minimum(
    p: &MultiObjectiveProblem,
    q: &QuadraticForm,
    cfg: &SolverConfig,
    name: &str,
) -> Result<f64> {
    let index = p.variable_index();
    let n = p.n_vars();
    let mut sp = single_cost_instance(p, &q.linear.dense(&index, n));
    sp.kind = ProblemKind::ConvexQp;
    sp.cost_constant = q.linear.constant + q.offset;
    sp.quad_terms.push(RankOneTerm {
        scale: q.scale,
        direction: q.direction.dense(&index, n),
        direction_constant: q.direction.constant,
    });
    let sol = solve_qp(&sp, cfg);
    match sol.status {
        SolverStatus::Optimal => Ok(sol.objective_value),
        SolverStatus::Unbounded => Err(Error::UnboundedObjective(name.to_string())),
        s => Err(Error::SolveFailed(s)),
    }
}

fn quadratic_maximum(
    p: &MultiObjectiveProblem,
    q: &QuadraticForm,
    name: &str,
) -> Result<(f64, MaxEstimate)> {
    let index = p.variable_index();
    let n = p.n_vars();
    let eval = |x: &[f64]| -> f64 {
        let d = q.direction.eval(&index, x);
        q.scale * d * d + q.linear.eval(&index, x) + q.offset
    };
    let sp = single_cost_instance(p, &vec![0.0; n]);

    // A convex function attains its maximum over a polytope at a vertex;
    // this requires a bounded box.
    if sp.lower.iter().any(|l| !l.is_finite()) || sp.upper.iter().any(|u| !u.is_finite()) {
        return Err(Error::UnboundedObjective(name.to_string()));
    }

    let catalog = constraint_gradients(&sp);
    if binomial(catalog.len(), n) <= MAX_CANDIDATE_BASES {
        let mut best = f64::NEG_INFINITY;
        let mut found = false;
        for_each_combination(catalog.len(), n, |subset| {
            if let Some(x) = solve_active_subset(&catalog, subset, n) {
                if sp.max_violation(&x) <= 1e-7 {
                    best = best.max(eval(&x));
                    found = true;
                }
            }
        });
        if !found {
            return Err(Error::InvalidProblem(format!(
                "no feasible vertex found while normalizing `{name}`"
            )));
        }
        Ok((best, MaxEstimate::VertexEnumeration))
    } else {
        let rng_stream = Stream::addressed(FALLBACK_SEED, Purpose::Probe, 0, 0);
        let bounds: Vec<(f64, f64)> = sp
            .lower
            .iter()
            .zip(&sp.upper)
            .map(|(&l, &u)| (l, u))
            .collect();
        let sample = crate::pareto::lhs_sample(&bounds, LHS_FALLBACK_SAMPLES, rng_stream);
        let best = sample
            .iter()
            .filter(|x| sp.max_violation(x) <= 1e-9)
            .map(|x| eval(x))
            .fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "no feasible sample found while normalizing `{name}`"
            )));
        }
        Ok((best, MaxEstimate::LhsApproximate))
    }
}

/// All row/bound gradients as (gradient, rhs) pairs of equalities to pin.
fn constraint_gradients(sp: &ScalarizedProblem) -> Vec<(Vec<f64>, f64)> {
    let n = sp.n_vars();
    let mut out = Vec::new();
    for row in &sp.rows {
        out.push((row.coeffs.clone(), row.rhs));
    }
    for j in 0..n {
        let mut g = vec![0.0; n];
        g[j] = 1.0;
        out.push((g.clone(), sp.lower[j]));
        out.push((g, sp.upper[j]));
    }
    out
}

fn solve_active_subset(
    catalog: &[(Vec<f64>, f64)],
    subset: &[usize],
    n: usize,
) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(n, n, |r, c| catalog[subset[r]].0[c]);
    let b = DVector::from_iterator(n, subset.iter().map(|&i| catalog[i].1));
    let lu = a.lu();
    if lu.determinant().abs() < 1e-10 {
        return None;
    }
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > MAX_CANDIDATE_BASES {
            return acc;
        }
    }
    acc
}

/// Visit every k-subset of `0..n` in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    if k > n {
        return;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
