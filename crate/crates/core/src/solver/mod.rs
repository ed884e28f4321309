//! Embedded exact solvers for scalarized instances.
//!
//! [`solve_lp`] is a two-phase revised simplex on bounded variables; it
//! returns a basic feasible optimizer (a vertex of the feasible polytope).
//! [`solve_qp`] is a primal active-set method for convex rank-one-quadratic
//! costs over the same polytopes, started from a feasible vertex. Both are
//! deterministic: fixed variable ordering, lowest-index tie-breaking, and a
//! Dantzig pricing rule that falls back to Bland's rule under degeneracy.
//!
//! [`kkt_residual`] certifies any candidate point by measuring stationarity,
//! feasibility and complementarity against multipliers fitted by nonnegative
//! least squares, independent of how the point was produced.

mod kkt;
mod lp;
mod qp;

pub use kkt::kkt_residual;
pub use lp::solve_lp;
pub use qp::solve_qp;

use std::fmt;

use crate::problem::{ProblemKind, Relation, ScalarizedProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverStatus::Optimal => write!(f, "optimal"),
            SolverStatus::Infeasible => write!(f, "infeasible"),
            SolverStatus::Unbounded => write!(f, "unbounded"),
            SolverStatus::NumericFailure => write!(f, "numeric_failure"),
        }
    }
}

/// One tight condition at a point: a constraint row or a variable bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActiveConstraint {
    Row(usize),
    Lower(usize),
    Upper(usize),
}

#[derive(Debug, Clone)]
pub struct SolverSolution {
    pub point: Vec<f64>,
    pub objective_value: f64,
    pub status: SolverStatus,
    pub active_set: Vec<ActiveConstraint>,
    pub kkt_residual: f64,
    pub iterations: usize,
}

impl SolverSolution {
    pub(crate) fn failed(status: SolverStatus, iterations: usize) -> Self {
        Self {
            point: Vec::new(),
            objective_value: f64::NAN,
            status,
            active_set: Vec::new(),
            kkt_residual: f64::NAN,
            iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    Bland,
    DantzigWithBlandFallback,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// 0 means "choose from the instance size".
    pub max_iter: usize,
    pub pivot_rule: PivotRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            opt_tol: 1e-8,
            max_iter: 0,
            pivot_rule: PivotRule::DantzigWithBlandFallback,
        }
    }
}

impl SolverConfig {
    pub(crate) fn iteration_cap(&self, n_vars: usize, n_rows: usize) -> usize {
        if self.max_iter > 0 {
            self.max_iter
        } else {
            200 + 50 * (n_vars + n_rows)
        }
    }
}

/// Dispatch on the compiled kind.
pub fn solve(sp: &ScalarizedProblem, cfg: &SolverConfig) -> SolverSolution {
    match sp.kind {
        ProblemKind::Lp => solve_lp(sp, cfg),
        ProblemKind::ConvexQp => solve_qp(sp, cfg),
    }
}

/// Constraint in the oriented form `gradient . x >= bound` (equalities keep
/// `is_eq` and are handled with free multipliers).
#[derive(Debug, Clone)]
pub(crate) struct OrientedConstraint {
    pub gradient: Vec<f64>,
    pub bound: f64,
    pub is_eq: bool,
    pub id: ActiveConstraint,
}

impl OrientedConstraint {
    pub fn slack(&self, point: &[f64]) -> f64 {
        self.gradient
            .iter()
            .zip(point)
            .map(|(g, &x)| g * x)
            .sum::<f64>()
            - self.bound
    }
}

/// All rows and finite bounds of `sp` in oriented form, rows first, then
/// lower/upper bounds per variable in index order.
pub(crate) fn oriented_constraints(sp: &ScalarizedProblem) -> Vec<OrientedConstraint> {
    let n = sp.n_vars();
    let mut out = Vec::with_capacity(sp.rows.len() + 2 * n);
    for (i, row) in sp.rows.iter().enumerate() {
        let (gradient, bound) = match row.relation {
            Relation::Ge | Relation::Eq => (row.coeffs.clone(), row.rhs),
            Relation::Le => (row.coeffs.iter().map(|c| -c).collect(), -row.rhs),
        };
        out.push(OrientedConstraint {
            gradient,
            bound,
            is_eq: row.relation == Relation::Eq,
            id: ActiveConstraint::Row(i),
        });
    }
    for j in 0..n {
        if sp.lower[j].is_finite() && sp.lower[j] == sp.upper[j] {
            // Fixed variable: a single two-sided (equality) condition.
            let mut g = vec![0.0; n];
            g[j] = 1.0;
            out.push(OrientedConstraint {
                gradient: g,
                bound: sp.lower[j],
                is_eq: true,
                id: ActiveConstraint::Lower(j),
            });
            continue;
        }
        if sp.lower[j].is_finite() {
            let mut g = vec![0.0; n];
            g[j] = 1.0;
            out.push(OrientedConstraint {
                gradient: g,
                bound: sp.lower[j],
                is_eq: false,
                id: ActiveConstraint::Lower(j),
            });
        }
        if sp.upper[j].is_finite() {
            let mut g = vec![0.0; n];
            g[j] = -1.0;
            out.push(OrientedConstraint {
                gradient: g,
                bound: -sp.upper[j],
                is_eq: false,
                id: ActiveConstraint::Upper(j),
            });
        }
    }
    out
}

/// Dominated-column presolve: variables whose increase can only tighten the
/// rows while costing (weakly) more are pinned at their lower bound, and the
/// mirror case at the upper bound. Any optimal point can be moved onto these
/// bounds without losing feasibility or optimality, so the reduction selects
/// a deterministic representative on degenerate optimal faces — the same
/// normalization production presolvers apply. Variables touched by a
/// quadratic term are left alone.
pub(crate) fn dominated_fixes(sp: &ScalarizedProblem) -> Vec<(usize, f64)> {
    let n = sp.n_vars();
    let mut fixes = Vec::new();
    for j in 0..n {
        if sp.lower[j] == sp.upper[j] {
            continue;
        }
        if sp
            .quad_terms
            .iter()
            .any(|t| t.scale != 0.0 && t.direction[j] != 0.0)
        {
            continue;
        }
        let c = sp.linear_cost[j];
        let mut incr_tightens_all = true; // every row's slack shrinks or holds as x_j grows
        let mut incr_relaxes_all = true;
        for row in &sp.rows {
            let oriented = match row.relation {
                Relation::Ge => row.coeffs[j],
                Relation::Le => -row.coeffs[j],
                Relation::Eq => {
                    if row.coeffs[j] != 0.0 {
                        incr_tightens_all = false;
                        incr_relaxes_all = false;
                    }
                    continue;
                }
            };
            if oriented > 0.0 {
                incr_tightens_all = false;
            }
            if oriented < 0.0 {
                incr_relaxes_all = false;
            }
        }
        if c >= 0.0 && incr_tightens_all && sp.lower[j].is_finite() {
            fixes.push((j, sp.lower[j]));
        } else if c <= 0.0 && incr_relaxes_all && sp.upper[j].is_finite() {
            fixes.push((j, sp.upper[j]));
        }
    }
    fixes
}

pub(crate) fn apply_fixes(sp: &ScalarizedProblem, fixes: &[(usize, f64)]) -> ScalarizedProblem {
    let mut reduced = sp.clone();
    for &(j, v) in fixes {
        reduced.lower[j] = v;
        reduced.upper[j] = v;
    }
    reduced
}

/// Constraints and bounds tight at `point` within `tol`.
pub fn active_set_at(sp: &ScalarizedProblem, point: &[f64], tol: f64) -> Vec<ActiveConstraint> {
    oriented_constraints(sp)
        .iter()
        .filter(|c| c.slack(point).abs() <= tol)
        .map(|c| c.id)
        .collect()
}

/// Whether the gradients of `active` span the full variable space, i.e. the
/// point is a vertex.
pub fn active_set_spans(sp: &ScalarizedProblem, active: &[ActiveConstraint]) -> bool {
    let n = sp.n_vars();
    if active.len() < n {
        return false;
    }
    let all = oriented_constraints(sp);
    let rows: Vec<&OrientedConstraint> = active
        .iter()
        .filter_map(|id| all.iter().find(|c| c.id == *id))
        .collect();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(n, n);
    for c in &rows {
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] += c.gradient[i] * c.gradient[j];
            }
        }
    }
    let eig = gram.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(0.0_f64, f64::max);
    max > 0.0 && eig.iter().all(|&v| v > 1e-10 * max)
}
