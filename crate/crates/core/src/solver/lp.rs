//! Two-phase revised simplex on bounded variables.
//!
//! The instance is rewritten as `A z = b, l <= z <= u` where `z` stacks the
//! structural variables, one slack per row, and one artificial per row. Slack
//! bounds encode the row sense; artificials carry the phase-1 cost and are
//! fixed to zero afterwards. The basis matrix is refactorized every iteration
//! (instances here are tiny), nonbasic variables rest on a bound (free
//! variables rest at zero), and ties are always broken by lowest index so the
//! returned vertex is deterministic.

use nalgebra::{DMatrix, DVector};

use super::{
    active_set_at, kkt_residual, PivotRule, SolverConfig, SolverSolution, SolverStatus,
};
use crate::problem::{Relation, ScalarizedProblem};

const PIVOT_TOL: f64 = 1e-10;
const DEGENERATE_STREAK_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeAtZero,
}

struct Tableau {
    /// Columns of the extended system, column-major.
    cols: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    n_rows: usize,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Current values for all variables.
    x: Vec<f64>,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Moved { degenerate: bool },
    SingularBasis,
}

impl Tableau {
    fn new(sp: &ScalarizedProblem) -> Self {
        let n = sp.n_vars();
        let m = sp.rows.len();
        let total = n + 2 * m;
        let mut cols = vec![vec![0.0; m]; total];
        for j in 0..n {
            for (i, row) in sp.rows.iter().enumerate() {
                cols[j][i] = row.coeffs[j];
            }
        }
        let mut lower = sp.lower.clone();
        let mut upper = sp.upper.clone();
        for (i, row) in sp.rows.iter().enumerate() {
            cols[n + i][i] = 1.0;
            let (l, u) = match row.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }

        // Nonbasic start: each variable on its finite bound nearest zero,
        // free variables at zero.
        let mut state = Vec::with_capacity(total);
        let mut x = vec![0.0; total];
        for j in 0..n + m {
            let (l, u) = (lower[j], upper[j]);
            let s = if l.is_finite() {
                x[j] = l;
                VarState::AtLower
            } else if u.is_finite() {
                x[j] = u;
                VarState::AtUpper
            } else {
                VarState::FreeAtZero
            };
            state.push(s);
        }

        // Artificial columns absorb the initial residual with signs chosen so
        // their values are nonnegative.
        let rhs: Vec<f64> = sp.rows.iter().map(|r| r.rhs).collect();
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let mut resid = rhs[i];
            for j in 0..n + m {
                resid -= cols[j][i] * x[j];
            }
            cols[n + m + i][i] = if resid >= 0.0 { 1.0 } else { -1.0 };
            lower.push(0.0);
            upper.push(f64::INFINITY);
            state.push(VarState::Basic);
            x[n + m + i] = resid.abs();
            basis.push(n + m + i);
        }

        Self {
            cols,
            lower,
            upper,
            rhs,
            n_rows: m,
            state,
            basis,
            x,
        }
    }

    fn total_vars(&self) -> usize {
        self.cols.len()
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_rows, self.n_rows, |r, c| self.cols[self.basis[c]][r])
    }

    /// Recompute basic values from the nonbasic assignment.
    fn refresh_basics(&mut self) -> bool {
        if self.n_rows == 0 {
            return true;
        }
        let mut resid = DVector::from_column_slice(&self.rhs);
        for j in 0..self.total_vars() {
            if self.state[j] != VarState::Basic {
                for i in 0..self.n_rows {
                    resid[i] -= self.cols[j][i] * self.x[j];
                }
            }
        }
        let lu = self.basis_matrix().lu();
        match lu.solve(&resid) {
            Some(xb) => {
                for (pos, &var) in self.basis.iter().enumerate() {
                    self.x[var] = xb[pos];
                }
                true
            }
            None => false,
        }
    }

    fn duals(&self, costs: &[f64]) -> Option<DVector<f64>> {
        if self.n_rows == 0 {
            return Some(DVector::zeros(0));
        }
        let cb = DVector::from_iterator(self.n_rows, self.basis.iter().map(|&v| costs[v]));
        self.basis_matrix().transpose().lu().solve(&cb)
    }

    fn reduced_cost(&self, costs: &[f64], y: &DVector<f64>, j: usize) -> f64 {
        let mut d = costs[j];
        for i in 0..self.n_rows {
            d -= y[i] * self.cols[j][i];
        }
        d
    }

    /// One simplex step under `costs`; `bland` forces lowest-index pricing.
    fn step(&mut self, costs: &[f64], opt_tol: f64, bland: bool) -> StepOutcome {
        if !self.refresh_basics() {
            return StepOutcome::SingularBasis;
        }
        let Some(y) = self.duals(costs) else {
            return StepOutcome::SingularBasis;
        };

        // Entering variable: a nonbasic whose move direction improves the
        // objective. Fixed variables (l == u) can never move.
        let mut entering: Option<(usize, f64, f64)> = None; // (var, direction, score)
        for j in 0..self.total_vars() {
            let (dir, score) = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower | VarState::AtUpper
                    if self.lower[j] == self.upper[j] =>
                {
                    continue
                }
                VarState::AtLower => {
                    let d = self.reduced_cost(costs, &y, j);
                    if d < -opt_tol {
                        (1.0, -d)
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    let d = self.reduced_cost(costs, &y, j);
                    if d > opt_tol {
                        (-1.0, d)
                    } else {
                        continue;
                    }
                }
                VarState::FreeAtZero => {
                    let d = self.reduced_cost(costs, &y, j);
                    if d.abs() > opt_tol {
                        (-d.signum(), d.abs())
                    } else {
                        continue;
                    }
                }
            };
            if bland {
                entering = Some((j, dir, score));
                break;
            }
            match entering {
                Some((_, _, best)) if best >= score => {}
                _ => entering = Some((j, dir, score)),
            }
        }
        let Some((e, dir, _)) = entering else {
            return StepOutcome::Optimal;
        };

        // Column direction: basics move by -dir * t * alpha.
        let alpha = if self.n_rows == 0 {
            DVector::zeros(0)
        } else {
            let col = DVector::from_column_slice(&self.cols[e]);
            match self.basis_matrix().lu().solve(&col) {
                Some(a) => a,
                None => return StepOutcome::SingularBasis,
            }
        };

        // Ratio test: the entering variable's own opposite bound competes
        // with every basic variable's nearest bound.
        let own_span = self.upper[e] - self.lower[e];
        let mut t_best = if own_span.is_finite() { own_span } else { f64::INFINITY };
        let mut leaving: Option<(usize, bool)> = None; // (basis pos, hits_upper)
        for pos in 0..self.n_rows {
            let rate = -dir * alpha[pos];
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let var = self.basis[pos];
            let (limit, hits_upper) = if rate > 0.0 {
                (self.upper[var], true)
            } else {
                (self.lower[var], false)
            };
            if !limit.is_finite() {
                continue;
            }
            let t = ((limit - self.x[var]) / rate).max(0.0);
            let better = match leaving {
                None => t < t_best - 1e-15,
                Some((best_pos, _)) => {
                    t < t_best - 1e-15
                        || (t <= t_best + 1e-15 && self.basis[pos] < self.basis[best_pos])
                }
            };
            if better {
                t_best = t;
                leaving = Some((pos, hits_upper));
            }
        }

        if !t_best.is_finite() {
            return StepOutcome::Unbounded;
        }

        let degenerate = t_best <= 1e-12;
        match leaving {
            None => {
                // Bound flip: the entering variable crosses to its other bound.
                self.x[e] += dir * t_best;
                self.state[e] = if dir > 0.0 {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
            }
            Some((pos, hits_upper)) => {
                let out = self.basis[pos];
                self.x[e] += dir * t_best;
                self.x[out] = if hits_upper {
                    self.upper[out]
                } else {
                    self.lower[out]
                };
                self.state[out] = if hits_upper {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                self.state[e] = VarState::Basic;
                self.basis[pos] = e;
            }
        }
        StepOutcome::Moved { degenerate }
    }

    /// Run to optimality under `costs`. Returns the final status.
    fn run(
        &mut self,
        costs: &[f64],
        cfg: &SolverConfig,
        iterations: &mut usize,
        cap: usize,
    ) -> SolverStatus {
        let mut degenerate_streak = 0usize;
        loop {
            if *iterations >= cap {
                return SolverStatus::NumericFailure;
            }
            *iterations += 1;
            let bland = match cfg.pivot_rule {
                PivotRule::Bland => true,
                PivotRule::DantzigWithBlandFallback => {
                    degenerate_streak >= DEGENERATE_STREAK_LIMIT
                }
            };
            match self.step(costs, cfg.opt_tol, bland) {
                StepOutcome::Optimal => return SolverStatus::Optimal,
                StepOutcome::Unbounded => return SolverStatus::Unbounded,
                StepOutcome::SingularBasis => return SolverStatus::NumericFailure,
                StepOutcome::Moved { degenerate } => {
                    if degenerate {
                        degenerate_streak += 1;
                    } else {
                        degenerate_streak = 0;
                    }
                }
            }
        }
    }
}

/// Solve an LP instance. Requires `sp.kind == Lp` (the compiled instance has
/// no quadratic terms); quadratic instances must go to [`super::solve_qp`].
pub fn solve_lp(sp: &ScalarizedProblem, cfg: &SolverConfig) -> SolverSolution {
    debug_assert!(sp.quad_terms.is_empty(), "solve_lp requires an LP instance");
    let fixes = super::dominated_fixes(sp);
    if fixes.is_empty() {
        run_simplex(sp, sp, cfg)
    } else {
        run_simplex(&super::apply_fixes(sp, &fixes), sp, cfg)
    }
}

/// Two-phase simplex on `instance`, certified against `original` (they differ
/// only by presolve-tightened bounds).
fn run_simplex(
    instance: &ScalarizedProblem,
    original: &ScalarizedProblem,
    cfg: &SolverConfig,
) -> SolverSolution {
    let sp = instance;
    let n = sp.n_vars();
    let m = sp.rows.len();
    let cap = cfg.iteration_cap(n + 2 * m, m);
    let mut iterations = 0usize;
    let mut tab = Tableau::new(sp);

    // Phase 1: drive artificials to zero.
    let mut phase1_costs = vec![0.0; tab.total_vars()];
    for j in n + m..n + 2 * m {
        phase1_costs[j] = 1.0;
    }
    match tab.run(&phase1_costs, cfg, &mut iterations, cap) {
        SolverStatus::Optimal => {}
        SolverStatus::Unbounded | SolverStatus::NumericFailure => {
            return SolverSolution::failed(SolverStatus::NumericFailure, iterations)
        }
        SolverStatus::Infeasible => unreachable!(),
    }
    if !tab.refresh_basics() {
        return SolverSolution::failed(SolverStatus::NumericFailure, iterations);
    }
    let infeasibility: f64 = (n + m..n + 2 * m).map(|j| tab.x[j]).sum();
    if infeasibility > cfg.feas_tol {
        return SolverSolution::failed(SolverStatus::Infeasible, iterations);
    }
    // Artificials become fixed-at-zero columns; basic ones stay at zero and
    // leave the basis on first contact in any later ratio test.
    for j in n + m..n + 2 * m {
        tab.upper[j] = 0.0;
        tab.x[j] = 0.0;
    }

    // Phase 2: the real costs.
    let mut phase2_costs = vec![0.0; tab.total_vars()];
    phase2_costs[..n].copy_from_slice(&sp.linear_cost);
    let status = tab.run(&phase2_costs, cfg, &mut iterations, cap);
    if status != SolverStatus::Optimal {
        return SolverSolution::failed(status, iterations);
    }
    if !tab.refresh_basics() {
        return SolverSolution::failed(SolverStatus::NumericFailure, iterations);
    }

    let point: Vec<f64> = tab.x[..n].to_vec();
    let active_set = active_set_at(original, &point, cfg.feas_tol.max(1e-9));
    let residual = kkt_residual(original, &point);
    SolverSolution {
        objective_value: original.cost(&point),
        status: SolverStatus::Optimal,
        active_set,
        kkt_residual: residual,
        iterations,
        point,
    }
}
