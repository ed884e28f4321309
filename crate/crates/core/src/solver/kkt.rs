//! KKT certification for candidate points.

use nalgebra::{DMatrix, DVector};

use super::oriented_constraints;
use crate::problem::ScalarizedProblem;

/// Constraints within this slack are treated as active when fitting
/// multipliers.
const ACTIVE_TOL: f64 = 1e-7;

/// Maximum KKT violation at `point`: stationarity of the Lagrangian (with
/// multipliers fitted by nonnegative least squares on the active set),
/// primal feasibility, and complementary slackness. Zero for an exact KKT
/// point; strictly positive at any non-optimal feasible point of a problem
/// with nonzero cost.
pub fn kkt_residual(sp: &ScalarizedProblem, point: &[f64]) -> f64 {
    assert_eq!(point.len(), sp.n_vars(), "point has wrong dimension");
    let n = sp.n_vars();
    let feas = sp.max_violation(point).max(0.0);
    let grad = DVector::from_column_slice(&sp.gradient(point));

    let all = oriented_constraints(sp);
    let active: Vec<_> = all
        .iter()
        .filter(|c| c.slack(point).abs() <= ACTIVE_TOL)
        .collect();
    if active.is_empty() {
        return feas.max(grad.amax());
    }

    // Columns of `a` are active gradients; solve grad ~= a * lambda with
    // lambda >= 0 except on equality rows.
    let k = active.len();
    let a = DMatrix::from_fn(n, k, |i, j| active[j].gradient[i]);
    let free: Vec<bool> = active.iter().map(|c| c.is_eq).collect();
    let lambda = nonnegative_lstsq(&a, &grad, &free);

    let stationarity = (&grad - &a * &lambda).amax();
    let complementarity = active
        .iter()
        .zip(lambda.iter())
        .map(|(c, &l)| (l * c.slack(point)).abs())
        .fold(0.0_f64, f64::max);
    feas.max(stationarity).max(complementarity)
}

/// Lawson–Hanson nonnegative least squares: minimize `||a x - b||` subject to
/// `x_i >= 0` for every column not marked free.
fn nonnegative_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, free: &[bool]) -> DVector<f64> {
    let k = a.ncols();
    let mut passive: Vec<bool> = free.to_vec();
    let mut x = DVector::zeros(k);
    let tol = 1e-12 * (1.0 + b.amax());

    for _ in 0..4 * k + 8 {
        let w = a.transpose() * (b - a * &x);
        let mut entering: Option<(usize, f64)> = None;
        for i in 0..k {
            if !passive[i] && w[i] > tol && entering.is_none_or(|(_, best)| w[i] > best) {
                entering = Some((i, w[i]));
            }
        }
        let Some((enter, _)) = entering else { break };
        passive[enter] = true;

        for _ in 0..4 * k + 8 {
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let sub = a.select_columns(idx.iter());
            let z_sub = sub
                .svd(true, true)
                .solve(b, 1e-12)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            let mut z = DVector::zeros(k);
            for (pos, &i) in idx.iter().enumerate() {
                z[i] = z_sub[pos];
            }
            let violating: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| !free[i] && z[i] <= 0.0)
                .collect();
            if violating.is_empty() {
                x = z;
                break;
            }
            let alpha = violating
                .iter()
                .map(|&i| x[i] / (x[i] - z[i]))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            x = &x + alpha * (&z - &x);
            for i in 0..k {
                if passive[i] && !free[i] && x[i] <= 1e-14 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemKind, Row};

    fn box_lp() -> ScalarizedProblem {
        ScalarizedProblem {
            kind: ProblemKind::Lp,
            linear_cost: vec![1.0, 2.0],
            cost_constant: 0.0,
            quad_terms: vec![],
            rows: vec![Row {
                coeffs: vec![1.0, 1.0],
                relation: crate::problem::Relation::Ge,
                rhs: 1.0,
            }],
            lower: vec![0.0, 0.0],
            upper: vec![4.0, 4.0],
            var_names: vec!["x".into(), "y".into()],
        }
    }

    #[test]
    fn optimal_vertex_certifies() {
        // min x + 2y, x + y >= 1 in the box: optimum at (1, 0).
        let sp = box_lp();
        assert!(kkt_residual(&sp, &[1.0, 0.0]) <= 1e-10);
    }

    #[test]
    fn interior_point_fails_stationarity() {
        let sp = box_lp();
        let r = kkt_residual(&sp, &[2.0, 2.0]);
        assert!(r >= 1.0, "expected cost-sized residual, got {r}");
    }

    #[test]
    fn wrong_vertex_fails() {
        let sp = box_lp();
        // (0, 1) is feasible and tight but not optimal: no nonnegative
        // multipliers can reproduce the gradient (best fit leaves 0.5).
        let r = kkt_residual(&sp, &[0.0, 1.0]);
        assert!(r > 0.4, "r = {r}");
    }

    #[test]
    fn infeasible_point_reports_violation() {
        let sp = box_lp();
        let r = kkt_residual(&sp, &[0.0, 0.0]);
        assert!(r >= 1.0 - 1e-12);
    }

    #[test]
    fn closed_form_toy_optimizer_certifies() {
        // The parabola toy's analytic optimizer is an exact interior KKT
        // point of its compiled QP.
        let problem = crate::problem::build_toy_continuous();
        let beta = [0.7, 1.8];
        let sp = problem.scalarize(&beta).unwrap();
        let x = crate::demos::toy_xstar(beta, [1.0, 3.0]).unwrap();
        assert!(kkt_residual(&sp, &[x]) <= 1e-10);
    }
}
