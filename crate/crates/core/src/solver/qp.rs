//! Primal active-set method for convex rank-one-quadratic costs.
//!
//! The cost is `q'x + sum_k s_k (a_k'x + c_k)^2` with every `s_k >= 0`, so the
//! Hessian is a low-rank positive semidefinite sum. Steps are computed in the
//! null space of the working set; the reduced Hessian is eigendecomposed so
//! that flat directions (zero curvature with nonzero slope) walk to a blocking
//! constraint exactly like a simplex edge step, while curved directions take
//! the closed-form Newton step to the face minimum.
//!
//! The start point is the vertex returned by the simplex on the linear part
//! of the cost (or a feasibility-only solve when that relaxation is
//! unbounded), which makes the zero-curvature limit coincide with
//! [`solve_lp`](super::solve_lp).

use nalgebra::{DMatrix, DVector};

use super::{
    active_set_at, kkt_residual, oriented_constraints, solve_lp, OrientedConstraint,
    SolverConfig, SolverSolution, SolverStatus,
};
use crate::problem::{ProblemKind, ScalarizedProblem};

const RANK_TOL: f64 = 1e-12;
const CURVATURE_TOL: f64 = 1e-10;

/// Solve a convex QP instance (`sp.kind == ConvexQp`; also accepts plain LPs,
/// which reduce to edge walks).
pub fn solve_qp(sp: &ScalarizedProblem, cfg: &SolverConfig) -> SolverSolution {
    let fixes = super::dominated_fixes(sp);
    let reduced;
    let work = if fixes.is_empty() {
        sp
    } else {
        reduced = super::apply_fixes(sp, &fixes);
        &reduced
    };
    let n = work.n_vars();
    let all = oriented_constraints(work);
    let cap = cfg.iteration_cap(n, all.len());

    let (mut x, mut iterations) = match starting_vertex(work, cfg) {
        Ok(start) => start,
        Err(sol) => return sol,
    };

    let hessian = build_hessian(sp);
    // Working set: indices into `all` with linearly independent gradients;
    // equality rows are pinned first.
    let mut working = initial_working_set(&all, &x, cfg.feas_tol.max(1e-9), n);

    while iterations < cap {
        iterations += 1;
        let grad = DVector::from_column_slice(&sp.gradient(&x));
        let c_mat = stack_gradients(&all, &working, n);
        let z = null_space_basis(&c_mat, n);

        let step = if z.ncols() == 0 {
            None
        } else {
            reduced_step(&z, &hessian, &grad)
        };

        match step {
            None => {
                // Stationary on the current face: check multipliers.
                match most_negative_multiplier(&all, &working, &grad, cfg.opt_tol) {
                    None => return finish(sp, x, iterations, cfg),
                    Some(pos) => {
                        working.remove(pos);
                    }
                }
            }
            Some((p, newton)) => {
                let cap_alpha = if newton { 1.0 } else { f64::INFINITY };
                let (alpha, blocker) = max_step(&all, &working, &x, &p, cap_alpha);
                if !alpha.is_finite() {
                    return SolverSolution::failed(SolverStatus::Unbounded, iterations);
                }
                for (xi, pi) in x.iter_mut().zip(p.iter()) {
                    *xi += alpha * pi;
                }
                if let Some(b) = blocker {
                    working.push(b);
                }
            }
        }
    }
    SolverSolution::failed(SolverStatus::NumericFailure, iterations)
}

/// Feasible vertex to start from, biased toward the linear-cost optimum.
fn starting_vertex(
    sp: &ScalarizedProblem,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, usize), SolverSolution> {
    let mut relax = sp.clone();
    relax.quad_terms.clear();
    relax.kind = ProblemKind::Lp;
    let lp = solve_lp(&relax, cfg);
    match lp.status {
        SolverStatus::Optimal => Ok((lp.point, lp.iterations)),
        SolverStatus::Infeasible => Err(SolverSolution::failed(
            SolverStatus::Infeasible,
            lp.iterations,
        )),
        SolverStatus::Unbounded => {
            // Quadratic curvature may still bound the cost; restart from any
            // feasible vertex.
            relax.linear_cost = vec![0.0; sp.n_vars()];
            let feas = solve_lp(&relax, cfg);
            let iters = lp.iterations + feas.iterations;
            match feas.status {
                SolverStatus::Optimal => Ok((feas.point, iters)),
                s => Err(SolverSolution::failed(s, iters)),
            }
        }
        SolverStatus::NumericFailure => Err(SolverSolution::failed(
            SolverStatus::NumericFailure,
            lp.iterations,
        )),
    }
}

fn build_hessian(sp: &ScalarizedProblem) -> DMatrix<f64> {
    let n = sp.n_vars();
    let mut h = DMatrix::zeros(n, n);
    for t in &sp.quad_terms {
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += 2.0 * t.scale * t.direction[i] * t.direction[j];
            }
        }
    }
    h
}

/// Greedy linearly independent subset of the constraints active at `x`,
/// equalities first, in catalog order.
fn initial_working_set(
    all: &[OrientedConstraint],
    x: &[f64],
    tol: f64,
    n: usize,
) -> Vec<usize> {
    let mut working = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    let mut try_add = |idx: usize, c: &OrientedConstraint, working: &mut Vec<usize>| {
        if working.len() >= n {
            return;
        }
        let mut v = DVector::from_column_slice(&c.gradient);
        let norm0 = v.norm();
        if norm0 <= 0.0 {
            return;
        }
        for q in &ortho {
            let proj = q.dot(&v);
            v -= proj * q;
        }
        if v.norm() > 1e-8 * norm0 {
            ortho.push(v.normalize());
            working.push(idx);
        }
    };
    for (idx, c) in all.iter().enumerate() {
        if c.is_eq {
            try_add(idx, c, &mut working);
        }
    }
    for (idx, c) in all.iter().enumerate() {
        if !c.is_eq && c.slack(x).abs() <= tol {
            try_add(idx, c, &mut working);
        }
    }
    working
}

fn stack_gradients(all: &[OrientedConstraint], working: &[usize], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(working.len(), n, |r, c| all[working[r]].gradient[c])
}

/// Orthonormal basis of the null space of `c_mat` via the spectral
/// decomposition of `c'c`.
fn null_space_basis(c_mat: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if c_mat.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let gram = c_mat.transpose() * c_mat;
    let eig = gram.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let thresh = RANK_TOL * max_ev.max(1.0);
    let cols: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= thresh).collect();
    let mut z = DMatrix::zeros(n, cols.len());
    for (out, &i) in cols.iter().enumerate() {
        z.set_column(out, &eig.eigenvectors.column(i));
    }
    z
}

/// Step within the current face, or `None` when the face is stationary.
/// Returns `(p, newton)`: `newton == true` means a full step of 1 reaches the
/// face minimum, otherwise `p` is a flat descent ray.
fn reduced_step(
    z: &DMatrix<f64>,
    hessian: &DMatrix<f64>,
    grad: &DVector<f64>,
) -> Option<(Vec<f64>, bool)> {
    let r = z.transpose() * grad;
    let m = z.transpose() * hessian * z;
    let eig = m.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let thresh = CURVATURE_TOL * max_ev.max(1.0);

    let mut flat = DVector::zeros(r.len());
    let mut newton = DVector::zeros(r.len());
    for i in 0..r.len() {
        let v = eig.eigenvectors.column(i);
        let coef = v.dot(&r);
        if eig.eigenvalues[i] <= thresh {
            flat += coef * v;
        } else {
            newton += (coef / eig.eigenvalues[i]) * v;
        }
    }

    let step_tol = 1e-11 * (1.0 + grad.amax());
    if flat.norm() > step_tol {
        let p = z * (-flat.normalize());
        return Some((p.iter().copied().collect(), false));
    }
    let u = -newton;
    let p = z * u;
    if p.amax() <= 1e-11 {
        None
    } else {
        Some((p.iter().copied().collect(), true))
    }
}

/// Most negative inequality multiplier in the working set, solved from the
/// stationarity system; `None` when the point is optimal.
fn most_negative_multiplier(
    all: &[OrientedConstraint],
    working: &[usize],
    grad: &DVector<f64>,
    opt_tol: f64,
) -> Option<usize> {
    if working.is_empty() {
        return None;
    }
    let n = grad.len();
    let a = DMatrix::from_fn(n, working.len(), |i, j| all[working[j]].gradient[i]);
    let lambda = a
        .clone()
        .svd(true, true)
        .solve(grad, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(working.len()));
    let mut worst: Option<(usize, f64)> = None;
    for (pos, &idx) in working.iter().enumerate() {
        if all[idx].is_eq {
            continue;
        }
        if lambda[pos] < -opt_tol && worst.is_none_or(|(_, w)| lambda[pos] < w) {
            worst = Some((pos, lambda[pos]));
        }
    }
    worst.map(|(pos, _)| pos)
}

/// Largest feasible step along `p`, capped at `cap`, with the blocking
/// constraint (lowest catalog index on ties).
fn max_step(
    all: &[OrientedConstraint],
    working: &[usize],
    x: &[f64],
    p: &[f64],
    cap: f64,
) -> (f64, Option<usize>) {
    let mut alpha = cap;
    let mut blocker = None;
    for (idx, c) in all.iter().enumerate() {
        if working.contains(&idx) {
            continue;
        }
        let rate: f64 = c.gradient.iter().zip(p).map(|(g, &pi)| g * pi).sum();
        if rate >= -1e-12 {
            continue;
        }
        let slack = c.slack(x).max(0.0);
        let t = slack / (-rate);
        if t < alpha - 1e-15 {
            alpha = t;
            blocker = Some(idx);
        }
    }
    (alpha.max(0.0), blocker)
}

/// Snap near-bound coordinates exactly onto the bound and assemble the
/// solution record.
fn finish(
    sp: &ScalarizedProblem,
    mut x: Vec<f64>,
    iterations: usize,
    cfg: &SolverConfig,
) -> SolverSolution {
    for j in 0..x.len() {
        if (x[j] - sp.lower[j]).abs() <= 1e-9 {
            x[j] = sp.lower[j];
        } else if (x[j] - sp.upper[j]).abs() <= 1e-9 {
            x[j] = sp.upper[j];
        }
    }
    let active_set = active_set_at(sp, &x, cfg.feas_tol.max(1e-9));
    let residual = kkt_residual(sp, &x);
    SolverSolution {
        objective_value: sp.cost(&x),
        status: SolverStatus::Optimal,
        active_set,
        kkt_residual: residual,
        iterations,
        point: x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_case_study, build_toy_continuous, CaseStudy, RankOneTerm, Row};
    use approx::assert_abs_diff_eq;

    #[test]
    fn unconstrained_parabola() {
        // min 2x + x^2 over free x: minimum at -1.
        let p = build_toy_continuous();
        let sp = p.scalarize(&[0.5, 0.5]).unwrap();
        let sol = solve_qp(&sp, &SolverConfig::default());
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert_abs_diff_eq!(sol.point[0], -1.0, epsilon = 1e-10);
        assert!(sol.kkt_residual <= 1e-10);
    }

    #[test]
    fn bound_becomes_active() {
        // min (x - 3)^2 over x in [0, 2]: clipped at 2.
        let sp = ScalarizedProblem {
            kind: ProblemKind::ConvexQp,
            linear_cost: vec![0.0],
            cost_constant: 0.0,
            quad_terms: vec![RankOneTerm {
                scale: 1.0,
                direction: vec![1.0],
                direction_constant: -3.0,
            }],
            rows: vec![],
            lower: vec![0.0],
            upper: vec![2.0],
            var_names: vec!["x".into()],
        };
        let sol = solve_qp(&sp, &SolverConfig::default());
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert_abs_diff_eq!(sol.point[0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_scale_matches_lp() {
        let p = build_case_study(CaseStudy::PivotSkid);
        let mut sp = p.scalarize(&[1.2, 0.8, 1.1, 0.9]).unwrap();
        sp.quad_terms[0].scale = 0.0;
        let qp_sol = solve_qp(&sp, &SolverConfig::default());

        let mut lp = sp.clone();
        lp.quad_terms.clear();
        lp.kind = ProblemKind::Lp;
        let lp_sol = solve_lp(&lp, &SolverConfig::default());

        assert_eq!(qp_sol.status, SolverStatus::Optimal);
        for (a, b) in qp_sol.point.iter().zip(&lp_sol.point) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn case_study_unit_weights() {
        let p = build_case_study(CaseStudy::PivotSkid);
        let sp = p.scalarize(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let sol = solve_qp(&sp, &SolverConfig::default());
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert!(sp.max_violation(&sol.point) <= 1e-8);
        assert!(sol.kkt_residual <= 1e-6, "kkt = {}", sol.kkt_residual);
    }

    #[test]
    fn unbounded_quadratic_ray() {
        // min -x + (y - 1)^2 over free x: linearly unbounded along x.
        let sp = ScalarizedProblem {
            kind: ProblemKind::ConvexQp,
            linear_cost: vec![-1.0, 0.0],
            cost_constant: 0.0,
            quad_terms: vec![RankOneTerm {
                scale: 1.0,
                direction: vec![0.0, 1.0],
                direction_constant: -1.0,
            }],
            rows: vec![],
            lower: vec![f64::NEG_INFINITY, -5.0],
            upper: vec![f64::INFINITY, 5.0],
            var_names: vec!["x".into(), "y".into()],
        };
        let sol = solve_qp(&sp, &SolverConfig::default());
        assert_eq!(sol.status, SolverStatus::Unbounded);
    }

    #[test]
    fn infeasible_rows_propagate() {
        let sp = ScalarizedProblem {
            kind: ProblemKind::ConvexQp,
            linear_cost: vec![0.0],
            cost_constant: 0.0,
            quad_terms: vec![RankOneTerm {
                scale: 1.0,
                direction: vec![1.0],
                direction_constant: 0.0,
            }],
            rows: vec![Row {
                coeffs: vec![1.0],
                relation: crate::problem::Relation::Ge,
                rhs: 9.0,
            }],
            lower: vec![0.0],
            upper: vec![1.0],
            var_names: vec!["x".into()],
        };
        let sol = solve_qp(&sp, &SolverConfig::default());
        assert_eq!(sol.status, SolverStatus::Infeasible);
    }
}
