//! The `verify` command: closed-form and oracle cross-checks runnable from a
//! fresh checkout, with one pass/fail line per check.

use nalgebra_free::enumerate_vertices;
use prefprop::demos::{switch_probability, toy_xstar, DiscreteToySpec};
use prefprop::dist::PreferenceDistribution;
use prefprop::output;
use prefprop::pareto::lhs_sample;
use prefprop::problem::{
    build_case_study, build_toy_continuous, build_toy_discrete, CaseStudy, ProblemKind, Row,
    ScalarizedProblem,
};
use prefprop::propagate::{propagate, PropagateOptions};
use prefprop::rng::{Purpose, Stream};
use prefprop::solver::{solve_lp, solve_qp, SolverConfig, SolverStatus};
use rand::Rng;

pub type CheckResult = Result<(), String>;

/// All named checks, in execution order.
pub const CHECK_NAMES: [&str; 7] = [
    "closed_form_discrete",
    "closed_form_continuous",
    "lp_vertex_oracle",
    "qp_kkt",
    "frechet",
    "schema",
    "determinism",
];

/// Run the selected checks, printing one line each. Returns true when all
/// selected checks pass.
pub fn run_verify(only: Option<&str>) -> anyhow::Result<bool> {
    let mut all_ok = true;
    let mut matched = false;
    for name in CHECK_NAMES {
        if let Some(filter) = only {
            if name != filter {
                continue;
            }
        }
        matched = true;
        let outcome = run_check(name);
        match &outcome {
            Ok(()) => println!("{name:<24} pass"),
            Err(why) => {
                println!("{name:<24} FAIL: {why}");
                all_ok = false;
            }
        }
    }
    if !matched {
        anyhow::bail!(
            "no check named `{}` (available: {})",
            only.unwrap_or(""),
            CHECK_NAMES.join(", ")
        );
    }
    Ok(all_ok)
}

fn run_check(name: &str) -> CheckResult {
    match name {
        "closed_form_discrete" => closed_form_discrete(),
        "closed_form_continuous" => closed_form_continuous(),
        "lp_vertex_oracle" => lp_vertex_oracle(&SolverConfig::default()),
        "qp_kkt" => qp_kkt(),
        "frechet" => frechet_identity(),
        "schema" => schema(),
        "determinism" => determinism(),
        _ => Err(format!("unknown check {name}")),
    }
}

/// The two-line toy through the full pipeline versus the normal-CDF closed
/// form, on a small grid of preference settings.
fn closed_form_discrete() -> CheckResult {
    let problem = build_toy_discrete();
    let n = 4000;
    let settings: [([f64; 2], [[f64; 2]; 2]); 3] = [
        ([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]),
        ([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]]),
        ([0.5, -0.5], [[1.0, 0.25], [0.25, 0.5]]),
    ];
    for (k, (theta, sigma)) in settings.iter().enumerate() {
        let spec = DiscreteToySpec::worked_instance(*theta, *sigma);
        let p_expected = switch_probability(&spec).map_err(|e| e.to_string())?;
        let dist = PreferenceDistribution::Mvn {
            mu: theta.to_vec(),
            sigma: sigma.iter().map(|r| r.to_vec()).collect(),
        };
        let opts = PropagateOptions {
            scenario: k as u64,
            ..Default::default()
        };
        let dd = propagate(&problem, &dist, n, 2026, &opts).map_err(|e| e.to_string())?;
        let p_emp = dd
            .samples
            .iter()
            .filter(|s| (s.x_star[0] - 15.0).abs() < 1e-9)
            .count() as f64
            / dd.samples.len() as f64;
        let tol = 3.0 * (p_expected * (1.0 - p_expected) / n as f64).sqrt() + 1e-9;
        if (p_emp - p_expected).abs() > tol {
            return Err(format!(
                "setting {k}: empirical {p_emp:.4} vs closed form {p_expected:.4} (tol {tol:.4})"
            ));
        }
    }
    Ok(())
}

/// The parabola toy: generic QP path against the closed-form optimizer,
/// draw by draw.
fn closed_form_continuous() -> CheckResult {
    let problem = build_toy_continuous();
    let dist = PreferenceDistribution::Dirichlet {
        alpha: vec![1.2, 0.8],
    };
    let dd = propagate(&problem, &dist, 200, 9, &PropagateOptions::default())
        .map_err(|e| e.to_string())?;
    for s in &dd.samples {
        let expected =
            toy_xstar([s.beta[0], s.beta[1]], [1.0, 3.0]).map_err(|e| e.to_string())?;
        if (s.x_star[0] - expected).abs() > 1e-8 {
            return Err(format!(
                "draw {}: solver {} vs closed form {expected}",
                s.index, s.x_star[0]
            ));
        }
    }
    Ok(())
}

/// Random small LPs against exhaustive vertex enumeration. Exposed with a
/// configurable solver so a deliberately loosened tolerance demonstrably
/// fails.
pub fn lp_vertex_oracle(cfg: &SolverConfig) -> CheckResult {
    let mut rng = Stream::addressed(501, Purpose::Probe, 0, 0).rng();
    for trial in 0..30 {
        let n = 2 + (rng.random_range(0..4usize));
        let n_rows = rng.random_range(1..=6usize);
        let lower = vec![0.0; n];
        let upper: Vec<f64> = (0..n).map(|_| 1.0 + 4.0 * rng.random::<f64>()).collect();
        let interior: Vec<f64> = upper.iter().map(|u| u * rng.random::<f64>()).collect();
        let rows: Vec<Row> = (0..n_rows)
            .map(|_| {
                let coeffs: Vec<f64> = (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
                let at_interior: f64 =
                    coeffs.iter().zip(&interior).map(|(a, x)| a * x).sum();
                Row {
                    coeffs,
                    relation: prefprop::problem::Relation::Ge,
                    rhs: at_interior - rng.random::<f64>(),
                }
            })
            .collect();
        // Alternate well- and poorly-scaled costs; the small-scale
        // instances are what a loosened optimality tolerance trips over.
        let cost_scale = if trial % 2 == 0 { 1.0 } else { 0.02 };
        let cost: Vec<f64> = (0..n)
            .map(|_| cost_scale * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let sp = ScalarizedProblem {
            kind: ProblemKind::Lp,
            linear_cost: cost,
            cost_constant: 0.0,
            quad_terms: vec![],
            rows,
            lower,
            upper,
            var_names: (0..n).map(|j| format!("v{j}")).collect(),
        };
        let sol = solve_lp(&sp, cfg);
        if sol.status != SolverStatus::Optimal {
            return Err(format!("trial {trial}: solver returned {}", sol.status));
        }
        let best = enumerate_vertices(&sp)
            .into_iter()
            .map(|v| sp.cost(&v))
            .fold(f64::INFINITY, f64::min);
        if (sol.objective_value - best).abs() > 1e-8 * (1.0 + best.abs()) {
            return Err(format!(
                "trial {trial}: solver {} vs enumeration {best}",
                sol.objective_value
            ));
        }
    }
    Ok(())
}

/// Case-study QPs: KKT residuals and a feasible-sample lower-bound sanity
/// check.
fn qp_kkt() -> CheckResult {
    let problem = build_case_study(CaseStudy::PivotSkid);
    let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
    let betas = dist
        .sample(50, Stream::addressed(777, Purpose::Probe, 1, 0))
        .map_err(|e| e.to_string())?;
    // One shared feasible sample bounds all draws from below.
    let designs = lhs_sample(
        &problem.design_bounds(),
        2000,
        Stream::addressed(777, Purpose::Probe, 2, 0),
    );
    let mut feasible_points = Vec::new();
    for d in &designs {
        let full = problem.epigraph_tight_point(d).map_err(|e| e.to_string())?;
        if problem.max_violation(&full) <= 1e-9 {
            feasible_points.push(full);
        }
    }
    for (i, beta) in betas.iter().enumerate() {
        let sp = problem.scalarize(beta).map_err(|e| e.to_string())?;
        let sol = solve_qp(&sp, &SolverConfig::default());
        if sol.status != SolverStatus::Optimal {
            return Err(format!("draw {i}: status {}", sol.status));
        }
        if sol.kkt_residual > 1e-6 {
            return Err(format!("draw {i}: KKT residual {}", sol.kkt_residual));
        }
        let sample_best = feasible_points
            .iter()
            .map(|x| sp.cost(x))
            .fold(f64::INFINITY, f64::min);
        if sol.objective_value > sample_best + 1e-9 {
            return Err(format!(
                "draw {i}: solver {} above feasible sample best {sample_best}",
                sol.objective_value
            ));
        }
    }
    Ok(())
}

/// Fréchet variance identities on a real run.
fn frechet_identity() -> CheckResult {
    let problem = build_case_study(CaseStudy::Ackermann);
    let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
    let dd = propagate(&problem, &dist, 300, 17, &PropagateOptions::default())
        .map_err(|e| e.to_string())?;
    let bounds = problem.design_bounds();
    let s = prefprop::frechet::frechet_summary(&dd, &bounds, "check").map_err(|e| e.to_string())?;
    if s.variance < 0.0 {
        return Err("negative variance".into());
    }
    // Cross-check against mean(|x|^2) - |mean|^2.
    let normalized: Vec<Vec<f64>> = dd
        .samples
        .iter()
        .map(|smp| {
            smp.x_star
                .iter()
                .zip(&bounds)
                .map(|(&x, &(lo, hi))| (x - lo) / (hi - lo))
                .collect()
        })
        .collect();
    let n = normalized.len() as f64;
    let sq_mean: f64 = normalized
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / n;
    let mean_sq: f64 = s.mean.iter().map(|m| m * m).sum();
    let alt = sq_mean - mean_sq;
    if (s.variance - alt).abs() > 1e-10 {
        return Err(format!("identity violated: {} vs {alt}", s.variance));
    }
    Ok(())
}

/// Every artifact file written by a small run matches its documented schema.
fn schema() -> CheckResult {
    let dir = std::env::temp_dir().join(format!("prefprop_schema_{}", std::process::id()));
    let cfg = crate::run::RunConfig {
        problem: "case1_ackermann".into(),
        distribution: PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5),
        n_samples: 500,
        master_seed: 5,
        workers: Some(1),
        output_dir: dir.clone(),
        analyses: crate::run::KNOWN_ANALYSES.iter().map(|s| s.to_string()).collect(),
        cluster_tol: 1e-6,
        scenario_file: None,
        lhs_budget: 500,
    };
    let result = (|| -> CheckResult {
        let files = crate::run::cmd_run(&cfg).map_err(|e| e.to_string())?;
        let problem = build_case_study(CaseStudy::Ackermann);
        let design_names = problem.design_names();
        let objective_names = problem.objective_names();
        for path in &files {
            let name = path.file_name().unwrap().to_string_lossy();
            let Some(expected) = output::schema_columns(&name, &design_names, &objective_names)
            else {
                continue;
            };
            let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
            let header: Vec<String> = text
                .lines()
                .next()
                .unwrap_or("")
                .split(',')
                .map(|s| s.to_string())
                .collect();
            if header != expected {
                return Err(format!("{name}: header {header:?} != schema {expected:?}"));
            }
        }
        Ok(())
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

/// Identical configuration with different worker counts produces identical
/// sample tables.
fn determinism() -> CheckResult {
    let problem = build_case_study(CaseStudy::Ackermann);
    let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
    let run = |workers| {
        let opts = PropagateOptions {
            workers: Some(workers),
            ..Default::default()
        };
        propagate(&problem, &dist, 80, 31, &opts).map_err(|e| e.to_string())
    };
    let (a, b) = (run(1)?, run(4)?);
    let render = |dd: &prefprop::propagate::DecisionDistribution| {
        let mut buf = Vec::new();
        output::write_samples_csv(&mut buf, dd).expect("in-memory write");
        buf
    };
    if render(&a) != render(&b) {
        return Err("sample tables differ between 1 and 4 workers".into());
    }
    Ok(())
}

/// Exhaustive basic-point enumeration used as the LP oracle; independent of
/// the simplex implementation.
mod nalgebra_free {
    use prefprop::problem::{Relation, ScalarizedProblem};

    /// Solve the n x n linear system by Gaussian elimination with partial
    /// pivoting; `None` when singular.
    fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let (pivot, max) = (col..n)
                .map(|r| (r, a[r][col].abs()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
            if max < 1e-10 {
                return None;
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let mut acc = b[r];
            for c in r + 1..n {
                acc -= a[r][c] * x[c];
            }
            x[r] = acc / a[r][r];
        }
        Some(x)
    }

    /// All feasible basic points: every nonsingular choice of `n` active
    /// conditions among rows and bounds.
    pub fn enumerate_vertices(sp: &ScalarizedProblem) -> Vec<Vec<f64>> {
        let n = sp.n_vars();
        let mut conditions: Vec<(Vec<f64>, f64)> = Vec::new();
        for row in &sp.rows {
            let rhs = match row.relation {
                Relation::Ge | Relation::Eq | Relation::Le => row.rhs,
            };
            conditions.push((row.coeffs.clone(), rhs));
        }
        for j in 0..n {
            let mut g = vec![0.0; n];
            g[j] = 1.0;
            if sp.lower[j].is_finite() {
                conditions.push((g.clone(), sp.lower[j]));
            }
            if sp.upper[j].is_finite() {
                conditions.push((g, sp.upper[j]));
            }
        }
        let mut vertices = Vec::new();
        let total = conditions.len();
        let mut chosen = vec![0usize; n];
        fn recurse(
            start: usize,
            depth: usize,
            n: usize,
            total: usize,
            chosen: &mut Vec<usize>,
            conditions: &[(Vec<f64>, f64)],
            sp: &ScalarizedProblem,
            out: &mut Vec<Vec<f64>>,
        ) {
            if depth == n {
                let a: Vec<Vec<f64>> = chosen.iter().map(|&i| conditions[i].0.clone()).collect();
                let b: Vec<f64> = chosen.iter().map(|&i| conditions[i].1).collect();
                if let Some(x) = solve_dense(a, b) {
                    if sp.max_violation(&x) <= 1e-7 {
                        out.push(x);
                    }
                }
                return;
            }
            for i in start..total {
                chosen[depth] = i;
                recurse(i + 1, depth + 1, n, total, chosen, conditions, sp, out);
            }
        }
        recurse(0, 0, n, total, &mut chosen, &conditions, sp, &mut vertices);
        vertices
    }
}
