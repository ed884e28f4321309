//! Monte Carlo propagation of preference uncertainty to decision uncertainty.
//!
//! Each draw index owns its random stream, so the recorded distribution is
//! identical whatever the worker count: the batch is mapped over a rayon pool
//! when the `parallel` feature is enabled (the default) and folded
//! sequentially otherwise, with a single-threaded aggregation either way.

use serde::Serialize;

use crate::dist::PreferenceDistribution;
use crate::error::{Error, Result};
use crate::problem::MultiObjectiveProblem;
use crate::rng::{Purpose, Stream};
use crate::solver::{solve, SolverConfig, SolverStatus};
use crate::stats;

/// One recorded optimal decision.
#[derive(Debug, Clone)]
pub struct DecisionSample {
    /// Draw index; also the sample's stream offset.
    pub index: u64,
    pub beta: Vec<f64>,
    /// Design-variable values, in design order.
    pub x_star: Vec<f64>,
    /// Auxiliary-variable values (diagnostics only).
    pub aux: Vec<f64>,
    /// Normalized objective values at the optimum.
    pub objectives: Vec<f64>,
    pub status: SolverStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureDiagnostic {
    pub index: u64,
    pub beta: Vec<f64>,
    pub reason: String,
}

/// The induced decision distribution: every successful draw in order, plus
/// run metadata sufficient to reproduce it.
#[derive(Debug, Clone)]
pub struct DecisionDistribution {
    pub samples: Vec<DecisionSample>,
    pub n_requested: usize,
    pub n_failed: usize,
    pub failures: Vec<FailureDiagnostic>,
    pub problem_id: String,
    pub dist_spec: PreferenceDistribution,
    pub design_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub design_bounds: Vec<(f64, f64)>,
    pub master_seed: u64,
    pub scenario: u64,
}

#[derive(Debug, Clone, Default)]
pub struct PropagateOptions {
    pub solver: SolverConfig,
    /// `None`: library default (all cores under the `parallel` feature,
    /// sequential otherwise). `Some(1)` forces the sequential path.
    pub workers: Option<usize>,
    /// Scenario slot for stream addressing; sweeps use one slot per scenario.
    pub scenario: u64,
}

/// Failure budget: aggregate failure rate beyond this fraction aborts the run.
const FAILURE_BUDGET: f64 = 0.01;

/// Sample `n` preference vectors, solve each scalarized instance, and record
/// the induced decision distribution.
pub fn propagate(
    problem: &MultiObjectiveProblem,
    dist: &PreferenceDistribution,
    n: usize,
    master_seed: u64,
    opts: &PropagateOptions,
) -> Result<DecisionDistribution> {
    if n == 0 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    problem.validate()?;
    dist.validate()?;
    if dist.dim() != problem.n_objectives() {
        return Err(Error::DimensionMismatch {
            expected: problem.n_objectives(),
            got: dist.dim(),
        });
    }

    let base = Stream::addressed(master_seed, Purpose::Propagate, opts.scenario, 0);
    let betas = dist.sample(n, base)?;
    let design_idx = problem.design_indices();
    let positive = dist.positive_support();

    let run_one = |(i, beta): (usize, &Vec<f64>)| -> std::result::Result<DecisionSample, FailureDiagnostic> {
        let fail = |reason: String| FailureDiagnostic {
            index: i as u64,
            beta: beta.clone(),
            reason,
        };
        let sp = if positive {
            problem.scalarize(beta)
        } else {
            problem.scalarize_signed(beta)
        }
        .map_err(|e| fail(e.to_string()))?;
        let sol = solve(&sp, &opts.solver);
        if sol.status != SolverStatus::Optimal {
            return Err(fail(sol.status.to_string()));
        }
        let x_star: Vec<f64> = design_idx.iter().map(|&j| sol.point[j]).collect();
        let aux: Vec<f64> = (0..problem.n_vars())
            .filter(|j| !design_idx.contains(j))
            .map(|j| sol.point[j])
            .collect();
        let objectives = problem.evaluate_objectives_unchecked(&sol.point);
        Ok(DecisionSample {
            index: i as u64,
            beta: beta.clone(),
            x_star,
            aux,
            objectives,
            status: sol.status,
        })
    };

    let outcomes = map_samples(&betas, opts.workers, run_one);

    let mut samples = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(s) => samples.push(s),
            Err(f) => failures.push(f),
        }
    }
    if failures.len() as f64 > FAILURE_BUDGET * n as f64 {
        let detail = failures
            .iter()
            .take(3)
            .map(|f| format!("draw {}: {}", f.index, f.reason))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::FailureBudgetExceeded {
            failed: failures.len(),
            requested: n,
            budget_pct: FAILURE_BUDGET * 100.0,
            detail,
        });
    }

    Ok(DecisionDistribution {
        n_failed: failures.len(),
        samples,
        n_requested: n,
        failures,
        problem_id: problem.name.clone(),
        dist_spec: dist.clone(),
        design_names: problem.design_names(),
        objective_names: problem.objective_names(),
        design_bounds: problem.design_bounds(),
        master_seed,
        scenario: opts.scenario,
    })
}

#[cfg(feature = "parallel")]
fn map_samples<F>(
    betas: &[Vec<f64>],
    workers: Option<usize>,
    run_one: F,
) -> Vec<std::result::Result<DecisionSample, FailureDiagnostic>>
where
    F: Fn((usize, &Vec<f64>)) -> std::result::Result<DecisionSample, FailureDiagnostic>
        + Sync
        + Send,
{
    use rayon::prelude::*;
    match workers {
        Some(1) => betas.iter().enumerate().map(run_one).collect(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("worker pool");
            pool.install(|| {
                betas
                    .par_iter()
                    .enumerate()
                    .map(|(i, b)| run_one((i, b)))
                    .collect()
            })
        }
        None => betas
            .par_iter()
            .enumerate()
            .map(|(i, b)| run_one((i, b)))
            .collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_samples<F>(
    betas: &[Vec<f64>],
    _workers: Option<usize>,
    run_one: F,
) -> Vec<std::result::Result<DecisionSample, FailureDiagnostic>>
where
    F: Fn((usize, &Vec<f64>)) -> std::result::Result<DecisionSample, FailureDiagnostic>,
{
    betas.iter().enumerate().map(run_one).collect()
}

/// One cluster of the discrete support.
#[derive(Debug, Clone)]
pub struct SupportPoint {
    /// Componentwise mean of the cluster members.
    pub design: Vec<f64>,
    pub probability: f64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct DiscreteSummary {
    /// Sorted by probability, descending (ties keep first-seen order).
    pub support: Vec<SupportPoint>,
    pub cluster_tol: f64,
    /// Set when the cluster count is comparable to the sample count
    /// (more than 10% of samples form distinct clusters), indicating a
    /// continuous rather than discrete distribution.
    pub continuous_like: bool,
}

/// Greedy max-norm clustering of the design vectors in draw order:
/// a sample joins the first cluster whose seed is within `cluster_tol`.
pub fn discretize(dd: &DecisionDistribution, cluster_tol: f64) -> Result<DiscreteSummary> {
    if !(cluster_tol > 0.0) {
        return Err(Error::InvalidConfig("cluster_tol must be > 0".into()));
    }
    let mut seeds: Vec<&[f64]> = Vec::new();
    let mut members: Vec<Vec<&[f64]>> = Vec::new();
    for s in &dd.samples {
        let x = s.x_star.as_slice();
        let found = seeds.iter().position(|seed| {
            seed.iter()
                .zip(x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max)
                <= cluster_tol
        });
        match found {
            Some(k) => members[k].push(x),
            None => {
                seeds.push(x);
                members.push(vec![x]);
            }
        }
    }
    let n = dd.samples.len();
    let d = dd.design_names.len();
    let mut support: Vec<SupportPoint> = members
        .iter()
        .map(|cluster| {
            let mut mean = vec![0.0; d];
            for x in cluster {
                for (m, &v) in mean.iter_mut().zip(x.iter()) {
                    *m += v;
                }
            }
            for m in &mut mean {
                *m /= cluster.len() as f64;
            }
            SupportPoint {
                design: mean,
                probability: cluster.len() as f64 / n as f64,
                count: cluster.len(),
            }
        })
        .collect();
    support.sort_by(|a, b| b.probability.partial_cmp(&a.probability).unwrap());
    let continuous_like = n > 0 && support.len() * 10 > n;
    Ok(DiscreteSummary {
        support,
        cluster_tol,
        continuous_like,
    })
}

#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub variables: Vec<String>,
    pub pearson: Vec<Vec<f64>>,
    pub spearman: Vec<Vec<f64>>,
    /// Per-variable flag: constant column, off-diagonal entries forced to 0.
    pub degenerate: Vec<bool>,
}

/// Pearson and Spearman correlation matrices of the design variables.
pub fn correlations(dd: &DecisionDistribution) -> Result<CorrelationReport> {
    let n = dd.samples.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!(
            "correlations need >= 3 samples, got {n}"
        )));
    }
    let d = dd.design_names.len();
    let columns: Vec<Vec<f64>> = (0..d)
        .map(|k| dd.samples.iter().map(|s| s.x_star[k]).collect())
        .collect();
    let degenerate: Vec<bool> = columns
        .iter()
        .map(|c| c.iter().all(|&v| v == c[0]))
        .collect();
    let mut pearson = vec![vec![0.0; d]; d];
    let mut spearman = vec![vec![0.0; d]; d];
    for i in 0..d {
        pearson[i][i] = 1.0;
        spearman[i][i] = 1.0;
        for j in 0..i {
            let p = stats::pearson(&columns[i], &columns[j]).unwrap_or(0.0);
            let s = stats::spearman(&columns[i], &columns[j]).unwrap_or(0.0);
            pearson[i][j] = p;
            pearson[j][i] = p;
            spearman[i][j] = s;
            spearman[j][i] = s;
        }
    }
    Ok(CorrelationReport {
        variables: dd.design_names.clone(),
        pearson,
        spearman,
        degenerate,
    })
}

#[derive(Debug, Clone)]
pub struct HistogramTable {
    pub variable: String,
    /// `bins + 1` edges spanning the declared bounds.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Normalized so that the histogram integrates to 1.
    pub densities: Vec<f64>,
}

/// Per-design-variable histograms over the declared bounds.
pub fn marginal_histograms(dd: &DecisionDistribution, bins: usize) -> Result<Vec<HistogramTable>> {
    if bins == 0 {
        return Err(Error::InvalidConfig("bins must be >= 1".into()));
    }
    let n = dd.samples.len();
    let mut tables = Vec::new();
    for (k, name) in dd.design_names.iter().enumerate() {
        let (lo, hi) = dd.design_bounds[k];
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| lo + width * b as f64).collect();
        let mut counts = vec![0usize; bins];
        for s in &dd.samples {
            let x = s.x_star[k];
            let b = (((x - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
            counts[b] += 1;
        }
        let densities: Vec<f64> = counts
            .iter()
            .map(|&c| {
                if n == 0 {
                    0.0
                } else {
                    c as f64 / (n as f64 * width)
                }
            })
            .collect();
        tables.push(HistogramTable {
            variable: name.clone(),
            edges,
            counts,
            densities,
        });
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_case_study, build_toy_continuous, build_toy_discrete, CaseStudy};

    fn synthetic_dd(columns: Vec<Vec<f64>>, names: Vec<&str>) -> DecisionDistribution {
        let n = columns[0].len();
        let samples = (0..n)
            .map(|i| DecisionSample {
                index: i as u64,
                beta: vec![],
                x_star: columns.iter().map(|c| c[i]).collect(),
                aux: vec![],
                objectives: vec![],
                status: SolverStatus::Optimal,
            })
            .collect();
        DecisionDistribution {
            samples,
            n_requested: n,
            n_failed: 0,
            failures: vec![],
            problem_id: "synthetic".into(),
            dist_spec: PreferenceDistribution::Fixed {
                beta: vec![1.0, 1.0],
            },
            design_names: names.iter().map(|s| s.to_string()).collect(),
            objective_names: vec![],
            design_bounds: vec![(0.0, 1.0); columns.len()],
            master_seed: 0,
            scenario: 0,
        }
    }

    #[test]
    fn fixed_preferences_give_point_mass() {
        let p = build_case_study(CaseStudy::Ackermann);
        let dist = PreferenceDistribution::Fixed {
            beta: vec![1.0, 2.0, 3.0, 4.0],
        };
        let dd = propagate(&p, &dist, 40, 1, &PropagateOptions::default()).unwrap();
        assert_eq!(dd.samples.len(), 40);
        let first = dd.samples[0].x_star.clone();
        for s in &dd.samples {
            assert_eq!(s.x_star, first);
        }
        let summary = discretize(&dd, 1e-6).unwrap();
        assert_eq!(summary.support.len(), 1);
        assert!((summary.support[0].probability - 1.0).abs() <= 1e-12);
        assert!(!summary.continuous_like);
    }

    #[test]
    fn recorded_samples_are_feasible_vertices() {
        let p = build_case_study(CaseStudy::Ackermann);
        let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
        let dd = propagate(&p, &dist, 60, 3, &PropagateOptions::default()).unwrap();
        assert_eq!(dd.n_failed, 0);
        for s in &dd.samples {
            let mut full = s.x_star.clone();
            full.extend_from_slice(&s.aux);
            assert!(p.max_violation(&full) <= 1e-8, "violation at {}", s.index);
        }
    }

    #[test]
    fn draw_order_and_stream_addressing() {
        let p = build_toy_discrete();
        let dist = PreferenceDistribution::Dirichlet {
            alpha: vec![1.0, 1.0],
        };
        let dd = propagate(&p, &dist, 25, 77, &PropagateOptions::default()).unwrap();
        let base = Stream::addressed(77, Purpose::Propagate, 0, 0);
        for s in &dd.samples {
            assert_eq!(s.beta, dist.sample_row(s.index, base).unwrap());
        }
        let indices: Vec<u64> = dd.samples.iter().map(|s| s.index).collect();
        assert_eq!(indices, (0..25).collect::<Vec<u64>>());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = build_case_study(CaseStudy::Ackermann);
        let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
        let run = |workers| {
            let opts = PropagateOptions {
                workers,
                ..Default::default()
            };
            propagate(&p, &dist, 100, 42, &opts).unwrap()
        };
        let a = run(Some(1));
        let b = run(Some(4));
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.beta, y.beta);
            assert_eq!(x.x_star, y.x_star);
            assert_eq!(x.objectives, y.objectives);
        }
    }

    #[test]
    fn mvn_toy_switch_probability() {
        // Two lines with slopes (1, 2); symmetric preferences put half the
        // mass on each endpoint.
        let p = build_toy_discrete();
        let dist = PreferenceDistribution::Mvn {
            mu: vec![0.0, 0.0],
            sigma: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let n = 4000;
        let dd = propagate(&p, &dist, n, 5, &PropagateOptions::default()).unwrap();
        let upper = dd
            .samples
            .iter()
            .filter(|s| (s.x_star[0] - 15.0).abs() < 1e-9)
            .count() as f64
            / dd.samples.len() as f64;
        let tol = 3.0 * (0.25 / n as f64).sqrt();
        assert!((upper - 0.5).abs() <= tol, "p = {upper}");
    }

    #[test]
    fn failure_budget_aborts_run() {
        // Half of the MVN draws make the toy quadratic concave, which the
        // scalarizer rejects; the budget must trip.
        let p = build_toy_continuous();
        let dist = PreferenceDistribution::Mvn {
            mu: vec![0.0, 0.0],
            sigma: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        match propagate(&p, &dist, 200, 9, &PropagateOptions::default()) {
            Err(Error::FailureBudgetExceeded { failed, .. }) => assert!(failed > 2),
            other => panic!("expected failure budget error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = build_case_study(CaseStudy::Ackermann);
        let dist = PreferenceDistribution::Fixed {
            beta: vec![1.0, 2.0],
        };
        assert!(matches!(
            propagate(&p, &dist, 10, 0, &PropagateOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn discretize_merges_within_tolerance() {
        let dd = synthetic_dd(
            vec![vec![1.0, 1.0 + 1e-9, 5.0, 5.0, 5.0]],
            vec!["x"],
        );
        let s = discretize(&dd, 1e-6).unwrap();
        assert_eq!(s.support.len(), 2);
        assert_eq!(s.support[0].count, 3);
        assert!((s.support.iter().map(|p| p.probability).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlations_exact_linear_dependence() {
        let x5: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let x6: Vec<f64> = x5.iter().map(|v| -2.0 * v + 100.0).collect();
        let dd = synthetic_dd(vec![x5, x6], vec!["x5", "x6"]);
        let rep = correlations(&dd).unwrap();
        assert!((rep.pearson[0][1] + 1.0).abs() <= 1e-12);
        assert!((rep.spearman[0][1] + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn correlations_independent_columns_near_zero() {
        use rand::Rng;
        let n = 10_000;
        let mut rng = Stream::new(4, 0).rng();
        let a: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let dd = synthetic_dd(vec![a, b], vec!["a", "b"]);
        let rep = correlations(&dd).unwrap();
        assert!(rep.pearson[0][1].abs() <= 4.0 / (n as f64).sqrt());
        assert!(!rep.degenerate[0]);
    }

    #[test]
    fn correlations_constant_column_flagged() {
        let dd = synthetic_dd(
            vec![vec![1.0; 10], (0..10).map(|i| i as f64).collect()],
            vec!["c", "x"],
        );
        let rep = correlations(&dd).unwrap();
        assert!(rep.degenerate[0]);
        assert_eq!(rep.pearson[0][1], 0.0);
        assert_eq!(rep.pearson[0][0], 1.0);
    }

    #[test]
    fn histogram_point_mass_single_bin() {
        let dd = synthetic_dd(vec![vec![0.25; 100]], vec!["x"]);
        let tables = marginal_histograms(&dd, 10).unwrap();
        assert_eq!(tables[0].counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(tables[0].counts[2], 100);
    }

    #[test]
    fn histogram_uniform_multinomial_bound() {
        use rand::Rng;
        let n = 100_000;
        let mut rng = Stream::new(8, 0).rng();
        let xs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let dd = synthetic_dd(vec![xs], vec!["x"]);
        let bins = 10;
        let tables = marginal_histograms(&dd, bins).unwrap();
        let expect = n as f64 / bins as f64;
        let sigma = (n as f64 * 0.1 * 0.9).sqrt();
        for &c in &tables[0].counts {
            assert!((c as f64 - expect).abs() <= 5.0 * sigma, "count {c}");
        }
    }
}
