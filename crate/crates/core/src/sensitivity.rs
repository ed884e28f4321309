//! Variance-based sensitivity of objective outcomes to the induced design
//! variables.
//!
//! Sobol' first/total indices use the Saltelli pick-freeze scheme with the
//! A/B matrices assembled by resampling each column of the empirical sample
//! independently (empirical marginals, dependence deliberately broken, which
//! is what makes Sobol' a comparison measure here). Shapley effects remain
//! valid under dependence: the value function `v(S) = Var(E[Y | X_S])` is
//! estimated by k-nearest-neighbor conditioning on the empirical sample and
//! the Shapley sum runs over all proper subsets exactly, so the shares sum to
//! one by construction.

use crate::error::{Error, Result};
use crate::problem::MultiObjectiveProblem;
use crate::propagate::DecisionDistribution;
use crate::rng::{Purpose, Stream};
use crate::stats;

/// Exact subset enumeration beyond this many variables is intractable.
pub const MAX_SHAPLEY_DIM: usize = 12;
/// Smallest pick-freeze base sample accepted.
pub const MIN_SOBOL_BASE: usize = 256;
/// Smallest sample accepted by the Shapley estimator.
pub const MIN_SHAPLEY_SAMPLES: usize = 500;
/// Output variance below this is reported as degenerate.
const VARIANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, serde::Serialize)]
pub struct EstimatorSettings {
    pub n_base: usize,
    pub knn: usize,
    pub master_seed: u64,
    pub stream_index: u64,
}

#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub objective: String,
    pub variables: Vec<String>,
    pub sobol_first: Vec<f64>,
    pub sobol_total: Vec<f64>,
    /// Normalized by the empirical output variance; sums to 1.
    pub shapley: Vec<f64>,
    /// Output variance was (numerically) zero; index vectors are NaN.
    pub degenerate: bool,
    pub n_eval: usize,
    pub settings: EstimatorSettings,
}

/// Saltelli/Jansen pick-freeze Sobol' estimates.
///
/// Rows of the A and B matrices are assembled by bootstrapping each column of
/// `samples` independently. Returns `(first_order, total_order)`.
pub fn sobol_indices<F>(
    samples: &[Vec<f64>],
    model: F,
    n_base: usize,
    stream: Stream,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    if n_base < MIN_SOBOL_BASE {
        return Err(Error::InvalidConfig(format!(
            "sobol base sample must be >= {MIN_SOBOL_BASE}, got {n_base}"
        )));
    }
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateInput("need at least 2 samples".into()));
    }
    let d = samples[0].len();
    let mut rng = stream.rng();
    use rand::Rng;
    let draw_matrix = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
        // Independent bootstrap per column.
        let mut m = vec![vec![0.0; d]; n_base];
        for k in 0..d {
            for row in m.iter_mut() {
                row[k] = samples[rng.random_range(0..n)][k];
            }
        }
        m
    };
    let a = draw_matrix(&mut rng);
    let b = draw_matrix(&mut rng);

    let ya: Vec<f64> = a.iter().map(|r| model(r)).collect();
    let yb: Vec<f64> = b.iter().map(|r| model(r)).collect();
    let pooled: Vec<f64> = ya.iter().chain(yb.iter()).copied().collect();
    let var = stats::variance(&pooled);
    if var <= VARIANCE_FLOOR {
        return Err(Error::DegenerateInput(
            "zero output variance over the pick-freeze sample".into(),
        ));
    }

    let mut first = vec![0.0; d];
    let mut total = vec![0.0; d];
    let mut ab_row = vec![0.0; d];
    for k in 0..d {
        let mut s_acc = 0.0;
        let mut t_acc = 0.0;
        for j in 0..n_base {
            ab_row.copy_from_slice(&a[j]);
            ab_row[k] = b[j][k];
            let yab = model(&ab_row);
            s_acc += yb[j] * (yab - ya[j]);
            t_acc += (ya[j] - yab) * (ya[j] - yab);
        }
        first[k] = s_acc / n_base as f64 / var;
        total[k] = t_acc / (2.0 * n_base as f64) / var;
    }
    Ok((first, total))
}

/// Shapley decomposition of the output variance by exact enumeration over all
/// proper subsets, with kNN conditional means.
pub fn shapley_effects<F>(
    samples: &[Vec<f64>],
    model: F,
    knn: usize,
    stream: Stream,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let d = samples.first().map_or(0, |r| r.len());
    let values: Vec<f64> = samples.iter().map(|r| model(r)).collect();
    let v = subset_values_multi(samples, &[values], knn, stream)?
        .pop()
        .expect("one output requested");
    Ok(shapley_from_subset_values(&v, d))
}

/// `v(S)` tables (one per output column), normalized by each `Var(Y)`;
/// `v(full) = 1` exactly because every `Y` is a deterministic function of the
/// full input. Neighborhoods depend only on the inputs, so evaluating all
/// outputs in one pass shares the distance work.
fn subset_values_multi(
    samples: &[Vec<f64>],
    outputs: &[Vec<f64>],
    knn: usize,
    stream: Stream,
) -> Result<Vec<Vec<f64>>> {
    let n = samples.len();
    if n < MIN_SHAPLEY_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "shapley estimator needs >= {MIN_SHAPLEY_SAMPLES} samples, got {n}"
        )));
    }
    let d = samples[0].len();
    if d > MAX_SHAPLEY_DIM {
        return Err(Error::TooManyVariables {
            max: MAX_SHAPLEY_DIM,
            got: d,
        });
    }
    let vars_y: Vec<f64> = outputs.iter().map(|y| stats::variance(y)).collect();
    for &vy in &vars_y {
        if vy <= VARIANCE_FLOOR {
            return Err(Error::DegenerateInput("zero output variance".into()));
        }
    }

    // Per-column standardization before neighbor search; constant columns
    // standardize to zero and carry no distance information.
    let mut z = vec![vec![0.0; d]; n];
    for k in 0..d {
        let col: Vec<f64> = samples.iter().map(|r| r[k]).collect();
        let m = stats::mean(&col);
        let sd = stats::variance(&col).sqrt();
        if sd > 0.0 {
            for (i, zi) in z.iter_mut().enumerate() {
                zi[k] = (col[i] - m) / sd;
            }
        }
    }

    // Evaluation points: the whole sample, subsampled only when very large.
    const MAX_EVAL_POINTS: usize = 4096;
    let eval_idx: Vec<usize> = if n <= MAX_EVAL_POINTS {
        (0..n).collect()
    } else {
        let mut rng = stream.rng();
        use rand::Rng;
        (0..MAX_EVAL_POINTS).map(|_| rng.random_range(0..n)).collect()
    };

    let k_eff = knn.max(1).min(n);
    let full: u32 = (1u32 << d) - 1;
    let n_out = outputs.len();
    let mut v = vec![vec![0.0; 1 << d]; n_out];
    for table in v.iter_mut() {
        table[full as usize] = 1.0;
    }

    // Atomic supports (clustered LP vertices) produce exact ties: when an
    // evaluation point has enough exact matches in the S-coordinates, the
    // conditional mean is taken over that cell instead of a mixed-distance
    // neighborhood, which would smear mass across distinct support points.
    const EXACT_CELL_MIN: usize = 2;
    const TIE_EPS: f64 = 1e-20;

    let mut dist_idx: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut cell: Vec<usize> = Vec::new();
    let mut neighborhood: Vec<usize> = Vec::new();
    let mut cond_means = vec![Vec::with_capacity(eval_idx.len()); n_out];
    for mask in 1..full {
        let coords: Vec<usize> = (0..d).filter(|k| mask & (1 << k) != 0).collect();
        for cm in cond_means.iter_mut() {
            cm.clear();
        }
        for &i in &eval_idx {
            dist_idx.clear();
            cell.clear();
            for j in 0..n {
                let mut dist = 0.0;
                for &k in &coords {
                    let dv = z[i][k] - z[j][k];
                    dist += dv * dv;
                }
                if dist <= TIE_EPS {
                    cell.push(j);
                }
                dist_idx.push((dist, j));
            }
            let neighbors: &[usize] = if cell.len() >= EXACT_CELL_MIN {
                &cell
            } else {
                // Deterministic k smallest under the total order
                // (distance, index).
                let kth = k_eff - 1;
                dist_idx.select_nth_unstable_by(kth, |a, b| {
                    a.partial_cmp(b).expect("finite distances")
                });
                neighborhood.clear();
                neighborhood.extend(dist_idx[..k_eff].iter().map(|&(_, j)| j));
                &neighborhood
            };
            for (ell, cm) in cond_means.iter_mut().enumerate() {
                let y = &outputs[ell];
                cm.push(neighbors.iter().map(|&j| y[j]).sum::<f64>() / neighbors.len() as f64);
            }
        }
        for ell in 0..n_out {
            v[ell][mask as usize] = stats::variance(&cond_means[ell]) / vars_y[ell];
        }
    }
    Ok(v)
}

/// Exact Shapley allocation from tabulated subset values.
fn shapley_from_subset_values(v: &[f64], d: usize) -> Vec<f64> {
    // weight(|S|) = |S|! (d - |S| - 1)! / d!
    let mut factorial = vec![1.0_f64; d + 1];
    for i in 1..=d {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    let weight =
        |s: usize| -> f64 { factorial[s] * factorial[d - s - 1] / factorial[d] };

    let full = (1usize << d) - 1;
    let mut shares = vec![0.0; d];
    for (i, share) in shares.iter_mut().enumerate() {
        let bit = 1usize << i;
        for mask in 0..=full {
            if mask & bit != 0 {
                continue;
            }
            let s = (mask as u32).count_ones() as usize;
            *share += weight(s) * (v[mask | bit] - v[mask]);
        }
    }
    shares
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub n_base: usize,
    pub knn: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            n_base: 4096,
            knn: 50,
        }
    }
}

/// One report per objective: both estimators applied to `Y = f(X)` with the
/// objective reconstructed from the design variables alone (auxiliaries at
/// their epigraph-tight values).
pub fn build_report(
    dd: &DecisionDistribution,
    problem: &MultiObjectiveProblem,
    opts: &ReportOptions,
) -> Result<Vec<SensitivityReport>> {
    if dd.samples.is_empty() {
        return Err(Error::DegenerateInput("empty decision distribution".into()));
    }
    let samples: Vec<Vec<f64>> = dd.samples.iter().map(|s| s.x_star.clone()).collect();
    let d = dd.design_names.len();
    let n = samples.len();

    // All objectives share one model evaluation per point, and the Shapley
    // neighborhoods depend only on the inputs, so every objective's value
    // tables come out of a single pass.
    let eval_all = |x: &[f64]| -> Vec<f64> {
        let full = problem
            .epigraph_tight_point(x)
            .expect("design dimension checked");
        problem.evaluate_objectives_unchecked(&full)
    };
    let reconstructed: Vec<Vec<f64>> = samples.iter().map(|x| eval_all(x)).collect();
    let outputs: Vec<Vec<f64>> = (0..problem.n_objectives())
        .map(|ell| reconstructed.iter().map(|r| r[ell]).collect())
        .collect();
    let live: Vec<usize> = (0..outputs.len())
        .filter(|&ell| stats::variance(&outputs[ell]) > VARIANCE_FLOOR)
        .collect();
    let live_outputs: Vec<Vec<f64>> = live.iter().map(|&ell| outputs[ell].clone()).collect();
    let shapley_stream =
        Stream::addressed(dd.master_seed, Purpose::Sensitivity, dd.scenario, 1 << 20);
    let mut tables = if live_outputs.is_empty() {
        Vec::new()
    } else {
        subset_values_multi(&samples, &live_outputs, opts.knn, shapley_stream)?
    };

    let mut reports = Vec::with_capacity(problem.n_objectives());
    for (ell, objective) in problem.objectives.iter().enumerate() {
        let stream = Stream::addressed(dd.master_seed, Purpose::Sensitivity, dd.scenario, ell as u64);
        let settings = EstimatorSettings {
            n_base: opts.n_base,
            knn: opts.knn,
            master_seed: dd.master_seed,
            stream_index: stream.stream_index,
        };
        let Some(pos) = live.iter().position(|&l| l == ell) else {
            reports.push(SensitivityReport {
                objective: objective.name.clone(),
                variables: dd.design_names.clone(),
                sobol_first: vec![f64::NAN; d],
                sobol_total: vec![f64::NAN; d],
                shapley: vec![f64::NAN; d],
                degenerate: true,
                n_eval: 0,
                settings,
            });
            continue;
        };
        let model = |x: &[f64]| eval_all(x)[ell];
        let (first, total) = sobol_indices(&samples, model, opts.n_base, stream)?;
        let shapley = shapley_from_subset_values(&std::mem::take(&mut tables[pos]), d);
        reports.push(SensitivityReport {
            objective: objective.name.clone(),
            variables: dd.design_names.clone(),
            sobol_first: first,
            sobol_total: total,
            shapley,
            degenerate: false,
            n_eval: opts.n_base * (d + 2) + n,
            settings,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn uniform_matrix(n: usize, d: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = Stream::new(seed, 0).rng();
        (0..n)
            .map(|_| (0..d).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
            .collect()
    }

    #[test]
    fn additive_uniform_sobol() {
        let samples = uniform_matrix(4000, 2, 0.0, 1.0, 1);
        let (first, total) =
            sobol_indices(&samples, |x| x[0] + x[1], 4096, Stream::new(2, 0)).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(first[k], 0.5, epsilon = 0.05);
            assert_abs_diff_eq!(total[k], 0.5, epsilon = 0.05);
        }
    }

    #[test]
    fn constant_output_is_degenerate() {
        let samples = uniform_matrix(1000, 2, 0.0, 1.0, 3);
        assert!(matches!(
            sobol_indices(&samples, |_| 7.0, 512, Stream::new(0, 0)),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            shapley_effects(&samples, |_| 7.0, 50, Stream::new(0, 0)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn small_base_rejected() {
        let samples = uniform_matrix(100, 2, 0.0, 1.0, 3);
        assert!(matches!(
            sobol_indices(&samples, |x| x[0], 128, Stream::new(0, 0)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn shapley_dimension_cap() {
        let samples = uniform_matrix(600, 13, 0.0, 1.0, 4);
        assert!(matches!(
            shapley_effects(&samples, |x| x[0], 50, Stream::new(0, 0)),
            Err(Error::TooManyVariables { .. })
        ));
    }

    fn gaussian_pair(n: usize, rho: f64, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = Stream::new(seed, 0).rng();
        (0..n)
            .map(|_| {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                vec![z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2]
            })
            .collect()
    }

    #[test]
    fn shapley_exchangeable_pair_splits_evenly() {
        let samples = gaussian_pair(2000, 0.5, 5);
        let shares =
            shapley_effects(&samples, |x| x[0] + x[1], 50, Stream::new(6, 0)).unwrap();
        assert_abs_diff_eq!(shares[0], 0.5, epsilon = 0.05);
        assert_abs_diff_eq!(shares[1], 0.5, epsilon = 0.05);
        assert_abs_diff_eq!(shares.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn shapley_correlated_gaussian_matches_conditional_oracle() {
        // Y = X1 with corr(X1, X2) = rho. Exact Gaussian conditioning gives
        // v({1}) = 1 and v({2}) = Var(E[X1|X2]) = rho^2, so the shares are
        // (1 - rho^2/2, rho^2/2).
        let rho = 0.6_f64;
        let samples = gaussian_pair(3000, rho, 7);

        // Brute-force oracle: sample X2, condition exactly, take variances.
        let mut rng = Stream::new(8, 0).rng();
        let cond_means: Vec<f64> = (0..200_000)
            .map(|_| {
                let x2: f64 = StandardNormal.sample(&mut rng);
                rho * x2
            })
            .collect();
        let v2 = stats::variance(&cond_means);
        let oracle = [1.0 - v2 / 2.0, v2 / 2.0];

        let shares = shapley_effects(&samples, |x| x[0], 50, Stream::new(9, 0)).unwrap();
        assert_abs_diff_eq!(shares[0], oracle[0], epsilon = 0.05);
        assert_abs_diff_eq!(shares[1], oracle[1], epsilon = 0.05);
    }

    #[test]
    fn shapley_symmetry_under_column_swap() {
        let base = gaussian_pair(1500, 0.4, 10);
        let swapped: Vec<Vec<f64>> = base.iter().map(|r| vec![r[1], r[0]]).collect();
        let f = |x: &[f64]| x[0] + 0.3 * x[1];
        let g = |x: &[f64]| x[1] + 0.3 * x[0];
        let s1 = shapley_effects(&base, f, 50, Stream::new(11, 0)).unwrap();
        let s2 = shapley_effects(&swapped, g, 50, Stream::new(11, 0)).unwrap();
        assert_abs_diff_eq!(s1[0], s2[1], epsilon = 1e-9);
        assert_abs_diff_eq!(s1[1], s2[0], epsilon = 1e-9);
    }

    #[test]
    fn estimators_are_deterministic() {
        let samples = gaussian_pair(800, 0.3, 14);
        let model = |x: &[f64]| x[0] * x[0] + x[1];
        let s = Stream::new(15, 0);
        let (f1, t1) = sobol_indices(&samples, model, 512, s).unwrap();
        let (f2, t2) = sobol_indices(&samples, model, 512, s).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(t1, t2);
        let a = shapley_effects(&samples, model, 50, s).unwrap();
        let b = shapley_effects(&samples, model, 50, s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sobol_consistency_under_independence() {
        // Independent inputs: totals dominate firsts up to estimator noise.
        let samples = uniform_matrix(4000, 3, -1.0, 1.0, 12);
        let (first, total) = sobol_indices(
            &samples,
            |x| x[0] + 2.0 * x[1] * x[2],
            8192,
            Stream::new(13, 0),
        )
        .unwrap();
        for k in 0..3 {
            assert!(
                total[k] >= first[k] - 0.03,
                "var {k}: first {} vs total {}",
                first[k],
                total[k]
            );
        }
    }
}
