//! Preference-free baseline: Latin hypercube sampling of the design box,
//! feasibility filtering, and non-dominated sorting.

use rand::Rng;

use crate::problem::MultiObjectiveProblem;
use crate::propagate::DecisionDistribution;
use crate::rng::Stream;

/// Feasibility slack applied to sampled points before sorting.
const FEAS_TOL: f64 = 1e-9;
/// Default pre-filter sampling budget.
pub const DEFAULT_LHS_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct ParetoPoint {
    pub design: Vec<f64>,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ParetoSet {
    pub points: Vec<ParetoPoint>,
    pub n_sampled: usize,
    pub n_feasible: usize,
}

/// Latin hypercube sample: for each dimension, exactly one point per
/// equal-width stratum of `n` strata, uniformly jittered within the stratum.
pub fn lhs_sample(bounds: &[(f64, f64)], n: usize, stream: Stream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let d = bounds.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    for &(lo, hi) in bounds {
        // Random permutation of strata (Fisher-Yates), then jitter.
        let mut strata: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            strata.swap(i, j);
        }
        let col: Vec<f64> = strata
            .iter()
            .map(|&s| {
                let u: f64 = rng.random();
                lo + (hi - lo) * ((s as f64 + u) / n as f64)
            })
            .collect();
        columns.push(col);
    }
    (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect()
}

/// `a` dominates `b`: at least as good everywhere, strictly better somewhere.
fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strictly = false;
    for ((&av, &bv), sense) in a.iter().zip(b).zip(senses) {
        let (better, worse) = match sense {
            Sense::Min => (av < bv, av > bv),
            Sense::Max => (av > bv, av < bv),
        };
        if worse {
            return false;
        }
        if better {
            strictly = true;
        }
    }
    strictly
}

/// Keep exactly the non-dominated subset, preserving input order among
/// survivors.
pub fn pareto_filter(points: Vec<ParetoPoint>, senses: &[Sense]) -> Vec<ParetoPoint> {
    let mut archive: Vec<ParetoPoint> = Vec::new();
    'next: for p in points {
        debug_assert_eq!(p.objectives.len(), senses.len());
        for kept in &archive {
            if dominates(&kept.objectives, &p.objectives, senses) {
                continue 'next;
            }
        }
        archive.retain(|kept| !dominates(&p.objectives, &kept.objectives, senses));
        archive.push(p);
    }
    archive
}

/// Objective senses implied by the utility signs: objectives entering the
/// utility with -1 are larger-is-better.
pub fn senses_of(problem: &MultiObjectiveProblem) -> Vec<Sense> {
    problem
        .objectives
        .iter()
        .map(|o| if o.sense_in_utility < 0 { Sense::Max } else { Sense::Min })
        .collect()
}

/// Sample the design box, lift to epigraph-tight full points, drop infeasible
/// draws, and sort the rest.
pub fn pareto_baseline(
    problem: &MultiObjectiveProblem,
    n: usize,
    stream: Stream,
) -> crate::Result<ParetoSet> {
    let bounds = problem.design_bounds();
    let senses = senses_of(problem);
    let designs = lhs_sample(&bounds, n, stream);
    let mut feasible = Vec::new();
    for design in designs {
        let full = problem.epigraph_tight_point(&design)?;
        if problem.max_violation(&full) <= FEAS_TOL {
            let objectives = problem.evaluate_objectives_unchecked(&full);
            feasible.push(ParetoPoint { design, objectives });
        }
    }
    let n_feasible = feasible.len();
    let points = pareto_filter(feasible, &senses);
    Ok(ParetoSet {
        points,
        n_sampled: n,
        n_feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlayKind {
    Baseline,
    Preference,
}

#[derive(Debug, Clone)]
pub struct OverlayRow {
    pub kind: OverlayKind,
    pub objectives: Vec<f64>,
    /// Empirical probability mass; 0 for baseline cloud points.
    pub probability: f64,
}

/// Merge the baseline objective cloud with the preference-aware support
/// points (clustered at `cluster_tol`) for plotting.
pub fn compare_overlay(
    pareto: &ParetoSet,
    dd: &DecisionDistribution,
    problem: &MultiObjectiveProblem,
    cluster_tol: f64,
) -> crate::Result<Vec<OverlayRow>> {
    let mut rows: Vec<OverlayRow> = pareto
        .points
        .iter()
        .map(|p| OverlayRow {
            kind: OverlayKind::Baseline,
            objectives: p.objectives.clone(),
            probability: 0.0,
        })
        .collect();
    let summary = crate::propagate::discretize(dd, cluster_tol)?;
    for support in &summary.support {
        let full = problem.epigraph_tight_point(&support.design)?;
        rows.push(OverlayRow {
            kind: OverlayKind::Preference,
            objectives: problem.evaluate_objectives_unchecked(&full),
            probability: support.probability,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_case_study, CaseStudy};
    use crate::rng::{Purpose, Stream};

    fn pt(objectives: Vec<f64>) -> ParetoPoint {
        ParetoPoint {
            design: vec![],
            objectives,
        }
    }

    #[test]
    fn lhs_one_point_per_stratum() {
        let pts = lhs_sample(&[(0.0, 4.0)], 4, Stream::new(5, 0));
        let mut seen = [false; 4];
        for p in &pts {
            let s = (p[0].floor() as usize).min(3);
            assert!(!seen[s], "stratum {s} occupied twice");
            seen[s] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn lhs_case_bounds_occupancy_exact() {
        let p = build_case_study(CaseStudy::Ackermann);
        let bounds = p.design_bounds();
        let n = 1000;
        let pts = lhs_sample(&bounds, n, Stream::new(17, 0));
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            let mut seen = vec![false; n];
            for row in &pts {
                let s = (((row[k] - lo) / (hi - lo) * n as f64).floor() as usize).min(n - 1);
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
    }

    #[test]
    fn lhs_marginal_means() {
        let bounds = [(2.0, 10.0), (-4.0, 4.0)];
        let n = 10_000;
        let pts = lhs_sample(&bounds, n, Stream::new(23, 0));
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            let mean = pts.iter().map(|r| r[k]).sum::<f64>() / n as f64;
            let mid = 0.5 * (lo + hi);
            let sd = (hi - lo) / (12.0_f64).sqrt();
            assert!(
                (mean - mid).abs() <= 3.0 * sd / (n as f64).sqrt(),
                "dim {k}: {mean} vs {mid}"
            );
        }
    }

    #[test]
    fn filter_drops_dominated() {
        let senses = [Sense::Min, Sense::Min];
        let out = pareto_filter(vec![pt(vec![1.0, 1.0]), pt(vec![2.0, 2.0])], &senses);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].objectives, vec![1.0, 1.0]);
    }

    #[test]
    fn filter_keeps_incomparable() {
        let senses = [Sense::Min, Sense::Min];
        let out = pareto_filter(vec![pt(vec![1.0, 2.0]), pt(vec![2.0, 1.0])], &senses);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn filter_matches_bruteforce_oracle() {
        let senses = [Sense::Min, Sense::Min, Sense::Max, Sense::Min];
        let mut rng = Stream::new(31, 0).rng();
        use rand::Rng;
        let points: Vec<ParetoPoint> = (0..1000)
            .map(|_| pt((0..4).map(|_| rng.random::<f64>()).collect()))
            .collect();

        // Independent O(n^2) oracle over raw pairs.
        let oracle: Vec<usize> = (0..points.len())
            .filter(|&i| {
                !(0..points.len()).any(|j| {
                    if i == j {
                        return false;
                    }
                    let (a, b) = (&points[j].objectives, &points[i].objectives);
                    let mut le_all = true;
                    let mut lt_any = false;
                    for k in 0..4 {
                        let (x, y) = match senses[k] {
                            Sense::Min => (a[k], b[k]),
                            Sense::Max => (-a[k], -b[k]),
                        };
                        if x > y {
                            le_all = false;
                        }
                        if x < y {
                            lt_any = true;
                        }
                    }
                    le_all && lt_any
                })
            })
            .collect();

        let survivors = pareto_filter(points.clone(), &senses);
        assert_eq!(survivors.len(), oracle.len());
        for (s, &oi) in survivors.iter().zip(&oracle) {
            assert_eq!(s.objectives, points[oi].objectives);
        }
    }

    #[test]
    fn filter_is_idempotent() {
        let senses = [Sense::Min, Sense::Min];
        let mut rng = Stream::new(37, 0).rng();
        use rand::Rng;
        let points: Vec<ParetoPoint> = (0..500)
            .map(|_| pt(vec![rng.random(), rng.random()]))
            .collect();
        let once = pareto_filter(points, &senses);
        let twice = pareto_filter(once.clone(), &senses);
        assert_eq!(once.len(), twice.len());
        for (a, b) in once.iter().zip(&twice) {
            assert_eq!(a.objectives, b.objectives);
        }
    }

    #[test]
    fn baseline_discards_infeasible_draws() {
        let p = build_case_study(CaseStudy::Ackermann);
        let set = pareto_baseline(
            &p,
            2000,
            Stream::addressed(7, Purpose::Baseline, 0, 0),
        )
        .unwrap();
        assert_eq!(set.n_sampled, 2000);
        // The box contains infeasible corners (contact patch < 0), so some
        // draws must be dropped, and survivors must all be feasible.
        assert!(set.n_feasible < set.n_sampled);
        assert!(set.n_feasible > 0);
        for point in &set.points {
            let full = p.epigraph_tight_point(&point.design).unwrap();
            assert!(p.max_violation(&full) <= 1e-9);
        }
    }
}
