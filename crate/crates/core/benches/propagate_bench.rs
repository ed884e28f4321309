//! Propagation throughput: sequential versus parallel batch mapping.
//!
//! The Monte Carlo loop is a pure map over draws, so the parallel path
//! (rayon, `parallel` feature) must agree bit-for-bit with the sequential
//! fallback; these benches measure what the feature buys.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use prefprop::dist::PreferenceDistribution;
use prefprop::problem::{build_case_study, CaseStudy};
use prefprop::propagate::{propagate, PropagateOptions};

fn bench_propagate(c: &mut Criterion) {
    let dist = PreferenceDistribution::tmvn_isotropic(vec![1.0; 4], 0.5);
    for (label, case) in [
        ("case1_lp", CaseStudy::Ackermann),
        ("case2_qp", CaseStudy::PivotSkid),
    ] {
        let problem = build_case_study(case);
        let mut group = c.benchmark_group(label);
        for workers in [Some(1), None] {
            let name = match workers {
                Some(1) => "sequential",
                _ => "parallel",
            };
            group.bench_with_input(BenchmarkId::new(name, 400), &workers, |b, &workers| {
                let opts = PropagateOptions {
                    workers,
                    ..Default::default()
                };
                b.iter(|| propagate(&problem, &dist, 400, 7, &opts).unwrap());
            });
        }
        group.finish();
    }
}

fn bench_solvers(c: &mut Criterion) {
    let lp = build_case_study(CaseStudy::Ackermann)
        .scalarize(&[1.0, 1.3, 0.7, 1.1])
        .unwrap();
    let qp = build_case_study(CaseStudy::PivotSkid)
        .scalarize(&[1.0, 1.3, 0.7, 1.1])
        .unwrap();
    let cfg = prefprop::solver::SolverConfig::default();
    c.bench_function("solve_lp_case1", |b| {
        b.iter(|| prefprop::solver::solve_lp(&lp, &cfg))
    });
    c.bench_function("solve_qp_case2", |b| {
        b.iter(|| prefprop::solver::solve_qp(&qp, &cfg))
    });
}

criterion_group!(benches, bench_propagate, bench_solvers);
criterion_main!(benches);
