//! The `demo` command: emit the one-dimensional example data (histograms and
//! curve-aligned densities) as CSVs for external plotting.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use prefprop::demos::{
    default_discrete_scenarios, switch_probability, toy_distribution, ContinuousToySpec,
    DiscreteToySpec,
};
use prefprop::dist::PreferenceDistribution;
use prefprop::output::fmt_g17;
use prefprop::rng::{Purpose, Stream};

/// The five Dirichlet scenarios of the continuous example: three
/// concentrations of the symmetric mean, then the two tilted ones.
pub fn continuous_scenarios() -> Vec<(String, [f64; 2])> {
    vec![
        ("dir_0.5_0.5".into(), [0.5, 0.5]),
        ("dir_1_1".into(), [1.0, 1.0]),
        ("dir_2_2".into(), [2.0, 2.0]),
        ("dir_1_0.5".into(), [1.0, 0.5]),
        ("dir_0.5_1".into(), [0.5, 1.0]),
    ]
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Histogram helper over a fixed interval.
fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, usize, f64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[b] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            (
                lo + width * b as f64,
                lo + width * (b + 1) as f64,
                c,
                c as f64 / (values.len() as f64 * width),
            )
        })
        .collect()
}

/// Emit the two-line example: endpoint masses plus the weighted-slope
/// histogram per preference scenario.
pub fn demo_discrete(out: &Path, n: usize, seed: u64) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut summary = String::from("scenario,p_upper_closed_form,p_upper_empirical,n\n");
    let mut hist = String::from("scenario,bin_lo,bin_hi,count,density\n");
    for (k, (label, theta, sigma)) in default_discrete_scenarios().into_iter().enumerate() {
        let spec = DiscreteToySpec::worked_instance(theta, sigma);
        let closed = switch_probability(&spec)?;
        let dist = PreferenceDistribution::Mvn {
            mu: theta.to_vec(),
            sigma: sigma.iter().map(|r| r.to_vec()).collect(),
        };
        let draws = dist.sample(n, Stream::addressed(seed, Purpose::Demo, k as u64, 0))?;
        let slopes: Vec<f64> = draws
            .iter()
            .map(|b| b[0] * spec.b[0] + b[1] * spec.b[1])
            .collect();
        let p_emp = slopes.iter().filter(|&&s| s >= 0.0).count() as f64 / n as f64;
        summary.push_str(&format!(
            "{label},{},{},{n}\n",
            fmt_g17(closed),
            fmt_g17(p_emp)
        ));
        let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (blo, bhi, c, d) in histogram(&slopes, lo, hi + 1e-12, 40) {
            hist.push_str(&format!(
                "{label},{},{},{c},{}\n",
                fmt_g17(blo),
                fmt_g17(bhi),
                fmt_g17(d)
            ));
        }
    }
    let summary_path = out.join("demo_discrete.csv");
    let hist_path = out.join("demo_discrete_hist.csv");
    write(&summary_path, &summary)?;
    write(&hist_path, &hist)?;
    Ok(vec![summary_path, hist_path])
}

/// Emit the parabola example: optimizer histograms per Dirichlet scenario
/// (with the trade-off image of each bin center) plus the dense front curve.
pub fn demo_continuous(out: &Path, n: usize, seed: u64) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut hist = String::from("scenario,bin_lo,bin_hi,count,density,f1_center,f2_center\n");
    let mut front = String::from("x,f1,f2\n");
    let mut front_written = false;
    for (k, (label, alpha)) in continuous_scenarios().into_iter().enumerate() {
        let spec = ContinuousToySpec::worked_instance(alpha);
        let dist =
            toy_distribution(&spec, n, Stream::addressed(seed, Purpose::Demo, 8 + k as u64, 0))?;
        for (blo, bhi, c, d) in histogram(&dist.x_star, -1.5, -0.5, 50) {
            let center = 0.5 * (blo + bhi);
            let (f1, f2) = prefprop::demos::toy_front_point(center, spec.b);
            hist.push_str(&format!(
                "{label},{},{},{c},{},{},{}\n",
                fmt_g17(blo),
                fmt_g17(bhi),
                fmt_g17(d),
                fmt_g17(f1),
                fmt_g17(f2)
            ));
        }
        if !front_written {
            for (x, f1, f2) in &dist.front_grid {
                front.push_str(&format!("{},{},{}\n", fmt_g17(*x), fmt_g17(*f1), fmt_g17(*f2)));
            }
            front_written = true;
        }
    }
    let hist_path = out.join("demo_continuous_hist.csv");
    let front_path = out.join("demo_continuous_front.csv");
    write(&hist_path, &hist)?;
    write(&front_path, &front)?;
    Ok(vec![hist_path, front_path])
}
