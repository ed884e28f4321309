//! The `run` command: propagate a preference distribution through a problem
//! and emit the requested analysis artifacts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use prefprop::dist::PreferenceDistribution;
use prefprop::frechet::{frechet_summary, scenario_sweep};
use prefprop::output;
use prefprop::pareto::{compare_overlay, pareto_baseline};
use prefprop::problem::{builtin_problem, MultiObjectiveProblem, BUILTIN_NAMES};
use prefprop::propagate::{discretize, marginal_histograms, propagate, PropagateOptions};
use prefprop::rng::{Purpose, Stream};
use prefprop::sensitivity::{build_report, ReportOptions};

use crate::manifest::RunManifest;

/// Analyses the run command understands. `discrete`, `correlations`,
/// `sensitivity`, `frechet`, `pareto` and `overlay` come from the artifact
/// contract; `histograms` additionally emits the marginal tables.
pub const KNOWN_ANALYSES: [&str; 7] = [
    "discrete",
    "correlations",
    "histograms",
    "sensitivity",
    "frechet",
    "pareto",
    "overlay",
];

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub problem: String,
    pub distribution: PreferenceDistribution,
    pub n_samples: usize,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
    pub analyses: Vec<String>,
    pub cluster_tol: f64,
    pub scenario_file: Option<PathBuf>,
    pub lhs_budget: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct ScenarioEntry {
    label: String,
    distribution: PreferenceDistribution,
}

/// Resolve a problem argument: a built-in name or a path to a problem-spec
/// file.
pub fn load_problem(arg: &str) -> anyhow::Result<MultiObjectiveProblem> {
    if let Some(p) = builtin_problem(arg) {
        return Ok(p);
    }
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading problem file {}", path.display()))?;
        return Ok(prefprop::problem::from_json(&text)?);
    }
    bail!(
        "unknown problem `{arg}`: not a built-in ({}) and not a file",
        BUILTIN_NAMES.join(", ")
    )
}

/// Parse a distribution argument: inline JSON or a path to a JSON file.
pub fn load_distribution(arg: &str) -> anyhow::Result<PreferenceDistribution> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading distribution file {arg}"))?
    };
    let dist: PreferenceDistribution =
        serde_json::from_str(&text).context("parsing distribution spec")?;
    dist.validate()?;
    Ok(dist)
}

/// The default preference model of the vehicle studies, adapted to the
/// problem dimension.
pub fn default_distribution(m: usize, eps: f64) -> PreferenceDistribution {
    let mut d = PreferenceDistribution::tmvn_isotropic(vec![1.0; m], 0.5);
    if let PreferenceDistribution::Tmvn { eps: e, .. } = &mut d {
        *e = eps;
    }
    d
}

pub fn validate_config(cfg: &RunConfig) -> anyhow::Result<()> {
    if cfg.n_samples == 0 {
        bail!("--n must be >= 1");
    }
    if !(cfg.cluster_tol > 0.0) {
        bail!("--cluster-tol must be > 0");
    }
    let known: BTreeSet<&str> = KNOWN_ANALYSES.into_iter().collect();
    for a in &cfg.analyses {
        if !known.contains(a.as_str()) {
            bail!(
                "unknown analysis `{a}` (expected a subset of {})",
                KNOWN_ANALYSES.join(",")
            );
        }
    }
    Ok(())
}

fn write_file<F>(dir: &Path, name: &str, writer: F) -> anyhow::Result<PathBuf>
where
    F: FnOnce(&mut Vec<u8>) -> prefprop::Result<()>,
{
    let mut buf = Vec::new();
    writer(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Execute a full run. Returns the list of files written.
pub fn cmd_run(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    validate_config(cfg)?;
    let started = Instant::now();
    let problem = load_problem(&cfg.problem)?;
    fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;

    let opts = PropagateOptions {
        workers: cfg.workers,
        ..Default::default()
    };
    let dd = propagate(
        &problem,
        &cfg.distribution,
        cfg.n_samples,
        cfg.master_seed,
        &opts,
    )?;

    let mut files = Vec::new();
    files.push(write_file(&cfg.output_dir, "samples.csv", |w| {
        output::write_samples_csv(w, &dd)
    })?);

    let wants = |name: &str| cfg.analyses.iter().any(|a| a == name);

    if wants("discrete") {
        let summary = discretize(&dd, cfg.cluster_tol)?;
        files.push(write_file(&cfg.output_dir, "discrete_summary.csv", |w| {
            output::write_discrete_summary_csv(w, &summary, &dd.design_names)
        })?);
    }
    if wants("correlations") {
        let report = prefprop::propagate::correlations(&dd)?;
        files.push(write_file(&cfg.output_dir, "correlations.csv", |w| {
            output::write_correlations_csv(w, &report)
        })?);
    }
    if wants("histograms") {
        let tables = marginal_histograms(&dd, 20)?;
        files.push(write_file(&cfg.output_dir, "histograms.csv", |w| {
            output::write_histograms_csv(w, &tables)
        })?);
    }
    if wants("sensitivity") {
        let reports = build_report(&dd, &problem, &ReportOptions::default())?;
        files.push(write_file(&cfg.output_dir, "sensitivity.csv", |w| {
            output::write_sensitivity_csv(w, &reports)
        })?);
        files.push(write_file(&cfg.output_dir, "sensitivity_meta.json", |w| {
            output::write_sensitivity_meta_json(w, &reports)
        })?);
    }
    if wants("frechet") {
        let bounds = problem.design_bounds();
        let summaries = match &cfg.scenario_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading scenario file {}", path.display()))?;
                let entries: Vec<ScenarioEntry> =
                    serde_json::from_str(&text).context("parsing scenario file")?;
                if entries.is_empty() {
                    bail!("scenario file lists no scenarios");
                }
                let scenarios: Vec<(String, PreferenceDistribution)> = entries
                    .into_iter()
                    .map(|e| (e.label, e.distribution))
                    .collect();
                scenario_sweep(&problem, &scenarios, cfg.n_samples, cfg.master_seed, &opts)?
            }
            None => vec![frechet_summary(&dd, &bounds, "run")?],
        };
        files.push(write_file(&cfg.output_dir, "frechet.csv", |w| {
            output::write_frechet_csv(w, &summaries, &dd.design_names)
        })?);
    }
    let pareto_set = if wants("pareto") || wants("overlay") {
        Some(pareto_baseline(
            &problem,
            cfg.lhs_budget,
            Stream::addressed(cfg.master_seed, Purpose::Baseline, 0, 0),
        )?)
    } else {
        None
    };
    if let Some(set) = &pareto_set {
        if wants("pareto") {
            files.push(write_file(&cfg.output_dir, "pareto_baseline.csv", |w| {
                output::write_pareto_csv(w, set, &dd.design_names, &dd.objective_names)
            })?);
        }
        if wants("overlay") {
            let rows = compare_overlay(set, &dd, &problem, cfg.cluster_tol)?;
            files.push(write_file(&cfg.output_dir, "overlay.csv", |w| {
                output::write_overlay_csv(w, &rows, &dd.objective_names)
            })?);
        }
    }

    let manifest = RunManifest::collect(cfg, &files, dd.n_failed, started.elapsed())?;
    let manifest_path = cfg.output_dir.join("run_manifest.json");
    fs::write(&manifest_path, manifest.to_json()?)?;
    files.push(manifest_path);
    Ok(files)
}

/// Shared argument-to-config assembly for the binary and the tests.
#[allow(clippy::too_many_arguments)]
pub fn build_config(
    problem: String,
    dist_arg: Option<&str>,
    eps: f64,
    n: usize,
    seed: u64,
    workers: Option<usize>,
    out: PathBuf,
    analyses_arg: &str,
    cluster_tol: f64,
    scenario_file: Option<PathBuf>,
    lhs_budget: usize,
) -> anyhow::Result<RunConfig> {
    let problem_model = load_problem(&problem)?;
    let distribution = match dist_arg {
        Some(arg) => load_distribution(arg)?,
        None => default_distribution(problem_model.n_objectives(), eps),
    };
    if distribution.dim() != problem_model.n_objectives() {
        return Err(anyhow!(
            "distribution dimension {} does not match the problem's {} objectives",
            distribution.dim(),
            problem_model.n_objectives()
        ));
    }
    let analyses: Vec<String> = analyses_arg
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let cfg = RunConfig {
        problem,
        distribution,
        n_samples: n,
        master_seed: seed,
        workers,
        output_dir: out,
        analyses,
        cluster_tol,
        scenario_file,
        lhs_budget,
    };
    validate_config(&cfg)?;
    Ok(cfg)
}

pub use prefprop::pareto::DEFAULT_LHS_BUDGET as DEFAULT_PARETO_BUDGET;
