//! Command-line behavior: exit codes, file emission, schema, and the
//! misconfiguration path of the verification oracles.

use std::path::{Path, PathBuf};
use std::process::Command;

use prefprop::solver::{PivotRule, SolverConfig};
use prefprop_cli::verify::lp_vertex_oracle;
use prefprop_cli::{EXIT_ANALYSIS, EXIT_CONFIG};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prefprop"))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("prefprop_cli_{}_{name}", std::process::id()))
}

#[test]
fn unknown_problem_is_a_config_error() {
    let out = bin()
        .args(["run", "--problem", "case9_hovercraft", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown problem"), "{err}");
}

#[test]
fn zero_samples_is_a_config_error() {
    let out = bin()
        .args(["run", "--problem", "toy_continuous", "--n", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn unknown_analysis_is_a_config_error() {
    let out = bin()
        .args([
            "run",
            "--problem",
            "toy_discrete",
            "--n",
            "5",
            "--analyses",
            "discrete,frobnicate",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn failure_budget_is_an_analysis_error() {
    // MVN weights flip the toy quadratic concave half the time; the failure
    // budget must trip and surface as exit 1.
    let dir = tmp("budget");
    let out = bin()
        .args([
            "run",
            "--problem",
            "toy_continuous",
            "--dist",
            r#"{"type":"mvn","mu":[0.0,0.0],"sigma":[[1.0,0.0],[0.0,1.0]]}"#,
            "--n",
            "100",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(out.status.code(), Some(EXIT_ANALYSIS));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("failed"), "{err}");
}

#[test]
fn run_emits_expected_files() {
    let dir = tmp("files");
    let out = bin()
        .args([
            "run",
            "--problem",
            "case1_ackermann",
            "--n",
            "120",
            "--seed",
            "7",
            "--out",
            dir.to_str().unwrap(),
            "--analyses",
            "discrete,correlations,histograms,pareto,overlay",
            "--lhs-budget",
            "2000",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "samples.csv",
        "discrete_summary.csv",
        "correlations.csv",
        "histograms.csv",
        "pareto_baseline.csv",
        "overlay.csv",
        "run_manifest.json",
    ] {
        assert!(dir.join(name).exists(), "missing {name}");
    }
    // Case 1's support is a handful of designs (the rarest cell may not be
    // realized at this sample size).
    let summary = std::fs::read_to_string(dir.join("discrete_summary.csv")).unwrap();
    let rows = summary.lines().count() - 1;
    assert!((4..=5).contains(&rows), "{summary}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn scenario_file_drives_frechet_rows() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/tables23.json");
    let dir = tmp("scen");
    let out = bin()
        .args([
            "run",
            "--problem",
            "case2_pivot_skid",
            "--n",
            "80",
            "--analyses",
            "frechet",
            "--scenario-file",
            configs.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let frechet = std::fs::read_to_string(dir.join("frechet.csv")).unwrap();
    assert_eq!(frechet.lines().count(), 6, "{frechet}");
    assert!(frechet.lines().nth(1).unwrap().starts_with("baseline,"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn problem_file_round_trips_through_the_cli() {
    let dir = tmp("probfile");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    let problem = prefprop::problem::build_case_study(prefprop::problem::CaseStudy::Ackermann);
    std::fs::write(&path, prefprop::problem::to_json(&problem)).unwrap();
    let out = bin()
        .args([
            "run",
            "--problem",
            path.to_str().unwrap(),
            "--n",
            "40",
            "--out",
            dir.join("out").to_str().unwrap(),
            "--analyses",
            "discrete",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_only_filter() {
    let out = bin().args(["verify", "--only", "frechet"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("frechet"));
    assert!(!stdout.contains("lp_vertex_oracle"));

    let bogus = bin().args(["verify", "--only", "bogus"]).output().unwrap();
    assert_eq!(bogus.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn loosened_tolerance_breaks_the_vertex_oracle() {
    // The verification gate must be sharp enough to catch a miconfigured
    // solver: a 1e-2 optimality tolerance stops the simplex early.
    let sloppy = SolverConfig {
        opt_tol: 1e-2,
        feas_tol: 1e-8,
        max_iter: 0,
        pivot_rule: PivotRule::DantzigWithBlandFallback,
    };
    assert!(lp_vertex_oracle(&sloppy).is_err());
    assert!(lp_vertex_oracle(&SolverConfig::default()).is_ok());
}

#[test]
fn demo_commands_emit_datasets() {
    let dir = tmp("demo");
    for which in ["discrete", "continuous"] {
        let out = bin()
            .args([
                "demo",
                which,
                "--n",
                "5000",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in [
        "demo_discrete.csv",
        "demo_discrete_hist.csv",
        "demo_continuous_hist.csv",
        "demo_continuous_front.csv",
    ] {
        assert!(dir.join(name).exists(), "missing {name}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}
