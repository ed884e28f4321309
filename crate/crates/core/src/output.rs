//! CSV and metadata emission for run artifacts.
//!
//! Every float is printed with 17 significant digits (`{:.16e}`), enough to
//! round-trip f64 exactly, so repeated runs with the same configuration can
//! be compared byte for byte. Column schemas are documented in the README;
//! `schema_columns` exposes them for the verification command.

use std::io::Write;

use crate::frechet::FrechetSummary;
use crate::pareto::{OverlayKind, OverlayRow, ParetoSet};
use crate::propagate::{CorrelationReport, DecisionDistribution, DiscreteSummary, HistogramTable};
use crate::sensitivity::SensitivityReport;
use crate::Result;

/// 17-significant-digit rendering used for all floating-point output.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// `samples.csv`: one row per recorded draw.
pub fn write_samples_csv(w: &mut impl Write, dd: &DecisionDistribution) -> Result<()> {
    let m = dd.objective_names.len();
    let mut header = vec!["index".to_string()];
    header.extend((1..=m).map(|i| format!("beta_{i}")));
    header.extend(dd.design_names.iter().cloned());
    header.extend(dd.objective_names.iter().cloned());
    header.push("status".into());
    writeln!(w, "{}", header.join(","))?;
    for s in &dd.samples {
        let mut row = vec![s.index.to_string()];
        row.extend(s.beta.iter().map(|&v| fmt_g17(v)));
        row.extend(s.x_star.iter().map(|&v| fmt_g17(v)));
        row.extend(s.objectives.iter().map(|&v| fmt_g17(v)));
        row.push(s.status.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `discrete_summary.csv`: support designs with probabilities and counts.
pub fn write_discrete_summary_csv(
    w: &mut impl Write,
    summary: &DiscreteSummary,
    design_names: &[String],
) -> Result<()> {
    let mut header: Vec<String> = design_names.to_vec();
    header.push("probability".into());
    header.push("count".into());
    writeln!(w, "{}", header.join(","))?;
    for p in &summary.support {
        let mut row: Vec<String> = p.design.iter().map(|&v| fmt_g17(v)).collect();
        row.push(fmt_g17(p.probability));
        row.push(p.count.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `correlations.csv`: long form, one row per (method, pair).
pub fn write_correlations_csv(w: &mut impl Write, report: &CorrelationReport) -> Result<()> {
    writeln!(w, "method,variable_a,variable_b,value,degenerate")?;
    let d = report.variables.len();
    for (method, matrix) in [("pearson", &report.pearson), ("spearman", &report.spearman)] {
        for i in 0..d {
            for j in 0..d {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    method,
                    report.variables[i],
                    report.variables[j],
                    fmt_g17(matrix[i][j]),
                    report.degenerate[i] || report.degenerate[j]
                )?;
            }
        }
    }
    Ok(())
}

/// `histograms.csv`: per-variable bins.
pub fn write_histograms_csv(w: &mut impl Write, tables: &[HistogramTable]) -> Result<()> {
    writeln!(w, "variable,bin_lo,bin_hi,count,density")?;
    for t in tables {
        for (b, &count) in t.counts.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                t.variable,
                fmt_g17(t.edges[b]),
                fmt_g17(t.edges[b + 1]),
                count,
                fmt_g17(t.densities[b])
            )?;
        }
    }
    Ok(())
}

/// `sensitivity.csv`: one row per (objective, variable).
pub fn write_sensitivity_csv(w: &mut impl Write, reports: &[SensitivityReport]) -> Result<()> {
    writeln!(w, "objective,variable,sobol_first,sobol_total,shapley")?;
    for r in reports {
        for (k, name) in r.variables.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.objective,
                name,
                fmt_g17(r.sobol_first[k]),
                fmt_g17(r.sobol_total[k]),
                fmt_g17(r.shapley[k])
            )?;
        }
    }
    Ok(())
}

/// `sensitivity_meta.json`: estimator settings and degeneracy flags.
pub fn write_sensitivity_meta_json(
    w: &mut impl Write,
    reports: &[SensitivityReport],
) -> Result<()> {
    let meta: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "objective": r.objective,
                "degenerate": r.degenerate,
                "n_eval": r.n_eval,
                "settings": r.settings,
            })
        })
        .collect();
    writeln!(w, "{}", serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// `frechet.csv`: one row per scenario.
pub fn write_frechet_csv(
    w: &mut impl Write,
    summaries: &[FrechetSummary],
    design_names: &[String],
) -> Result<()> {
    let mut header = vec![
        "scenario".to_string(),
        "n".into(),
        "variance".into(),
        "ci99_lo".into(),
        "ci99_hi".into(),
    ];
    header.extend(design_names.iter().map(|n| format!("mean_{n}")));
    header.push("distribution".into());
    writeln!(w, "{}", header.join(","))?;
    for s in summaries {
        let mut row = vec![
            csv_escape(&s.scenario),
            s.n.to_string(),
            fmt_g17(s.variance),
            fmt_g17(s.ci99.0),
            fmt_g17(s.ci99.1),
        ];
        row.extend(s.mean.iter().map(|&v| fmt_g17(v)));
        row.push(csv_escape(&serde_json::to_string(&s.dist_spec)?));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `pareto_baseline.csv`: the non-dominated feasible sample.
pub fn write_pareto_csv(
    w: &mut impl Write,
    set: &ParetoSet,
    design_names: &[String],
    objective_names: &[String],
) -> Result<()> {
    let mut header: Vec<String> = design_names.to_vec();
    header.extend(objective_names.iter().cloned());
    writeln!(w, "{}", header.join(","))?;
    for p in &set.points {
        let mut row: Vec<String> = p.design.iter().map(|&v| fmt_g17(v)).collect();
        row.extend(p.objectives.iter().map(|&v| fmt_g17(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `overlay.csv`: baseline cloud and preference-aware mass points.
pub fn write_overlay_csv(
    w: &mut impl Write,
    rows: &[OverlayRow],
    objective_names: &[String],
) -> Result<()> {
    let mut header = vec!["kind".to_string()];
    header.extend(objective_names.iter().cloned());
    header.push("probability".into());
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let kind = match r.kind {
            OverlayKind::Baseline => "baseline",
            OverlayKind::Preference => "preference",
        };
        let mut row = vec![kind.to_string()];
        row.extend(r.objectives.iter().map(|&v| fmt_g17(v)));
        row.push(fmt_g17(r.probability));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Expected column lists, by artifact file name, for schema validation.
pub fn schema_columns(
    file: &str,
    design_names: &[String],
    objective_names: &[String],
) -> Option<Vec<String>> {
    let m = objective_names.len();
    match file {
        "samples.csv" => {
            let mut cols = vec!["index".to_string()];
            cols.extend((1..=m).map(|i| format!("beta_{i}")));
            cols.extend(design_names.iter().cloned());
            cols.extend(objective_names.iter().cloned());
            cols.push("status".into());
            Some(cols)
        }
        "discrete_summary.csv" => {
            let mut cols: Vec<String> = design_names.to_vec();
            cols.push("probability".into());
            cols.push("count".into());
            Some(cols)
        }
        "correlations.csv" => Some(
            ["method", "variable_a", "variable_b", "value", "degenerate"]
                .map(String::from)
                .to_vec(),
        ),
        "histograms.csv" => Some(
            ["variable", "bin_lo", "bin_hi", "count", "density"]
                .map(String::from)
                .to_vec(),
        ),
        "sensitivity.csv" => Some(
            ["objective", "variable", "sobol_first", "sobol_total", "shapley"]
                .map(String::from)
                .to_vec(),
        ),
        "frechet.csv" => {
            let mut cols = vec![
                "scenario".to_string(),
                "n".into(),
                "variance".into(),
                "ci99_lo".into(),
                "ci99_hi".into(),
            ];
            cols.extend(design_names.iter().map(|n| format!("mean_{n}")));
            cols.push("distribution".into());
            Some(cols)
        }
        "pareto_baseline.csv" => {
            let mut cols: Vec<String> = design_names.to_vec();
            cols.extend(objective_names.iter().cloned());
            Some(cols)
        }
        "overlay.csv" => {
            let mut cols = vec!["kind".to_string()];
            cols.extend(objective_names.iter().cloned());
            cols.push("probability".into());
            Some(cols)
        }
        _ => None,
    }
}
