//! On-disk layout of trial and benchmark outputs.
//!
//! ```text
//! <root>/<suite>/seed<N>/<method>/            single-platform suites
//! <root>/q1/seed<N>/<method>/<platform>/      metric-decrease suite
//! <root>/<suite>/report.json, summary.csv     benchmark aggregates
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{BenchmarkReport, Suite, TrialRecord};
use crate::config::RunConfig;
use crate::error::Result;

pub fn trial_dir(root: &Path, rec: &TrialRecord) -> PathBuf {
    let dir = root.join(rec.suite.name()).join(format!("seed{}", rec.seed)).join(rec.method.name());
    if rec.suite == Suite::Q1 {
        dir.join(rec.platform.to_string())
    } else {
        dir
    }
}

/// Writes the config echo, `trial.json`, `steps.csv` and optional
/// trajectory / footprint dumps; returns the directory.
pub fn write_trial(root: &Path, cfg: &RunConfig, rec: &TrialRecord) -> Result<PathBuf> {
    let dir = trial_dir(root, rec);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    fs::write(dir.join("trial.json"), serde_json::to_string_pretty(rec)?)?;

    let mut w = csv::Writer::from_path(dir.join("steps.csv"))?;
    w.write_record(["step", "executed_metric", "plan_cost", "ilqr_iters", "wall_ms", "progress", "footprint_area"])?;
    for t in 0..rec.metric_trace.len() {
        w.write_record([
            (t + 1).to_string(),
            rec.metric_trace[t].to_string(),
            rec.plan_cost[t].to_string(),
            rec.ilqr_iters[t].to_string(),
            rec.wall_ms[t].to_string(),
            rec.progress.get(t).map_or(String::new(), |p| p.to_string()),
            rec.footprint_area.get(t).map_or(String::new(), |a| a.to_string()),
        ])?;
    }
    w.flush()?;

    if !rec.states.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("trajectory.csv"))?;
        let n = rec.states[0].len();
        let m = rec.controls.first().map_or(0, Vec::len);
        let mut header = vec!["step".to_string()];
        header.extend((0..n).map(|i| format!("s{i}")));
        header.extend((0..m).map(|i| format!("u{i}")));
        w.write_record(&header)?;
        for (t, s) in rec.states.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(s.iter().map(|v| v.to_string()));
            match rec.controls.get(t) {
                Some(u) => row.extend(u.iter().map(|v| v.to_string())),
                None => row.extend((0..m).map(|_| String::new())),
            }
            w.write_record(&row)?;
        }
        w.flush()?;
    }

    if !rec.footprints.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("footprints.csv"))?;
        w.write_record(["step", "x", "y"])?;
        for (t, pts) in rec.footprints.iter().enumerate() {
            for p in pts {
                w.write_record([t.to_string(), p[0].to_string(), p[1].to_string()])?;
            }
        }
        w.flush()?;
    }
    Ok(dir)
}

/// Writes every trial plus `report.json`, `summary.csv` and the config echo.
pub fn write_benchmark(root: &Path, cfg: &RunConfig, report: &BenchmarkReport) -> Result<PathBuf> {
    let dir = root.join(report.suite.name());
    fs::create_dir_all(&dir)?;
    for rec in &report.trials {
        write_trial(root, cfg, rec)?;
    }
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    let mut f = fs::File::create(dir.join("summary.csv"))?;
    f.write_all(summary_csv(report).as_bytes())?;
    Ok(dir)
}

/// One row per (platform, method).
pub fn summary_csv(report: &BenchmarkReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if report.suite == Suite::Q1 {
        w.write_record([
            "platform",
            "method",
            "trials",
            "decreased",
            "plans",
            "plans_monotone",
            "median_initial_metric",
            "median_final_metric",
        ])
        .expect("in-memory write");
        for s in &report.metric_summaries {
            w.write_record([
                s.platform.to_string(),
                s.method.to_string(),
                s.trials.to_string(),
                s.decreased.to_string(),
                s.plans.to_string(),
                s.plans_monotone.to_string(),
                s.median_initial_metric.to_string(),
                s.median_final_metric.to_string(),
            ])
            .expect("in-memory write");
        }
    } else {
        w.write_record([
            "platform",
            "method",
            "trials",
            "budget",
            "successes",
            "success_under_budget",
            "median_steps",
            "lower_quartile_steps",
            "upper_quartile_steps",
            "median_wall_ms",
            "step_ratio",
        ])
        .expect("in-memory write");
        for s in &report.summaries {
            w.write_record([
                s.platform.to_string(),
                s.method.to_string(),
                s.trials.to_string(),
                s.budget.to_string(),
                s.successes.to_string(),
                s.success_under_budget.to_string(),
                s.median_steps.to_string(),
                s.lower_quartile_steps.to_string(),
                s.upper_quartile_steps.to_string(),
                s.median_wall_ms.to_string(),
                report.step_ratio.map_or(String::new(), |r| r.to_string()),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Human-readable aggregate table.
pub fn format_table(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    if report.suite == Suite::Q1 {
        out.push_str(&format!(
            "{:<18} {:>6} {:>10} {:>14} {:>14} {:>14}\n",
            "platform", "trials", "decreased", "monotone", "E(step 1)", "E(final)"
        ));
        for s in &report.metric_summaries {
            out.push_str(&format!(
                "{:<18} {:>6} {:>10} {:>14} {:>14.6} {:>14.6}\n",
                s.platform.to_string(),
                s.trials,
                s.decreased,
                format!("{}/{}", s.plans_monotone, s.plans),
                s.median_initial_metric,
                s.median_final_metric
            ));
        }
        return out;
    }
    out.push_str(&format!(
        "{:<18} {:<9} {:>8} {:>12} {:>10} {:>16}\n",
        "platform", "method", "success", "under budget", "median", "quartiles"
    ));
    for s in &report.summaries {
        out.push_str(&format!(
            "{:<18} {:<9} {:>8} {:>12} {:>10.1} {:>16}\n",
            s.platform.to_string(),
            s.method.to_string(),
            format!("{}/{}", s.successes, s.trials),
            format!("{}/{}", s.success_under_budget, s.trials),
            s.median_steps,
            format!("{:.1}-{:.1}", s.lower_quartile_steps, s.upper_quartile_steps)
        ));
    }
    if let Some(r) = report.step_ratio {
        out.push_str(&format!("median steps vec/baseline: {r:.3}\n"));
    }
    out
}
